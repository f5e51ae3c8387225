//! Choice rules, exact choice sets, and the revealed-ordering constructions.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{scmp_hull, Permutation, Point, Problem};
use crate::lp::{HPolyhedron, LinConstraint, Sense};
use crate::rational::Rat;
use crate::real::{Cmp, Real, Scalar, Truth};
use crate::weights::{NormId, Penalty, WeightSet, WeightSetJson};

/// The rule families.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// `max_x min_{w∈W} Σ w_i x̃_i`.
    RelativeFair(WeightSet),
    /// The weakly Pareto point proportional to `b(X)`.
    Ks,
    /// `Π x_i`, unnormalized.
    Nash,
    /// Leximin on the normalized vector.
    RelativeLeximin,
    /// `max_i x̃_i`.
    RelativeMax,
    /// `min_i x_i`, unnormalized.
    Egalitarian,
    /// `x_k` for a fixed individual (0-based), unnormalized.
    Dictator(usize),
    /// All weakly Pareto points.
    WeakParetoSet,
    /// `mean(x̃) − θ·SD(x̃)`.
    MeanSd(Rat),
    /// `mean(x̃) − θ‖x̃ − mean(x̃)·1‖`.
    MeanNorm(Penalty),
    /// `α₁ min x̃ + α₂ max x̃`.
    MinMaxBlend(Rat, Rat),
}

/// A rule together with its responsibility exponent `p`: `x̃_i = x_i / b_i^p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RuleJson", into = "RuleJson")]
pub struct Rule {
    kind: RuleKind,
    p: Rat,
}

impl Rule {
    pub fn new(kind: RuleKind, p: Rat) -> Result<Rule> {
        if p.is_negative() || p > Rat::one() {
            return Err(Error::InvalidRule(format!("responsibility exponent {p} outside [0,1]")));
        }
        match &kind {
            RuleKind::RelativeFair(w) if !w.is_symmetric() => {
                return Err(Error::InvalidRule("relative fair rules need a symmetric weight set".into()));
            }
            RuleKind::Ks if !(p.is_zero() || p == Rat::one()) => {
                return Err(Error::InvalidRule("the KS rule supports p = 0 or p = 1 only".into()));
            }
            RuleKind::MeanSd(t) if t.is_negative() => {
                return Err(Error::InvalidRule(format!("theta {t} is negative")));
            }
            RuleKind::MinMaxBlend(a1, a2) if !a1.is_positive() || !a2.is_positive() || a1 == a2 => {
                return Err(Error::InvalidRule("minmax blend needs alpha1, alpha2 > 0 and alpha1 != alpha2".into()));
            }
            _ => {}
        }
        Ok(Rule { kind, p })
    }

    /// The rule with the default exponent `p = 1`.
    pub fn of(kind: RuleKind) -> Result<Rule> {
        Rule::new(kind, Rat::one())
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn p(&self) -> &Rat {
        &self.p
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            RuleKind::RelativeFair(_) => "relative_fair",
            RuleKind::Ks => "ks",
            RuleKind::Nash => "nash",
            RuleKind::RelativeLeximin => "leximin",
            RuleKind::RelativeMax => "relative_max",
            RuleKind::Egalitarian => "egalitarian",
            RuleKind::Dictator(_) => "dictator",
            RuleKind::WeakParetoSet => "weak_pareto_set",
            RuleKind::MeanSd(_) => "mean_sd",
            RuleKind::MeanNorm(_) => "mean_norm",
            RuleKind::MinMaxBlend(..) => "minmax_blend",
        }
    }

    /// Rules whose objective ignores abilities.
    fn unnormalized(&self) -> bool {
        matches!(self.kind, RuleKind::Nash | RuleKind::Egalitarian | RuleKind::Dictator(_) | RuleKind::WeakParetoSet)
    }

    fn penalty(&self) -> Option<Penalty> {
        match &self.kind {
            RuleKind::MeanSd(t) => Some(Penalty { norm: NormId::Sd, theta: t.clone() }),
            RuleKind::MeanNorm(p) => Some(p.clone()),
            _ => None,
        }
    }

    /// Whether the objective is nondecreasing along ≤ in dimension `n`, so
    /// that maximization over a union of boxes reduces to the corners.
    pub fn is_monotone(&self, n: usize) -> bool {
        self.penalty().is_none_or(|p| p.is_monotone(n))
    }

    /// Welfare of an already normalized vector, with no problem context.
    pub fn evaluate_normalized(&self, y: &[Scalar]) -> Result<Welfare> {
        if let RuleKind::WeakParetoSet = self.kind {
            return Err(Error::InvalidRule("weak_pareto_set has no context-free welfare".into()));
        }
        if let RuleKind::Dictator(k) = self.kind {
            if k >= y.len() {
                return Err(Error::InvalidRule(format!("dictator index {} exceeds dimension {}", k + 1, y.len())));
            }
        }
        Ok(self.welfare(y))
    }

    fn welfare(&self, y: &[Scalar]) -> Welfare {
        let min = || y.iter().min().cloned().expect("nonempty");
        let max = || y.iter().max().cloned().expect("nonempty");
        Welfare::Scalar(match &self.kind {
            RuleKind::RelativeFair(w) => w.min_dot_scalar(y),
            RuleKind::Ks | RuleKind::Egalitarian => min(),
            RuleKind::Nash => y.iter().fold(Scalar::Exact(Rat::one()), |a, v| a.mul(v)),
            RuleKind::RelativeLeximin => {
                let mut s = y.to_vec();
                s.sort();
                return Welfare::Lex(s);
            }
            RuleKind::RelativeMax => max(),
            RuleKind::Dictator(k) => y[*k].clone(),
            RuleKind::WeakParetoSet => Scalar::Exact(Rat::one()),
            RuleKind::MeanSd(_) | RuleKind::MeanNorm(_) => self.penalty().expect("penalty").mean_minus_norm(y),
            RuleKind::MinMaxBlend(a1, a2) => {
                Scalar::Exact(a1.clone()).mul(&min()).add(&Scalar::Exact(a2.clone()).mul(&max()))
            }
        })
    }

    fn scales(&self, b: &Point) -> Result<Scales> {
        if self.unnormalized() || self.p.is_zero() {
            return Ok(Scales::Exact(vec![Rat::one(); b.dim()]));
        }
        if self.p == Rat::one() {
            return Ok(Scales::Exact(b.iter().map(Rat::recip).collect()));
        }
        let one = Real::from_rat(&Rat::one());
        let s = b.iter().map(|bi| Real::pow_rat(bi, &self.p).map(|r| one.div(&r))).collect::<Result<_>>()?;
        Ok(Scales::Approx(s))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match &self.kind {
            RuleKind::RelativeFair(w) => write!(f, "(W with {} vertices)", w.vertices().len())?,
            RuleKind::Dictator(k) => write!(f, "({})", k + 1)?,
            RuleKind::MeanSd(t) => write!(f, "(theta={t})")?,
            RuleKind::MeanNorm(p) => write!(f, "({:?}, theta={})", p.norm, p.theta)?,
            RuleKind::MinMaxBlend(a, b) => write!(f, "({a},{b})")?,
            _ => {}
        }
        if self.p != Rat::one() && !self.unnormalized() {
            write!(f, "[p={}]", self.p)?;
        }
        Ok(())
    }
}

/// On-disk rule format.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RuleJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Rat>,
    /// Penalty norm for `mean_norm`: `sup`, `l1`, `euclidean` or `sd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormId>,
    /// 1-based individual for `dictator`; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

impl TryFrom<RuleJson> for Rule {
    type Error = Error;
    fn try_from(j: RuleJson) -> Result<Rule> {
        let need = |v: Option<Rat>, field: &str| {
            v.ok_or_else(|| Error::InvalidRule(format!("rule kind {} requires field {field}", j.kind)))
        };
        let kind = match j.kind.as_str() {
            "relative_fair" => {
                let w = j.weights.clone().ok_or_else(|| Error::InvalidRule("relative_fair requires weights".into()))?;
                RuleKind::RelativeFair(WeightSet::try_from(w)?)
            }
            "ks" => RuleKind::Ks,
            "nash" => RuleKind::Nash,
            "leximin" => RuleKind::RelativeLeximin,
            "relative_max" => RuleKind::RelativeMax,
            "egalitarian" => RuleKind::Egalitarian,
            "dictator" => match j.index.unwrap_or(1) {
                0 => return Err(Error::InvalidRule("dictator index is 1-based".into())),
                k => RuleKind::Dictator(k - 1),
            },
            "weak_pareto_set" => RuleKind::WeakParetoSet,
            "mean_sd" => RuleKind::MeanSd(need(j.theta.clone(), "theta")?),
            "mean_norm" => {
                let norm = j.norm.ok_or_else(|| Error::InvalidRule("mean_norm requires norm".into()))?;
                RuleKind::MeanNorm(Penalty::new(norm, need(j.theta.clone(), "theta")?)?)
            }
            "minmax_blend" => RuleKind::MinMaxBlend(need(j.alpha1.clone(), "alpha1")?, need(j.alpha2.clone(), "alpha2")?),
            other => return Err(Error::InvalidRule(format!("unknown rule kind {other:?}"))),
        };
        Rule::new(kind, j.p.unwrap_or_else(Rat::one))
    }
}

impl From<Rule> for RuleJson {
    fn from(r: Rule) -> RuleJson {
        let mut j = RuleJson { kind: r.name().to_string(), ..Default::default() };
        match r.kind {
            RuleKind::RelativeFair(w) => j.weights = Some(w.into()),
            RuleKind::Dictator(k) => j.index = Some(k + 1),
            RuleKind::MeanSd(t) => j.theta = Some(t),
            RuleKind::MeanNorm(p) => {
                j.norm = Some(p.norm);
                j.theta = Some(p.theta);
            }
            RuleKind::MinMaxBlend(a, b) => {
                j.alpha1 = Some(a);
                j.alpha2 = Some(b);
            }
            _ => {}
        }
        if r.p != Rat::one() {
            j.p = Some(r.p);
        }
        j
    }
}

/// A welfare value: a scalar, or a sorted vector compared lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Welfare {
    Scalar(Scalar),
    Lex(Vec<Scalar>),
}

impl Welfare {
    /// Tolerance-aware comparison; lexicographic vectors compare entrywise.
    pub fn cmp_tol(&self, o: &Welfare) -> Cmp {
        match (self, o) {
            (Welfare::Scalar(a), Welfare::Scalar(b)) => a.cmp_tol(b),
            (Welfare::Lex(a), Welfare::Lex(b)) => {
                for (x, y) in a.iter().zip(b) {
                    match x.cmp_tol(y) {
                        Cmp::Equal => continue,
                        c => return c,
                    }
                }
                Cmp::Equal
            }
            _ => panic!("comparing welfare values of different shapes"),
        }
    }

    pub fn at_least(&self, o: &Welfare) -> Truth {
        match self.cmp_tol(o) {
            Cmp::Greater | Cmp::Equal => Truth::True,
            Cmp::Less => Truth::False,
            Cmp::Tie => Truth::Uncertain,
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Welfare::Scalar(s) => s.as_rat(),
            Welfare::Lex(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Welfare::Scalar(s) => s.is_exact(),
            Welfare::Lex(v) => v.iter().all(Scalar::is_exact),
        }
    }
}

impl fmt::Display for Welfare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Welfare::Scalar(s) => write!(f, "{s}"),
            Welfare::Lex(v) => {
                write!(f, "lex[")?;
                for (i, s) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for Welfare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Welfare {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Welfare::Scalar(v) => v.serialize(s),
            Welfare::Lex(v) => v.serialize(s),
        }
    }
}

#[derive(Clone, Debug)]
enum Scales {
    Exact(Vec<Rat>),
    Approx(Vec<Real>),
}

impl Scales {
    fn apply(&self, x: &[Rat]) -> Vec<Scalar> {
        match self {
            Scales::Exact(s) => x.iter().zip(s).map(|(a, b)| Scalar::Exact(a * b)).collect(),
            Scales::Approx(s) => x.iter().zip(s).map(|(a, b)| Scalar::Approx(Real::from_rat(a).mul(b))).collect(),
        }
    }
}

/// How completely a [`ChoiceSet`] describes `F(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The union of `pieces` is exactly `F(X)`.
    Exact,
    /// Only optimal corners and a membership predicate are available.
    CornerWitness,
}

/// The solved choice set `F(X)`.
#[derive(Clone, Debug, Serialize)]
pub struct ChoiceSet {
    pub value: Welfare,
    pub witnesses: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<HPolyhedron>>,
    pub mode: Mode,
}

/// A problem solved under a rule, with the context needed for membership queries.
#[derive(Debug)]
pub struct Solved<'a> {
    pub rule: &'a Rule,
    pub problem: Problem,
    pub ideal: Point,
    scales: Scales,
    pub choice: ChoiceSet,
    piece_vertices: OnceLock<Vec<Vec<Point>>>,
}

impl<'a> Solved<'a> {
    /// Welfare of `x` in this problem's context; `x` need not lie in `X`.
    pub fn welfare_of(&self, x: &Point) -> Welfare {
        if let RuleKind::WeakParetoSet = self.rule.kind {
            let v = if self.problem.holds(x) && self.problem.weak_pareto_unchecked(x) { 1 } else { 0 };
            return Welfare::Scalar(Scalar::Exact(Rat::from_integer(v)));
        }
        self.rule.welfare(&self.scales.apply(x))
    }

    /// `x ∈ F(X)`; `Uncertain` when approximate values tie within tolerance.
    pub fn member(&self, x: &Point) -> Truth {
        if x.dim() != self.problem.n() || !self.problem.holds(x) {
            return Truth::False;
        }
        match self.rule.kind {
            RuleKind::Ks => Truth::from_bool(*x == self.choice.witnesses[0]),
            RuleKind::WeakParetoSet => Truth::from_bool(self.problem.weak_pareto_unchecked(x)),
            _ => self.welfare_of(x).at_least(&self.choice.value),
        }
    }

    /// Whether `pieces` describe `F(X)` exactly.
    pub fn is_exact(&self) -> bool {
        self.choice.mode == Mode::Exact
    }

    pub fn pieces(&self) -> &[HPolyhedron] {
        self.choice.pieces.as_deref().unwrap_or(&[])
    }

    /// Vertices of each piece, computed once.
    pub fn piece_vertices(&self) -> &[Vec<Point>] {
        self.piece_vertices.get_or_init(|| self.pieces().iter().map(HPolyhedron::vertices).collect())
    }

    /// The KS point `λ·b^p` (defined for every rule; used as a probe point).
    pub fn ks_point(&self) -> Point {
        ks_point(&self.problem, &self.ideal, &self.rule.p)
    }
}

fn ks_point(x: &Problem, b: &Point, p: &Rat) -> Point {
    let target = if p.is_zero() { Point::diagonal(b.dim(), &Rat::one()) } else { b.clone() };
    let lambda = x
        .generators()
        .iter()
        .map(|g| g.iter().zip(target.iter()).map(|(gi, ti)| gi / ti).min().expect("nonempty"))
        .max()
        .expect("nonempty");
    target.scale(&lambda)
}

/// Solves `F(X)`.
///
/// Every supported objective is nondecreasing along ≤, so the optimum over
/// the union of boxes is attained at a generator corner; rules whose
/// objective is not monotone are rejected.
pub fn solve<'a>(rule: &'a Rule, x: &Problem) -> Result<Solved<'a>> {
    let n = x.n();
    if let RuleKind::Dictator(k) = rule.kind {
        if k >= n {
            return Err(Error::InvalidRule(format!("dictator index {} exceeds dimension {n}", k + 1)));
        }
    }
    if let RuleKind::RelativeFair(w) = &rule.kind {
        if w.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.n() });
        }
    }
    if !rule.is_monotone(n) {
        return Err(Error::NonMonotoneObjective(format!("{rule} in dimension {n}")));
    }
    let b = x.ideal_point();
    let scales = rule.scales(&b)?;
    let mut solved = Solved {
        rule,
        problem: x.clone(),
        ideal: b,
        scales,
        choice: ChoiceSet { value: Welfare::Scalar(Scalar::zero()), witnesses: vec![], pieces: None, mode: Mode::CornerWitness },
        piece_vertices: OnceLock::new(),
    };
    let gens = x.generators();
    let values: Vec<Welfare> = gens.iter().map(|g| solved.welfare_of(g)).collect();
    let best = values.iter().max().cloned().expect("nonempty");
    let optimal: Vec<&Point> = gens.iter().zip(&values).filter(|(_, v)| v.at_least(&best).lenient()).map(|(g, _)| g).collect();
    solved.choice = match &rule.kind {
        RuleKind::Ks => {
            let k = solved.ks_point();
            let piece = singleton(&k);
            let lambda = Welfare::Scalar(match &solved.scales {
                Scales::Exact(s) => Scalar::Exact(&k[0] * &s[0]),
                Scales::Approx(_) => unreachable!("KS uses exact scales"),
            });
            ChoiceSet { value: lambda, witnesses: vec![k], pieces: Some(vec![piece]), mode: Mode::Exact }
        }
        RuleKind::WeakParetoSet => {
            let pieces = weak_pareto_boxes(x).into_iter().map(|(lo, hi)| lower_bounded_box(&lo, &hi)).collect();
            ChoiceSet { value: best, witnesses: gens.to_vec(), pieces: Some(pieces), mode: Mode::Exact }
        }
        _ => {
            let witnesses: Vec<Point> = optimal.iter().map(|g| (*g).clone()).collect();
            let pieces = exact_pieces(&solved, &best, &witnesses);
            let mode = if pieces.is_some() { Mode::Exact } else { Mode::CornerWitness };
            ChoiceSet { value: best, witnesses, pieces, mode }
        }
    };
    Ok(solved)
}

/// The weakly Pareto set as a union of boxes `[lo, g]`.
///
/// Inside the box of `g` a point is weakly Pareto iff for every generator
/// `h` some coordinate reaches `h_i`; processing generators one at a time
/// and keeping only minimal lower corners keeps the enumeration small.
pub fn weak_pareto_boxes(x: &Problem) -> Vec<(Point, Point)> {
    let n = x.n();
    let mut out = Vec::new();
    for g in x.generators() {
        let mut lows = vec![Point::zeros(n)];
        for h in x.generators() {
            let mut next: Vec<Point> = Vec::new();
            for l in &lows {
                if (0..n).any(|i| l[i] >= h[i]) {
                    next.push(l.clone());
                    continue;
                }
                for i in 0..n {
                    if h[i] <= g[i] {
                        let mut m = l.clone();
                        m.0[i] = h[i].clone();
                        next.push(m);
                    }
                }
            }
            next.sort();
            next.dedup();
            lows = next.iter().filter(|a| !next.iter().any(|b| b != *a && b.le(a))).cloned().collect();
        }
        out.extend(lows.into_iter().map(|l| (l, g.clone())));
    }
    out
}

fn lower_bounded_box(lo: &Point, hi: &Point) -> HPolyhedron {
    let n = lo.dim();
    let mut p = HPolyhedron::boxed(hi);
    for i in 0..n {
        if lo[i].is_positive() {
            p.push(LinConstraint::coord(n, i, Sense::Ge, lo[i].clone()));
        }
    }
    p
}

fn singleton(p: &Point) -> HPolyhedron {
    let n = p.dim();
    HPolyhedron::new(n, (0..n).map(|i| LinConstraint::coord(n, i, Sense::Eq, p[i].clone())).collect())
}

/// Polyhedral pieces whose union is exactly the argmax set, when the value
/// and scales are exact.
fn exact_pieces(s: &Solved, best: &Welfare, optimal: &[Point]) -> Option<Vec<HPolyhedron>> {
    let Scales::Exact(scale) = &s.scales else { return None };
    let n = s.problem.n();
    let lin = |coeffs: Vec<Rat>, rhs: &Rat| LinConstraint::new(coeffs, Sense::Ge, rhs.clone());
    let weighted = |w: &[Rat]| -> Vec<Rat> { w.iter().zip(scale).map(|(a, b)| a * b).collect() };
    let unit = |i: usize, c: &Rat| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n];
        v[i] = c.clone();
        v
    };
    let mut pieces = Vec::new();
    match &s.rule.kind {
        RuleKind::RelativeLeximin => {
            // Leximin strictly increases along >, so every maximizer is a corner.
            return Some(optimal.iter().map(singleton).collect());
        }
        RuleKind::Nash => {
            let v = best.as_rat()?;
            if v.is_zero() {
                // No point is strictly positive: every point attains the maximum.
                return Some(s.problem.generators().iter().map(HPolyhedron::boxed).collect());
            }
            // The product strictly increases along > on the positive orthant.
            return Some(optimal.iter().map(singleton).collect());
        }
        RuleKind::MeanSd(_) | RuleKind::MeanNorm(_) | RuleKind::Ks | RuleKind::WeakParetoSet => return None,
        _ => {}
    }
    let v = best.as_rat()?;
    for g in optimal {
        let base = HPolyhedron::boxed(g);
        match &s.rule.kind {
            RuleKind::RelativeFair(w) => {
                let mut p = base;
                for wv in w.vertices() {
                    p.push(lin(weighted(wv), v));
                }
                pieces.push(p);
            }
            RuleKind::Egalitarian => {
                let mut p = base;
                for i in 0..n {
                    p.push(lin(unit(i, &Rat::one()), v));
                }
                pieces.push(p);
            }
            RuleKind::Dictator(k) => pieces.push(base.with(lin(unit(*k, &Rat::one()), v))),
            RuleKind::RelativeMax => {
                for i in 0..n {
                    if &g[i] * &scale[i] >= *v {
                        pieces.push(base.clone().with(lin(unit(i, &scale[i]), v)));
                    }
                }
            }
            RuleKind::MinMaxBlend(a1, a2) => {
                // α₁ min + α₂ max ≥ v  ⟺  ∃i ∀j: α₁ x̃_j + α₂ x̃_i ≥ v.
                let gt: Vec<Rat> = g.iter().zip(scale).map(|(a, b)| a * b).collect();
                let gmin = gt.iter().min().expect("nonempty");
                for i in 0..n {
                    if a1 * gmin + a2 * &gt[i] < *v {
                        continue;
                    }
                    let mut p = base.clone();
                    for j in 0..n {
                        let mut c = vec![Rat::zero(); n];
                        c[j] = &c[j] + a1 * &scale[j];
                        c[i] = &c[i] + a2 * &scale[i];
                        p.push(lin(c, v));
                    }
                    pieces.push(p);
                }
            }
            _ => return None,
        }
    }
    Some(pieces)
}

/// Evaluates a rule's welfare in the context of a fixed problem, without solving.
#[derive(Debug)]
pub struct Evaluator<'a> {
    rule: &'a Rule,
    problem: &'a Problem,
    scales: Scales,
}

impl Rule {
    pub fn evaluator<'a>(&'a self, x: &'a Problem) -> Result<Evaluator<'a>> {
        if let RuleKind::Dictator(k) = self.kind {
            if k >= x.n() {
                return Err(Error::InvalidRule(format!("dictator index {} exceeds dimension {}", k + 1, x.n())));
            }
        }
        if let RuleKind::RelativeFair(w) = &self.kind {
            if w.n() != x.n() {
                return Err(Error::DimensionMismatch { expected: x.n(), got: w.n() });
            }
        }
        Ok(Evaluator { rule: self, problem: x, scales: self.scales(&x.ideal_point())? })
    }
}

impl Evaluator<'_> {
    /// Welfare of `pt`, which is assumed to lie in the problem.
    pub fn welfare(&self, pt: &Point) -> Welfare {
        if let RuleKind::WeakParetoSet = self.rule.kind {
            return Welfare::Scalar(Scalar::Exact(Rat::from_integer(self.problem.weak_pareto_unchecked(pt) as i64)));
        }
        self.rule.welfare(&self.scales.apply(pt))
    }

    /// The normalized vector `x̃`.
    pub fn normalize(&self, pt: &Point) -> Vec<Scalar> {
        self.scales.apply(pt)
    }

    /// Exact normalization factors `1/b_i^p`, when rational.
    pub fn exact_scales(&self) -> Option<&[Rat]> {
        match &self.scales {
            Scales::Exact(s) => Some(s),
            Scales::Approx(_) => None,
        }
    }
}

/// Welfare of `x` in the context of `X`.
pub fn evaluate(rule: &Rule, x: &Problem, pt: &Point) -> Result<Welfare> {
    if !x.contains(pt)? {
        return Err(Error::PointNotInProblem(pt.to_string()));
    }
    if !rule.unnormalized() && rule.p != Rat::one() && !rule.p.is_zero() {
        // Fractional exponents need the ideal point's powers; surface precision issues.
        rule.scales(&x.ideal_point())?;
    }
    let b = x.ideal_point();
    let scales = rule.scales(&b)?;
    if let RuleKind::WeakParetoSet = rule.kind {
        return Ok(Welfare::Scalar(Scalar::Exact(Rat::from_integer(x.weak_pareto_unchecked(pt) as i64))));
    }
    if let RuleKind::Dictator(k) = rule.kind {
        if k >= x.n() {
            return Err(Error::InvalidRule(format!("dictator index {} exceeds dimension {}", k + 1, x.n())));
        }
    }
    Ok(rule.welfare(&scales.apply(pt)))
}

/// `x ∈ F(X)`; ties within the approximate tolerance count as members.
pub fn in_choice_set(rule: &Rule, x: &Problem, pt: &Point) -> Result<bool> {
    if pt.dim() != x.n() {
        return Ok(false);
    }
    Ok(solve(rule, x)?.member(pt).lenient())
}

/// Default iteration budget for [`equal_equivalent`].
pub const BISECTION_BUDGET: usize = 512;

/// The equal-equivalent `W(x) = inf{α > 0 : α1 ∈ F(scmp{x, α1})}`, by
/// bisection on `[min x, max x]`; the midpoint returned is within `tol`.
pub fn equal_equivalent(rule: &Rule, x: &Point, tol: &Rat) -> Result<Rat> {
    if !tol.is_positive() {
        return Err(Error::BadParameter("tolerance must be positive".into()));
    }
    if !x.is_nonnegative() || x.is_zero() {
        return Err(Error::BadParameter(format!("{x} must be nonnegative and nonzero")));
    }
    let n = x.dim();
    let chosen = |a: &Rat| -> Result<bool> {
        let d = Point::diagonal(n, a);
        in_choice_set(rule, &scmp_hull(vec![x.clone(), d.clone()])?, &d)
    };
    let mut lo = x.min_coord();
    let mut hi = x.max_coord();
    if lo.is_positive() && chosen(&lo)? {
        return Ok(lo);
    }
    if !chosen(&hi)? {
        return Err(Error::NonConvergence(format!("{rule}: max(x)·1 is not chosen against {x}")));
    }
    let half = Rat::new(1, 2);
    for _ in 0..BISECTION_BUDGET {
        if &hi - &lo <= *tol {
            return Ok((lo + hi) * half);
        }
        let mid = (&lo + &hi) * &half;
        if mid.is_positive() && chosen(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NonConvergence(format!("bisection budget {BISECTION_BUDGET} exhausted")))
}

/// Revealed comparison of one pair: `x R y` and `y R x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RevealedPair {
    pub x: Point,
    pub y: Point,
    pub x_r_y: bool,
    pub y_r_x: bool,
}

/// `x R y ⟺ x ∈ F(scmp{x, y})` over the queried pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RevealedRelation {
    pub pairs: Vec<RevealedPair>,
}

pub fn revealed(rule: &Rule, x: &Point, y: &Point) -> Result<(bool, bool)> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::BadParameter("revealed comparisons need nonzero points".into()));
    }
    let s = scmp_hull(vec![x.clone(), y.clone()])?;
    let solved = solve(rule, &s)?;
    Ok((solved.member(x).lenient(), solved.member(y).lenient()))
}

pub fn revealed_relation(rule: &Rule, pairs: &[(Point, Point)]) -> Result<RevealedRelation> {
    let pairs = pairs
        .iter()
        .map(|(x, y)| {
            let (a, b) = revealed(rule, x, y)?;
            Ok(RevealedPair { x: x.clone(), y: y.clone(), x_r_y: a, y_r_x: b })
        })
        .collect::<Result<_>>()?;
    Ok(RevealedRelation { pairs })
}

/// A pair `(y, x)` with `x ≫ y` but `W(y) > W(x)`, showing that the
/// context-free welfare is not weakly monotone.
///
/// Starts from `x = 2·1 + 2e_n` and `y = c·1` with `c` halfway between
/// `W(x)` and `min x`; with two individuals and SD weight θ = 2 this is
/// `y = (3/2, 3/2)` against `x = (2, 4)`.
pub fn monotonicity_witness(rule: &Rule, n: usize) -> Result<Option<(Point, Point)>> {
    let scalars = |p: &Point| p.iter().cloned().map(Scalar::Exact).collect::<Vec<_>>();
    let mut bases = vec![Point::diagonal(n, &Rat::from_integer(2)).add(&Point::unit(n, n - 1).scale(&Rat::from_integer(2)))];
    for k in 1..=8 {
        for j in 0..n {
            bases.push(Point::diagonal(n, &Rat::one()).add(&Point::unit(n, j).scale(&Rat::from_integer(k))));
        }
    }
    for x in bases {
        let wx = match rule.evaluate_normalized(&scalars(&x))? {
            Welfare::Scalar(s) => s,
            Welfare::Lex(_) => return Ok(None),
        };
        let m = x.min_coord();
        if wx.ge(&Scalar::Exact(m.clone())).lenient() {
            continue;
        }
        let c = match &wx {
            Scalar::Exact(w) => (w + &m) * Rat::new(1, 2),
            Scalar::Approx(_) => {
                let num = ((wx.to_f64() + m.to_f64()) / 2.0 * 1024.0).floor() as i64;
                Rat::new(num, 1024)
            }
        };
        let y = Point::diagonal(n, &c);
        if !x.gg(&y) {
            continue;
        }
        if let Welfare::Scalar(wy) = rule.evaluate_normalized(&scalars(&y))? {
            if wy.cmp_tol(&wx) == Cmp::Greater {
                return Ok(Some((y, x)));
            }
        }
    }
    Ok(None)
}

/// Sampling parameters for [`check_ordering_properties`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderingSpec {
    pub n: usize,
    pub triples: usize,
    pub seed: u64,
}

/// One property failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderingCounterexample {
    pub property: String,
    pub points: Vec<Point>,
}

/// Counts of checks and failures per property.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OrderingReport {
    pub checked_triples: usize,
    pub completeness_violations: usize,
    pub transitivity_violations: usize,
    pub monotonicity_violations: usize,
    pub symmetry_violations: usize,
    pub homogeneity_violations: usize,
    pub first_counterexample: Option<OrderingCounterexample>,
}

impl OrderingReport {
    pub fn total_violations(&self) -> usize {
        self.completeness_violations
            + self.transitivity_violations
            + self.monotonicity_violations
            + self.symmetry_violations
            + self.homogeneity_violations
    }
}

/// Samples triples and tests completeness, transitivity, weak monotonicity,
/// symmetry and homogeneity of the revealed relation.
pub fn check_ordering_properties(rule: &Rule, spec: &OrderingSpec) -> Result<OrderingReport> {
    use rand::Rng;
    let n = spec.n;
    let mut report = OrderingReport::default();
    let note = |report: &mut OrderingReport, property: &str, points: Vec<Point>| {
        if report.first_counterexample.is_none() {
            report.first_counterexample = Some(OrderingCounterexample { property: property.into(), points });
        }
    };
    for t in 0..spec.triples {
        let mut rng = crate::harness::instance_rng(spec.seed, t as u64);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| loop {
            let p = Point((0..n).map(|_| Rat::new(rng.gen_range(0..=16), 4)).collect());
            if !p.is_zero() {
                return p;
            }
        };
        let pts = [draw(&mut rng), draw(&mut rng), draw(&mut rng)];
        let mut rel = [[false; 3]; 3];
        for i in 0..3 {
            rel[i][i] = true;
            for j in i + 1..3 {
                let (a, b) = revealed(rule, &pts[i], &pts[j])?;
                rel[i][j] = a;
                rel[j][i] = b;
                if !a && !b {
                    report.completeness_violations += 1;
                    note(&mut report, "completeness", vec![pts[i].clone(), pts[j].clone()]);
                }
            }
        }
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            if rel[i][j] && rel[j][k] && !rel[i][k] {
                report.transitivity_violations += 1;
                note(&mut report, "transitivity", vec![pts[i].clone(), pts[j].clone(), pts[k].clone()]);
            }
        }
        // Weak monotonicity: x + δ1 is strictly preferred to x.
        let x = &pts[0];
        let up = x.shift(&Rat::new(rng.gen_range(1..=4), 4));
        let (a, b) = revealed(rule, &up, x)?;
        if !(a && !b) {
            report.monotonicity_violations += 1;
            note(&mut report, "weak_monotonicity", vec![up.clone(), x.clone()]);
        }
        // Symmetry: x I x^π.
        let perm: Vec<usize> = {
            let mut v: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                v.swap(i, rng.gen_range(0..=i));
            }
            v
        };
        let xp = x.permute(&Permutation::new(perm)?);
        if xp != *x {
            let (a, b) = revealed(rule, x, &xp)?;
            if !(a && b) {
                report.symmetry_violations += 1;
                note(&mut report, "symmetry", vec![x.clone(), xp]);
            }
        }
        // Homogeneity: x R y ⟺ αx R αy.
        let alpha = Rat::new(rng.gen_range(1..=12), 4);
        let (a, b) = revealed(rule, &pts[0].scale(&alpha), &pts[1].scale(&alpha))?;
        if (a, b) != (rel[0][1], rel[1][0]) {
            report.homogeneity_violations += 1;
            note(&mut report, "homogeneity", vec![pts[0].clone(), pts[1].clone(), Point(vec![alpha])]);
        }
        report.checked_triples += 1;
    }
    Ok(report)
}

//! Axiom checks on concrete instances, seeded violation search, and the
//! independence matrix.

pub mod continuity;
pub mod generate;
pub mod sets;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Permutation, Point, Problem};
use crate::lp::{HPolyhedron, LinConstraint, Sense};
use crate::rational::Rat;
use crate::real::Truth;
use crate::rules::{solve, Rule, RuleKind, Solved};
use continuity::{continuity_probe, SequenceSpec};
use sets::{union_difference, union_not_subset, union_point, Region};

/// The per-instance generator: an independent ChaCha stream per `(seed, index)`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Worker count: the explicit value, else `RELFAIR_THREADS`, else rayon's default.
pub fn thread_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("RELFAIR_THREADS").ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or_else(rayon::current_num_threads)
        .max(1)
}

/// Maps `f` over `indices` on `threads` workers; output order matches input order.
pub fn par_map<T, F>(threads: usize, indices: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if threads <= 1 || indices.len() <= 1 {
        return indices.iter().map(|&i| f(i)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| indices.par_iter().map(|&i| f(i)).collect()),
        Err(_) => indices.iter().map(|&i| f(i)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomId {
    StrongPareto,
    WeakPareto,
    IntermediatePareto,
    ScaleInvariance,
    Anonymity,
    ContractionEai,
    Continuity,
    EqualAdditionEai,
    CompromisabilityEai,
    HammondEai,
    SeparabilityEai,
    StrongSymmetry,
}

/// The seven axioms characterizing the relative fair rules.
pub const CHARACTERIZING: [AxiomId; 7] = [
    AxiomId::IntermediatePareto,
    AxiomId::ScaleInvariance,
    AxiomId::Anonymity,
    AxiomId::ContractionEai,
    AxiomId::Continuity,
    AxiomId::EqualAdditionEai,
    AxiomId::CompromisabilityEai,
];

impl AxiomId {
    pub const ALL: [AxiomId; 12] = [
        AxiomId::StrongPareto,
        AxiomId::WeakPareto,
        AxiomId::IntermediatePareto,
        AxiomId::ScaleInvariance,
        AxiomId::Anonymity,
        AxiomId::ContractionEai,
        AxiomId::Continuity,
        AxiomId::EqualAdditionEai,
        AxiomId::CompromisabilityEai,
        AxiomId::HammondEai,
        AxiomId::SeparabilityEai,
        AxiomId::StrongSymmetry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::StrongPareto => "strong_pareto",
            AxiomId::WeakPareto => "weak_pareto",
            AxiomId::IntermediatePareto => "intermediate_pareto",
            AxiomId::ScaleInvariance => "scale_invariance",
            AxiomId::Anonymity => "anonymity",
            AxiomId::ContractionEai => "contraction_eai",
            AxiomId::Continuity => "continuity",
            AxiomId::EqualAdditionEai => "equal_addition_eai",
            AxiomId::CompromisabilityEai => "compromisability_eai",
            AxiomId::HammondEai => "hammond_eai",
            AxiomId::SeparabilityEai => "separability_eai",
            AxiomId::StrongSymmetry => "strong_symmetry",
        }
    }

    /// The condition being checked, as a one-line statement.
    pub fn statement(self) -> &'static str {
        match self {
            AxiomId::StrongPareto => "no y in X with y > x for chosen x",
            AxiomId::WeakPareto => "no y in X with y >> x for chosen x",
            AxiomId::IntermediatePareto => "chosen points weakly efficient, some chosen point strongly efficient",
            AxiomId::ScaleInvariance => "F(aX) = aF(X)",
            AxiomId::Anonymity => "x in F(X) implies x^pi in F(X) for symmetric X",
            AxiomId::ContractionEai => "F(X') = X' ∩ F(X) when X' ⊂ X are equal-able and X' ∩ F(X) is nonempty",
            AxiomId::Continuity => "limits of chosen points along convergent problems are chosen",
            AxiomId::EqualAdditionEai => "x in F(X) iff x + a1 in F(cmp(X + a1)) for equal-able X",
            AxiomId::CompromisabilityEai => "some chosen z dominates any feasible mix of chosen points",
            AxiomId::HammondEai => "x_i < y_i < y_j < x_j: x chosen and y feasible imply y chosen",
            AxiomId::SeparabilityEai => "unconcerned individuals do not reverse a revealed choice",
            AxiomId::StrongSymmetry => "chosen points of symmetric problems are equal",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;
    fn from_str(s: &str) -> Result<AxiomId> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown axiom {s:?}")))
    }
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        match u64::deserialize(d)? {
            0 => Err(serde::de::Error::custom("indices are 1-based")),
            k => Ok(k as usize - 1),
        }
    }

    pub mod vec {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|k| k + 1))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
            Vec::<u64>::deserialize(d)?
                .into_iter()
                .map(|k| if k == 0 { Err(serde::de::Error::custom("indices are 1-based")) } else { Ok(k as usize - 1) })
                .collect()
        }
    }
}

/// The objects an axiom quantifies over. Individual indices are 1-based in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Instance {
    Problem {
        x: Problem,
    },
    Scale {
        x: Problem,
        a: Point,
    },
    Permutation {
        x: Problem,
        pi: Permutation,
    },
    Contraction {
        x: Problem,
        sub: Problem,
    },
    Shift {
        x: Problem,
        alpha: Rat,
    },
    Compromise {
        x: Problem,
        a: Point,
        b: Point,
        alpha: Rat,
    },
    Hammond {
        x: Problem,
        a: Point,
        b: Point,
        #[serde(with = "one_based")]
        i: usize,
        #[serde(with = "one_based")]
        j: usize,
    },
    Separability {
        x: Problem,
        sub: Problem,
        #[serde(with = "one_based::vec")]
        m: Vec<usize>,
        a: Point,
        b: Point,
    },
    Sequence(SequenceSpec),
}

impl Instance {
    fn kind_name(&self) -> &'static str {
        match self {
            Instance::Problem { .. } => "problem",
            Instance::Scale { .. } => "scale",
            Instance::Permutation { .. } => "permutation",
            Instance::Contraction { .. } => "contraction",
            Instance::Shift { .. } => "shift",
            Instance::Compromise { .. } => "compromise",
            Instance::Hammond { .. } => "hammond",
            Instance::Separability { .. } => "separability",
            Instance::Sequence(_) => "sequence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Inconclusive,
    Violation,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Violation => "violation",
        })
    }
}

/// A replayable instance, with the search coordinates that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub note: String,
}

impl Verdict {
    fn pass(note: impl Into<String>) -> Verdict {
        Verdict { status: Status::Pass, witness: None, note: note.into() }
    }

    fn inconclusive(note: impl Into<String>) -> Verdict {
        Verdict { status: Status::Inconclusive, witness: None, note: note.into() }
    }

    /// Whether the premise of the axiom failed, making the instance vacuous.
    pub fn is_vacuous(&self) -> bool {
        self.status == Status::Pass && self.note.starts_with("vacuous")
    }
}

/// Internal check result before the instance is attached.
enum Outcome {
    Pass(String),
    Vacuous(String),
    Inconclusive(String),
    Violation(Option<Point>, String),
}

impl Outcome {
    fn from_truth(t: Truth, violation_point: Option<Point>, what: &str) -> Outcome {
        match t {
            Truth::True => Outcome::Pass(what.to_string()),
            Truth::Uncertain => Outcome::Inconclusive(format!("tie within tolerance: {what}")),
            Truth::False => Outcome::Violation(violation_point, format!("fails: {what}")),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadInstance(msg.into())
}

fn require_equal_able(x: &Problem, what: &str) -> Result<()> {
    if x.is_equal_able() {
        Ok(())
    } else {
        Err(bad(format!("{what} {x} does not have equal abilities")))
    }
}

/// Points probed when a rule's choice set has no exact polyhedral description.
fn candidates(s: &Solved) -> Vec<Point> {
    let mut out: Vec<Point> = s.choice.witnesses.clone();
    let gens = s.problem.generators();
    for g in gens {
        for mask in 0u32..(1 << g.dim()) {
            out.push(Point((0..g.dim()).map(|i| if mask & (1 << i) != 0 { g[i].clone() } else { Rat::zero() }).collect()));
        }
        for h in gens {
            out.push(g.meet(h));
        }
    }
    out.push(s.ks_point());
    for v in s.piece_vertices().iter().flatten() {
        out.push(v.clone());
    }
    out.sort();
    out.dedup();
    out
}

/// Compares two choice sets: exactly when both have pieces, otherwise on candidates.
fn compare_sets(
    lhs: Option<Vec<HPolyhedron>>,
    rhs: Option<Vec<HPolyhedron>>,
    cands: &[Point],
    lm: &dyn Fn(&Point) -> Truth,
    rm: &dyn Fn(&Point) -> Truth,
    what: &str,
) -> Outcome {
    if let (Some(l), Some(r)) = (&lhs, &rhs) {
        return match union_difference(l, r) {
            None => Outcome::Pass(what.to_string()),
            Some(p) => Outcome::Violation(Some(p), format!("sets differ: {what}")),
        };
    }
    candidate_scan(cands, |c| match (lm(c), rm(c)) {
        (Truth::Uncertain, _) | (_, Truth::Uncertain) => Truth::Uncertain,
        (a, b) => Truth::from_bool(a == b),
    }, what)
}

/// Scans candidate points; `ok` returns `False` on a definite failure.
fn candidate_scan(cands: &[Point], ok: impl Fn(&Point) -> Truth, what: &str) -> Outcome {
    let mut tie = false;
    for c in cands {
        match ok(c) {
            Truth::False => return Outcome::Violation(Some(c.clone()), format!("fails at candidate: {what}")),
            Truth::Uncertain => tie = true,
            Truth::True => {}
        }
    }
    let why = if tie { "ties within tolerance" } else { "candidates exhausted without full certification" };
    Outcome::Inconclusive(format!("{why}: {what}"))
}

fn exact_pieces(s: &Solved) -> Option<Vec<HPolyhedron>> {
    s.is_exact().then(|| s.pieces().to_vec())
}

/// `F(X)` contains a point that is strictly dominated in every coordinate.
fn weak_pareto_failure(s: &Solved) -> Outcome {
    let gens = s.problem.generators();
    let n = s.problem.n();
    if s.is_exact() {
        for (piece, verts) in s.pieces().iter().zip(s.piece_vertices()) {
            for g in gens {
                if let Some(v) = verts.iter().find(|v| g.gg(v)) {
                    return Outcome::Violation(Some(v.clone()), format!("chosen {v} is dominated by {g}"));
                }
                // Some coordinate bounded below by g_i on every vertex rules out x ≪ g.
                if (0..n).any(|i| verts.iter().all(|v| v[i] >= g[i])) {
                    continue;
                }
                let mut r = Region::new(piece.clone());
                for i in 0..n {
                    let mut a = vec![Rat::zero(); n];
                    a[i] = -Rat::one();
                    r.strict.push((a, -g[i].clone()));
                }
                if let Some(p) = r.point() {
                    return Outcome::Violation(Some(p.clone()), format!("chosen {p} is dominated by {g}"));
                }
            }
        }
        return Outcome::Pass("every chosen point is weakly efficient".into());
    }
    candidate_scan(
        &candidates(s),
        |c| {
            if gens.iter().any(|g| g.gg(c)) {
                match s.member(c) {
                    Truth::True => Truth::False,
                    t => if t == Truth::False { Truth::True } else { Truth::Uncertain },
                }
            } else {
                Truth::True
            }
        },
        "chosen points weakly efficient",
    )
}

/// Some strongly efficient point (a generator) is chosen.
fn strong_member(s: &Solved) -> Outcome {
    let mut tie = false;
    for g in s.problem.generators() {
        match s.member(g) {
            Truth::True => return Outcome::Pass(format!("{g} is chosen and strongly efficient")),
            Truth::Uncertain => tie = true,
            Truth::False => {}
        }
    }
    if tie {
        return Outcome::Inconclusive("generator membership ties within tolerance".into());
    }
    let chosen = s.choice.witnesses.first().cloned();
    let note = match &chosen {
        Some(w) => format!("no chosen point is strongly efficient; e.g. chosen {w} is dominated within X"),
        None => "no chosen point is strongly efficient".into(),
    };
    Outcome::Violation(chosen, note)
}

fn and_then(a: Outcome, b: impl FnOnce() -> Outcome) -> Outcome {
    match a {
        Outcome::Pass(_) => b(),
        Outcome::Inconclusive(m) => match b() {
            v @ Outcome::Violation(..) => v,
            _ => Outcome::Inconclusive(m),
        },
        other => other,
    }
}

/// Checks one axiom on one instance.
pub fn check_axiom(rule: &Rule, axiom: AxiomId, instance: &Instance) -> Result<Verdict> {
    let outcome = check_outcome(rule, axiom, instance)?;
    Ok(match outcome {
        Outcome::Pass(m) => Verdict::pass(m),
        Outcome::Vacuous(m) => Verdict::pass(format!("vacuous: {m}")),
        Outcome::Inconclusive(m) => Verdict::inconclusive(m),
        Outcome::Violation(point, note) => Verdict {
            status: Status::Violation,
            witness: Some(Witness { instance: instance.clone(), point, seed: None, index: None }),
            note,
        },
    })
}

fn mismatch(axiom: AxiomId, instance: &Instance) -> Error {
    bad(format!("axiom {axiom} cannot be checked on a {} instance", instance.kind_name()))
}

fn check_outcome(rule: &Rule, axiom: AxiomId, instance: &Instance) -> Result<Outcome> {
    use AxiomId as A;
    use Instance as I;
    match (axiom, instance) {
        (A::WeakPareto, I::Problem { x }) => Ok(weak_pareto_failure(&solve(rule, x)?)),
        (A::IntermediatePareto, I::Problem { x }) => {
            let s = solve(rule, x)?;
            Ok(and_then(weak_pareto_failure(&s), || strong_member(&s)))
        }
        (A::StrongPareto, I::Problem { x }) => check_strong_pareto(rule, x),
        (A::StrongSymmetry, I::Problem { x }) => check_strong_symmetry(rule, x),
        (A::ScaleInvariance, I::Scale { x, a }) => check_scale(rule, x, a),
        (A::Anonymity, I::Permutation { x, pi }) => check_anonymity(rule, x, pi),
        (A::ContractionEai, I::Contraction { x, sub }) => check_contraction(rule, x, sub),
        (A::EqualAdditionEai, I::Shift { x, alpha }) => check_equal_addition(rule, x, alpha),
        (A::CompromisabilityEai, I::Compromise { x, a, b, alpha }) => check_compromise(rule, x, a, b, alpha),
        (A::HammondEai, I::Hammond { x, a, b, i, j }) => hammond_outcome(rule, x, a, b, *i, *j),
        (A::SeparabilityEai, I::Separability { x, sub, m, a, b }) => separability_outcome(rule, m, a, b, x, sub),
        (A::Continuity, I::Sequence(spec)) => continuity_probe(rule, spec).map(|v| match v.status {
            Status::Pass if v.is_vacuous() => Outcome::Vacuous(v.note.trim_start_matches("vacuous: ").to_string()),
            Status::Pass => Outcome::Pass(v.note),
            Status::Inconclusive => Outcome::Inconclusive(v.note),
            Status::Violation => Outcome::Violation(v.witness.and_then(|w| w.point), v.note),
        }),
        _ => Err(mismatch(axiom, instance)),
    }
}

fn check_strong_pareto(rule: &Rule, x: &Problem) -> Result<Outcome> {
    let s = solve(rule, x)?;
    let gens = x.generators();
    if s.is_exact() {
        for verts in s.piece_vertices() {
            match verts.as_slice() {
                [] => {}
                [v] if gens.contains(v) => {}
                [v] => return Ok(Outcome::Violation(Some(v.clone()), format!("chosen {v} is not strongly efficient"))),
                [v, w, ..] => {
                    let mid = v.mix(w, &Rat::new(1, 2));
                    return Ok(Outcome::Violation(Some(mid.clone()), format!("chosen {mid} is not strongly efficient")));
                }
            }
        }
        return Ok(Outcome::Pass("every chosen point is a generator".into()));
    }
    Ok(candidate_scan(
        &candidates(&s),
        |c| if gens.contains(c) { Truth::True } else { negate(s.member(c)) },
        "chosen points strongly efficient",
    ))
}

fn negate(t: Truth) -> Truth {
    match t {
        Truth::True => Truth::False,
        Truth::False => Truth::True,
        Truth::Uncertain => Truth::Uncertain,
    }
}

fn check_strong_symmetry(rule: &Rule, x: &Problem) -> Result<Outcome> {
    if !x.is_symmetric() {
        return Err(bad(format!("{x} is not symmetric")));
    }
    let s = solve(rule, x)?;
    if s.is_exact() {
        for v in s.piece_vertices().iter().flatten() {
            if !v.is_diagonal() {
                return Ok(Outcome::Violation(Some(v.clone()), format!("chosen {v} has unequal coordinates")));
            }
        }
        return Ok(Outcome::Pass("every chosen point is diagonal".into()));
    }
    Ok(candidate_scan(
        &candidates(&s),
        |c| if c.is_diagonal() { Truth::True } else { negate(s.member(c)) },
        "chosen points diagonal",
    ))
}

fn check_scale(rule: &Rule, x: &Problem, a: &Point) -> Result<Outcome> {
    if a.dim() != x.n() {
        return Err(Error::DimensionMismatch { expected: x.n(), got: a.dim() });
    }
    if !a.iter().all(Rat::is_positive) {
        return Err(Error::NonpositiveScale);
    }
    let y = x.scale(a)?;
    let sx = solve(rule, x)?;
    let sy = solve(rule, &y)?;
    let zero = vec![Rat::zero(); x.n()];
    let pulled = exact_pieces(&sy).map(|ps| ps.iter().map(|p| p.pullback(a, &zero)).collect());
    let mut cands = candidates(&sx);
    cands.extend(candidates(&sy).iter().map(|c| c.div(a)));
    Ok(compare_sets(
        exact_pieces(&sx),
        pulled,
        &cands,
        &|c| sx.member(c),
        &|c| sy.member(&c.hadamard(a)),
        "F(aX) = aF(X)",
    ))
}

fn check_anonymity(rule: &Rule, x: &Problem, pi: &Permutation) -> Result<Outcome> {
    if pi.len() != x.n() {
        return Err(Error::DimensionMismatch { expected: x.n(), got: pi.len() });
    }
    if !x.is_symmetric() {
        return Err(bad(format!("{x} is not symmetric")));
    }
    let s = solve(rule, x)?;
    if s.is_exact() {
        let permuted: Vec<HPolyhedron> = s.pieces().iter().map(|p| p.permute(pi.image())).collect();
        return Ok(match union_not_subset(&permuted, s.pieces()) {
            None => Outcome::Pass("F(X) is closed under the permutation".into()),
            Some(p) => Outcome::Violation(Some(p.clone()), format!("{p} is a permuted chosen point that is not chosen")),
        });
    }
    Ok(candidate_scan(
        &candidates(&s),
        |c| match s.member(c) {
            Truth::True => s.member(&c.permute(pi)),
            Truth::False => Truth::True,
            Truth::Uncertain => Truth::Uncertain,
        },
        "x^pi chosen whenever x is",
    ))
}

fn check_contraction(rule: &Rule, x: &Problem, sub: &Problem) -> Result<Outcome> {
    require_equal_able(x, "X")?;
    require_equal_able(sub, "X'")?;
    if sub.n() != x.n() || !sub.is_subset_of(x) {
        return Err(bad(format!("{sub} is not a subset of {x}")));
    }
    let s = solve(rule, x)?;
    let t = solve(rule, sub)?;
    if s.is_exact() && t.is_exact() {
        let inter: Vec<HPolyhedron> = s
            .pieces()
            .iter()
            .flat_map(|p| sub.generators().iter().map(move |g| p.intersect(&HPolyhedron::boxed(g))))
            .collect();
        if union_point(&inter).is_none() {
            return Ok(Outcome::Vacuous("X' ∩ F(X) is empty".into()));
        }
        return Ok(compare_sets(Some(t.pieces().to_vec()), Some(inter), &[], &|_| Truth::True, &|_| Truth::True, "F(X') = X' ∩ F(X)"));
    }
    let mut cands = candidates(&s);
    cands.extend(candidates(&t));
    cands.retain(|c| sub.holds(c));
    if !cands.iter().any(|c| s.member(c) == Truth::True) {
        return Ok(Outcome::Inconclusive("no candidate certifies X' ∩ F(X) nonempty".into()));
    }
    Ok(compare_sets(None, None, &cands, &|c| t.member(c), &|c| s.member(c), "F(X') = X' ∩ F(X)"))
}

fn check_equal_addition(rule: &Rule, x: &Problem, alpha: &Rat) -> Result<Outcome> {
    if !alpha.is_positive() {
        return Err(Error::NonpositiveShift);
    }
    require_equal_able(x, "X")?;
    let n = x.n();
    let y = x.translate(alpha)?;
    let s = solve(rule, x)?;
    let t = solve(rule, &y)?;
    let ones = vec![Rat::one(); n];
    let shift = vec![alpha.clone(); n];
    let pulled = exact_pieces(&t).map(|ps| {
        ps.iter()
            .map(|p| {
                let mut q = p.pullback(&ones, &shift);
                for i in 0..n {
                    q.push(LinConstraint::coord(n, i, Sense::Ge, Rat::zero()));
                }
                q
            })
            .collect()
    });
    let mut cands = candidates(&s);
    cands.extend(candidates(&t).iter().map(|c| c.shift(&-alpha)).filter(Point::is_nonnegative));
    Ok(compare_sets(
        exact_pieces(&s),
        pulled,
        &cands,
        &|c| s.member(c),
        &|c| t.member(&c.shift(alpha)),
        "x ∈ F(X) iff x + a1 ∈ F(cmp(X + a1))",
    ))
}

fn check_compromise(rule: &Rule, x: &Problem, a: &Point, b: &Point, alpha: &Rat) -> Result<Outcome> {
    require_equal_able(x, "X")?;
    if alpha.is_negative() || *alpha > Rat::one() {
        return Err(bad(format!("mixing weight {alpha} outside [0,1]")));
    }
    let s = solve(rule, x)?;
    for p in [a, b] {
        match s.member(p) {
            Truth::True => {}
            Truth::Uncertain => return Ok(Outcome::Inconclusive(format!("membership of {p} ties within tolerance"))),
            Truth::False => return Err(bad(format!("{p} is not chosen in {x}"))),
        }
    }
    let m = a.mix(b, alpha);
    if !x.holds(&m) {
        return Ok(Outcome::Vacuous(format!("mix {m} is not feasible")));
    }
    let n = x.n();
    if s.is_exact() {
        for (piece, verts) in s.pieces().iter().zip(s.piece_vertices()) {
            if verts.iter().any(|v| v.ge(&m)) {
                return Ok(Outcome::Pass(format!("a chosen point dominates {m}")));
            }
            let mut q = piece.clone();
            for i in 0..n {
                q.push(LinConstraint::coord(n, i, Sense::Ge, m[i].clone()));
            }
            if Region::new(q).point().is_some() {
                return Ok(Outcome::Pass(format!("a chosen point dominates {m}")));
            }
        }
        return Ok(Outcome::Violation(Some(m.clone()), format!("no chosen z with z >= {m}")));
    }
    let mut cands = candidates(&s);
    cands.push(m.clone());
    for c in &cands {
        if c.ge(&m) && s.member(c) == Truth::True {
            return Ok(Outcome::Pass(format!("{c} is chosen and dominates {m}")));
        }
    }
    Ok(Outcome::Inconclusive(format!("no candidate certifies a chosen point above {m}")))
}

/// Hammond equity on one instance; indices are 0-based.
pub fn check_hammond_instance(rule: &Rule, x: &Problem, a: &Point, b: &Point, i: usize, j: usize) -> Result<Verdict> {
    let inst = Instance::Hammond { x: x.clone(), a: a.clone(), b: b.clone(), i, j };
    check_axiom(rule, AxiomId::HammondEai, &inst)
}

fn hammond_outcome(rule: &Rule, x: &Problem, a: &Point, b: &Point, i: usize, j: usize) -> Result<Outcome> {
    let n = x.n();
    if a.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim().min(b.dim()) });
    }
    if i == j || i >= n || j >= n {
        return Err(bad(format!("individuals {} and {} must be distinct and in range", i + 1, j + 1)));
    }
    if !(a[i] < b[i] && b[i] < b[j] && b[j] < a[j]) {
        return Err(bad("the pattern x_i < y_i < y_j < x_j does not hold"));
    }
    if (0..n).any(|k| k != i && k != j && a[k] != b[k]) {
        return Err(bad("x and y differ outside i and j"));
    }
    require_equal_able(x, "X")?;
    if !x.holds(a) || !x.holds(b) {
        return Err(bad("x and y must lie in X"));
    }
    let s = solve(rule, x)?;
    Ok(match s.member(a) {
        Truth::False => Outcome::Vacuous(format!("{a} is not chosen")),
        Truth::Uncertain => Outcome::Inconclusive(format!("membership of {a} ties within tolerance")),
        Truth::True => Outcome::from_truth(s.member(b), Some(b.clone()), &format!("{a} chosen and {b} feasible, so {b} chosen")),
    })
}

/// The composed point `(y_M, x_{N∖M})`.
pub fn compose(m: &[usize], y: &Point, x: &Point) -> Point {
    Point((0..x.dim()).map(|k| if m.contains(&k) { y[k].clone() } else { x[k].clone() }).collect())
}

/// Separability on one instance; `m` holds 0-based indices.
pub fn check_separability_instance(rule: &Rule, m: &[usize], a: &Point, b: &Point, x: &Problem, sub: &Problem) -> Result<Verdict> {
    let inst = Instance::Separability { x: x.clone(), sub: sub.clone(), m: m.to_vec(), a: a.clone(), b: b.clone() };
    check_axiom(rule, AxiomId::SeparabilityEai, &inst)
}

fn separability_outcome(rule: &Rule, m: &[usize], a: &Point, b: &Point, x: &Problem, sub: &Problem) -> Result<Outcome> {
    let n = x.n();
    if sub.n() != n || a.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sub.n() });
    }
    let mut ms = m.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.is_empty() || ms.len() >= n || ms.iter().any(|&k| k >= n) {
        return Err(bad("M must be a nonempty proper subset of the individuals"));
    }
    if !a.is_nonnegative() || !b.is_nonnegative() || a.is_zero() || b.is_zero() {
        return Err(bad("x and y must be nonnegative and nonzero"));
    }
    require_equal_able(x, "X")?;
    require_equal_able(sub, "X'")?;
    let yx = compose(&ms, b, a);
    let xy = compose(&ms, a, b);
    for (p, prob, name) in [(a, x, "X"), (&yx, x, "X"), (&xy, sub, "X'"), (b, sub, "X'")] {
        if !prob.holds(p) {
            return Err(bad(format!("{p} is not in {name}")));
        }
    }
    let s = solve(rule, x)?;
    let premise = s.member(a).and(negate(s.member(&yx)));
    Ok(match premise {
        Truth::False => Outcome::Vacuous(format!("premise fails: need {a} chosen and {yx} not chosen in X")),
        Truth::Uncertain => Outcome::Inconclusive("premise ties within tolerance".into()),
        Truth::True => {
            let t = solve(rule, sub)?;
            Outcome::from_truth(negate(t.member(b)), Some(b.clone()), &format!("{b} not chosen in X'"))
        }
    })
}

/// Search parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget: u64,
    pub seed: u64,
    /// Number of individuals in generated instances.
    pub n: usize,
    /// Worker count; `None` defers to `RELFAIR_THREADS`.
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Whether index 0 is the axiom's bundled fixture.
    pub fixtures: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig { budget: 10_000, seed: 0, n: 2, threads: None, fixtures: true }
    }
}

const CHUNK: u64 = 256;

/// Draws instances until a violation is found or the budget is spent.
///
/// Instance `k` depends only on `(seed, k)`, and the reported violation is
/// the one with the lowest index, so the result does not depend on the
/// number of workers.
pub fn search_violation(rule: &Rule, axiom: AxiomId, cfg: &SearchConfig) -> Result<Verdict> {
    if cfg.budget == 0 {
        return Err(Error::BadParameter("budget must be positive".into()));
    }
    let threads = thread_count(cfg.threads);
    let (mut pass, mut vacuous, mut inconclusive, mut skipped) = (0u64, 0u64, 0u64, 0u64);
    let mut start = 0;
    while start < cfg.budget {
        let end = (start + CHUNK).min(cfg.budget);
        let indices: Vec<u64> = (start..end).collect();
        let results = par_map(threads, &indices, |k| run_one(rule, axiom, cfg, k));
        for (k, r) in indices.iter().zip(results) {
            match r? {
                None => skipped += 1,
                Some(v) => match v.status {
                    Status::Violation => {
                        let mut v = v;
                        if let Some(w) = v.witness.as_mut() {
                            w.seed = Some(cfg.seed);
                            w.index = Some(*k);
                        }
                        v.note = format!("{} (instance {k} of {})", v.note, cfg.budget);
                        return Ok(v);
                    }
                    Status::Inconclusive => inconclusive += 1,
                    Status::Pass if v.is_vacuous() => vacuous += 1,
                    Status::Pass => pass += 1,
                },
            }
        }
        start = end;
    }
    let note = format!("{} instances: {pass} pass, {vacuous} vacuous, {inconclusive} inconclusive, {skipped} not generated", cfg.budget);
    // A search that checked nothing certifies nothing.
    Ok(if inconclusive > 0 || skipped == cfg.budget { Verdict::inconclusive(note) } else { Verdict::pass(note) })
}

fn run_one(rule: &Rule, axiom: AxiomId, cfg: &SearchConfig, k: u64) -> Result<Option<Verdict>> {
    let inst = if k == 0 && cfg.fixtures {
        match generate::fixture(axiom, cfg.n) {
            Some(i) => Some(i),
            None => generate::instance(rule, axiom, cfg.n, &mut instance_rng(cfg.seed, k))?,
        }
    } else {
        generate::instance(rule, axiom, cfg.n, &mut instance_rng(cfg.seed, k))?
    };
    let Some(inst) = inst else { return Ok(None) };
    match check_axiom(rule, axiom, &inst) {
        Ok(v) => Ok(Some(v)),
        Err(Error::BadInstance(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The seven example rules used to show the axioms are independent, with
/// the one axiom each is expected to violate.
pub fn independence_rules() -> Vec<(String, Rule, AxiomId)> {
    let mk = |k: RuleKind| Rule::of(k).expect("valid built-in rule");
    vec![
        ("ks".into(), mk(RuleKind::Ks), AxiomId::IntermediatePareto),
        ("egalitarian".into(), mk(RuleKind::Egalitarian), AxiomId::ScaleInvariance),
        ("dictator".into(), mk(RuleKind::Dictator(0)), AxiomId::Anonymity),
        ("weak_pareto_set".into(), mk(RuleKind::WeakParetoSet), AxiomId::ContractionEai),
        ("leximin".into(), mk(RuleKind::RelativeLeximin), AxiomId::Continuity),
        ("nash".into(), mk(RuleKind::Nash), AxiomId::EqualAdditionEai),
        ("relative_max".into(), mk(RuleKind::RelativeMax), AxiomId::CompromisabilityEai),
    ]
}

/// One cell of an axiom matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub rule: String,
    pub axiom: AxiomId,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub seed: u64,
    pub budget: u64,
    pub cells: Vec<MatrixCell>,
}

impl MatrixReport {
    pub fn cell(&self, rule: &str, axiom: AxiomId) -> Option<&MatrixCell> {
        self.cells.iter().find(|c| c.rule == rule && c.axiom == axiom)
    }

    /// Plain-text table, one row per rule.
    pub fn to_table(&self) -> String {
        let mut axioms: Vec<AxiomId> = Vec::new();
        for c in &self.cells {
            if !axioms.contains(&c.axiom) {
                axioms.push(c.axiom);
            }
        }
        let mut rules: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !rules.contains(&c.rule.as_str()) {
                rules.push(&c.rule);
            }
        }
        let abbrev = |s: Status| match s {
            Status::Pass => "pass",
            Status::Violation => "VIOLATION",
            Status::Inconclusive => "inconcl.",
        };
        let mut out = format!("{:<16}", "rule");
        for a in &axioms {
            out.push_str(&format!(" {:<21}", a.name()));
        }
        out.push('\n');
        for r in rules {
            out.push_str(&format!("{r:<16}"));
            for a in &axioms {
                let s = self.cell(r, *a).map(|c| abbrev(c.verdict.status)).unwrap_or("-");
                out.push_str(&format!(" {s:<21}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `search_violation` for every (rule, axiom) pair.
pub fn axiom_matrix(rules: &[(String, Rule)], axioms: &[AxiomId], cfg: &SearchConfig) -> Result<MatrixReport> {
    if rules.is_empty() || axioms.is_empty() {
        return Err(Error::BadParameter("matrix needs at least one rule and one axiom".into()));
    }
    let mut cells = Vec::with_capacity(rules.len() * axioms.len());
    for (name, rule) in rules {
        for &axiom in axioms {
            let verdict = search_violation(rule, axiom, cfg)?;
            cells.push(MatrixCell { rule: name.clone(), axiom, verdict });
        }
    }
    Ok(MatrixReport { seed: cfg.seed, budget: cfg.budget, cells })
}

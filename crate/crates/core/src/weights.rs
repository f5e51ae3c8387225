//! Weight sets `W ⊂ Δ` stored by vertices, and symmetric-norm penalties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Permutation, Point};
use crate::lp::{feasible_point, HPolyhedron, LinConstraint, Sense};
use crate::rational::Rat;
use crate::real::{Real, Scalar};

/// A convex weight set given by its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WeightSetJson", into = "WeightSetJson")]
pub struct WeightSet {
    n: usize,
    vertices: Vec<Point>,
    approximate: bool,
}

/// On-disk weight-set format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightSetJson {
    pub n: usize,
    pub vertices: Vec<Point>,
    #[serde(default)]
    pub symmetrize: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate: bool,
}

impl TryFrom<WeightSetJson> for WeightSet {
    type Error = Error;
    fn try_from(j: WeightSetJson) -> Result<WeightSet> {
        if let Some(v) = j.vertices.iter().find(|v| v.dim() != j.n) {
            return Err(Error::DimensionMismatch { expected: j.n, got: v.dim() });
        }
        let mut w = make_weight_set(j.vertices)?;
        w.approximate = j.approximate;
        Ok(if j.symmetrize { w.symmetrize() } else { w })
    }
}

impl From<WeightSet> for WeightSetJson {
    fn from(w: WeightSet) -> WeightSetJson {
        WeightSetJson { n: w.n, vertices: w.vertices, symmetrize: false, approximate: w.approximate }
    }
}

/// Validates simplex membership, then sorts and deduplicates.
pub fn make_weight_set(vertices: Vec<Point>) -> Result<WeightSet> {
    let n = vertices.first().ok_or(Error::EmptyInput)?.dim();
    if n < 2 {
        return Err(Error::BadParameter("dimension must be at least 2".into()));
    }
    for v in &vertices {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
        if !v.is_nonnegative() || v.sum() != Rat::one() {
            return Err(Error::NotInSimplex(v.to_string()));
        }
    }
    Ok(WeightSet::raw(n, vertices, false))
}

/// The vertices of `Δ`.
pub fn simplex_weights(n: usize) -> Result<WeightSet> {
    check_n(n)?;
    Ok(WeightSet::raw(n, (0..n).map(|i| Point::unit(n, i)).collect(), false))
}

/// `{(1/n, …, 1/n)}`.
pub fn uniform_singleton(n: usize) -> Result<WeightSet> {
    check_n(n)?;
    Ok(WeightSet::raw(n, vec![uniform(n)], false))
}

/// All permutations of `w`: the generalized Gini weight set.
pub fn gini_weights(w: &Point) -> Result<WeightSet> {
    Ok(make_weight_set(vec![w.clone()])?.symmetrize())
}

/// `α·{uniform} + (1−α)·Δ`.
pub fn blend_weights(alpha: &Rat, n: usize) -> Result<WeightSet> {
    check_n(n)?;
    if alpha.is_negative() || *alpha > Rat::one() {
        return Err(Error::BadParameter(format!("blend weight {alpha} outside [0,1]")));
    }
    let u = uniform(n);
    let vs = (0..n).map(|i| Point::unit(n, i).mix(&u, &(Rat::one() - alpha))).collect();
    Ok(WeightSet::raw(n, vs, false))
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::BadParameter("dimension must be at least 2".into()));
    }
    Ok(())
}

fn uniform(n: usize) -> Point {
    Point::diagonal(n, &Rat::new(1, n as i64))
}

impl WeightSet {
    fn raw(n: usize, mut vertices: Vec<Point>, approximate: bool) -> WeightSet {
        vertices.sort();
        vertices.dedup();
        WeightSet { n, vertices, approximate }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// True when built as an inner approximation of a non-polyhedral set.
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    /// Closure of the vertex list under all coordinate permutations.
    pub fn symmetrize(&self) -> WeightSet {
        let perms: Vec<Permutation> = Permutation::all(self.n).collect();
        let vs = self.vertices.iter().flat_map(|v| perms.iter().map(move |p| v.permute(p))).collect();
        WeightSet::raw(self.n, vs, self.approximate)
    }

    /// `min_{w ∈ W} w · v`.
    pub fn min_dot(&self, v: &Point) -> Result<Rat> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.dim() });
        }
        Ok(self.min_dot_unchecked(v))
    }

    pub fn min_dot_unchecked(&self, v: &[Rat]) -> Rat {
        self.vertices
            .iter()
            .map(|w| w.iter().zip(v).map(|(a, b)| a * b).sum::<Rat>())
            .min()
            .expect("weight set is nonempty")
    }

    /// `min_{w ∈ W} w · v` for possibly approximate `v`.
    pub fn min_dot_scalar(&self, v: &[Scalar]) -> Scalar {
        self.vertices
            .iter()
            .map(|w| w.iter().zip(v).fold(Scalar::zero(), |acc, (a, b)| acc.add(&Scalar::Exact(a.clone()).mul(b))))
            .min()
            .expect("weight set is nonempty")
    }

    /// Drops every vertex lying in the convex hull of the remaining ones.
    pub fn canonicalize(&self) -> WeightSet {
        // Weights live in an (n−1)-dimensional affine space; small cases use a direct hull.
        let vertices = match self.n {
            2 => {
                let (lo, hi) = (self.vertices.first(), self.vertices.last());
                lo.into_iter().chain(hi).cloned().collect()
            }
            3 => hull_2d(&self.vertices),
            _ => self.canonicalize_lp(),
        };
        WeightSet::raw(self.n, vertices, self.approximate)
    }

    fn canonicalize_lp(&self) -> Vec<Point> {
        let mut vs = self.vertices.clone();
        let mut i = 0;
        while i < vs.len() {
            let others: Vec<&Point> = vs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
            if !others.is_empty() && in_hull(&vs[i], &others) {
                vs.remove(i);
            } else {
                i += 1;
            }
        }
        vs
    }

    /// Whether the convex hull is closed under coordinate permutations.
    pub fn is_symmetric(&self) -> bool {
        let refs: Vec<&Point> = self.vertices.iter().collect();
        (1..self.n).map(|k| Permutation::transposition(self.n, 0, k)).all(|pi| {
            self.vertices.iter().all(|v| {
                let p = v.permute(&pi);
                self.vertices.binary_search(&p).is_ok() || in_hull(&p, &refs)
            })
        })
    }
}

/// Extreme points of 3-dimensional weights, via a monotone-chain hull on the first two coordinates.
fn hull_2d(pts: &[Point]) -> Vec<Point> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let cross = |o: &Point, a: &Point, b: &Point| (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0]);
    // `pts` is sorted lexicographically, which is the order the chain needs.
    let chain = |iter: &mut dyn Iterator<Item = &Point>| {
        let mut h: Vec<Point> = Vec::new();
        for p in iter {
            while h.len() >= 2 && !cross(&h[h.len() - 2], &h[h.len() - 1], p).is_positive() {
                h.pop();
            }
            h.push(p.clone());
        }
        h.pop();
        h
    };
    let mut lower = chain(&mut pts.iter());
    let upper = chain(&mut pts.iter().rev());
    lower.extend(upper);
    if lower.is_empty() {
        // All points coincide in the first two coordinates.
        return vec![pts[0].clone()];
    }
    lower
}

/// Whether `p` is a convex combination of `pts`, decided by a feasibility LP.
fn in_hull(p: &Point, pts: &[&Point]) -> bool {
    let k = pts.len();
    let mut cs = Vec::with_capacity(k + p.dim() + 1);
    for j in 0..k {
        cs.push(LinConstraint::coord(k, j, Sense::Ge, Rat::zero()));
    }
    cs.push(LinConstraint::new(vec![Rat::one(); k], Sense::Eq, Rat::one()));
    for i in 0..p.dim() {
        cs.push(LinConstraint::new(pts.iter().map(|q| q[i].clone()).collect(), Sense::Eq, p[i].clone()));
    }
    feasible_point(&HPolyhedron::new(k, cs)).is_some()
}

/// Built-in symmetric norms for the mean-minus-norm rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormId {
    Sup,
    L1,
    Euclidean,
    /// `SD(y) = (1/n Σ y_i²)^{1/2}`, the Euclidean norm scaled by `n^{-1/2}`.
    Sd,
}

/// The penalty `θ·‖·‖`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Penalty {
    pub norm: NormId,
    pub theta: Rat,
}

impl Penalty {
    pub fn new(norm: NormId, theta: Rat) -> Result<Penalty> {
        if theta.is_negative() {
            return Err(Error::BadNorm(format!("penalty weight {theta} is negative")));
        }
        Ok(Penalty { norm, theta })
    }

    /// `θ‖v‖`.
    pub fn value(&self, v: &[Scalar]) -> Scalar {
        let theta = Scalar::Exact(self.theta.clone());
        let norm = match self.norm {
            NormId::Sup => v.iter().map(Scalar::abs).max().unwrap_or_else(Scalar::zero),
            NormId::L1 => v.iter().fold(Scalar::zero(), |a, x| a.add(&x.abs())),
            NormId::Euclidean | NormId::Sd => {
                let mut ss = v.iter().fold(Scalar::zero(), |a, x| a.add(&x.mul(x)));
                if self.norm == NormId::Sd {
                    ss = ss.div(&Scalar::Exact(Rat::from(v.len())));
                }
                ss.sqrt()
            }
        };
        theta.mul(&norm)
    }

    /// `mean(x) − θ‖x − mean(x)·1‖`.
    pub fn mean_minus_norm(&self, x: &[Scalar]) -> Scalar {
        let n = Scalar::Exact(Rat::from(x.len()));
        let mean = x.iter().fold(Scalar::zero(), |a, v| a.add(v)).div(&n);
        let dev: Vec<Scalar> = x.iter().map(|v| v.sub(&mean)).collect();
        mean.sub(&self.value(&dev))
    }

    /// `θ²‖e_1 − (1/n)·1‖²`, exact for every built-in norm.
    fn corner_penalty_sq(&self, n: usize) -> Rat {
        let nn = Rat::from(n);
        let m = &nn - Rat::one();
        let norm_sq = match self.norm {
            NormId::Sup => (&m / &nn).pow(2),
            NormId::L1 => (Rat::from_integer(2) * &m / &nn).pow(2),
            NormId::Euclidean => &m / &nn,
            NormId::Sd => &m / (&nn * &nn),
        };
        self.theta.pow(2) * norm_sq
    }

    /// Whether `mean − θ‖x − mean·1‖ > 0` on the open orthant, which is
    /// equivalent to the objective being weakly monotone. Exact: it holds iff
    /// the objective is nonnegative at `e_1`, i.e. `θ‖e_1 − (1/n)1‖ ≤ 1/n`.
    pub fn is_monotone(&self, n: usize) -> bool {
        self.corner_penalty_sq(n) <= Rat::new(1, n as i64).pow(2)
    }

    /// A point `x ≫ 0` with nonpositive objective when monotonicity fails.
    pub fn monotonicity_witness(&self, n: usize) -> Option<Point> {
        if self.is_monotone(n) {
            return None;
        }
        let scalars = |p: &Point| p.iter().cloned().map(Scalar::Exact).collect::<Vec<_>>();
        let mut eps = Rat::new(1, 2);
        for _ in 0..256 {
            let x = Point::unit(n, 0).shift(&eps);
            if self.mean_minus_norm(&scalars(&x)).ge(&Scalar::zero()) == crate::real::Truth::False {
                return Some(x);
            }
            eps = eps / Rat::from_integer(2);
        }
        None
    }
}

/// Weight set whose lower envelope reproduces `mean − θ‖x − mean·1‖`.
///
/// The objective is concave and positively homogeneous, so it is the lower
/// envelope of its supergradients `(1/n)1 − θ P g` with `g` a dual-norm
/// unit vector and `P` the projection onto sum-zero vectors. For the sup
/// and 1-norms the dual ball is a polytope and the result is exact. For the
/// Euclidean norm and SD the supergradients at `sample_count` seeded
/// directions (plus fixed canonical ones) are shrunk to rational points
/// inside the exact set, giving an inner approximation flagged approximate.
pub fn weight_set_from_norm(n: usize, penalty: &Penalty, sample_count: usize, seed: u64) -> Result<WeightSet> {
    check_n(n)?;
    if sample_count < n {
        return Err(Error::BadParameter(format!("sample_count {sample_count} below dimension {n}")));
    }
    if !penalty.is_monotone(n) {
        let w = penalty.monotonicity_witness(n).map(|p| p.to_string()).unwrap_or_default();
        return Err(Error::MonotonicityViolation(format!(
            "penalty {:?} with theta {} makes the objective nonpositive at {w}",
            penalty.norm, penalty.theta
        )));
    }
    let u = uniform(n);
    let theta = &penalty.theta;
    let project = |g: &Point| -> Point {
        let mean = g.sum() / Rat::from(n);
        g.shift(&-mean)
    };
    let mut approximate = false;
    let vertices: Vec<Point> = match penalty.norm {
        NormId::Sup => (0..n)
            .flat_map(|k| [Point::unit(n, k), Point::unit(n, k).scale(&-Rat::one())])
            .map(|g| u.sub(&project(&g).scale(theta)))
            .collect(),
        NormId::L1 => (0..1u64 << n)
            .map(|mask| Point((0..n).map(|i| if mask >> i & 1 == 1 { Rat::one() } else { -Rat::one() }).collect()))
            .map(|g| u.sub(&project(&g).scale(theta)))
            .collect(),
        NormId::Euclidean | NormId::Sd => {
            // Radius bound: r²‖Py‖² ≤ θ² (Euclidean) or θ²/n (SD).
            let bound = match penalty.norm {
                NormId::Sd => theta.pow(2) / Rat::from(n),
                _ => theta.pow(2),
            };
            let mut dirs: Vec<Point> = Vec::new();
            for k in 0..n {
                dirs.push(Point::unit(n, k));
                dirs.push(Point::unit(n, k).scale(&-Rat::one()));
                let prefix = Point((0..n).map(|i| if i <= k { Rat::one() } else { Rat::zero() }).collect());
                dirs.push(prefix);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..sample_count {
                dirs.push(Point((0..n).map(|_| Rat::from_integer(rng.gen_range(-16..=16))).collect()));
            }
            let mut out = Vec::new();
            for y in dirs {
                let py = project(&y);
                let len_sq = py.dot(&py);
                if len_sq.is_zero() {
                    continue;
                }
                let (r, exact) = shrink_radius(&bound, &len_sq);
                approximate |= !exact;
                out.push(u.sub(&py.scale(&r)));
            }
            out
        }
    };
    for v in &vertices {
        if !v.is_nonnegative() || v.sum() != Rat::one() {
            return Err(Error::NotInSimplex(v.to_string()));
        }
    }
    Ok(WeightSet::raw(n, vertices, approximate).symmetrize().canonicalize())
}

/// Largest `r = k/2^40` with `r²·len_sq ≤ bound`, or the exact root when rational.
fn shrink_radius(bound: &Rat, len_sq: &Rat) -> (Rat, bool) {
    let target = bound / len_sq;
    if let Some(r) = target.sqrt_exact() {
        return (r, true);
    }
    let scale = Rat::from_integer(1 << 40);
    let approx = Real::from_rat(&target).sqrt();
    let guess = Scalar::Approx(approx).mul(&Scalar::Exact(scale.clone()));
    let mut k = Rat::from_integer(guess.to_f64().floor() as i64);
    while (&k / &scale).pow(2) > target {
        k -= &Rat::one();
    }
    (k / scale, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn pt(v: &[(i64, i64)]) -> Point {
        Point(v.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn construction_examples() {
        let w = make_weight_set(vec![pt(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(w, uniform_singleton(2).unwrap());
        let d = make_weight_set(vec![Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])]).unwrap();
        assert_eq!(d, simplex_weights(2).unwrap());
        assert!(matches!(make_weight_set(vec![pt(&[(1, 2), (1, 4)])]), Err(Error::NotInSimplex(_))));
        assert_eq!(make_weight_set(vec![]), Err(Error::EmptyInput));
    }

    #[test]
    fn symmetrize_examples() {
        let w = make_weight_set(vec![pt(&[(2, 3), (1, 3)])]).unwrap().symmetrize();
        assert_eq!(w.vertices(), &[pt(&[(1, 3), (2, 3)]), pt(&[(2, 3), (1, 3)])]);
        assert_eq!(uniform_singleton(2).unwrap().symmetrize(), uniform_singleton(2).unwrap());
        assert_eq!(gini_weights(&pt(&[(1, 2), (1, 3), (1, 6)])).unwrap().vertices().len(), 6);
    }

    #[test]
    fn blend_endpoints() {
        for n in 2..5 {
            assert_eq!(blend_weights(&Rat::one(), n).unwrap(), uniform_singleton(n).unwrap());
            assert_eq!(blend_weights(&Rat::zero(), n).unwrap(), simplex_weights(n).unwrap());
        }
        assert!(blend_weights(&rat(3, 2), 2).is_err());
    }

    #[test]
    fn min_dot_examples() {
        let v = pt(&[(1, 2), (1, 1)]);
        assert_eq!(simplex_weights(2).unwrap().min_dot(&v).unwrap(), rat(1, 2));
        assert_eq!(uniform_singleton(2).unwrap().min_dot(&v).unwrap(), rat(3, 4));
        assert_eq!(gini_weights(&pt(&[(2, 3), (1, 3)])).unwrap().min_dot(&v).unwrap(), rat(2, 3));
        assert!(simplex_weights(2).unwrap().min_dot(&Point::from_ints(&[1, 1, 1])).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let w = make_weight_set(vec![Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1]), pt(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(w.canonicalize(), simplex_weights(2).unwrap());
        assert_eq!(uniform_singleton(2).unwrap().canonicalize(), uniform_singleton(2).unwrap());
        let b = blend_weights(&rat(1, 2), 2).unwrap();
        let mut vs = b.vertices().to_vec();
        vs.push(pt(&[(1, 2), (1, 2)]));
        assert_eq!(make_weight_set(vs).unwrap().canonicalize(), b);
    }

    #[test]
    fn symmetry_via_hull() {
        assert!(simplex_weights(3).unwrap().is_symmetric());
        assert!(!make_weight_set(vec![pt(&[(2, 3), (1, 3)])]).unwrap().is_symmetric());
        // Permutation-closed hull but not a permutation-closed vertex list.
        let w = make_weight_set(vec![
            Point::from_ints(&[1, 0]),
            Point::from_ints(&[0, 1]),
            pt(&[(1, 3), (2, 3)]),
        ])
        .unwrap();
        assert!(w.is_symmetric());
    }

    #[test]
    fn monotonicity_thresholds() {
        let sd = |t: Rat| Penalty::new(NormId::Sd, t).unwrap();
        assert!(sd(Rat::one()).is_monotone(2));
        assert!(!sd(rat(101, 100)).is_monotone(2));
        // Beyond two individuals an SD weight of one is already too large.
        assert!(!sd(Rat::one()).is_monotone(3));
        assert!(sd(rat(7, 10)).is_monotone(3));
        assert!(Penalty::new(NormId::Sup, rat(1, 2)).unwrap().is_monotone(3));
        assert!(!Penalty::new(NormId::Sup, rat(3, 5)).unwrap().is_monotone(3));
        assert!(Penalty::new(NormId::L1, rat(1, 4)).unwrap().is_monotone(3));
        assert!(!Penalty::new(NormId::L1, rat(1, 3)).unwrap().is_monotone(3));
        let x = sd(rat(2, 1)).monotonicity_witness(2).unwrap();
        assert!(x.iter().all(Rat::is_positive));
    }

    #[test]
    fn from_norm_examples() {
        let zero = Penalty::new(NormId::Euclidean, Rat::zero()).unwrap();
        assert_eq!(weight_set_from_norm(3, &zero, 8, 0).unwrap().vertices(), uniform_singleton(3).unwrap().vertices());
        let sup = Penalty::new(NormId::Sup, rat(1, 2)).unwrap();
        let w = weight_set_from_norm(3, &sup, 8, 0).unwrap();
        assert!(!w.is_approximate() && w.is_symmetric());
        let bad = Penalty::new(NormId::Sd, rat(2, 1)).unwrap();
        assert!(matches!(weight_set_from_norm(2, &bad, 8, 0), Err(Error::MonotonicityViolation(_))));
        // SD with two individuals has a rational exact weight set.
        let sd = Penalty::new(NormId::Sd, rat(1, 2)).unwrap();
        let w = weight_set_from_norm(2, &sd, 8, 0).unwrap();
        assert!(!w.is_approximate());
        assert_eq!(w, gini_weights(&pt(&[(3, 4), (1, 4)])).unwrap());
        let eu = Penalty::new(NormId::Euclidean, rat(1, 3)).unwrap();
        assert!(weight_set_from_norm(3, &eu, 16, 7).unwrap().is_approximate());
    }

    fn scalars(p: &Point) -> Vec<Scalar> {
        p.iter().cloned().map(Scalar::Exact).collect()
    }

    fn quarter_point(n: usize) -> impl Strategy<Value = Point> {
        prop::collection::vec(0i64..=16, n).prop_map(|v| Point(v.into_iter().map(|k| rat(k, 4)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_norm_sets_reproduce_objective(x in quarter_point(3), l1 in any::<bool>()) {
            let p = if l1 { Penalty::new(NormId::L1, rat(1, 5)).unwrap() } else { Penalty::new(NormId::Sup, rat(2, 5)).unwrap() };
            let w = weight_set_from_norm(3, &p, 3, 0).unwrap();
            prop_assert_eq!(Scalar::Exact(w.min_dot(&x).unwrap()), p.mean_minus_norm(&scalars(&x)));
        }

        #[test]
        fn inner_approximation_bounds_objective(x in quarter_point(3)) {
            let p = Penalty::new(NormId::Sd, rat(1, 2)).unwrap();
            let w = weight_set_from_norm(3, &p, 32, 1).unwrap();
            let approx = Scalar::Exact(w.min_dot(&x).unwrap());
            prop_assert!(approx >= p.mean_minus_norm(&scalars(&x)));
        }

        #[test]
        fn min_dot_properties(v in quarter_point(3), u in quarter_point(3), wv in prop::collection::vec(1i64..6, 3)) {
            let total: i64 = wv.iter().sum();
            let w0 = Point(wv.iter().map(|&k| rat(k, total)).collect());
            let w = make_weight_set(vec![w0]).unwrap();
            let sym = w.symmetrize();
            let by_perm = Permutation::all(3).map(|p| w.min_dot(&v.permute(&p)).unwrap()).min().unwrap();
            prop_assert_eq!(sym.min_dot(&v).unwrap(), by_perm);
            let mid = v.mix(&u, &rat(1, 2));
            prop_assert!(sym.min_dot(&mid).unwrap() * rat(2, 1) >= sym.min_dot(&v).unwrap() + sym.min_dot(&u).unwrap());
            prop_assert_eq!(sym.min_dot(&Point::from_ints(&[1, 1, 1])).unwrap(), Rat::one());
            prop_assert_eq!(sym.canonicalize().min_dot(&v).unwrap(), sym.min_dot(&v).unwrap());
        }
    }
}

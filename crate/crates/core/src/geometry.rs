//! Problems as comprehensive hulls of finite generator sets.

use std::fmt;
use std::ops::Deref;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// A utility vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<Rat>);

impl Point {
    pub fn new(coords: Vec<Rat>) -> Point {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Point {
        Point(coords.iter().map(|&c| Rat::from_integer(c)).collect())
    }

    /// Parses comma-separated rationals, e.g. `"3/2,3/2"`.
    pub fn parse(s: &str) -> Result<Point> {
        let coords = s.split(',').map(|c| c.parse::<Rat>()).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Point(coords))
    }

    /// The point `(c, …, c)`.
    pub fn diagonal(n: usize, c: &Rat) -> Point {
        Point(vec![c.clone(); n])
    }

    pub fn zeros(n: usize) -> Point {
        Point::diagonal(n, &Rat::zero())
    }

    pub fn unit(n: usize, i: usize) -> Point {
        let mut p = Point::zeros(n);
        p.0[i] = Rat::one();
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<Rat> {
        self.0
    }

    /// Coordinate-wise `self ≤ o`.
    pub fn le(&self, o: &Point) -> bool {
        self.iter().zip(o.iter()).all(|(a, b)| a <= b)
    }

    /// Coordinate-wise `self ≥ o`.
    pub fn ge(&self, o: &Point) -> bool {
        o.le(self)
    }

    /// Strict dominance in every coordinate, `self ≫ o`.
    pub fn gg(&self, o: &Point) -> bool {
        self.iter().zip(o.iter()).all(|(a, b)| a > b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.iter().all(|c| !c.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(Rat::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.iter().all_equal()
    }

    pub fn add(&self, o: &Point) -> Point {
        Point(self.iter().zip(o.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point(self.iter().zip(o.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn shift(&self, a: &Rat) -> Point {
        Point(self.iter().map(|c| c + a).collect())
    }

    pub fn scale(&self, a: &Rat) -> Point {
        Point(self.iter().map(|c| c * a).collect())
    }

    /// Coordinate-wise product.
    pub fn hadamard(&self, o: &Point) -> Point {
        Point(self.iter().zip(o.iter()).map(|(a, b)| a * b).collect())
    }

    /// Coordinate-wise quotient.
    pub fn div(&self, o: &Point) -> Point {
        Point(self.iter().zip(o.iter()).map(|(a, b)| a / b).collect())
    }

    pub fn meet(&self, o: &Point) -> Point {
        Point(self.iter().zip(o.iter()).map(|(a, b)| a.clone().min(b.clone())).collect())
    }

    pub fn join(&self, o: &Point) -> Point {
        Point(self.iter().zip(o.iter()).map(|(a, b)| a.clone().max(b.clone())).collect())
    }

    pub fn dot(&self, o: &Point) -> Rat {
        self.iter().zip(o.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn sum(&self) -> Rat {
        self.iter().sum()
    }

    pub fn min_coord(&self) -> Rat {
        self.iter().min().cloned().unwrap_or_default()
    }

    pub fn max_coord(&self) -> Rat {
        self.iter().max().cloned().unwrap_or_default()
    }

    /// `αx + (1−α)y`.
    pub fn mix(&self, o: &Point, alpha: &Rat) -> Point {
        let beta = Rat::one() - alpha;
        Point(self.iter().zip(o.iter()).map(|(a, b)| a * alpha + b * &beta).collect())
    }

    /// Sup-norm distance.
    pub fn dist_sup(&self, o: &Point) -> Rat {
        self.iter().zip(o.iter()).map(|(a, b)| (a - b).abs()).max().unwrap_or_default()
    }

    /// `x^π = (x_{π(1)}, …, x_{π(n)})`.
    pub fn permute(&self, pi: &Permutation) -> Point {
        Point(pi.image.iter().map(|&j| self.0[j].clone()).collect())
    }
}

impl Deref for Point {
    type Target = [Rat];
    fn deref(&self) -> &[Rat] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.iter().join(","))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A bijection of `{0, …, n−1}`; serialized 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Builds from a 0-based image vector.
    pub fn new(image: Vec<usize>) -> Result<Permutation> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(Error::BadParameter(format!("not a permutation: {image:?}")));
            }
            seen[j] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation { image: (0..n).collect() }
    }

    /// Swaps `i` and `j` (0-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Permutation {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(i, j);
        Permutation { image }
    }

    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(|image| Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.image.iter().map(|j| j + 1))
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Permutation, D::Error> {
        let one_based = Vec::<usize>::deserialize(d)?;
        if one_based.contains(&0) {
            return Err(serde::de::Error::custom("permutation indices are 1-based"));
        }
        Permutation::new(one_based.into_iter().map(|j| j - 1).collect()).map_err(serde::de::Error::custom)
    }
}

/// `X = cmp(A)` for a finite, canonical generator set `A`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ProblemJson", into = "ProblemJson")]
pub struct Problem {
    n: usize,
    generators: Vec<Point>,
}

/// On-disk problem format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    pub n: usize,
    #[serde(default = "default_kind")]
    pub kind: HullKind,
    pub generators: Vec<Point>,
}

fn default_kind() -> HullKind {
    HullKind::Cmp
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullKind {
    Cmp,
    Scmp,
}

impl TryFrom<ProblemJson> for Problem {
    type Error = Error;
    fn try_from(j: ProblemJson) -> Result<Problem> {
        if let Some(p) = j.generators.iter().find(|p| p.dim() != j.n) {
            return Err(Error::DimensionMismatch { expected: j.n, got: p.dim() });
        }
        match j.kind {
            HullKind::Cmp => make_problem(j.generators),
            HullKind::Scmp => scmp_hull(j.generators),
        }
    }
}

impl From<Problem> for ProblemJson {
    fn from(p: Problem) -> ProblemJson {
        ProblemJson { n: p.n, kind: HullKind::Cmp, generators: p.generators }
    }
}

/// `cmp(points)`: keeps the ≤-maximal points, deduplicated and sorted.
pub fn make_problem(points: Vec<Point>) -> Result<Problem> {
    let n = points.first().ok_or(Error::EmptyInput)?.dim();
    if n < 2 {
        return Err(Error::BadParameter("dimension must be at least 2".into()));
    }
    for p in &points {
        if p.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
        }
        if !p.is_nonnegative() {
            return Err(Error::NegativeCoordinate(p.to_string()));
        }
    }
    let generators = maximal(points);
    if let Some(i) = (0..n).find(|&i| generators.iter().all(|g| g[i].is_zero())) {
        return Err(Error::DegenerateProblem(i));
    }
    Ok(Problem { n, generators })
}

fn maximal(mut points: Vec<Point>) -> Vec<Point> {
    points.sort();
    points.dedup();
    let keep: Vec<bool> = points
        .iter()
        .map(|p| !points.iter().any(|q| q != p && p.le(q)))
        .collect();
    points.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

/// `scmp(points)`: the comprehensive hull of all coordinate permutations.
pub fn scmp_hull(points: Vec<Point>) -> Result<Problem> {
    let n = points.first().ok_or(Error::EmptyInput)?.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
    }
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let all = points.iter().flat_map(|p| perms.iter().map(move |pi| p.permute(pi))).collect();
    make_problem(all)
}

impl Problem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    /// `b(X)`: coordinate-wise maximum over generators.
    pub fn ideal_point(&self) -> Point {
        Point(
            (0..self.n)
                .map(|i| self.generators.iter().map(|g| &g[i]).max().cloned().unwrap_or_default())
                .collect(),
        )
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        Ok(())
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.holds(x))
    }

    /// Membership without the dimension check.
    pub fn holds(&self, x: &Point) -> bool {
        x.is_nonnegative() && self.generators.iter().any(|g| x.le(g))
    }

    /// `aX` for `a ≫ 0`.
    pub fn scale(&self, a: &Point) -> Result<Problem> {
        self.check_dim(a)?;
        if !a.iter().all(Rat::is_positive) {
            return Err(Error::NonpositiveScale);
        }
        make_problem(self.generators.iter().map(|g| g.hadamard(a)).collect())
    }

    /// `cmp(X + α1)` for `α > 0`.
    pub fn translate(&self, alpha: &Rat) -> Result<Problem> {
        if !alpha.is_positive() {
            return Err(Error::NonpositiveShift);
        }
        make_problem(self.generators.iter().map(|g| g.shift(alpha)).collect())
    }

    pub fn permute(&self, pi: &Permutation) -> Result<Problem> {
        if pi.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: pi.len() });
        }
        make_problem(self.generators.iter().map(|g| g.permute(pi)).collect())
    }

    /// No `y ∈ X` with `y ≫ x`.
    pub fn is_weak_pareto(&self, x: &Point) -> Result<bool> {
        self.require(x)?;
        Ok(self.weak_pareto_unchecked(x))
    }

    pub fn weak_pareto_unchecked(&self, x: &Point) -> bool {
        !self.generators.iter().any(|g| g.gg(x))
    }

    /// No `y ∈ X` with `y > x`; for a union of boxes this is exactly the generator set.
    pub fn is_strong_pareto(&self, x: &Point) -> Result<bool> {
        self.require(x)?;
        Ok(self.generators.binary_search(x).is_ok())
    }

    fn require(&self, x: &Point) -> Result<()> {
        if !self.contains(x)? {
            return Err(Error::PointNotInProblem(x.to_string()));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        let swaps = (1..self.n).map(|k| Permutation::transposition(self.n, 0, k));
        swaps.into_iter().all(|pi| {
            self.generators.iter().all(|g| self.generators.binary_search(&g.permute(&pi)).is_ok())
        })
    }

    /// Membership in the equal-able class: all ideal coordinates coincide.
    pub fn is_equal_able(&self) -> bool {
        self.ideal_point().is_diagonal()
    }

    /// `self ⊂ other`.
    pub fn is_subset_of(&self, other: &Problem) -> bool {
        self.n == other.n && self.generators.iter().all(|g| other.holds(g))
    }

    /// `X ∩ Y`, whose corners are the pairwise meets of generators; `None`
    /// when the intersection is degenerate.
    pub fn intersect(&self, other: &Problem) -> Option<Problem> {
        let meets = self
            .generators
            .iter()
            .flat_map(|g| other.generators.iter().map(move |h| g.meet(h)))
            .collect();
        make_problem(meets).ok()
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cmp{{{}}}", self.generators.iter().join(","))
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sup-norm distance from `x ≥ 0` to `cmp(gens)`.
fn dist_to_hull(x: &Point, gens: &[Point]) -> Rat {
    gens.iter()
        .map(|h| x.iter().zip(h.iter()).map(|(a, b)| (a - b).max(Rat::zero())).max().unwrap_or_default())
        .min()
        .unwrap_or_default()
}

/// Upper bound on the sup-norm Hausdorff distance between two problems.
///
/// The distance to a comprehensive hull is monotone along ≤, so its supremum
/// over a box is attained at the box's top corner. The corner formula is
/// therefore exact and no grid refinement can improve it; `h` is only validated.
pub fn hausdorff_upper(x: &Problem, y: &Problem, h: &Rat) -> Result<Rat> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch { expected: x.n, got: y.n });
    }
    if !h.is_positive() {
        return Err(Error::BadParameter("grid spacing must be positive".into()));
    }
    let d1 = x.generators.iter().map(|g| dist_to_hull(g, &y.generators)).max().unwrap_or_default();
    let d2 = y.generators.iter().map(|g| dist_to_hull(g, &x.generators)).max().unwrap_or_default();
    Ok(d1.max(d2))
}

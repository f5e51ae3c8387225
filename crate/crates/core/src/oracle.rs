//! Brute-force grid solver used to cross-check exact choice sets.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Problem};
use crate::harness::{par_map, thread_count};
use crate::rational::Rat;
use crate::real::{Cmp, Scalar};
use crate::rules::{solve, Rule, RuleKind, Welfare};

/// Largest grid the oracle will enumerate.
pub const GRID_LIMIT: u128 = 10_000_000;

/// Grid spacing `h`; every generator corner is added to the grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub h: Rat,
    /// Worker count; `None` defers to `RELFAIR_THREADS`.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl GridSpec {
    pub fn new(h: Rat) -> Result<GridSpec> {
        if !h.is_positive() {
            return Err(Error::BadParameter("grid spacing must be positive".into()));
        }
        Ok(GridSpec { h, threads: None })
    }

    /// Grid values on `[0, top]`: multiples of `h` plus `top` itself.
    fn axis(&self, top: &Rat) -> Vec<Rat> {
        let steps = (top / &self.h).floor().to_i64().unwrap_or(i64::MAX);
        let mut v: Vec<Rat> = (0..=steps).map(|k| &self.h * Rat::from_integer(k)).collect();
        if v.last() != Some(top) {
            v.push(top.clone());
        }
        v
    }

    fn axis_len(&self, top: &Rat) -> u128 {
        let steps = (top / &self.h).floor();
        let base = steps.to_i64().map(|s| s as u128 + 1).unwrap_or(u128::MAX);
        if (&steps * &self.h) == *top {
            base
        } else {
            base.saturating_add(1)
        }
    }

    /// Number of grid points enumerated for `x`, counted per generator box.
    pub fn cardinality(&self, x: &Problem) -> u128 {
        x.generators()
            .iter()
            .map(|g| g.iter().map(|t| self.axis_len(t)).fold(1u128, |a, b| a.saturating_mul(b)))
            .fold(0u128, |a, b| a.saturating_add(b))
    }
}

/// Best grid value and all grid points attaining it, sorted.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub value: Welfare,
    pub argmax: Vec<Point>,
    pub points: u128,
}

/// Enumerates the grid over every generator box and keeps the maximizers.
///
/// For the KS rule the welfare is `min x_i / b_i`, whose maximum over `X` is
/// the KS scalar; its grid maximizers dominate the KS point rather than
/// equal it.
pub fn oracle_solve(rule: &Rule, x: &Problem, grid: &GridSpec) -> Result<OracleResult> {
    let points = grid.cardinality(x);
    if points > GRID_LIMIT {
        return Err(Error::BudgetExceeded { points, limit: GRID_LIMIT });
    }
    let eval = rule.evaluator(x)?;
    let gens = x.generators();
    let idx: Vec<u64> = (0..gens.len() as u64).collect();
    let per_box = par_map(thread_count(grid.threads), &idx, |k| {
        let g = &gens[k as usize];
        let axes: Vec<Vec<Rat>> = g.iter().map(|t| grid.axis(t)).collect();
        let mut best: Option<(Welfare, Vec<Point>)> = None;
        for coords in axes.into_iter().multi_cartesian_product() {
            let p = Point(coords);
            let w = eval.welfare(&p);
            match &mut best {
                None => best = Some((w, vec![p])),
                Some((bw, pts)) => match w.cmp_tol(bw) {
                    Cmp::Greater => best = Some((w, vec![p])),
                    Cmp::Equal | Cmp::Tie => pts.push(p),
                    Cmp::Less => {}
                },
            }
        }
        best
    });
    // Merge by value, then sort argmax points for a deterministic result.
    let mut value: Option<Welfare> = None;
    let mut argmax: Vec<Point> = Vec::new();
    for (w, pts) in per_box.into_iter().flatten() {
        match value.as_ref().map(|v| w.cmp_tol(v)) {
            None | Some(Cmp::Greater) => {
                value = Some(w);
                argmax = pts;
            }
            Some(Cmp::Equal) | Some(Cmp::Tie) => argmax.extend(pts),
            Some(Cmp::Less) => {}
        }
    }
    argmax.sort();
    argmax.dedup();
    let value = value.ok_or_else(|| Error::BadInstance("empty grid".into()))?;
    Ok(OracleResult { value, argmax, points })
}

/// Exact versus grid comparison.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub exact_value: Welfare,
    pub oracle_value: Welfare,
    /// `|exact − oracle|`; for leximin, the largest entrywise difference.
    pub gap: Scalar,
    pub gap_is_zero: bool,
    pub exact_at_least_oracle: bool,
    /// `L·h` with `L` a sup-norm Lipschitz constant of the welfare, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Rat>,
    pub argmax_points: usize,
    /// Argmax points at the exact optimum that fail exact membership; not
    /// checked for KS, whose choice is not the welfare argmax.
    pub argmax_nonmembers: Vec<Point>,
    pub grid_points: u128,
}

impl OracleReport {
    /// Zero gap and every argmax grid point is in the exact choice set.
    pub fn agrees(&self) -> bool {
        self.gap_is_zero && self.exact_at_least_oracle && self.argmax_nonmembers.is_empty()
    }
}

fn gap(a: &Welfare, b: &Welfare) -> Scalar {
    match (a, b) {
        (Welfare::Scalar(x), Welfare::Scalar(y)) => x.sub(y).abs(),
        (Welfare::Lex(x), Welfare::Lex(y)) => x.iter().zip(y).map(|(p, q)| p.sub(q).abs()).max().unwrap_or_else(Scalar::zero),
        _ => unreachable!("welfare shapes agree for one rule"),
    }
}

/// A sup-norm Lipschitz constant of the welfare on `X`, when it is rational.
fn lipschitz(rule: &Rule, x: &Problem) -> Option<Rat> {
    let eval = rule.evaluator(x).ok()?;
    let s = eval.exact_scales()?;
    let smax = s.iter().max()?.clone();
    let b = x.ideal_point();
    Some(match rule.kind() {
        RuleKind::RelativeFair(_) | RuleKind::RelativeMax | RuleKind::Ks => smax,
        RuleKind::Egalitarian | RuleKind::Dictator(_) => Rat::one(),
        RuleKind::MinMaxBlend(a1, a2) => (a1 + a2) * smax,
        RuleKind::Nash => (0..b.dim()).map(|i| (0..b.dim()).filter(|&j| j != i).fold(Rat::one(), |a, j| a * &b[j])).sum(),
        RuleKind::MeanSd(t) => (Rat::one() + t * Rat::from_integer(2)) * smax,
        RuleKind::MeanNorm(p) => (Rat::one() + &p.theta * Rat::from(2 * b.dim())) * smax,
        RuleKind::RelativeLeximin | RuleKind::WeakParetoSet => return None,
    })
}

/// Solves exactly and on the grid and reports the discrepancy.
pub fn compare_oracle(rule: &Rule, x: &Problem, grid: &GridSpec) -> Result<OracleReport> {
    let exact = solve(rule, x)?;
    let oracle = oracle_solve(rule, x, grid)?;
    let g = gap(&exact.choice.value, &oracle.value);
    let gap_is_zero = g.cmp_tol(&Scalar::zero()) != Cmp::Greater;
    let at_optimum = oracle.value.cmp_tol(&exact.choice.value) != Cmp::Less;
    let argmax_nonmembers = if at_optimum && !matches!(rule.kind(), RuleKind::Ks) {
        oracle.argmax.iter().filter(|p| !exact.member(p).lenient()).cloned().collect()
    } else {
        Vec::new()
    };
    Ok(OracleReport {
        exact_at_least_oracle: exact.choice.value.cmp_tol(&oracle.value) != Cmp::Less,
        exact_value: exact.choice.value.clone(),
        oracle_value: oracle.value,
        gap: g,
        gap_is_zero,
        bound: lipschitz(rule, x).map(|l| l * &grid.h),
        argmax_points: oracle.argmax.len(),
        argmax_nonmembers,
        grid_points: oracle.points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_problem, scmp_hull};
    use crate::rational::rat;
    use crate::weights::{simplex_weights, uniform_singleton};

    fn p(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    #[test]
    fn oracle_examples() {
        let x = scmp_hull(vec![p(&[1, 2])]).unwrap();
        let grid = GridSpec::new(rat(1, 4)).unwrap();
        let maximin = Rule::of(RuleKind::RelativeFair(simplex_weights(2).unwrap())).unwrap();
        let r = oracle_solve(&maximin, &x, &grid).unwrap();
        assert_eq!(r.value.as_rat(), Some(&rat(1, 2)));
        for q in [p(&[1, 1]), p(&[1, 2]), p(&[2, 1])] {
            assert!(r.argmax.contains(&q));
        }
        let util = Rule::of(RuleKind::RelativeFair(uniform_singleton(2).unwrap())).unwrap();
        let r = oracle_solve(&util, &x, &grid).unwrap();
        assert_eq!(r.value.as_rat(), Some(&rat(3, 4)));
        assert_eq!(r.argmax, vec![p(&[1, 2]), p(&[2, 1])]);
        let unit = make_problem(vec![p(&[1, 1])]).unwrap();
        let r = oracle_solve(&Rule::of(RuleKind::Nash).unwrap(), &unit, &GridSpec::new(Rat::one()).unwrap()).unwrap();
        assert_eq!(r.points, 4);
        assert_eq!(r.argmax, vec![p(&[1, 1])]);
    }

    #[test]
    fn corners_join_the_grid() {
        let x = make_problem(vec![Point(vec![rat(1, 3), rat(2, 1)])]).unwrap();
        let grid = GridSpec::new(rat(1, 2)).unwrap();
        assert_eq!(grid.cardinality(&x), 2 * 5);
        let rule = Rule::of(RuleKind::Egalitarian).unwrap();
        let rep = compare_oracle(&rule, &x, &grid).unwrap();
        assert!(rep.agrees(), "{rep:?}");
    }

    #[test]
    fn budget_is_enforced() {
        let x = make_problem(vec![p(&[4, 4, 4])]).unwrap();
        let grid = GridSpec::new(rat(1, 1024)).unwrap();
        let rule = Rule::of(RuleKind::Nash).unwrap();
        assert!(matches!(oracle_solve(&rule, &x, &grid), Err(Error::BudgetExceeded { .. })));
        assert!(GridSpec::new(Rat::zero()).is_err());
    }

    #[test]
    fn ks_scalar_is_corner_attained() {
        // The KS point (3/2,3/2) of cmp{(1,3),(3,1),(2,3/2)} lies off every coarse grid.
        let x = make_problem(vec![p(&[1, 3]), p(&[3, 1]), Point(vec![rat(2, 1), rat(3, 2)])]).unwrap();
        let ks = Rule::of(RuleKind::Ks).unwrap();
        for d in [1, 2, 3] {
            let rep = compare_oracle(&ks, &x, &GridSpec::new(rat(1, d)).unwrap()).unwrap();
            assert!(rep.agrees(), "{rep:?}");
            assert_eq!(rep.exact_value.as_rat(), Some(&rat(1, 2)));
        }
    }
}

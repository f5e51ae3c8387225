//! Exact rational linear programming on small H-polyhedra.
//!
//! A dense two-phase simplex with Bland's rule. Free variables are split as
//! `x = u − v`. Sized for a handful of variables and a few dozen rows.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rational::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

/// `coeffs · x (sense) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinConstraint {
    pub coeffs: Vec<Rat>,
    pub sense: Sense,
    pub rhs: Rat,
}

impl LinConstraint {
    pub fn new(coeffs: Vec<Rat>, sense: Sense, rhs: Rat) -> LinConstraint {
        LinConstraint { coeffs, sense, rhs }
    }

    /// `x_i (sense) rhs` in dimension `n`.
    pub fn coord(n: usize, i: usize, sense: Sense, rhs: Rat) -> LinConstraint {
        let mut coeffs = vec![Rat::zero(); n];
        coeffs[i] = Rat::one();
        LinConstraint { coeffs, sense, rhs }
    }

    pub fn lhs(&self, x: &[Rat]) -> Rat {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn holds(&self, x: &[Rat]) -> bool {
        let l = self.lhs(x);
        match self.sense {
            Sense::Le => l <= self.rhs,
            Sense::Ge => l >= self.rhs,
            Sense::Eq => l == self.rhs,
        }
    }

    /// The constraint rewritten as `≤` rows (one, or two for equalities).
    pub fn as_le(&self) -> Vec<(Vec<Rat>, Rat)> {
        let neg = || (self.coeffs.iter().map(|c| -c).collect(), -&self.rhs);
        match self.sense {
            Sense::Le => vec![(self.coeffs.clone(), self.rhs.clone())],
            Sense::Ge => vec![neg()],
            Sense::Eq => vec![(self.coeffs.clone(), self.rhs.clone()), neg()],
        }
    }
}

/// `{x : every constraint holds}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HPolyhedron {
    pub dim: usize,
    pub constraints: Vec<LinConstraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Point },
    Infeasible,
    Unbounded,
}

impl HPolyhedron {
    pub fn new(dim: usize, constraints: Vec<LinConstraint>) -> HPolyhedron {
        HPolyhedron { dim, constraints }
    }

    /// The box `{0 ≤ x ≤ g}`.
    pub fn boxed(g: &Point) -> HPolyhedron {
        let n = g.dim();
        let mut cs = Vec::with_capacity(2 * n);
        for i in 0..n {
            cs.push(LinConstraint::coord(n, i, Sense::Ge, Rat::zero()));
            cs.push(LinConstraint::coord(n, i, Sense::Le, g[i].clone()));
        }
        HPolyhedron::new(n, cs)
    }

    pub fn push(&mut self, c: LinConstraint) {
        self.constraints.push(c);
    }

    pub fn with(mut self, c: LinConstraint) -> HPolyhedron {
        self.push(c);
        self
    }

    pub fn intersect(&self, o: &HPolyhedron) -> HPolyhedron {
        let mut cs = self.constraints.clone();
        cs.extend(o.constraints.iter().cloned());
        HPolyhedron::new(self.dim, cs)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.constraints.iter().all(|c| c.holds(x))
    }

    /// Image under the substitution `x = D y + s` written in `y`-coordinates:
    /// the result contains `y` iff the original contains `D y + s`.
    pub fn pullback(&self, diag: &[Rat], shift: &[Rat]) -> HPolyhedron {
        let cs = self
            .constraints
            .iter()
            .map(|c| LinConstraint {
                coeffs: c.coeffs.iter().zip(diag).map(|(a, d)| a * d).collect(),
                sense: c.sense,
                rhs: &c.rhs - c.lhs(shift),
            })
            .collect();
        HPolyhedron::new(self.dim, cs)
    }

    /// Coordinate permutation: the result contains `x^π` iff the original contains `x`.
    pub fn permute(&self, image: &[usize]) -> HPolyhedron {
        let n = self.dim;
        let cs = self
            .constraints
            .iter()
            .map(|c| {
                // (x^π)_k = x_{π(k)}; a·x = Σ_k a_{π(k)} (x^π)_k.
                let coeffs = (0..n).map(|k| c.coeffs[image[k]].clone()).collect();
                LinConstraint { coeffs, sense: c.sense, rhs: c.rhs.clone() }
            })
            .collect();
        HPolyhedron::new(n, cs)
    }

    /// Per-coordinate bounds when every constraint involves at most one variable.
    fn box_bounds(&self) -> Option<Option<(Vec<Rat>, Vec<Rat>)>> {
        let n = self.dim;
        let mut lo: Vec<Option<Rat>> = vec![None; n];
        let mut hi: Vec<Option<Rat>> = vec![None; n];
        for c in &self.constraints {
            let nz: Vec<usize> = (0..n).filter(|&i| !c.coeffs[i].is_zero()).collect();
            match nz.len() {
                0 => {
                    if !c.holds(&vec![Rat::zero(); n]) {
                        return Some(None);
                    }
                }
                1 => {
                    let i = nz[0];
                    let a = &c.coeffs[i];
                    let v = &c.rhs / a;
                    let (upper, lower) = match (c.sense, a.is_positive()) {
                        (Sense::Eq, _) => (true, true),
                        (Sense::Le, true) | (Sense::Ge, false) => (true, false),
                        _ => (false, true),
                    };
                    if upper && hi[i].as_ref().is_none_or(|h| &v < h) {
                        hi[i] = Some(v.clone());
                    }
                    if lower && lo[i].as_ref().is_none_or(|l| &v > l) {
                        lo[i] = Some(v);
                    }
                }
                _ => return None,
            }
        }
        let mut l = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        for (a, b) in lo.into_iter().zip(hi) {
            match (a, b) {
                (Some(a), Some(b)) => {
                    if a > b {
                        return Some(None);
                    }
                    l.push(a);
                    h.push(b);
                }
                _ => return None,
            }
        }
        Some(Some((l, h)))
    }

    /// Vertices of a bounded polyhedron, sorted and deduplicated; empty when
    /// the polyhedron is empty. Unbounded polyhedra yield their vertices too
    /// (possibly none), so callers needing boundedness must ensure it.
    pub fn vertices(&self) -> Vec<Point> {
        let n = self.dim;
        if let Some(bounds) = self.box_bounds() {
            let Some((lo, hi)) = bounds else { return Vec::new() };
            let axes: Vec<Vec<Rat>> = (0..n)
                .map(|i| if lo[i] == hi[i] { vec![lo[i].clone()] } else { vec![lo[i].clone(), hi[i].clone()] })
                .collect();
            let mut vs: Vec<Point> = axes.into_iter().multi_cartesian_product().map(Point).collect();
            vs.sort();
            return vs;
        }
        let rows: Vec<(Vec<Rat>, Rat)> = self.constraints.iter().flat_map(|c| c.as_le()).collect();
        let mut vs = Vec::new();
        for subset in (0..rows.len()).combinations(n) {
            let a: Vec<Vec<Rat>> = subset.iter().map(|&r| rows[r].0.clone()).collect();
            let b: Vec<Rat> = subset.iter().map(|&r| rows[r].1.clone()).collect();
            if let Some(x) = solve_square(a, b) {
                if rows.iter().all(|(a, r)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<Rat>() <= *r) {
                    vs.push(Point(x));
                }
            }
        }
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn is_empty(&self) -> bool {
        feasible_point(self).is_none()
    }
}

/// Solves `A x = b` for square `A`; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for k in col..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..n {
                    let t = &a[col][k] * &f;
                    a[r][k] -= &t;
                }
                let t = &b[col] * &f;
                b[r] -= &t;
            }
        }
    }
    Some(b)
}

struct Tableau {
    /// Constraint rows followed by the objective row; last column is the rhs.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &(p * &f);
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes the objective row in place; `allowed` filters entering columns.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> Step {
        let obj = self.m();
        let rhs = self.ncols;
        loop {
            let Some(c) = (0..self.ncols).find(|&j| allowed(j) && self.rows[obj][j].is_negative()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rat)> = None;
            for r in 0..obj {
                let a = &self.rows[r][c];
                if a.is_positive() {
                    let ratio = &self.rows[r][rhs] / a;
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                None => return Step::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    /// Rewrites the objective row for `max Σ cost_j col_j` given the current basis.
    fn set_objective(&mut self, cost: &[Rat]) {
        let obj = self.m();
        let mut row = vec![Rat::zero(); self.ncols + 1];
        for (j, c) in cost.iter().enumerate() {
            row[j] = -c;
        }
        for r in 0..obj {
            let cb = &cost[self.basis[r]];
            if !cb.is_zero() {
                for (v, p) in row.iter_mut().zip(&self.rows[r]) {
                    *v += &(p * cb);
                }
            }
        }
        self.rows[obj] = row;
    }
}

/// Optimizes `c · x` over `p`.
pub fn lp_solve(c: &[Rat], p: &HPolyhedron, dir: Direction) -> Result<LpOutcome> {
    if c.len() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, got: c.len() });
    }
    if let Some(k) = p.constraints.iter().find(|k| k.coeffs.len() != p.dim) {
        return Err(Error::DimensionMismatch { expected: p.dim, got: k.coeffs.len() });
    }
    let cost: Vec<Rat> = match dir {
        Direction::Max => c.to_vec(),
        Direction::Min => c.iter().map(|v| -v).collect(),
    };
    Ok(match simplex(&cost, p) {
        LpOutcome::Optimal { value, point } => {
            let value = if dir == Direction::Min { -value } else { value };
            LpOutcome::Optimal { value, point }
        }
        o => o,
    })
}

/// Any exact point of `p`, or `None` if empty.
pub fn feasible_point(p: &HPolyhedron) -> Option<Point> {
    match simplex(&vec![Rat::zero(); p.dim], p) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

/// `Some(j)` when the constraint is exactly a sign restriction `x_j ≥ 0`.
fn sign_restriction(c: &LinConstraint) -> Option<usize> {
    if !c.rhs.is_zero() || c.sense == Sense::Eq {
        return None;
    }
    let mut nz = c.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero());
    let (j, a) = nz.next()?;
    if nz.next().is_some() {
        return None;
    }
    let positive = (c.sense == Sense::Ge) == a.is_positive();
    positive.then_some(j)
}

fn simplex(cost: &[Rat], p: &HPolyhedron) -> LpOutcome {
    let d = p.dim;
    // Sign restrictions become nonnegative columns; other variables are split as u − v.
    let mut nonneg = vec![false; d];
    let mut kept: Vec<&LinConstraint> = Vec::with_capacity(p.constraints.len());
    for c in &p.constraints {
        match sign_restriction(c) {
            Some(j) => nonneg[j] = true,
            None => kept.push(c),
        }
    }
    let mut pos_col = Vec::with_capacity(d);
    let mut neg_col = Vec::with_capacity(d);
    let mut nx = 0;
    for &nn in &nonneg {
        pos_col.push(nx);
        nx += 1;
        if nn {
            neg_col.push(None);
        } else {
            neg_col.push(Some(nx));
            nx += 1;
        }
    }
    let n_slack = kept.iter().filter(|c| c.sense != Sense::Eq).count();
    let m = kept.len();
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    let mut rhs_col = Vec::with_capacity(m);
    let mut needs_art = Vec::with_capacity(m);
    let mut slack_of = Vec::with_capacity(m);
    let mut s = nx;
    for c in &kept {
        let flip = c.rhs.is_negative();
        let sense = match (c.sense, flip) {
            (Sense::Le, true) => Sense::Ge,
            (Sense::Ge, true) => Sense::Le,
            (k, _) => k,
        };
        let sign = if flip { -Rat::one() } else { Rat::one() };
        let mut row = vec![Rat::zero(); nx + n_slack];
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a = a * &sign;
            if let Some(v) = neg_col[j] {
                row[v] = -&a;
            }
            row[pos_col[j]] = a;
        }
        let slack = if c.sense != Sense::Eq {
            row[s] = if sense == Sense::Le { Rat::one() } else { -Rat::one() };
            s += 1;
            Some(s - 1)
        } else {
            None
        };
        rhs_col.push(&c.rhs * &sign);
        needs_art.push(sense != Sense::Le);
        slack_of.push(slack);
        rows.push(row);
    }
    let n_art = needs_art.iter().filter(|b| **b).count();
    let art_start = nx + n_slack;
    let ncols = art_start + n_art;
    let mut basis = Vec::with_capacity(m);
    let mut a = art_start;
    for (r, (row, rhs)) in rows.iter_mut().zip(rhs_col).enumerate() {
        row.resize(ncols, Rat::zero());
        if needs_art[r] {
            row[a] = Rat::one();
            basis.push(a);
            a += 1;
        } else {
            basis.push(slack_of[r].expect("slack"));
        }
        row.push(rhs);
    }
    rows.push(vec![Rat::zero(); ncols + 1]);
    let mut t = Tableau { rows, basis, ncols };

    if n_art > 0 {
        let phase1: Vec<Rat> = (0..ncols).map(|j| if j >= art_start { -Rat::one() } else { Rat::zero() }).collect();
        t.set_objective(&phase1);
        t.run(|_| true);
        if !t.rows[t.m()][ncols].is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive artificials out of the basis; drop rows that are redundant.
        let mut r = 0;
        while r < t.m() {
            if t.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, c);
                    r += 1;
                } else {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            } else {
                r += 1;
            }
        }
    }
    let mut full_cost = vec![Rat::zero(); ncols];
    for j in 0..d {
        full_cost[pos_col[j]] = cost[j].clone();
        if let Some(v) = neg_col[j] {
            full_cost[v] = -&cost[j];
        }
    }
    t.set_objective(&full_cost);
    if let Step::Unbounded = t.run(|j| j < art_start) {
        return LpOutcome::Unbounded;
    }
    let mut vals = vec![Rat::zero(); ncols];
    for (r, &b) in t.basis.iter().enumerate() {
        vals[b] = t.rows[r][ncols].clone();
    }
    let x: Vec<Rat> = (0..d)
        .map(|j| match neg_col[j] {
            Some(v) => &vals[pos_col[j]] - &vals[v],
            None => vals[pos_col[j]].clone(),
        })
        .collect();
    let value = cost.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { value, point: Point(x) }
}

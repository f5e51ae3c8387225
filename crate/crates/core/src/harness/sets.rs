//! Exact comparisons between finite unions of polyhedra.

use crate::geometry::Point;
use crate::lp::{lp_solve, Direction, HPolyhedron, LinConstraint, LpOutcome, Sense};
use crate::rational::Rat;

/// A polyhedron with additional strict inequalities `a·x > r`.
#[derive(Clone, Debug)]
pub struct Region {
    pub closed: HPolyhedron,
    pub strict: Vec<(Vec<Rat>, Rat)>,
}

impl Region {
    pub fn new(closed: HPolyhedron) -> Region {
        Region { closed, strict: Vec::new() }
    }

    /// A point of the region, or `None` when it is empty.
    ///
    /// Maximizes the common slack `t` of the strict rows (capped at 1); the
    /// region is nonempty iff the optimum is positive.
    pub fn point(&self) -> Option<Point> {
        let n = self.closed.dim;
        if self.strict.is_empty() {
            let vs = self.closed.vertices();
            if !vs.is_empty() {
                return Some(vs[0].clone());
            }
            return crate::lp::feasible_point(&self.closed);
        }
        let mut cs: Vec<LinConstraint> = self
            .closed
            .constraints
            .iter()
            .map(|c| {
                let mut coeffs = c.coeffs.clone();
                coeffs.push(Rat::zero());
                LinConstraint::new(coeffs, c.sense, c.rhs.clone())
            })
            .collect();
        for (a, r) in &self.strict {
            let mut coeffs = a.clone();
            coeffs.push(-Rat::one());
            cs.push(LinConstraint::new(coeffs, Sense::Ge, r.clone()));
        }
        cs.push(LinConstraint::coord(n + 1, n, Sense::Le, Rat::one()));
        let mut obj = vec![Rat::zero(); n + 1];
        obj[n] = Rat::one();
        match lp_solve(&obj, &HPolyhedron::new(n + 1, cs), Direction::Max) {
            Ok(LpOutcome::Optimal { value, point }) if value.is_positive() => {
                let mut v = point.into_inner();
                v.pop();
                Some(Point(v))
            }
            _ => None,
        }
    }
}

/// A point of `p` outside every polyhedron of `qs`, if one exists.
pub fn uncovered(p: &HPolyhedron, qs: &[HPolyhedron]) -> Option<Point> {
    // Fast path: a bounded convex set lies in a convex set iff its vertices do.
    let vs = p.vertices();
    if vs.is_empty() {
        return Region::new(p.clone()).point().and_then(|_| uncovered_region(&Region::new(p.clone()), qs));
    }
    if qs.iter().any(|q| vs.iter().all(|v| q.contains(v))) {
        return None;
    }
    if let Some(v) = vs.iter().find(|v| !qs.iter().any(|q| q.contains(v))) {
        return Some(v.clone());
    }
    // Only polyhedra meeting `p` can help cover it.
    let relevant: Vec<HPolyhedron> = qs.iter().filter(|q| Region::new(p.intersect(q)).point().is_some()).cloned().collect();
    uncovered_region(&Region::new(p.clone()), &relevant)
}

fn uncovered_region(r: &Region, qs: &[HPolyhedron]) -> Option<Point> {
    let pt = r.point()?;
    let Some((q, rest)) = qs.split_first() else { return Some(pt) };
    if !q.contains(&pt) && !rest.iter().any(|o| o.contains(&pt)) {
        return Some(pt);
    }
    // r ∖ q = ⋃_k r ∩ {rows before k hold} ∩ {row k fails}.
    let rows: Vec<(Vec<Rat>, Rat)> = q.constraints.iter().flat_map(|c| c.as_le()).collect();
    let mut acc = r.clone();
    for (a, b) in rows {
        let mut branch = acc.clone();
        branch.strict.push((a.clone(), b.clone()));
        if let Some(p) = uncovered_region(&branch, rest) {
            return Some(p);
        }
        acc.closed.push(LinConstraint::new(a, Sense::Le, b));
    }
    None
}

/// A point in one union but not the other, if the unions differ.
pub fn union_difference(a: &[HPolyhedron], b: &[HPolyhedron]) -> Option<Point> {
    a.iter().find_map(|p| uncovered(p, b)).or_else(|| b.iter().find_map(|q| uncovered(q, a)))
}

/// A point of the union `a` lying outside the union `b`.
pub fn union_not_subset(a: &[HPolyhedron], b: &[HPolyhedron]) -> Option<Point> {
    a.iter().find_map(|p| uncovered(p, b))
}

/// Whether some polyhedron of the union is nonempty.
pub fn union_point(a: &[HPolyhedron]) -> Option<Point> {
    a.iter().find_map(|p| Region::new(p.clone()).point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn boxed(lo: &[i64], hi: &[i64]) -> HPolyhedron {
        let n = lo.len();
        let mut cs = Vec::new();
        for i in 0..n {
            cs.push(LinConstraint::coord(n, i, Sense::Ge, Rat::from_integer(lo[i])));
            cs.push(LinConstraint::coord(n, i, Sense::Le, Rat::from_integer(hi[i])));
        }
        HPolyhedron::new(n, cs)
    }

    #[test]
    fn two_halves_cover_a_box() {
        let p = boxed(&[0, 0], &[2, 2]);
        let halves = [boxed(&[0, 0], &[1, 2]), boxed(&[1, 0], &[2, 2])];
        assert_eq!(uncovered(&p, &halves), None);
        let gap = [boxed(&[0, 0], &[1, 2]), boxed(&[1, 0], &[2, 1])];
        let pt = uncovered(&p, &gap).unwrap();
        assert!(p.contains(&pt) && !gap.iter().any(|q| q.contains(&pt)));
    }

    #[test]
    fn strict_regions() {
        let mut r = Region::new(boxed(&[0, 0], &[1, 1]));
        r.strict.push((vec![Rat::one(), Rat::zero()], Rat::one()));
        assert!(r.point().is_none());
        let mut r = Region::new(boxed(&[0, 0], &[1, 1]));
        r.strict.push((vec![Rat::one(), Rat::zero()], rat(1, 2)));
        assert!(r.point().unwrap()[0] > rat(1, 2));
    }

    proptest! {
        #[test]
        fn uncovered_agrees_with_grid(cuts in proptest::collection::vec((0i64..4, 0i64..4, 1i64..5, 1i64..5), 1..4)) {
            // Cover the box [0,4]² with random boxes and compare against a dense grid.
            let p = boxed(&[0, 0], &[4, 4]);
            let qs: Vec<HPolyhedron> = cuts.iter().map(|&(a, b, w, h)| boxed(&[a, b], &[(a + w).min(4), (b + h).min(4)])).collect();
            let found = uncovered(&p, &qs);
            let mut grid_miss = false;
            for i in 0..=16 {
                for j in 0..=16 {
                    let x = [rat(i, 4), rat(j, 4)];
                    if !qs.iter().any(|q| q.contains(&x)) {
                        grid_miss = true;
                    }
                }
            }
            if let Some(pt) = &found {
                prop_assert!(p.contains(pt) && !qs.iter().any(|q| q.contains(pt)));
            }
            // Gaps between integer-cornered boxes are at least 1/4 wide off the grid lines.
            prop_assert_eq!(found.is_some(), grid_miss);
        }
    }
}

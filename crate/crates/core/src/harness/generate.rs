//! Seeded instance generators and the bundled fixtures.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::continuity;
use super::{AxiomId, Instance};
use crate::error::{Error, Result};
use crate::geometry::{make_problem, scmp_hull, Permutation, Point, Problem};
use crate::rational::{rat, Rat};
use crate::real::Truth;
use crate::rules::{solve, Rule, Solved};

/// Coordinates are multiples of `1/denom` in `[0, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordRange {
    pub hi: i64,
    pub denom: i64,
}

impl Default for CoordRange {
    fn default() -> CoordRange {
        CoordRange { hi: 4, denom: 4 }
    }
}

impl CoordRange {
    fn check(&self) -> Result<()> {
        if self.hi <= 0 || self.denom <= 0 {
            return Err(Error::BadParameter("coordinate range must be positive".into()));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Rat {
        // Zero coordinates are rare but allowed.
        if rng.gen_ratio(1, 10) {
            return Rat::zero();
        }
        Rat::new(rng.gen_range(1..=self.hi * self.denom), self.denom)
    }
}

fn check_shape(n: usize, max_gens: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::BadParameter("need at least two individuals".into()));
    }
    if max_gens == 0 {
        return Err(Error::BadParameter("need at least one generator".into()));
    }
    Ok(())
}

pub fn random_point(n: usize, range: &CoordRange, rng: &mut ChaCha8Rng) -> Point {
    loop {
        let p = Point((0..n).map(|_| range.draw(rng)).collect());
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_points(n: usize, max_gens: usize, range: &CoordRange, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let k = rng.gen_range(1..=max_gens);
    (0..k).map(|_| random_point(n, range, rng)).collect()
}

/// `cmp` of up to `max_gens` random points.
pub fn random_problem(n: usize, max_gens: usize, range: &CoordRange, rng: &mut ChaCha8Rng) -> Result<Problem> {
    check_shape(n, max_gens)?;
    range.check()?;
    loop {
        if let Ok(x) = make_problem(random_points(n, max_gens, range, rng)) {
            return Ok(x);
        }
    }
}

/// A random problem whose ideal point has equal coordinates.
pub fn random_equal_able(n: usize, max_gens: usize, range: &CoordRange, rng: &mut ChaCha8Rng) -> Result<Problem> {
    check_shape(n, max_gens)?;
    range.check()?;
    let mut pts = random_points(n, max_gens, range, rng);
    let c = pts.iter().flat_map(|p| p.iter()).max().cloned().expect("nonempty");
    for i in 0..n {
        if pts.iter().all(|p| p[i] < c) {
            let k = rng.gen_range(0..pts.len());
            pts[k].0[i] = c.clone();
        }
    }
    let x = make_problem(pts)?;
    debug_assert!(x.is_equal_able());
    Ok(x)
}

/// `scmp` of up to `max_gens` random points.
pub fn random_symmetric(n: usize, max_gens: usize, range: &CoordRange, rng: &mut ChaCha8Rng) -> Result<Problem> {
    check_shape(n, max_gens)?;
    range.check()?;
    scmp_hull(random_points(n, max_gens, range, rng))
}

/// A subproblem of `x`, built by shrinking a random subset of its generators
/// and, when `equal_able`, capping every coordinate at the smallest ideal
/// coordinate. `extra` points (assumed in `x`) are added before capping.
pub fn random_subproblem(x: &Problem, equal_able: bool, extra: &[Point], rng: &mut ChaCha8Rng) -> Result<Problem> {
    let n = x.n();
    for _ in 0..64 {
        let mut pts: Vec<Point> = extra.to_vec();
        for g in x.generators() {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let shrunk = if rng.gen_bool(0.5) {
                g.clone()
            } else {
                Point(g.iter().map(|v| v * Rat::new(rng.gen_range(1..=4), 4)).collect())
            };
            pts.push(shrunk);
        }
        if pts.is_empty() {
            continue;
        }
        if equal_able {
            let b = Point((0..n).map(|i| pts.iter().map(|p| p[i].clone()).max().expect("nonempty")).collect());
            let cap = b.min_coord();
            if !cap.is_positive() {
                continue;
            }
            pts = pts.iter().map(|p| p.meet(&Point::diagonal(n, &cap))).collect();
        }
        if let Ok(sub) = make_problem(pts) {
            if sub.is_subset_of(x) && (!equal_able || sub.is_equal_able()) {
                return Ok(sub);
            }
        }
    }
    Err(Error::BadParameter(format!("could not draw a subproblem of {x}")))
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    while v.iter().enumerate().all(|(i, &j)| i == j) {
        v.shuffle(rng);
    }
    Permutation::new(v).expect("shuffled identity is a permutation")
}

fn positive_quarter(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(rng.gen_range(1..=16), 4)
}

/// Chosen points available without search: witnesses and piece vertices.
fn chosen_points(s: &Solved) -> Vec<Point> {
    let mut out = s.choice.witnesses.clone();
    out.extend(s.piece_vertices().iter().flatten().cloned());
    out.sort();
    out.dedup();
    out.retain(|p| s.member(p) == Truth::True);
    out
}

fn p(c: &[i64]) -> Point {
    Point::from_ints(c)
}

/// The bundled instance for `axiom` in dimension `n`, if there is one.
pub fn fixture(axiom: AxiomId, n: usize) -> Option<Instance> {
    use AxiomId as A;
    let x12 = || scmp_hull(vec![p(&[1, 2])]).expect("valid fixture");
    if axiom == A::SeparabilityEai {
        return (n == 3).then(|| Instance::Separability {
            x: make_problem(vec![p(&[3, 3, 3])]).expect("valid fixture"),
            sub: scmp_hull(vec![p(&[3, 1, 1])]).expect("valid fixture"),
            m: vec![0],
            a: p(&[3, 3, 3]),
            b: p(&[2, 1, 1]),
        });
    }
    if n != 2 {
        return None;
    }
    Some(match axiom {
        A::StrongPareto | A::WeakPareto | A::IntermediatePareto | A::StrongSymmetry => Instance::Problem { x: x12() },
        A::ScaleInvariance => Instance::Scale { x: make_problem(vec![p(&[1, 2]), p(&[2, 1])]).expect("valid fixture"), a: p(&[2, 1]) },
        A::Anonymity => Instance::Permutation { x: x12(), pi: Permutation::transposition(2, 0, 1) },
        A::ContractionEai => Instance::Contraction { x: x12(), sub: make_problem(vec![p(&[1, 1])]).expect("valid fixture") },
        A::EqualAdditionEai => Instance::Shift {
            x: make_problem(vec![p(&[1, 4]), p(&[2, 2]), p(&[4, 1])]).expect("valid fixture"),
            alpha: Rat::one(),
        },
        A::CompromisabilityEai => Instance::Compromise {
            x: scmp_hull(vec![p(&[1, 2]), Point(vec![rat(3, 2), rat(3, 2)])]).expect("valid fixture"),
            a: p(&[1, 2]),
            b: p(&[2, 1]),
            alpha: rat(1, 2),
        },
        A::HammondEai => Instance::Hammond {
            x: scmp_hull(vec![p(&[1, 4]), Point(vec![rat(2, 1), rat(29, 10)])]).expect("valid fixture"),
            a: p(&[1, 4]),
            b: Point(vec![rat(2, 1), rat(29, 10)]),
            i: 0,
            j: 1,
        },
        A::Continuity => Instance::Sequence(continuity::lex_fixture()),
        A::SeparabilityEai => unreachable!("handled above"),
    })
}

/// Draws one instance for `axiom`; `None` when the draw does not produce a
/// usable instance (for example, no chosen point fits the pattern).
pub fn instance(rule: &Rule, axiom: AxiomId, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<Instance>> {
    use AxiomId as A;
    let range = CoordRange::default();
    let gens = 3;
    Ok(Some(match axiom {
        A::StrongPareto | A::WeakPareto | A::IntermediatePareto => {
            let x = if rng.gen_bool(0.5) { random_problem(n, gens, &range, rng)? } else { random_symmetric(n, 2, &range, rng)? };
            Instance::Problem { x }
        }
        A::StrongSymmetry => Instance::Problem { x: random_symmetric(n, 2, &range, rng)? },
        A::ScaleInvariance => {
            let x = random_problem(n, gens, &range, rng)?;
            let a = Point((0..n).map(|_| positive_quarter(rng)).collect());
            Instance::Scale { x, a }
        }
        A::Anonymity => {
            let x = random_symmetric(n, 2, &range, rng)?;
            Instance::Permutation { x, pi: random_permutation(n, rng) }
        }
        A::ContractionEai => {
            let x = random_equal_able(n, gens, &range, rng)?;
            let extra = if rng.gen_bool(0.5) {
                let s = solve(rule, &x)?;
                chosen_points(&s).choose(rng).cloned().into_iter().collect()
            } else {
                Vec::new()
            };
            match random_subproblem(&x, true, &extra, rng) {
                Ok(sub) => Instance::Contraction { x, sub },
                Err(_) => return Ok(None),
            }
        }
        A::EqualAdditionEai => {
            let x = random_equal_able(n, gens, &range, rng)?;
            Instance::Shift { x, alpha: positive_quarter(rng) }
        }
        A::CompromisabilityEai => {
            let x = if rng.gen_bool(0.5) { random_equal_able(n, gens, &range, rng)? } else { random_symmetric(n, 2, &range, rng)? };
            let chosen = chosen_points(&solve(rule, &x)?);
            let (Some(a), Some(b)) = (chosen.choose(rng).cloned(), chosen.choose(rng).cloned()) else { return Ok(None) };
            Instance::Compromise { x, a, b, alpha: Rat::new(rng.gen_range(0..=4), 4) }
        }
        A::HammondEai => return hammond_instance(rule, n, rng),
        A::SeparabilityEai => return separability_instance(rule, n, rng),
        A::Continuity => return Ok(continuity::random_sequence(rule, n, rng)?.map(Instance::Sequence)),
    }))
}

fn hammond_pattern(a: &Point, b: &Point) -> Option<(usize, usize)> {
    let n = a.dim();
    let diff: Vec<usize> = (0..n).filter(|&k| a[k] != b[k]).collect();
    let [u, v] = diff.as_slice() else { return None };
    for (i, j) in [(*u, *v), (*v, *u)] {
        if a[i] < b[i] && b[i] < b[j] && b[j] < a[j] {
            return Some((i, j));
        }
    }
    None
}

fn hammond_instance(rule: &Rule, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<Instance>> {
    let range = CoordRange::default();
    let x = if rng.gen_bool(0.5) { random_equal_able(n, 3, &range, rng)? } else { random_symmetric(n, 2, &range, rng)? };
    let s = solve(rule, &x)?;
    let chosen = chosen_points(&s);
    if chosen.is_empty() {
        return Ok(None);
    }
    // Feasible partners among generators and their pairwise meets.
    let mut pool: Vec<Point> = x.generators().to_vec();
    for g in x.generators() {
        for h in x.generators() {
            pool.push(g.meet(h));
        }
    }
    // Non-chosen sources keep the draw valid; such instances are vacuous.
    let sources: Vec<Point> = chosen.iter().chain(&pool).cloned().collect();
    let mut found: Vec<(Point, Point, usize, usize)> = Vec::new();
    for a in &chosen {
        for b in &pool {
            if let Some((i, j)) = hammond_pattern(a, b) {
                found.push((a.clone(), b.clone(), i, j));
            }
        }
    }
    if found.is_empty() || rng.gen_bool(0.5) {
        // Squeeze a chosen point's extreme coordinates toward each other.
        for _ in 0..8 {
            let a = if rng.gen_bool(0.75) { chosen.choose(rng) } else { sources.choose(rng) }.expect("nonempty").clone();
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if a[i] >= a[j] {
                continue;
            }
            let mut r = [rng.gen_range(1..16), rng.gen_range(1..16)];
            if r[0] == r[1] {
                continue;
            }
            r.sort_unstable();
            let gap = &a[j] - &a[i];
            let mut b = a.clone();
            b.0[i] = &a[i] + &gap * Rat::new(r[0], 16);
            b.0[j] = &a[i] + &gap * Rat::new(r[1], 16);
            if x.holds(&b) {
                found.push((a, b, i, j));
                break;
            }
        }
    }
    if found.is_empty() {
        for a in &pool {
            for b in &pool {
                if let Some((i, j)) = hammond_pattern(a, b) {
                    found.push((a.clone(), b.clone(), i, j));
                }
            }
        }
    }
    Ok(found.choose(rng).cloned().map(|(a, b, i, j)| Instance::Hammond { x, a, b, i, j }))
}

fn separability_instance(rule: &Rule, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<Instance>> {
    let range = CoordRange::default();
    let x = if rng.gen_bool(0.5) { random_equal_able(n, 3, &range, rng)? } else { random_symmetric(n, 2, &range, rng)? };
    let s = solve(rule, &x)?;
    let Some(a) = chosen_points(&s).choose(rng).cloned() else { return Ok(None) };
    let size = rng.gen_range(1..n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut m: Vec<usize> = idx[..size].to_vec();
    m.sort_unstable();
    // y_M below some generator that keeps a's other coordinates feasible.
    let tops: Vec<&Point> = x.generators().iter().filter(|g| (0..n).all(|k| m.contains(&k) || g[k] >= a[k])).collect();
    let Some(top) = tops.choose(rng) else { return Ok(None) };
    let mut b = Point::zeros(n);
    for k in 0..n {
        b.0[k] = if m.contains(&k) { &top[k] * Rat::new(rng.gen_range(0..=4), 4) } else { range.draw(rng) };
    }
    if b.is_zero() {
        return Ok(None);
    }
    let xy = super::compose(&m, &a, &b);
    let mut pts = vec![xy, b.clone()];
    if rng.gen_bool(0.5) {
        pts.push(random_point(n, &range, rng));
    }
    let sub = match scmp_hull(pts) {
        Ok(sub) => sub,
        Err(_) => return Ok(None),
    };
    Ok(Some(Instance::Separability { x, sub, m, a, b }))
}

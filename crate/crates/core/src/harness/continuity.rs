//! Continuity probes along finite, certified sequences of problems.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generate::{random_problem, CoordRange};
use super::{Status, Verdict, Witness};
use crate::error::{Error, Result};
use crate::geometry::{hausdorff_upper, make_problem, scmp_hull, Point, Problem};
use crate::rational::Rat;
use crate::real::Truth;
use crate::rules::{solve, Rule};

/// Problems `X^k` with chosen points `x^k`, and the claimed limits `X`, `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub problems: Vec<Problem>,
    pub points: Vec<Point>,
    pub limit: Problem,
    pub point: Point,
}

fn nonincreasing_to_zero(v: &[Rat]) -> bool {
    let first = &v[0];
    let last = &v[v.len() - 1];
    v.windows(2).all(|w| w[1] <= w[0]) && (last.is_zero() || last * Rat::from_integer(8) <= *first)
}

/// Violation iff every `x^k ∈ F(X^k)`, the sequences visibly converge (sup-norm
/// Hausdorff bounds and point distances are nonincreasing and shrink at
/// least eightfold), and `x ∉ F(X)`.
pub fn continuity_probe(rule: &Rule, spec: &SequenceSpec) -> Result<Verdict> {
    let len = spec.problems.len();
    if len == 0 || spec.points.len() != len {
        return Err(Error::BadInstance("sequence needs matching, nonempty problem and point lists".into()));
    }
    let n = spec.limit.n();
    if spec.problems.iter().any(|x| x.n() != n) || spec.points.iter().any(|x| x.dim() != n) || spec.point.dim() != n {
        return Err(Error::BadInstance("sequence dimensions disagree".into()));
    }
    let h = Rat::new(1, 16);
    let bounds: Vec<Rat> = spec.problems.iter().map(|x| hausdorff_upper(x, &spec.limit, &h)).collect::<Result<_>>()?;
    let dists: Vec<Rat> = spec.points.iter().map(|x| x.dist_sup(&spec.point)).collect();
    if !nonincreasing_to_zero(&bounds) || !nonincreasing_to_zero(&dists) {
        return Err(Error::BadInstance("sequence does not visibly converge".into()));
    }
    let mut tie = false;
    for (x, pt) in spec.problems.iter().zip(&spec.points) {
        match solve(rule, x)?.member(pt) {
            Truth::False => return Ok(Verdict::pass(format!("vacuous: {pt} is not chosen in {x}"))),
            Truth::Uncertain => tie = true,
            Truth::True => {}
        }
    }
    let last = bounds.last().expect("nonempty");
    let v = match solve(rule, &spec.limit)?.member(&spec.point) {
        Truth::True => Verdict::pass(format!("limit {} is chosen (final Hausdorff bound {last})", spec.point)),
        Truth::Uncertain => Verdict::inconclusive("limit membership ties within tolerance"),
        Truth::False if tie => Verdict::inconclusive("sequence memberships tie within tolerance"),
        Truth::False => Verdict {
            status: Status::Violation,
            witness: Some(Witness {
                instance: super::Instance::Sequence(spec.clone()),
                point: Some(spec.point.clone()),
                seed: None,
                index: None,
            }),
            note: format!("chosen points converge to {} which is not chosen in {}", spec.point, spec.limit),
        },
    };
    Ok(v)
}

/// `X^k = scmp{(1,1), (1−1/k, 2)}` with `x^k = (1,1)`, converging to `scmp{(1,2)}`.
pub fn lex_fixture() -> SequenceSpec {
    let ks = [10, 100, 1000, 10000];
    let problems = ks
        .iter()
        .map(|&k| scmp_hull(vec![Point::from_ints(&[1, 1]), Point(vec![Rat::one() - Rat::new(1, k), Rat::from_integer(2)])]).expect("valid fixture"))
        .collect();
    SequenceSpec {
        problems,
        points: vec![Point::from_ints(&[1, 1]); ks.len()],
        limit: scmp_hull(vec![Point::from_ints(&[1, 2])]).expect("valid fixture"),
        point: Point::from_ints(&[1, 1]),
    }
}

/// A constant sequence, which every rule passes.
pub fn constant_sequence(x: &Problem, point: &Point, len: usize) -> SequenceSpec {
    SequenceSpec { problems: vec![x.clone(); len], points: vec![point.clone(); len], limit: x.clone(), point: point.clone() }
}

const STEPS: [i64; 7] = [4, 16, 64, 256, 1024, 1 << 20, 1 << 40];

/// `X^k = cmp(G + D/k)` with `x^k` the first chosen witness of each `X^k`.
///
/// The limit point is extrapolated from the last two terms and kept only when
/// the chosen points are exactly affine in `1/k`, so the claimed limit is
/// exact. Half of the draws perturb along `G` itself (`D = cG`).
///
/// The tail runs to `k = 2^40`: nonzero welfare gaps between corners with
/// quarter-grid coordinates are far larger than `2^-40`, so a choice that
/// persists to the last term is not an artifact of stopping early.
pub fn random_sequence(rule: &Rule, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<SequenceSpec>> {
    let limit = random_problem(n, 3, &CoordRange::default(), rng)?;
    let gens = limit.generators().to_vec();
    let dirs: Vec<Point> = if rng.gen_bool(0.5) {
        let c = Rat::new(rng.gen_range(1..=8), 4);
        gens.iter().map(|g| g.scale(&c)).collect()
    } else {
        gens.iter().map(|_| Point((0..n).map(|_| Rat::new(rng.gen_range(0..=8), 4)).collect())).collect()
    };
    let mut problems = Vec::with_capacity(STEPS.len());
    let mut points = Vec::with_capacity(STEPS.len());
    for &k in &STEPS {
        let inv = Rat::new(1, k);
        let x = make_problem(gens.iter().zip(&dirs).map(|(g, d)| g.add(&d.scale(&inv))).collect())?;
        let s = solve(rule, &x)?;
        let Some(w) = s.choice.witnesses.first().cloned() else { return Ok(None) };
        problems.push(x);
        points.push(w);
    }
    // x^k = x + v/k; recover x from the last two terms and check all others.
    let last = STEPS.len() - 1;
    let (k1, k2) = (Rat::from_integer(STEPS[last - 1]), Rat::from_integer(STEPS[last]));
    let (p1, p2) = (&points[last - 1], &points[last]);
    let v = p1.sub(p2).scale(&(&k1 * &k2 / (&k2 - &k1)));
    let x = p2.sub(&v.scale(&k2.recip()));
    if !x.is_nonnegative() {
        return Ok(None);
    }
    let affine = STEPS.iter().zip(&points).all(|(&k, pt)| *pt == x.add(&v.scale(&Rat::new(1, k))));
    Ok(affine.then_some(SequenceSpec { problems, points, limit, point: x }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::instance_rng;
    use crate::rules::RuleKind;
    use crate::weights::{simplex_weights, uniform_singleton};

    #[test]
    fn lex_fixture_verdicts() {
        let lex = Rule::of(RuleKind::RelativeLeximin).unwrap();
        assert_eq!(continuity_probe(&lex, &lex_fixture()).unwrap().status, Status::Violation);
        let maximin = Rule::of(RuleKind::RelativeFair(simplex_weights(2).unwrap())).unwrap();
        let v = continuity_probe(&maximin, &lex_fixture()).unwrap();
        assert_eq!(v.status, Status::Pass);
        assert!(!v.is_vacuous());
    }

    #[test]
    fn constant_sequences_pass() {
        let x = scmp_hull(vec![Point::from_ints(&[1, 2])]).unwrap();
        for kind in [RuleKind::Ks, RuleKind::Nash, RuleKind::RelativeLeximin, RuleKind::RelativeFair(uniform_singleton(2).unwrap())] {
            let rule = Rule::of(kind).unwrap();
            let w = solve(&rule, &x).unwrap().choice.witnesses[0].clone();
            assert_eq!(continuity_probe(&rule, &constant_sequence(&x, &w, 3)).unwrap().status, Status::Pass);
        }
    }

    #[test]
    fn random_sequences_are_valid() {
        let rule = Rule::of(RuleKind::RelativeFair(simplex_weights(2).unwrap())).unwrap();
        let mut made = 0;
        for k in 0..40 {
            if let Some(spec) = random_sequence(&rule, 2, &mut instance_rng(3, k)).unwrap() {
                made += 1;
                assert_eq!(continuity_probe(&rule, &spec).unwrap().status, Status::Pass);
            }
        }
        assert!(made > 10);
    }

    #[test]
    fn nonconvergent_sequence_is_rejected() {
        let x = scmp_hull(vec![Point::from_ints(&[1, 2])]).unwrap();
        let far = scmp_hull(vec![Point::from_ints(&[3, 3])]).unwrap();
        let spec = SequenceSpec { problems: vec![far.clone(), far], points: vec![Point::from_ints(&[1, 1]); 2], limit: x, point: Point::from_ints(&[1, 1]) };
        let rule = Rule::of(RuleKind::Ks).unwrap();
        assert!(matches!(continuity_probe(&rule, &spec), Err(Error::BadInstance(_))));
    }
}

//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Lines go straight to the process stdout so they show up without
//! `--nocapture`. Criterion 9 reruns 1–8 with a different worker count and
//! compares the JSON reports byte for byte.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use relfair_core::harness::continuity::{continuity_probe, lex_fixture, random_sequence};
use relfair_core::harness::generate::{random_problem, CoordRange};
use relfair_core::harness::sets::union_difference;
use relfair_core::harness::{check_axiom, instance_rng, search_violation, AxiomId, Instance, MatrixReport, SearchConfig, Status, Verdict, CHARACTERIZING};
use relfair_core::lp::{HPolyhedron, LinConstraint, Sense};
use relfair_core::oracle::{compare_oracle, GridSpec};
use relfair_core::rules::{check_ordering_properties, equal_equivalent, monotonicity_witness, OrderingSpec};
use relfair_core::weights::{blend_weights, gini_weights, simplex_weights, uniform_singleton, weight_set_from_norm, NormId, Penalty, WeightSet};
use relfair_core::{rat, scmp_hull, solve, Point, Problem, Rat, Rule, RuleKind, Scalar, Welfare};
use serde_json::{json, Value};

struct Outcome {
    pass: bool,
    detail: String,
    /// Deterministic report compared by criterion 9; never holds timings.
    report: Value,
}

fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn relative_fair(w: WeightSet) -> Rule {
    Rule::of(RuleKind::RelativeFair(w)).unwrap()
}

fn maximin(n: usize) -> Rule {
    relative_fair(simplex_weights(n).unwrap())
}

fn utilitarian(n: usize) -> Rule {
    relative_fair(uniform_singleton(n).unwrap())
}

fn search(rule: &Rule, axiom: AxiomId, n: usize, budget: u64, fixtures: bool, threads: usize) -> Verdict {
    let cfg = SearchConfig { budget, seed: 0, n, threads: Some(threads), fixtures };
    search_violation(rule, axiom, &cfg).unwrap()
}

fn rand_point(n: usize, rng: &mut rand_chacha::ChaCha8Rng, lo: i64) -> Point {
    use rand::Rng;
    Point((0..n).map(|_| Rat::new(rng.gen_range(lo..=16), 4)).collect())
}

fn c1_matrix(threads: usize) -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_relfair"))
        .args(["matrix", "--seed", "0", "--budget", "10000", "--format", "json"])
        .env("RELFAIR_THREADS", threads.to_string())
        .output()
        .expect("relfair runs");
    let elapsed = start.elapsed();
    let report: MatrixReport = serde_json::from_slice(&out.stdout).expect("matrix json");
    let designated = [
        ("ks", AxiomId::IntermediatePareto),
        ("egalitarian", AxiomId::ScaleInvariance),
        ("dictator", AxiomId::Anonymity),
        ("weak_pareto_set", AxiomId::ContractionEai),
        ("leximin", AxiomId::Continuity),
        ("nash", AxiomId::EqualAdditionEai),
        ("relative_max", AxiomId::CompromisabilityEai),
    ];
    let mut wrong = Vec::new();
    for (rule, axiom) in designated {
        for a in CHARACTERIZING {
            let status = report.cell(rule, a).map(|c| c.verdict.status);
            let want_violation = a == axiom;
            if (status == Some(Status::Violation)) != want_violation || status.is_none() {
                wrong.push(format!("{rule}/{}", a.name()));
            }
        }
    }
    let within = elapsed <= Duration::from_secs(120);
    Outcome {
        pass: out.status.code() == Some(0) && wrong.is_empty() && within,
        detail: format!("7x7 matrix, designated violations only; mismatches {wrong:?}; {:.1}s (limit 120s)", elapsed.as_secs_f64()),
        report: serde_json::from_slice(&out.stdout).unwrap(),
    }
}

fn c2_monotonicity_witness(_threads: usize) -> Outcome {
    let rule = Rule::of(RuleKind::MeanSd(rat(2, 1))).unwrap();
    let pair = monotonicity_witness(&rule, 2).unwrap();
    let eval = |p: &Point| rule.evaluate_normalized(&p.iter().cloned().map(Scalar::Exact).collect::<Vec<_>>()).unwrap();
    let expected = (Point(vec![rat(3, 2), rat(3, 2)]), Point::from_ints(&[2, 4]));
    let ok = pair.as_ref() == Some(&expected)
        && eval(&expected.0).as_rat() == Some(&rat(3, 2))
        && eval(&expected.1).as_rat() == Some(&rat(1, 1))
        && !rule.is_monotone(2);
    Outcome {
        pass: ok,
        detail: format!("witness {pair:?}; W(3/2,3/2) = {}, W(2,4) = {}", eval(&expected.0), eval(&expected.1)),
        report: json!({"witness": pair, "w_y": eval(&expected.0), "w_x": eval(&expected.1)}),
    }
}

/// `{x : 0 ≤ x ≤ g, x_i ≥ v·b_i}` for each generator `g` that reaches level `v`.
fn closed_form_maximin(x: &Problem) -> (Rat, Vec<HPolyhedron>) {
    let b = x.ideal_point();
    let v = x.generators().iter().map(|g| g.iter().zip(b.iter()).map(|(gi, bi)| gi / bi).min().unwrap()).max().unwrap();
    let n = x.n();
    let pieces = x
        .generators()
        .iter()
        .filter(|g| (0..n).all(|i| g[i] >= &v * &b[i]))
        .map(|g| {
            let mut cs = Vec::new();
            for i in 0..n {
                cs.push(LinConstraint::coord(n, i, Sense::Le, g[i].clone()));
                cs.push(LinConstraint::coord(n, i, Sense::Ge, &v * &b[i]));
            }
            HPolyhedron::new(n, cs)
        })
        .collect();
    (v, pieces)
}

fn c3_equivalence(_threads: usize) -> Outcome {
    use rand::Rng;
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in [2, 3] {
        let rule = maximin(n);
        for k in 0..500 {
            let x = random_problem(n, 3, &CoordRange::default(), &mut instance_rng(11, k)).unwrap();
            let s = solve(&rule, &x).unwrap();
            let (v, pieces) = closed_form_maximin(&x);
            if s.choice.value.as_rat() != Some(&v) || union_difference(s.pieces(), &pieces).is_some() {
                bad.push(format!("maximin {x}"));
            }
            checked += 1;
        }
    }
    let scalars = |p: &Point| p.iter().cloned().map(Scalar::Exact).collect::<Vec<_>>();
    for k in 0..1000 {
        let mut rng = instance_rng(12, k);
        let n = rng.gen_range(2..=4);
        // Decreasing weights summing to one.
        let mut raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=8)).collect();
        raw.sort_unstable_by(|a, b| b.cmp(a));
        if raw[0] == 0 {
            raw[0] = 1;
        }
        let total: i64 = raw.iter().sum();
        let w = Point(raw.iter().map(|&r| Rat::new(r, total)).collect());
        let y = rand_point(n, &mut rng, 0);
        let mut sorted = y.0.clone();
        sorted.sort();
        let formula: Rat = w.iter().zip(&sorted).map(|(a, b)| a * b).sum();
        let got = relative_fair(gini_weights(&w).unwrap()).evaluate_normalized(&scalars(&y)).unwrap();
        if got.as_rat() != Some(&formula) {
            bad.push(format!("gini w={w} y={y}"));
        }
        let alpha = Rat::new(rng.gen_range(0..=8), 8);
        let mean = y.sum() / Rat::from(n);
        let formula = &alpha * mean + (Rat::one() - &alpha) * y.min_coord();
        let got = relative_fair(blend_weights(&alpha, n).unwrap()).evaluate_normalized(&scalars(&y)).unwrap();
        if got.as_rat() != Some(&formula) {
            bad.push(format!("blend alpha={alpha} y={y}"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{checked} maximin problems, 1000 Gini and 1000 blend samples; {} mismatches {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
        report: json!({"mismatches": bad}),
    }
}

fn characterization_weight_sets() -> Vec<(String, WeightSet)> {
    vec![
        ("simplex(2)".into(), simplex_weights(2).unwrap()),
        ("uniform(2)".into(), uniform_singleton(2).unwrap()),
        ("blend(1/2,2)".into(), blend_weights(&rat(1, 2), 2).unwrap()),
        ("gini(2/3,1/3)".into(), gini_weights(&Point(vec![rat(2, 3), rat(1, 3)])).unwrap()),
        ("sup-norm(1/5,2)".into(), weight_set_from_norm(2, &Penalty::new(NormId::Sup, rat(1, 5)).unwrap(), 2, 0).unwrap()),
        ("simplex(3)".into(), simplex_weights(3).unwrap()),
        ("uniform(3)".into(), uniform_singleton(3).unwrap()),
        ("blend(1/3,3)".into(), blend_weights(&rat(1, 3), 3).unwrap()),
        ("gini(1/2,1/3,1/6)".into(), gini_weights(&Point(vec![rat(1, 2), rat(1, 3), rat(1, 6)])).unwrap()),
        ("l1-norm(1/8,3)".into(), weight_set_from_norm(3, &Penalty::new(NormId::L1, rat(1, 8)).unwrap(), 3, 0).unwrap()),
    ]
}

fn c4_characterization(threads: usize) -> Outcome {
    let mut violations = Vec::new();
    let mut inconclusive = 0;
    let mut probes_failed = Vec::new();
    let mut cells = Vec::new();
    for (name, w) in characterization_weight_sets() {
        assert!(!w.is_approximate(), "{name} must be exact");
        let n = w.n();
        let rule = relative_fair(w);
        for axiom in CHARACTERIZING {
            let v = search(&rule, axiom, n, 500, true, threads);
            match v.status {
                Status::Violation => violations.push(format!("{name}/{}: {}", axiom.name(), v.note)),
                Status::Inconclusive => inconclusive += 1,
                Status::Pass => {}
            }
            cells.push(json!({"weights": name, "axiom": axiom, "verdict": v}));
        }
        let mut probes = 0;
        let mut k = 0;
        while probes < 50 {
            if let Some(spec) = random_sequence(&rule, n, &mut instance_rng(21, k)).unwrap() {
                let v = continuity_probe(&rule, &spec).unwrap();
                if v.status != Status::Pass || v.is_vacuous() {
                    probes_failed.push(format!("{name} sequence {k}: {}", v.note));
                }
                probes += 1;
            }
            k += 1;
        }
        if n == 2 {
            let v = continuity_probe(&rule, &lex_fixture()).unwrap();
            if v.status != Status::Pass {
                probes_failed.push(format!("{name} lex fixture: {}", v.note));
            }
        }
    }
    Outcome {
        pass: violations.is_empty() && probes_failed.is_empty(),
        detail: format!(
            "10 weight sets x 7 axioms x 500 instances: {} violations, {inconclusive} inconclusive cells; 50 continuity probes per set: {} failures {:?}",
            violations.len(),
            probes_failed.len(),
            violations.iter().chain(&probes_failed).take(2).collect::<Vec<_>>()
        ),
        report: json!({"cells": cells, "probe_failures": probes_failed}),
    }
}

/// Re-checks a violation's witness and expects the identical verdict minus the search note.
fn replays(rule: &Rule, axiom: AxiomId, v: &Verdict) -> bool {
    let Some(w) = &v.witness else { return false };
    let again = check_axiom(rule, axiom, &w.instance).unwrap();
    again.status == Status::Violation && again.witness.as_ref().map(|x| &x.point) == Some(&w.point)
}

fn c5_hammond_separability(threads: usize) -> Outcome {
    let hammond_max2 = search(&maximin(2), AxiomId::HammondEai, 2, 10_000, true, threads);
    let hammond_max3 = search(&maximin(3), AxiomId::HammondEai, 3, 10_000, true, threads);
    let sep_util3 = search(&utilitarian(3), AxiomId::SeparabilityEai, 3, 10_000, true, threads);
    // Violations must come from random draws, not the bundled fixtures.
    let hammond_util = search(&utilitarian(2), AxiomId::HammondEai, 2, 10_000, false, threads);
    let sep_max3 = search(&maximin(3), AxiomId::SeparabilityEai, 3, 10_000, false, threads);
    let ok = hammond_max2.status == Status::Pass
        && hammond_max3.status == Status::Pass
        && sep_util3.status == Status::Pass
        && hammond_util.status == Status::Violation
        && replays(&utilitarian(2), AxiomId::HammondEai, &hammond_util)
        && sep_max3.status == Status::Violation
        && replays(&maximin(3), AxiomId::SeparabilityEai, &sep_max3);
    let idx = |v: &Verdict| v.witness.as_ref().and_then(|w| w.index);
    Outcome {
        pass: ok,
        detail: format!(
            "maximin Hammond n=2 {} / n=3 {} [{}]; utilitarian separability n=3 {} [{}]; utilitarian Hammond violation at instance {:?}; maximin separability n=3 violation at instance {:?}",
            hammond_max2.status,
            hammond_max3.status,
            hammond_max3.note,
            sep_util3.status,
            sep_util3.note,
            idx(&hammond_util),
            idx(&sep_max3)
        ),
        report: json!([hammond_max2, hammond_max3, sep_util3, hammond_util, sep_max3]),
    }
}

fn c6_ks(threads: usize) -> Outcome {
    let ks = Rule::of(RuleKind::Ks).unwrap();
    let axioms = [
        AxiomId::WeakPareto,
        AxiomId::ScaleInvariance,
        AxiomId::StrongSymmetry,
        AxiomId::ContractionEai,
        AxiomId::Anonymity,
        AxiomId::EqualAdditionEai,
        AxiomId::CompromisabilityEai,
    ];
    let verdicts: Vec<Verdict> = axioms.iter().map(|&a| search(&ks, a, 2, 500, true, threads)).collect();
    let failing: Vec<&str> = axioms.iter().zip(&verdicts).filter(|(_, v)| v.status != Status::Pass).map(|(a, _)| a.name()).collect();
    let x = scmp_hull(vec![Point::from_ints(&[1, 2])]).unwrap();
    let chosen = solve(&ks, &x).unwrap().choice.witnesses;
    let ip = check_axiom(&ks, AxiomId::IntermediatePareto, &Instance::Problem { x: x.clone() }).unwrap();
    let one_one = Point::from_ints(&[1, 1]);
    let dominated = Point::from_ints(&[1, 2]).ge(&one_one) && x.contains(&Point::from_ints(&[1, 2])).unwrap();
    let ok = failing.is_empty()
        && chosen == vec![one_one.clone()]
        && ip.status == Status::Violation
        && ip.witness.as_ref().and_then(|w| w.point.clone()) == Some(one_one)
        && dominated;
    Outcome {
        pass: ok,
        detail: format!("7 axioms x 500 instances, non-pass: {failing:?}; F(scmp{{(1,2)}}) = {chosen:?}, intermediate Pareto {}", ip.status),
        report: json!({"verdicts": verdicts, "ip": ip}),
    }
}

fn c7_ordering(_threads: usize) -> Outcome {
    let tol = Rat::from_integer(2).pow(-30);
    let mut reports = Vec::new();
    let mut total = 0;
    for n in [2, 3] {
        for rule in [maximin(n), utilitarian(n)] {
            let r = check_ordering_properties(&rule, &OrderingSpec { n, triples: 1000, seed: 0 }).unwrap();
            total += r.total_violations();
            reports.push(json!({"rule": rule.to_string(), "n": n, "report": r}));
        }
    }
    let (mut eq_bad, mut tr_bad) = (0, 0);
    let mut worst_eq = Rat::zero();
    let mut worst_tr = Rat::zero();
    for k in 0..200u64 {
        use rand::Rng;
        let mut rng = instance_rng(31, k);
        let n = 2 + (k % 2) as usize;
        let (w, rule) = if k % 4 < 2 { (simplex_weights(n).unwrap(), maximin(n)) } else { (uniform_singleton(n).unwrap(), utilitarian(n)) };
        let x = rand_point(n, &mut rng, 1);
        let e = equal_equivalent(&rule, &x, &tol).unwrap();
        let d = (&e - w.min_dot(&x).unwrap()).abs();
        if d > tol {
            eq_bad += 1;
        }
        worst_eq = worst_eq.max(d);
        let beta = Rat::new(rng.gen_range(1..=8), 4);
        let shifted = equal_equivalent(&rule, &x.shift(&beta), &tol).unwrap();
        let d = (shifted - &e - &beta).abs();
        if d > &tol * Rat::from_integer(2) {
            tr_bad += 1;
        }
        worst_tr = worst_tr.max(d);
    }
    Outcome {
        pass: total == 0 && eq_bad == 0 && tr_bad == 0,
        detail: format!(
            "maximin and utilitarian, n=2,3, 1000 triples each: {total} property violations; eqeq vs min_dot: {eq_bad}/200 beyond 2^-30 (max {:.2e}); translation: {tr_bad}/200 beyond 2^-29 (max {:.2e})",
            worst_eq.to_f64(),
            worst_tr.to_f64()
        ),
        report: json!({"ordering": reports, "eqeq_failures": eq_bad, "translation_failures": tr_bad, "worst_eqeq": worst_eq, "worst_translation": worst_tr}),
    }
}

/// Rules whose welfare maximum over a union of boxes is attained at a corner.
fn corner_rules() -> Vec<Rule> {
    let mk = |k| Rule::of(k).unwrap();
    vec![
        maximin(2),
        utilitarian(2),
        relative_fair(gini_weights(&Point(vec![rat(2, 3), rat(1, 3)])).unwrap()),
        relative_fair(blend_weights(&rat(1, 2), 2).unwrap()),
        mk(RuleKind::Egalitarian),
        mk(RuleKind::Dictator(0)),
        mk(RuleKind::Nash),
        mk(RuleKind::RelativeMax),
        mk(RuleKind::RelativeLeximin),
        mk(RuleKind::MinMaxBlend(rat(1, 3), rat(2, 3))),
        mk(RuleKind::MeanSd(rat(1, 2))),
        mk(RuleKind::Ks),
    ]
}

fn c8_oracle(threads: usize) -> Outcome {
    let start = Instant::now();
    let grid = GridSpec { h: rat(1, 16), threads: Some(threads) };
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    let rules = corner_rules();
    for k in 0..100 {
        let x = random_problem(2, 3, &CoordRange::default(), &mut instance_rng(41, k)).unwrap();
        for rule in &rules {
            let r = compare_oracle(rule, &x, &grid).unwrap();
            if !r.agrees() {
                failures.push(format!("{rule} on {x}: gap {}", r.gap));
            }
            reports.push(r);
        }
    }
    let elapsed = start.elapsed();
    let lex_values_exact = reports.iter().all(|r| !matches!(r.exact_value, Welfare::Lex(_)) || r.gap_is_zero);
    Outcome {
        pass: failures.is_empty() && lex_values_exact && elapsed <= Duration::from_secs(60),
        detail: format!(
            "{} rules x 100 problems at h=1/16: {} disagreements {:?}; {:.1}s (limit 60s)",
            rules.len(),
            failures.len(),
            failures.iter().take(2).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
        report: serde_json::to_value(&reports).unwrap(),
    }
}

type Criterion = (&'static str, fn(usize) -> Outcome);

const CRITERIA: [Criterion; 8] = [
    ("independence matrix", c1_matrix),
    ("mean-minus-SD monotonicity witness", c2_monotonicity_witness),
    ("rule equivalence suites", c3_equivalence),
    ("characterization, positive direction", c4_characterization),
    ("hammond and separability directions", c5_hammond_separability),
    ("KS axiom profile", c6_ks),
    ("revealed ordering suite", c7_ordering),
    ("oracle cross-check", c8_oracle),
];

#[test]
fn acceptance() {
    let mut all = true;
    let mut first_reports = Vec::new();
    for (k, (name, f)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let o = f(1);
        all &= o.pass;
        say(&format!(
            "{} criterion {} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        ));
        first_reports.push(serde_json::to_string(&o.report).unwrap());
    }
    // Criterion 9: rerun everything with three workers.
    let mut differing = Vec::new();
    for (k, (_, f)) in CRITERIA.iter().enumerate() {
        let again = serde_json::to_string(&f(3).report).unwrap();
        if again != first_reports[k] {
            differing.push(k + 1);
        }
    }
    let pass9 = differing.is_empty();
    all &= pass9;
    say(&format!(
        "{} criterion 9 (determinism): reports of criteria 1-8 with 1 vs 3 workers; differing: {differing:?}",
        if pass9 { "PASS" } else { "FAIL" }
    ));
    assert!(all, "some acceptance criteria failed");
}

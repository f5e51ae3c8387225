use relfair_core::harness::{independence_rules, check_axiom, search_violation, AxiomId, Instance, SearchConfig, Status, Verdict};
use relfair_core::rules::RuleJson;
use relfair_core::weights::{gini_weights, simplex_weights, NormId, Penalty};
use relfair_core::{rat, Point, Problem, Rule, RuleKind};

fn cfg(budget: u64, fixtures: bool, threads: usize) -> SearchConfig {
    SearchConfig { budget, seed: 0, n: 2, threads: Some(threads), fixtures }
}

#[test]
fn violations_replay_from_json() {
    for (name, rule, axiom) in independence_rules() {
        let v = search_violation(&rule, axiom, &cfg(64, true, 1)).unwrap();
        assert_eq!(v.status, Status::Violation, "{name}");
        let text = serde_json::to_string(&v).unwrap();
        let back: Verdict = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        let w = back.witness.unwrap();
        let inst: Instance = serde_json::from_str(&serde_json::to_string(&w.instance).unwrap()).unwrap();
        let again = check_axiom(&rule, axiom, &inst).unwrap();
        assert_eq!(again.status, Status::Violation, "{name}");
        assert_eq!(again.witness.unwrap().point, w.point, "{name}");
    }
}

#[test]
fn random_violations_do_not_depend_on_workers() {
    let util = Rule::of(RuleKind::RelativeFair(relfair_core::weights::uniform_singleton(2).unwrap())).unwrap();
    let one = search_violation(&util, AxiomId::HammondEai, &cfg(2000, false, 1)).unwrap();
    let four = search_violation(&util, AxiomId::HammondEai, &cfg(2000, false, 4)).unwrap();
    assert_eq!(one.status, Status::Violation);
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());
}

#[test]
fn rule_json_round_trips() {
    let rules = vec![
        RuleKind::RelativeFair(simplex_weights(3).unwrap()),
        RuleKind::RelativeFair(gini_weights(&Point(vec![rat(2, 3), rat(1, 3)])).unwrap()),
        RuleKind::Ks,
        RuleKind::Nash,
        RuleKind::RelativeLeximin,
        RuleKind::RelativeMax,
        RuleKind::Egalitarian,
        RuleKind::Dictator(1),
        RuleKind::WeakParetoSet,
        RuleKind::MeanSd(rat(1, 2)),
        RuleKind::MeanNorm(Penalty::new(NormId::L1, rat(1, 8)).unwrap()),
        RuleKind::MinMaxBlend(rat(1, 3), rat(2, 3)),
    ];
    for kind in rules {
        let rule = Rule::of(kind).unwrap();
        let text = serde_json::to_string(&RuleJson::from(rule.clone())).unwrap();
        let back = Rule::try_from(serde_json::from_str::<RuleJson>(&text).unwrap()).unwrap();
        assert_eq!(back.to_string(), rule.to_string(), "{text}");
        assert_eq!(serde_json::to_string(&RuleJson::from(back)).unwrap(), text);
    }
    let dictator: RuleJson = serde_json::from_str(r#"{"kind":"dictator","index":2}"#).unwrap();
    assert_eq!(Rule::try_from(dictator).unwrap().kind(), &RuleKind::Dictator(1));
    assert!(Rule::try_from(serde_json::from_str::<RuleJson>(r#"{"kind":"dictator","index":0}"#).unwrap()).is_err());
    assert!(Rule::try_from(serde_json::from_str::<RuleJson>(r#"{"kind":"borda"}"#).unwrap()).is_err());
}

#[test]
fn problems_round_trip_and_validate() {
    let x: Problem = serde_json::from_str(r#"{"n":2,"kind":"scmp","generators":[["1","2"]]}"#).unwrap();
    assert_eq!(x.generators(), &[Point::from_ints(&[1, 2]), Point::from_ints(&[2, 1])]);
    let back: Problem = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
    assert_eq!(back, x);
    for bad in [
        r#"{"n":2,"generators":[]}"#,
        r#"{"n":2,"generators":[["1","2","3"]]}"#,
        r#"{"n":2,"generators":[["-1","2"]]}"#,
        r#"{"n":2,"generators":[["0","2"]]}"#,
        r#"{"n":2,"generators":[["1/0","2"]]}"#,
    ] {
        assert!(serde_json::from_str::<Problem>(bad).is_err(), "{bad}");
    }
}

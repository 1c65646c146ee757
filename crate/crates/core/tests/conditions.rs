use gauge_triple::conditions::{CONDITION_NAMES, REPORT_VERSION};
use gauge_triple::{corpus, evaluate_all, hypothesis_check, ConditionConfig, Presentation, Status};

fn report(text: &str) -> gauge_triple::ConditionReport {
    evaluate_all(&Presentation::parse(text).unwrap(), &ConditionConfig::default()).unwrap()
}

#[test]
fn candidates_hold_everything() {
    for text in [corpus::cycle(1), corpus::broom(2), corpus::torus(2)] {
        let p = Presentation::parse(&text).unwrap();
        assert!(hypothesis_check(&p).all_hold());
        let r = report(&text);
        assert_eq!(r.report_version, REPORT_VERSION);
        let names: Vec<&str> = r.conditions.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, CONDITION_NAMES);
        assert!(r.all_hold(), "{}", r.to_json_value());
        assert_eq!(r.exit_code(), 0);
    }
}

#[test]
fn reports_are_byte_stable() {
    for text in [corpus::cycle(3), corpus::path_to_sink(2), corpus::two_vertex()] {
        let a = serde_json::to_string(&report(&text).to_json_value()).unwrap();
        let b = serde_json::to_string(&report(&text).to_json_value()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn mutants_fail_with_witnesses() {
    let cases = [
        (corpus::cycles(&[1, 1]), "irreducibility"),
        (corpus::path_to_sink(2), "orientability"),
        (corpus::loop_with_exit(), "orientability"),
        (corpus::ef_ab(), "orientability"),
    ];
    for (text, name) in cases {
        let r = report(&text);
        let entry = r.entry(name).unwrap();
        assert_eq!(entry.status, Status::Fails, "{name}: {}", r.to_json_value());
        assert!(!entry.witness.is_null());
        assert_eq!(r.exit_code(), 2);
    }
}

#[test]
fn missing_trace_makes_trace_conditions_not_applicable() {
    let r = report(&corpus::loop_with_exit());
    for name in ["dimension", "closedness", "first_order"] {
        let e = r.entry(name).unwrap();
        assert_eq!(e.status, Status::NotApplicable, "{name}");
        assert!(e.witness["reason"].is_string());
    }
}

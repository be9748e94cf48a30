use serde_json::Value;
use smoothlab_web::{pac_curve_json, regret_curve_json, sufficiency_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn regret_curve_has_reference_line() {
    let v = parse(regret_curve_json("separation", "prefix_guess", 32, 10, 1).unwrap());
    let series = v["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    assert_eq!(series[0]["points"].as_array().unwrap().len(), 32);
    assert_eq!(series[1]["points"][31]["y"], 16.0);
    assert!(v["flags"][0]["passed"].as_bool().unwrap());
}

#[test]
fn unknown_names_are_errors() {
    assert!(regret_curve_json("oracle", "prefix_guess", 8, 2, 0).is_err());
    assert!(regret_curve_json("separation", "oracle", 8, 2, 0).is_err());
}

#[test]
fn sufficiency_profile_reports_complexity() {
    let v = parse(sufficiency_json(4, 0.5, 64, 4, 0).unwrap());
    let numbers = v["numbers"].as_array().unwrap();
    assert!(numbers.iter().any(|n| n[0].as_str().unwrap().starts_with("C at")));
    assert!(v["flags"][0]["passed"].as_bool().unwrap());
}

#[test]
fn pac_curve_returns_medians() {
    let v = parse(pac_curve_json(10, 2000, 3).unwrap());
    assert_eq!(v["numbers"].as_array().unwrap().len(), 5);
}

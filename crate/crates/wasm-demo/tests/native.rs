use serde_json::Value;
use weakmax_wasm::{bound_curve_json, extremizer_json, verify_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn curve_is_monotone_and_hits_the_spot_value() {
    let v = parse(bound_curve_json(3.0, 2.0, 0.5, 0.3, 1.0, 0.1, 10.0, 101).unwrap());
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 101);
    let ts: Vec<f64> = pts.iter().map(|p| p["t"].as_f64().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    // λ = 1 is the midpoint of the log grid.
    assert!((pts[50]["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((ts[50] - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(pts[0]["branch"], "one");
    for p in pts {
        let (g, cap) = (p["g"].as_f64().unwrap(), p["cap"].as_f64().unwrap());
        assert_eq!(p["t"].as_f64().unwrap(), g.min(cap).min(1.0));
    }
}

#[test]
fn extremizer_samples_the_profile() {
    let v = parse(extremizer_json(3.0, 2.0, 0.5, 0.9, 1.0, 1.5).unwrap());
    assert_eq!(v["recipe"]["branch"], "weak_case_ii");
    assert!((v["integral"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["lq_mass"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    let pts = v["points"].as_array().unwrap();
    let values: Vec<f64> = pts.iter().map(|p| p[1].as_f64().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn verify_reports_a_small_gap() {
    let v = parse(verify_json(3.0, 2.0, 0.5, 0.3, 1.0, 1.0, 12, 2).unwrap());
    let gap = v["gap"].as_f64().unwrap();
    assert!((0.0..1e-2).contains(&gap), "{gap}");
    assert!(verify_json(3.0, 2.0, 0.5, 0.3, 1.0, 1.0, 20, 2).is_err());
}

#[test]
fn errors_name_the_problem() {
    let e = bound_curve_json(3.0, 2.0, 0.5, 0.95, 1.0, 0.1, 10.0, 10).unwrap_err();
    assert!(e.to_string().contains("Γ"), "{e}");
    assert!(extremizer_json(2.0, 3.0, 0.5, 0.3, 1.0, 1.0).is_err());
}

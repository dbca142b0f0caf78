//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no bindings beyond `wasm-bindgen`'s default glue. The work happens
//! in the `*_json` functions, which are ordinary Rust and tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use weakmax::bounds::t_scaled;
use weakmax::{extremizer_for, normalize, verify_sharpness, ConstraintTriple, Exponents, Result, TreeSpec};

/// Largest tree the page may ask for; keeps a click under a second.
pub const MAX_DEMO_CELLS: usize = 1 << 18;

fn setup(p: f64, q: f64, f: f64, a: f64, big_f: f64) -> Result<(Exponents, ConstraintTriple)> {
    Ok((Exponents::new(p, q)?, ConstraintTriple::new(f, a, big_f)?))
}

/// `T(λ)` on `count` log-spaced levels between `lo` and `hi`.
pub fn bound_curve_json(p: f64, q: f64, f: f64, a: f64, big_f: f64, lo: f64, hi: f64, count: usize) -> Result<String> {
    let (exp, c) = setup(p, q, f, a, big_f)?;
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(weakmax::Error::Constraint(format!("need 0 < lo < hi and count ≥ 2 (got {lo}, {hi}, {count})")));
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    let points = (0..count)
        .map(|i| {
            let lambda = lo * (step * i as f64).exp();
            let r = t_scaled(&exp, &c, lambda)?;
            Ok(json!({ "lambda": lambda, "t": r.t_value, "g": r.g_value, "cap": r.weak_cap, "branch": r.branch }))
        })
        .collect::<Result<Vec<Value>>>()?;
    Ok(Value::Array(points).to_string())
}

/// Recipe and samples `(t, g(t))` of the extremizer at `λ`, in normalized
/// units. Samples are log-spaced near `t = 0` where a power head blows up,
/// plus both sides of every breakpoint so plateaus draw as steps.
pub fn extremizer_json(p: f64, q: f64, f: f64, a: f64, big_f: f64, lambda: f64) -> Result<String> {
    let (exp, c) = setup(p, q, f, a, big_f)?;
    let (n, scale) = normalize(&exp, &c);
    let (g, recipe) = extremizer_for(n.l1, n.lq, lambda / scale, &exp)?;
    let g = g.padded_to_unit();
    let mut ts: Vec<f64> = (0..=200).map(|i| 10f64.powf(-4.0 + 4.0 * i as f64 / 200.0)).collect();
    let mut edge = 0.0;
    for s in g.segments() {
        edge += s.length();
        ts.extend([edge * (1.0 - 1e-9), (edge * (1.0 + 1e-9)).min(1.0)]);
    }
    ts.retain(|t| *t > 0.0 && *t <= 1.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let points: Vec<[f64; 2]> = ts.iter().map(|&t| [t, g.value_at(t)]).collect();
    Ok(json!({
        "scale": scale,
        "recipe": recipe,
        "segments": g.segments(),
        "points": points,
        "weak_norm": g.weak_norm(),
        "integral": g.integral(),
        "lq_mass": g.lq_mass_for(&exp),
    })
    .to_string())
}

/// Transplants the extremizer onto the `m`-adic tree of depth `N` and
/// measures `{M_T φ ≥ λ}`.
pub fn verify_json(p: f64, q: f64, f: f64, a: f64, big_f: f64, lambda: f64, level: u32, branching: usize) -> Result<String> {
    let (exp, c) = setup(p, q, f, a, big_f)?;
    let tree = TreeSpec::new(branching, level)?;
    if tree.cells() > MAX_DEMO_CELLS {
        return Err(weakmax::Error::OutOfRange(format!(
            "{branching}^{level} cells is more than the demo's {MAX_DEMO_CELLS}"
        )));
    }
    let r = verify_sharpness(&exp, &c, lambda, &tree)?;
    Ok(serde_json::to_string(&r).expect("reports serialize"))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn bound_curve(p: f64, q: f64, f: f64, a: f64, big_f: f64, lo: f64, hi: f64, count: usize) -> std::result::Result<String, JsError> {
    js(bound_curve_json(p, q, f, a, big_f, lo, hi, count))
}

#[wasm_bindgen]
pub fn extremizer(p: f64, q: f64, f: f64, a: f64, big_f: f64, lambda: f64) -> std::result::Result<String, JsError> {
    js(extremizer_json(p, q, f, a, big_f, lambda))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn verify(p: f64, q: f64, f: f64, a: f64, big_f: f64, lambda: f64, level: u32, branching: usize) -> std::result::Result<String, JsError> {
    js(verify_json(p, q, f, a, big_f, lambda, level, branching))
}

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use weakmax::sim::OracleConfig;
use weakmax::{
    bounds, domain_check, extremizer_for, normalize, oracle_search, verify_sharpness, BoundReport, Error, Result,
    Segment, SharpnessReport, TreeSpec,
};

use crate::config::{Command, Format, RunConfig};
use crate::format::{g17, g17_opt};

pub const BOUND_HEADER: &str = "lambda,G,k,branch,T,residual";
pub const SHARPNESS_HEADER: &str = "lambda,G,k,branch,T,residual,simulated,gap,level";

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn bound_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        g17(r.lambda),
        g17(r.g_value),
        g17_opt(r.k),
        r.branch,
        g17(r.t_value),
        g17(r.root_residual)
    )
}

fn sharpness_row(r: &SharpnessReport) -> String {
    format!(
        "{},{},{},{}",
        bound_row(&r.bound),
        g17(r.simulated_measure),
        g17(r.gap),
        r.grid_level
    )
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Runs one command and returns its report text.
pub fn run(config: &RunConfig) -> Result<String> {
    let exp = config.exponents()?;
    let triple = config.triple()?;
    let c = || triple.expect("validated: the command has moments");
    let tree = || TreeSpec::new(config.branching, config.level.unwrap_or(14));

    let text = match config.command {
        Command::Gamma => {
            let g = exp.gamma();
            match config.format {
                Format::Csv => csv("p,q,gamma", [format!("{},{},{}", g17(config.p), g17(config.q), g17(g))]),
                Format::Json => json(&serde_json::json!({ "p": config.p, "q": config.q, "gamma": g })),
            }
        }
        Command::Check => {
            let v = domain_check(&exp, &c());
            match config.format {
                Format::Csv => csv(
                    "member,boundary,equality_feasible",
                    [format!("{},{},{}", v.member, boundary_tag(&v.boundary), v.equality_feasible)],
                ),
                Format::Json => json(&v),
            }
        }
        Command::Bound => {
            let r = bounds::t_scaled(&exp, &c(), config.single_lambda())?;
            match config.format {
                Format::Csv => csv(BOUND_HEADER, [bound_row(&r)]),
                Format::Json => json(&r),
            }
        }
        Command::Sweep => {
            let levels = config.lambda.expect("validated").levels();
            let c = c();
            if config.level.is_some() {
                let tree = tree()?;
                let rows: Vec<SharpnessReport> =
                    levels.par_iter().map(|&l| verify_sharpness(&exp, &c, l, &tree)).collect::<Result<_>>()?;
                match config.format {
                    Format::Csv => csv(SHARPNESS_HEADER, rows.iter().map(sharpness_row)),
                    Format::Json => json(&rows),
                }
            } else {
                let rows: Vec<BoundReport> =
                    levels.par_iter().map(|&l| bounds::t_scaled(&exp, &c, l)).collect::<Result<_>>()?;
                match config.format {
                    Format::Csv => csv(BOUND_HEADER, rows.iter().map(bound_row)),
                    Format::Json => json(&rows),
                }
            }
        }
        Command::Extremal => {
            let (n, scale) = normalize(&exp, &c());
            let (profile, recipe) = extremizer_for(n.l1, n.lq, config.single_lambda() / scale, &exp)?;
            match config.format {
                Format::Json => json(&serde_json::json!({ "scale": scale, "recipe": recipe, "profile": profile })),
                Format::Csv => {
                    let mut start = 0.0;
                    let rows: Vec<String> = profile
                        .segments()
                        .iter()
                        .map(|s| {
                            let row = match *s {
                                Segment::Power { length } => format!("power,{},{},", g17(start), g17(length)),
                                Segment::Constant { length, value } => {
                                    format!("constant,{},{},{}", g17(start), g17(length), g17(value))
                                }
                            };
                            start += s.length();
                            row
                        })
                        .collect();
                    csv("kind,start,length,value", rows)
                }
            }
        }
        Command::Verify => {
            let r = verify_sharpness(&exp, &c(), config.single_lambda(), &tree()?)?;
            match config.format {
                Format::Csv => csv(SHARPNESS_HEADER, [sharpness_row(&r)]),
                Format::Json => json(&r),
            }
        }
        Command::Oracle => oracle(config)?,
    };
    Ok(text)
}

#[derive(Serialize)]
struct OracleReport {
    lambda: f64,
    formula_t: f64,
    best_measure: f64,
    gap: f64,
    level: u32,
    seed: u64,
}

fn oracle(config: &RunConfig) -> Result<String> {
    let exp = config.exponents()?;
    let (n, scale) = normalize(&exp, &config.triple()?.expect("validated"));
    let lambda = config.single_lambda();
    let level = config.level.expect("oracle has a default level");
    let search = OracleConfig { steps: config.steps, seeds: config.seeds, base_seed: config.seed };
    let r = oracle_search(n.l1, n.lq, lambda / scale, &exp, level, &search)?;
    if let Some(path) = &config.witness {
        // Back to the caller's scale: the witness of (f, A, F) is F times
        // the normalized one.
        let values: Vec<f64> = r.witness.values().iter().map(|v| v * scale).collect();
        write_witness(path, &values)?;
    }
    let report = OracleReport {
        lambda,
        formula_t: r.formula_t,
        best_measure: r.best_measure,
        gap: r.gap,
        level,
        seed: config.seed,
    };
    Ok(match config.format {
        Format::Csv => csv(
            "lambda,T,best_measure,gap,level,seed",
            [format!(
                "{},{},{},{},{},{}",
                g17(report.lambda),
                g17(report.formula_t),
                g17(report.best_measure),
                g17(report.gap),
                report.level,
                report.seed
            )],
        ),
        Format::Json => json(&report),
    })
}

/// `.json` paths get a JSON array; anything else the raw little-endian
/// `f64` cells, leaf order.
pub fn write_witness(path: &Path, values: &[f64]) -> Result<()> {
    let bytes = if path.extension().is_some_and(|e| e == "json") {
        let mut s = String::from("[");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", g17(*v));
        }
        s.push_str("]\n");
        s.into_bytes()
    } else {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    };
    std::fs::write(path, bytes).map_err(|e| Error::Constraint(format!("cannot write {}: {e}", path.display())))
}

fn boundary_tag(b: &weakmax::Boundary) -> String {
    serde_json::to_value(b).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

//! `key=value` parameters and their validation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use weakmax::{ConstraintTriple, Error, Exponents, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Gamma,
    Check,
    Bound,
    Sweep,
    Extremal,
    Verify,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A single level or `start:stop:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Single(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl LambdaSpec {
    pub fn levels(&self) -> Vec<f64> {
        match *self {
            LambdaSpec::Single(l) => vec![l],
            LambdaSpec::Range { start, count: 1, .. } => vec![start],
            LambdaSpec::Range { start, stop, count } => {
                let step = (stop - start) / (count - 1) as f64;
                (0..count)
                    .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub p: f64,
    pub q: f64,
    pub f: Option<f64>,
    pub a: Option<f64>,
    /// Weak norm `F`; 1 when absent.
    pub big_f: f64,
    pub lambda: Option<LambdaSpec>,
    pub level: Option<u32>,
    pub branching: usize,
    pub seed: u64,
    pub steps: usize,
    pub seeds: usize,
    pub output: Option<PathBuf>,
    pub witness: Option<PathBuf>,
    pub format: Format,
}

const KEYS: &[&str] = &[
    "p", "q", "f", "A", "F", "lambda", "N", "m", "seed", "steps", "seeds", "output", "witness", "format",
];

pub fn parse_pair(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    if !KEYS.contains(&k) {
        return Err(format!("unknown key {k:?} (known: {})", KEYS.join(", ")));
    }
    Ok((k.to_string(), v.to_string()))
}

fn bad(msg: String) -> Error {
    Error::Constraint(msg)
}

fn real(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(format!("{key} must be a finite number (got {v:?})")))
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| bad(format!("{key} must be a nonnegative integer (got {v:?})")))
}

fn lambda_spec(v: &str) -> Result<LambdaSpec> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        [l] => Ok(LambdaSpec::Single(real("lambda", l)?)),
        [start, stop, count] => {
            let (start, stop) = (real("lambda start", start)?, real("lambda stop", stop)?);
            let count: usize = integer("lambda count", count)?;
            if count == 0 {
                return Err(bad("lambda count ≥ 1".into()));
            }
            Ok(LambdaSpec::Range { start, stop, count })
        }
        _ => Err(bad(format!("lambda is a number or start:stop:count (got {v:?})"))),
    }
}

impl RunConfig {
    pub fn from_pairs(command: Command, pairs: &[(String, String)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if map.insert(k.as_str(), v.as_str()).is_some() {
                return Err(bad(format!("{k} given twice")));
            }
        }
        let need = |k: &str| map.get(k).copied().ok_or_else(|| bad(format!("missing {k}=…")));
        let opt_real = |k: &str| map.get(k).map(|v| real(k, v)).transpose();

        let p = real("p", need("p")?)?;
        let q = real("q", need("q")?)?;
        let needs_moments = command != Command::Gamma;
        let needs_lambda = !matches!(command, Command::Gamma | Command::Check);
        let (f, a) = if needs_moments {
            (Some(real("f", need("f")?)?), Some(real("A", need("A")?)?))
        } else {
            (opt_real("f")?, opt_real("A")?)
        };
        let lambda = match map.get("lambda") {
            Some(v) => Some(lambda_spec(v)?),
            None if needs_lambda => return Err(bad("missing lambda=…".into())),
            None => None,
        };
        if let Some(LambdaSpec::Range { .. }) = lambda {
            if command != Command::Sweep {
                return Err(bad("a lambda range start:stop:count needs the sweep command".into()));
            }
        }
        let format = match map.get("format").copied().unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(bad(format!("format is csv or json (got {other:?})"))),
        };
        let default_level = match command {
            Command::Verify => Some(14),
            Command::Oracle => Some(10),
            _ => None,
        };
        let level = match map.get("N") {
            Some(v) => Some(integer("N", v)?),
            None => default_level,
        };
        let config = RunConfig {
            command,
            p,
            q,
            f,
            a,
            big_f: opt_real("F")?.unwrap_or(1.0),
            lambda,
            level,
            branching: map.get("m").map(|v| integer("m", v)).transpose()?.unwrap_or(2),
            seed: map.get("seed").map(|v| integer("seed", v)).transpose()?.unwrap_or(0),
            steps: map.get("steps").map(|v| integer("steps", v)).transpose()?.unwrap_or(500),
            seeds: map.get("seeds").map(|v| integer("seeds", v)).transpose()?.unwrap_or(8),
            output: map.get("output").map(PathBuf::from),
            witness: map.get("witness").map(PathBuf::from),
            format,
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks everything the library is about to assume, so that a bad run
    /// stops with one line naming the broken inequality.
    fn validate(&self) -> Result<()> {
        let exp = self.exponents()?;
        if let Some(c) = self.triple()? {
            // Every command past `check` needs a point of the domain.
            if self.command != Command::Check && self.command != Command::Gamma {
                let (n, _) = weakmax::normalize(&exp, &c);
                weakmax::domain::require_domain(&exp, n.l1, n.lq)?;
            }
        }
        if let Some(spec) = self.lambda {
            for l in spec.levels() {
                if !(l > 0.0) {
                    return Err(bad(format!("λ > 0 (got {l})")));
                }
            }
        }
        if self.branching < 2 {
            return Err(bad(format!("m ≥ 2 (got {})", self.branching)));
        }
        if self.command == Command::Oracle && self.branching != 2 {
            return Err(bad("the oracle searches the dyadic tree only (m = 2)".into()));
        }
        if self.witness.is_some() && self.command != Command::Oracle {
            return Err(bad("witness=… only applies to the oracle command".into()));
        }
        if self.seeds == 0 {
            return Err(bad("seeds ≥ 1".into()));
        }
        Ok(())
    }

    pub fn exponents(&self) -> Result<Exponents> {
        Exponents::new(self.p, self.q)
    }

    pub fn triple(&self) -> Result<Option<ConstraintTriple>> {
        match (self.f, self.a) {
            (Some(f), Some(a)) => ConstraintTriple::new(f, a, self.big_f).map(Some),
            _ => Ok(None),
        }
    }

    pub fn single_lambda(&self) -> f64 {
        match self.lambda {
            Some(LambdaSpec::Single(l)) => l,
            Some(LambdaSpec::Range { start, .. }) => start,
            None => unreachable!("validated: the command has a level"),
        }
    }
}

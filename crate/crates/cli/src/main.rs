use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weakmax_cli::config::parse_pair;
use weakmax_cli::{run, Command, RunConfig};

/// Sharp level-set bounds for tree maximal operators.
///
/// Parameters are `key=value` pairs: p, q, f, A, F (default 1), lambda
/// (a number, or start:stop:count for sweep), N (grid level), m (branching,
/// default 2), seed, steps, seeds, format (csv|json), output, witness.
#[derive(Parser)]
#[command(name = "weakmax", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Params {
    #[arg(value_parser = parse_pair, value_name = "KEY=VALUE")]
    pairs: Vec<(String, String)>,
}

#[derive(Subcommand)]
enum Sub {
    /// Γ = ((p-1)/p)^q · p/(p-q).
    Gamma(Params),
    /// Classify (f, A, F) against the feasible domain.
    Check(Params),
    /// The bound min{1, G, (F/λ)^p} at one level.
    Bound(Params),
    /// The bound along a λ range; with N=… also simulate each level.
    Sweep(Params),
    /// Extremal recipe and profile attaining the bound.
    Extremal(Params),
    /// Transplant the extremizer onto the m-adic tree and measure.
    Verify(Params),
    /// Search 2^N-cell functions for a larger level set.
    Oracle(Params),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, params) = match cli.command {
        Sub::Gamma(p) => (Command::Gamma, p),
        Sub::Check(p) => (Command::Check, p),
        Sub::Bound(p) => (Command::Bound, p),
        Sub::Sweep(p) => (Command::Sweep, p),
        Sub::Extremal(p) => (Command::Extremal, p),
        Sub::Verify(p) => (Command::Verify, p),
        Sub::Oracle(p) => (Command::Oracle, p),
    };
    let result = RunConfig::from_pairs(command, &params.pairs).and_then(|config| {
        let text = run(&config)?;
        match &config.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| weakmax::Error::Constraint(format!("cannot write {}: {e}", path.display()))),
            None => {
                let _ = std::io::stdout().write_all(text.as_bytes());
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.exit_code() == 2 {
                let args: Vec<String> = params.pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
                eprintln!("error: {e} (internal; recipe {command:?} {})", args.join(" "));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `eikonal`: runs a scenario file and writes fields, reports and a manifest.
//!
//! Exit codes: 0 when every assertion passes, 2 when one fails, 1 on a
//! configuration error.

mod run;
mod scenario;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use run::{Failure, Options};
use scenario::Scenario;

#[derive(Debug, Parser)]
#[command(name = "eikonal", version, about = "Lorentzian eikonal scenarios")]
struct Args {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of grid halvings.
    #[arg(long, default_value_t = 0)]
    refine: u32,
    /// Treat warnings as assertion failures.
    #[arg(long)]
    strict: bool,
}

fn load(path: &PathBuf) -> Result<Scenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let sc: Scenario = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    sc.validate().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(sc)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.refine > 6 {
        eprintln!("error: --refine {} is above the limit of 6", args.refine);
        return ExitCode::from(1);
    }
    let sc = match load(&args.scenario) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let dir = args.scenario.parent().map(PathBuf::from).unwrap_or_default();
    let opts = Options { out: args.out, seed: args.seed, refine: args.refine, strict: args.strict };
    match run::run(&sc, &dir, &opts) {
        Ok(()) => {
            println!("{}: all assertions passed", sc.name);
            ExitCode::SUCCESS
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Assertions(failed)) => {
            for f in &failed {
                eprintln!("FAIL {f}");
            }
            eprintln!("{}: {} assertion(s) failed", sc.name, failed.len());
            ExitCode::from(2)
        }
    }
}

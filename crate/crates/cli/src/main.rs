//! `fpp-lab <experiment> --config <file> --out <dir>`
//!
//! Exit status: 0 when the run finished and every asserted invariant held,
//! 2 on an invariant violation, 1 on a usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fpp_core::experiments::{run, ExperimentConfig, ExperimentReport, EXPERIMENTS};
use fpp_core::FppError;

#[derive(Parser, Debug)]
#[command(name = "fpp-lab", version, about = "First-passage percolation experiments")]
struct Args {
    /// One of: midpoint, coalescence, half-full, competition, ferromagnet,
    /// shape, delta-h, ordering, busemann, backward-cluster.
    experiment: String,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json, samples.csv and plot.svg.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if !EXPERIMENTS.contains(&args.experiment.as_str()) {
        eprintln!("unknown experiment {:?}; expected one of {}", args.experiment, EXPERIMENTS.join(", "));
        return ExitCode::from(1);
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let out = match run(&args.experiment, &cfg) {
        Ok(o) => o,
        Err(e @ (FppError::Config(_) | FppError::InvalidParameter(_) | FppError::InsufficientBox { .. })) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = out.write_to(&args.out) {
        eprintln!("cannot write to {}: {e}", args.out.display());
        return ExitCode::from(1);
    }
    for (name, v) in &out.report.verdicts {
        let tag = if v.asserted { "assert" } else { "report" };
        let status = if v.passed { "ok" } else { "FAIL" };
        println!("[{tag}] {name}: {status} ({})", v.detail);
    }
    let bad = out.report.violations();
    if !bad.is_empty() {
        eprintln!("invariant violations: {}", bad.join(", "));
    }
    ExitCode::from(status_for(&out.report))
}

/// 0 when every asserted flag held, 2 otherwise.
fn status_for(report: &ExperimentReport) -> u8 {
    if report.violations().is_empty() {
        0
    } else {
        2
    }
}

// Negated comparisons (`!(a < b)`) are deliberate: they catch NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `fid`: fiducial and confidence distributions from scenario files.
//!
//! Usage: `fid <command> --scenario <path> [--set key=value ...] [--out-dir DIR]`
//! The default output directory is `$FID_OUT_DIR`, falling back to the
//! current directory. Errors print a single machine-readable JSON record on
//! stderr and exit nonzero.

mod csvout;
mod run;
mod scenario;

use clap::{Parser, Subcommand};
use scenario::Command as ScenCommand;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fid")]
#[command(about = "Fiducial, confidence and objective-Bayes distributions at desk scale")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Scenario file (flat `key = value` lines; see the README for the schema)
    #[arg(long)]
    scenario: PathBuf,
    /// Inline overrides applied after the file, e.g. --set s=5
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory (default: $FID_OUT_DIR or the current directory)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Commands {
    /// Fiducial density curve(s) on a grid
    Density(CommonArgs),
    /// Fiducial CDF curve(s) on a grid
    Cdf(CommonArgs),
    /// Quantiles at the scenario's levels
    Quantile(CommonArgs),
    /// Equal-tail intervals at the scenario's levels
    Interval(CommonArgs),
    /// Density, CDF and confidence curve in one table
    Curve(CommonArgs),
    /// PIT/coverage simulation (seeded)
    Coverage(CommonArgs),
    /// Confidence-risk gap between the arithmetic and geometric variants
    Risk(CommonArgs),
    /// Generalized fiducial density versus the sufficient-statistic fiducial
    Gfd(CommonArgs),
    /// Fiducial distribution versus an objective-Bayes posterior
    CompareBayes(CommonArgs),
    /// Inverse-CDF draws from a fiducial target (seeded)
    Sample(CommonArgs),
    /// Conditionally reducible exponential-family joints (seeded sampler)
    Crnef(CommonArgs),
}

fn json_escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' => "\\\"".chars().collect::<Vec<_>>(),
            '\\' => "\\\\".chars().collect(),
            '\n' => "\\n".chars().collect(),
            c => vec![c],
        })
        .collect()
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!(
        "{{\"error\":\"{}\",\"message\":\"{}\"}}",
        json_escape(kind),
        json_escape(message)
    );
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match &cli.command {
        Commands::Density(a) => (ScenCommand::Density, a),
        Commands::Cdf(a) => (ScenCommand::Cdf, a),
        Commands::Quantile(a) => (ScenCommand::Quantile, a),
        Commands::Interval(a) => (ScenCommand::Interval, a),
        Commands::Curve(a) => (ScenCommand::Curve, a),
        Commands::Coverage(a) => (ScenCommand::Coverage, a),
        Commands::Risk(a) => (ScenCommand::Risk, a),
        Commands::Gfd(a) => (ScenCommand::Gfd, a),
        Commands::CompareBayes(a) => (ScenCommand::CompareBayes, a),
        Commands::Sample(a) => (ScenCommand::Sample, a),
        Commands::Crnef(a) => (ScenCommand::Crnef, a),
    };
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                "io",
                &format!("cannot read scenario {}: {e}", args.scenario.display()),
            )
        }
    };
    let mut overrides = Vec::new();
    for set in &args.sets {
        match set.split_once('=') {
            Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
            None => return fail("cli", &format!("--set expects key=value, got '{set}'")),
        }
    }
    let sc = match scenario::parse_scenario(&text, cmd, &overrides) {
        Ok(sc) => sc,
        Err(e) => return fail("parse", &e.to_string()),
    };
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("FID_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match run::run_scenario(&sc, &out_dir) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind, &e.message),
    }
}

//! Thin command-line front end: one subcommand per experiment, flags
//! overriding an optional TOML config file. Exit code 0 when every check
//! passes (or is observational), 1 on any failed band, 2 on bad
//! configuration.

use clap::{Args, Parser, Subcommand};
use gff2d::harness::{run_experiment, Experiment, ExperimentConfig, OutputFormat, Verdict};
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gff2d",
    about = "Lattice free-field laboratory: samplers, extreme-level statistics, and exponent checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate the spectral covariance against the direct solve
    GreenCheck(Common),
    /// Logarithmic covariance deviations over the inner region
    Covariance(Common),
    /// Count of eta-high points across sizes
    HighCount(Common),
    /// High points inside a disk around random centers
    DiskCount(Common),
    /// High points inside a disk around a high center
    DiskCountConditional(Common),
    /// Ordered close pairs of high points
    Pairs(Common),
    /// Biggest square uniformly above the eta level
    HighSquare(Common),
    /// Wall-conditioned chain: biggest square under the (1-eta) level
    CffSpike(Common),
    /// Wall-conditioned chain: count of sites under the (1-eta) level
    CffLow(Common),
    /// Print the closed-form exponent predictions
    #[command(visible_alias = "theory")]
    TheoryTable(Common),
}

#[derive(Args)]
struct Common {
    /// Lattice side; repeat for several sizes
    #[arg(long = "n", value_name = "N")]
    ns: Vec<i64>,
    /// Inner margin as a rational like 1/4 (or a decimal)
    #[arg(long)]
    l: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Master seed; every replica stream derives from it
    #[arg(long)]
    seed: Option<u64>,
    /// Recorded states per chain (chain experiments)
    #[arg(long)]
    sweeps: Option<u64>,
    /// Burn-in sweeps before recording (default 50*N)
    #[arg(long)]
    burn_in: Option<u64>,
    /// Sweeps between recorded states
    #[arg(long)]
    thinning: Option<u64>,
    /// Random disk centers per replica
    #[arg(long)]
    centers: Option<u64>,
    /// Rejection budget for conditioned statistics
    #[arg(long)]
    budget: Option<u64>,
    /// Band tolerance override
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output base path; writes <out>.csv and <out>.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary format on stdout: text or json
    #[arg(long)]
    format: Option<String>,
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Keys accepted in a `--config` file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    ns: Option<Vec<i64>>,
    l: Option<String>,
    eta: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    replicas: Option<u64>,
    seed: Option<u64>,
    sweeps: Option<u64>,
    burn_in: Option<u64>,
    thinning: Option<u64>,
    centers: Option<u64>,
    budget: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

fn parse_margin(s: &str) -> Result<(u64, u64), String> {
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|e| format!("l numerator: {e}"))?;
        let den: u64 = den.trim().parse().map_err(|e| format!("l denominator: {e}"))?;
        return Ok((num, den));
    }
    let v: f64 = s.parse().map_err(|e| format!("l: {e}"))?;
    if !(v > 0.0 && v < 0.5) {
        return Err(format!("l: {v} outside (0, 1/2)"));
    }
    // decimals become exact rationals over a power of ten
    let mut den: u64 = 1;
    let mut x = v;
    while x.fract().abs() > 1e-12 && den < 1_000_000_000 {
        den *= 10;
        x = v * den as f64;
    }
    Ok((x.round() as u64, den))
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "json" => Ok(OutputFormat::Json),
        "text" => Ok(OutputFormat::Text),
        other => Err(format!("format: {other} is not json or text")),
    }
}

fn build_config(experiment: Experiment, args: &Common) -> Result<ExperimentConfig, String> {
    let mut config = ExperimentConfig::new(experiment);

    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("config {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    // file first, then flags on top
    if let Some(ns) = file.ns {
        config.ns = ns;
    }
    if let Some(l) = &file.l {
        config.l = parse_margin(l)?;
    }
    if let Some(v) = file.eta {
        config.params.eta = v;
    }
    if let Some(v) = file.alpha {
        config.params.alpha = v;
    }
    if let Some(v) = file.beta {
        config.params.beta = v;
    }
    if let Some(v) = file.gamma {
        config.params.gamma = v;
    }
    if let Some(v) = file.replicas {
        config.replicas = v;
    }
    if let Some(v) = file.seed {
        config.master_seed = v;
    }
    if let Some(v) = file.sweeps {
        config.recorded = v;
    }
    if file.burn_in.is_some() {
        config.burn_in = file.burn_in;
    }
    if let Some(v) = file.thinning {
        config.thinning = v;
    }
    if let Some(v) = file.centers {
        config.centers = v;
    }
    if let Some(v) = file.budget {
        config.budget = v;
    }
    if file.tolerance.is_some() {
        config.tolerance = file.tolerance;
    }
    if file.out.is_some() {
        config.out = file.out;
    }
    if let Some(f) = &file.format {
        config.format = parse_format(f)?;
    }

    if !args.ns.is_empty() {
        config.ns = args.ns.clone();
    }
    if let Some(l) = &args.l {
        config.l = parse_margin(l)?;
    }
    if let Some(v) = args.eta {
        config.params.eta = v;
    }
    if let Some(v) = args.alpha {
        config.params.alpha = v;
    }
    if let Some(v) = args.beta {
        config.params.beta = v;
    }
    if let Some(v) = args.gamma {
        config.params.gamma = v;
    }
    if let Some(v) = args.replicas {
        config.replicas = v;
    }
    if let Some(v) = args.seed {
        config.master_seed = v;
    }
    if let Some(v) = args.sweeps {
        config.recorded = v;
    }
    if args.burn_in.is_some() {
        config.burn_in = args.burn_in;
    }
    if let Some(v) = args.thinning {
        config.thinning = v;
    }
    if let Some(v) = args.centers {
        config.centers = v;
    }
    if let Some(v) = args.budget {
        config.budget = v;
    }
    if args.tolerance.is_some() {
        config.tolerance = args.tolerance;
    }
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    if let Some(f) = &args.format {
        config.format = parse_format(f)?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.command {
        Command::GreenCheck(a) => (Experiment::GreenCheck, a),
        Command::Covariance(a) => (Experiment::Covariance, a),
        Command::HighCount(a) => (Experiment::HighCount, a),
        Command::DiskCount(a) => (Experiment::DiskCount, a),
        Command::DiskCountConditional(a) => (Experiment::DiskCountConditional, a),
        Command::Pairs(a) => (Experiment::Pairs, a),
        Command::HighSquare(a) => (Experiment::HighSquare, a),
        Command::CffSpike(a) => (Experiment::CffSpike, a),
        Command::CffLow(a) => (Experiment::CffLow, a),
        Command::TheoryTable(a) => (Experiment::TheoryTable, a),
    };

    let config = match build_config(experiment, args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = config.validate() {
        eprintln!("config error: {e}");
        return ExitCode::from(2);
    }

    match run_experiment(&config) {
        Ok(report) => {
            match config.format {
                OutputFormat::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report.summary)
                            .expect("summary serializes")
                    );
                }
                OutputFormat::Text => print!("{}", report.summary.render_text()),
            }
            match report.summary.verdict {
                Verdict::Pass | Verdict::Observational => ExitCode::SUCCESS,
                Verdict::Fail => ExitCode::from(1),
            }
        }
        Err(gff2d::harness::HarnessError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

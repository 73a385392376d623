//! Experiment orchestration: seeded replica fan-out, statistic
//! collection, exponent fits, pass-band verdicts, and report emission.
//!
//! Every run is deterministic given the master seed: replica `i` of an
//! experiment at size `N` draws from a stream that is a pure function of
//! `(master seed, experiment name, N, i)`, so re-running reproduces files
//! byte for byte and adding replicas never perturbs existing ones.
//! Summaries are recomputable from the raw CSV alone.

pub mod bands;
pub mod csvio;

use crate::entropic::{self, ChainConfig, SweepOrder};
use crate::extremes::{self, median};
use crate::green;
use crate::lattice::{GridDomain, Point};
use crate::sampler::{self, SpectralSampler};
use crate::stream::{derive_seed, substream};
use crate::theory::{self, TheoryParams};
use bands::{default_bands, Band};
use csvio::{CsvSink, Row};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Green(#[from] green::GreenError),
    #[error(transparent)]
    Sampler(#[from] crate::sampler::SamplerError),
    #[error(transparent)]
    Extremes(#[from] extremes::ExtremesError),
    #[error(transparent)]
    Theory(#[from] theory::TheoryError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error(transparent)]
    Csv(#[from] csvio::CsvError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The experiments the harness can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    GreenCheck,
    Covariance,
    HighCount,
    DiskCount,
    DiskCountConditional,
    Pairs,
    HighSquare,
    CffSpike,
    CffLow,
    TheoryTable,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::GreenCheck,
        Experiment::Covariance,
        Experiment::HighCount,
        Experiment::DiskCount,
        Experiment::DiskCountConditional,
        Experiment::Pairs,
        Experiment::HighSquare,
        Experiment::CffSpike,
        Experiment::CffLow,
        Experiment::TheoryTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::GreenCheck => "green-check",
            Experiment::Covariance => "covariance",
            Experiment::HighCount => "high-count",
            Experiment::DiskCount => "disk-count",
            Experiment::DiskCountConditional => "disk-count-conditional",
            Experiment::Pairs => "pairs",
            Experiment::HighSquare => "high-square",
            Experiment::CffSpike => "cff-spike",
            Experiment::CffLow => "cff-low",
            Experiment::TheoryTable => "theory-table",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s)
    }

    /// The scaling law or identity the experiment probes.
    pub fn target(self) -> &'static str {
        match self {
            Experiment::GreenCheck => {
                "spectral mode weights imply the solved covariance entrywise"
            }
            Experiment::Covariance => {
                "|G(x,x) - g log N| and |G(x,y) - g(log N - log|y-x|)| stay bounded on the inner region"
            }
            Experiment::HighCount => "median count of eta-high points ~ N^(2(1-eta^2))",
            Experiment::DiskCount => {
                "median count of alpha-high points in a disk of radius N^beta ~ N^(2beta(1-(alpha/beta)^2))"
            }
            Experiment::DiskCountConditional => {
                "median count near a high center ~ N^(2beta(1-alpha^2))"
            }
            Experiment::Pairs => {
                "median ordered pairs of alpha-high points within N^beta ~ N^rho(alpha,beta)"
            }
            Experiment::HighSquare => {
                "median side of the biggest square uniformly above the eta level ~ N^(1/2-eta/2)"
            }
            Experiment::CffSpike => {
                "median side of the biggest square of the wall field under the (1-eta) level ~ N^(1/2-eta/2)"
            }
            Experiment::CffLow => {
                "median count of wall-field sites under the (1-eta) level ~ N^(2(1-eta^2))"
            }
            Experiment::TheoryTable => "closed-form exponent predictions",
        }
    }
}

/// Output rendering for summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

/// Full experiment configuration. `burn_in`, `recorded` and `thinning`
/// matter only for the chain-backed experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub ns: Vec<i64>,
    pub l: (u64, u64),
    pub params: TheoryParams,
    pub replicas: u64,
    pub master_seed: u64,
    pub burn_in: Option<u64>,
    pub recorded: u64,
    pub thinning: u64,
    pub centers: u64,
    pub budget: u64,
    pub dense_cap: usize,
    /// Overrides the band tolerance from the defaults table.
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Documented defaults per experiment.
    pub fn new(experiment: Experiment) -> Self {
        let ns: Vec<i64> = match experiment {
            Experiment::GreenCheck => vec![16],
            Experiment::Covariance => vec![32, 64, 128],
            Experiment::HighCount | Experiment::HighSquare => vec![64, 128, 256, 512],
            Experiment::DiskCount | Experiment::DiskCountConditional => vec![512],
            Experiment::Pairs => vec![128, 256, 512],
            Experiment::CffSpike | Experiment::CffLow => vec![64, 128, 256],
            Experiment::TheoryTable => vec![],
        };
        let params = match experiment {
            Experiment::HighCount => TheoryParams { eta: 0.5, ..Default::default() },
            Experiment::HighSquare => TheoryParams { eta: 0.2, ..Default::default() },
            Experiment::DiskCount => TheoryParams { alpha: 0.3, beta: 0.6, ..Default::default() },
            Experiment::DiskCountConditional => {
                TheoryParams { alpha: 0.4, beta: 0.6, ..Default::default() }
            }
            Experiment::Pairs => TheoryParams { alpha: 0.4, beta: 0.5, ..Default::default() },
            Experiment::CffSpike => TheoryParams { eta: 0.4, ..Default::default() },
            Experiment::CffLow => TheoryParams { eta: 0.5, ..Default::default() },
            _ => TheoryParams::default(),
        };
        ExperimentConfig {
            experiment,
            ns,
            l: (1, 4),
            params,
            replicas: 10,
            master_seed: 7,
            burn_in: None,
            recorded: 200,
            thinning: 4,
            centers: 20,
            budget: 100_000,
            dense_cap: green::DEFAULT_DENSE_CAP,
            tolerance: None,
            out: None,
            format: OutputFormat::Text,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.experiment != Experiment::TheoryTable {
            if self.ns.is_empty() {
                return fail("ns: at least one lattice size is required".into());
            }
            if self.ns.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("ns: sizes must be strictly increasing, got {:?}", self.ns));
            }
            if self.ns.iter().any(|&n| n < 3) {
                return fail("ns: sizes must be at least 3".into());
            }
        }
        if self.replicas < 1 {
            return fail("replicas: must be at least 1".into());
        }
        if self.l.0 == 0 || self.l.1 == 0 || 2 * self.l.0 >= self.l.1 {
            return fail(format!("l: {}/{} is outside (0, 1/2)", self.l.0, self.l.1));
        }
        if self.thinning == 0 {
            return fail("thinning: must be at least 1".into());
        }
        if self.recorded == 0 {
            return fail("sweeps: at least one recorded state is required".into());
        }
        match self.experiment {
            Experiment::HighCount | Experiment::HighSquare => {
                let eta = self.params.eta;
                let ok = if self.experiment == Experiment::HighCount {
                    eta > 0.0 && eta < 1.0
                } else {
                    eta > -1.0 && eta < 1.0
                };
                if !ok {
                    return fail(format!("eta: {eta} outside the exponent's range"));
                }
            }
            Experiment::CffSpike | Experiment::CffLow => {
                if !(self.params.eta > 0.0 && self.params.eta < 1.0) {
                    return fail(format!("eta: {} outside (0, 1)", self.params.eta));
                }
            }
            Experiment::DiskCount => {
                if !(self.params.alpha > 0.0 && self.params.alpha < self.params.beta) {
                    return fail(format!(
                        "alpha: need 0 < alpha < beta, got alpha={} beta={}",
                        self.params.alpha, self.params.beta
                    ));
                }
                if self.params.beta >= 1.0 {
                    return fail(format!("beta: {} outside (0, 1)", self.params.beta));
                }
            }
            Experiment::DiskCountConditional | Experiment::Pairs => {
                for (name, v) in [("alpha", self.params.alpha), ("beta", self.params.beta)] {
                    if !(v > 0.0 && v < 1.0) {
                        return fail(format!("{name}: {v} outside (0, 1)"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn domain(&self, n: i64) -> Result<GridDomain, HarnessError> {
        Ok(GridDomain::new(n, self.l.0, self.l.1)?)
    }

    fn l_string(&self) -> String {
        format!("{}/{}", self.l.0, self.l.1)
    }

    fn burn_in_for(&self, n: i64) -> u64 {
        self.burn_in.unwrap_or(50 * n as u64)
    }

    fn chain_config(&self, n: i64, replica: u64) -> ChainConfig {
        ChainConfig {
            burn_in_sweeps: self.burn_in_for(n),
            thinning: self.thinning,
            seed: derive_seed(self.master_seed, self.experiment.name(), &[n as u64, replica]),
            sweep_order: SweepOrder::Checkerboard,
            hard_wall: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "OBSERVATIONAL")]
    Observational,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Observational => "OBSERVATIONAL",
        }
    }
}

/// One judged quantity with its band.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl Check {
    fn band(name: String, value: f64, center: f64, tol: f64) -> Self {
        Check { name, value, lo: center - tol, hi: center + tol, pass: (value - center).abs() <= tol }
    }

    fn range(name: String, value: f64, lo: f64, hi: f64) -> Self {
        Check { name, value, lo, hi, pass: value >= lo && value <= hi }
    }
}

/// Per-size aggregate of the raw rows.
#[derive(Debug, Clone, Serialize)]
pub struct PerSize {
    pub n: i64,
    pub statistic: String,
    pub median: Option<f64>,
    pub samples: usize,
    pub censored: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub tolerance: f64,
}

/// The JSON-facing summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub target: String,
    pub bands_version: u32,
    pub l: String,
    pub ns: Vec<i64>,
    pub replicas: u64,
    pub master_seed: u64,
    pub params: BTreeMap<String, f64>,
    pub per_size: Vec<PerSize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictions: Option<theory::PredictionTable>,
    pub mcmc_limited: bool,
    pub verdict: Verdict,
}

impl RunSummary {
    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment : {}\n", self.experiment));
        out.push_str(&format!("target     : {}\n", self.target));
        out.push_str(&format!("l          : {}\n", self.l));
        if !self.params.is_empty() {
            let params: Vec<String> =
                self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("params     : {}\n", params.join(" ")));
        }
        if !self.per_size.is_empty() {
            out.push_str("per-size   :\n");
            for p in &self.per_size {
                let med = p.median.map_or("censored".to_string(), |m| format!("{m:.6}"));
                out.push_str(&format!(
                    "  N={:<5} {:<28} median {:>14}  samples {:>5}  censored {}\n",
                    p.n, p.statistic, med, p.samples, p.censored
                ));
                for (k, v) in &p.extra {
                    out.push_str(&format!("           {k} = {v:.6}\n"));
                }
            }
        }
        if let Some(fit) = &self.fit {
            out.push_str(&format!(
                "fit        : slope {:.4} ± {:.4}, predicted {:.4} ± {:.4}\n",
                fit.slope, fit.stderr, fit.predicted, fit.tolerance
            ));
        }
        if let Some(p) = &self.predictions {
            out.push_str(&format!(
                "{}\n",
                serde_json::to_string_pretty(p).expect("prediction table serializes")
            ));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check      : {:<44} {:>12.6} in [{:.6}, {:.6}] -> {}\n",
                c.name,
                c.value,
                c.lo,
                c.hi,
                if c.pass { "ok" } else { "FAIL" }
            ));
        }
        if self.mcmc_limited {
            out.push_str("note       : MCMC-limited accuracy; bands include chain error\n");
        }
        out.push_str(&format!("verdict    : {}\n", self.verdict.as_str()));
        out
    }
}

/// Rows plus summary; files are written as a side effect when configured.
#[derive(Debug)]
pub struct RunReport {
    pub rows: Vec<Row>,
    pub summary: RunSummary,
}

struct Sink {
    rows: Vec<Row>,
    file: Option<CsvSink<BufWriter<File>>>,
}

impl Sink {
    fn new(out: Option<&PathBuf>) -> Result<Self, HarnessError> {
        let file = match out {
            Some(base) => {
                let mut path = base.clone();
                path.set_extension("csv");
                if let Some(dir) = path.parent() {
                    if !dir.as_os_str().is_empty() {
                        std::fs::create_dir_all(dir)?;
                    }
                }
                Some(CsvSink::new(BufWriter::new(File::create(path)?))?)
            }
            None => None,
        };
        Ok(Sink { rows: Vec::new(), file })
    }

    fn push(&mut self, row: Row) -> Result<(), HarnessError> {
        if let Some(f) = &mut self.file {
            f.push(&row)?;
        }
        self.rows.push(row);
        Ok(())
    }

    /// Batch boundary: make partial results durable.
    fn flush(&mut self) -> Result<(), HarnessError> {
        if let Some(f) = &mut self.file {
            f.flush()?;
        }
        Ok(())
    }
}

/// Runs the experiment, writes `<out>.csv` / `<out>.json` when an output
/// base is configured, and returns rows plus summary.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let mut sink = Sink::new(config.out.as_ref())?;
    match config.experiment {
        Experiment::GreenCheck => run_green_check(config, &mut sink)?,
        Experiment::Covariance => run_covariance(config, &mut sink)?,
        Experiment::HighCount => run_high_count(config, &mut sink)?,
        Experiment::DiskCount => run_disk_count(config, &mut sink)?,
        Experiment::DiskCountConditional => run_disk_count_conditional(config, &mut sink)?,
        Experiment::Pairs => run_pairs(config, &mut sink)?,
        Experiment::HighSquare => run_high_square(config, &mut sink)?,
        Experiment::CffSpike | Experiment::CffLow => run_cff(config, &mut sink)?,
        Experiment::TheoryTable => run_theory_table(config, &mut sink)?,
    }
    sink.flush()?;
    let summary = summarize_rows(config, &sink.rows)?;
    if let Some(base) = &config.out {
        let mut path = base.clone();
        path.set_extension("json");
        std::fs::write(&path, serde_json::to_string_pretty(&summary.summary_json())?)?;
    }
    Ok(RunReport { rows: sink.rows, summary })
}

impl RunSummary {
    fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("summary serializes")
    }
}

fn field_seed(config: &ExperimentConfig, n: i64, replica: u64) -> u64 {
    derive_seed(config.master_seed, config.experiment.name(), &[n as u64, replica])
}

fn run_green_check(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let table = green::green_matrix_with_cap(&domain, config.dense_cap)?;
        let mut worst = 0.0f64;
        for x in domain.interior_sites() {
            for y in domain.interior_sites() {
                if domain.interior_index(y) < domain.interior_index(x) {
                    continue;
                }
                let dev = (sampler::spectral_covariance(&domain, x, y) - table.value_at(x, y)).abs();
                worst = worst.max(dev);
            }
        }
        sink.push(Row {
            n,
            l: config.l_string(),
            replica: 0,
            statistic: "spectral-vs-solve-maxabs".into(),
            parameters: String::new(),
            value: worst,
        })?;
        sink.flush()?;
    }
    Ok(())
}

fn run_covariance(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let table = green::green_matrix_with_cap(&domain, config.dense_cap)?;
        let report = green::covariance_deviation(&domain, &table);
        sink.push(Row {
            n,
            l: config.l_string(),
            replica: 0,
            statistic: "diag-deviation-sup".into(),
            parameters: String::new(),
            value: report.diag_sup,
        })?;
        if let Some(p) = report.pair_sup {
            sink.push(Row {
                n,
                l: config.l_string(),
                replica: 0,
                statistic: "pair-deviation-sup".into(),
                parameters: String::new(),
                value: p,
            })?;
        }
        sink.flush()?;
    }
    Ok(())
}

fn run_high_count(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    let eta = config.params.eta;
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let mut sampler = SpectralSampler::new(&domain);
        for rep in 0..config.replicas {
            let field = sampler.sample(field_seed(config, n, rep));
            let hs = extremes::high_set(&field, eta);
            sink.push(Row {
                n,
                l: config.l_string(),
                replica: rep,
                statistic: "high-count".into(),
                parameters: format!("eta={eta}"),
                value: hs.len() as f64,
            })?;
        }
        sink.flush()?;
    }
    Ok(())
}

fn run_disk_count(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    let (alpha, beta) = (config.params.alpha, config.params.beta);
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let mut sampler = SpectralSampler::new(&domain);
        let (lo, hi) = domain.inner_bounds();
        for rep in 0..config.replicas {
            let field = sampler.sample(field_seed(config, n, rep));
            let hs = extremes::high_set(&field, alpha);
            let mut rng = substream(
                config.master_seed,
                "disk-count-centers",
                &[n as u64, rep],
            );
            for _ in 0..config.centers {
                let c = Point::new(rng.random_range(lo..=hi), rng.random_range(lo..=hi));
                let count = extremes::count_in_disk(&hs, c, beta);
                sink.push(Row {
                    n,
                    l: config.l_string(),
                    replica: rep,
                    statistic: "disk-count".into(),
                    parameters: format!("alpha={alpha};beta={beta};cx={};cy={}", c.x, c.y),
                    value: count as f64,
                })?;
            }
        }
        sink.flush()?;
    }
    Ok(())
}

fn run_disk_count_conditional(
    config: &ExperimentConfig,
    sink: &mut Sink,
) -> Result<(), HarnessError> {
    let (alpha, beta) = (config.params.alpha, config.params.beta);
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let mut sampler = SpectralSampler::new(&domain);
        let fields: Vec<_> =
            (0..config.replicas).map(|rep| sampler.sample(field_seed(config, n, rep))).collect();
        let stats = extremes::count_in_disk_given_high(
            &fields,
            alpha,
            beta,
            config.budget,
            derive_seed(config.master_seed, "disk-conditional-centers", &[n as u64]),
        )?;
        for (rep, c, count) in &stats.accepted {
            sink.push(Row {
                n,
                l: config.l_string(),
                replica: *rep as u64,
                statistic: "disk-count-conditional".into(),
                parameters: format!("alpha={alpha};beta={beta};cx={};cy={}", c.x, c.y),
                value: *count as f64,
            })?;
        }
        sink.flush()?;
    }
    Ok(())
}

fn run_pairs(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    let (alpha, beta) = (config.params.alpha, config.params.beta);
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let mut sampler = SpectralSampler::new(&domain);
        for rep in 0..config.replicas {
            let field = sampler.sample(field_seed(config, n, rep));
            let hs = extremes::high_set(&field, alpha);
            let pairs = extremes::pair_count(&hs, beta);
            sink.push(Row {
                n,
                l: config.l_string(),
                replica: rep,
                statistic: "pair-count".into(),
                parameters: format!("alpha={alpha};beta={beta}"),
                value: pairs as f64,
            })?;
        }
        sink.flush()?;
    }
    Ok(())
}

fn run_high_square(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    let eta = config.params.eta;
    for &n in &config.ns {
        let domain = config.domain(n)?;
        let mut sampler = SpectralSampler::new(&domain);
        for rep in 0..config.replicas {
            let field = sampler.sample(field_seed(config, n, rep));
            let side = extremes::max_square_min_above(&field, theory::high_level(eta, n));
            sink.push(Row {
                n,
                l: config.l_string(),
                replica: rep,
                statistic: "high-square-side".into(),
                parameters: format!("eta={eta}"),
                value: side as f64,
            })?;
        }
        sink.flush()?;
    }
    Ok(())
}

fn run_cff(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    let eta = config.params.eta;
    let spike = config.experiment == Experiment::CffSpike;
    for &n in &config.ns {
        let domain = config.domain(n)?;
        for rep in 0..config.replicas {
            let chain_config = config.chain_config(n, rep);
            let states = entropic::cff_chain(&domain, &chain_config, config.recorded as usize);
            for (k, st) in states.iter().enumerate() {
                let (stat, value) = if spike {
                    ("low-square-side", entropic::max_low_square(st, eta) as f64)
                } else {
                    ("low-count", entropic::low_set(st, eta).len() as f64)
                };
                sink.push(Row {
                    n,
                    l: config.l_string(),
                    replica: rep,
                    statistic: stat.into(),
                    parameters: format!("eta={eta};state={k}"),
                    value,
                })?;
            }
            sink.push(Row {
                n,
                l: config.l_string(),
                replica: rep,
                statistic: "mean-height-normalized".into(),
                parameters: format!("burn_in={};recorded={}", chain_config.burn_in_sweeps, states.len()),
                value: entropic::cff_mean_height(&states),
            })?;
            sink.flush()?;
        }
    }
    Ok(())
}

fn run_theory_table(config: &ExperimentConfig, sink: &mut Sink) -> Result<(), HarnessError> {
    let table = theory::prediction_table(&config.params)?;
    let mut push = |name: &str, v: f64| {
        sink.push(Row {
            n: 0,
            l: config.l_string(),
            replica: 0,
            statistic: name.into(),
            parameters: format!(
                "alpha={};beta={};eta={}",
                config.params.alpha, config.params.beta, config.params.eta
            ),
            value: v,
        })
    };
    push("high-count-exponent", table.high_count_exponent)?;
    push("low-count-exponent", table.low_count_exponent)?;
    if let Some(d) = table.disk_count_exponent {
        push("disk-count-exponent", d)?;
    }
    push("conditional-disk-count-exponent", table.conditional_disk_count_exponent)?;
    push("high-square-exponent", table.high_square_exponent)?;
    push("low-square-exponent", table.low_square_exponent)?;
    push("pair-exponent", table.pair_exponent)?;
    push("mean-pair-exponent", table.mean_pair_exponent)?;
    Ok(())
}

fn band_for(config: &ExperimentConfig) -> Option<&'static Band> {
    default_bands().get(config.experiment.name())
}

fn tolerance_for(config: &ExperimentConfig) -> f64 {
    config
        .tolerance
        .or_else(|| band_for(config).and_then(|b| b.tolerance))
        .unwrap_or(f64::INFINITY)
}

fn rows_for<'a>(rows: &'a [Row], n: i64, statistic: &str) -> Vec<&'a Row> {
    rows.iter().filter(|r| r.n == n && r.statistic == statistic).collect()
}

/// Builds the summary and verdict from raw rows alone (plus the config
/// that names the experiment and bands). This is exactly what
/// [`run_experiment`] uses, so verdicts are recomputable from CSV.
pub fn summarize_rows(config: &ExperimentConfig, rows: &[Row]) -> Result<RunSummary, HarnessError> {
    let mut params = BTreeMap::new();
    let mut per_size = Vec::new();
    let mut checks = Vec::new();
    let mut fit = None;
    let mut predictions = None;
    let mut mcmc_limited = false;
    let mut below_budget = false;
    let mut hard_fail = false;
    let tol = tolerance_for(config);

    match config.experiment {
        Experiment::GreenCheck => {
            for &n in &config.ns {
                for row in rows_for(rows, n, "spectral-vs-solve-maxabs") {
                    checks.push(Check::range(
                        format!("spectral-vs-solve max abs deviation, N={n}"),
                        row.value,
                        0.0,
                        tol,
                    ));
                    per_size.push(PerSize {
                        n,
                        statistic: row.statistic.clone(),
                        median: Some(row.value),
                        samples: 1,
                        censored: 0,
                        extra: BTreeMap::new(),
                    });
                }
            }
        }
        Experiment::Covariance => {
            for stat in ["diag-deviation-sup", "pair-deviation-sup"] {
                let base: Option<f64> =
                    rows_for(rows, config.ns[0], stat).first().map(|r| r.value);
                for &n in &config.ns {
                    for row in rows_for(rows, n, stat) {
                        per_size.push(PerSize {
                            n,
                            statistic: stat.into(),
                            median: Some(row.value),
                            samples: 1,
                            censored: 0,
                            extra: BTreeMap::new(),
                        });
                        if let Some(b) = base {
                            checks.push(Check::range(
                                format!("{stat} at N={n} vs smallest size + allowance"),
                                row.value,
                                0.0,
                                b + tol,
                            ));
                        }
                    }
                }
            }
        }
        Experiment::HighCount | Experiment::HighSquare | Experiment::Pairs => {
            let (stat, predicted): (&str, f64) = match config.experiment {
                Experiment::HighCount => {
                    params.insert("eta".into(), config.params.eta);
                    ("high-count", theory::high_count_exponent(config.params.eta)?)
                }
                Experiment::HighSquare => {
                    params.insert("eta".into(), config.params.eta);
                    ("high-square-side", theory::square_width_exponent(config.params.eta)?)
                }
                _ => {
                    params.insert("alpha".into(), config.params.alpha);
                    params.insert("beta".into(), config.params.beta);
                    (
                        "pair-count",
                        theory::pair_exponent(config.params.alpha, config.params.beta)?,
                    )
                }
            };
            let mut medians = Vec::new();
            for &n in &config.ns {
                let vals: Vec<f64> = rows_for(rows, n, stat).iter().map(|r| r.value).collect();
                let med = if vals.is_empty() { None } else { Some(median(&vals)) };
                per_size.push(PerSize {
                    n,
                    statistic: stat.into(),
                    median: med,
                    samples: vals.len(),
                    censored: vals.iter().filter(|&&v| v <= 0.0).count(),
                    extra: BTreeMap::new(),
                });
                medians.push(med.unwrap_or(0.0));
            }
            let est = extremes::exponent_fit(&config.ns, &medians, Some(predicted))?;
            checks.push(Check::band(
                format!("fitted slope of median {stat} vs predicted"),
                est.slope,
                predicted,
                tol,
            ));
            fit = Some(FitSummary { slope: est.slope, stderr: est.stderr, predicted, tolerance: tol });
        }
        Experiment::DiskCount | Experiment::DiskCountConditional => {
            params.insert("alpha".into(), config.params.alpha);
            params.insert("beta".into(), config.params.beta);
            let (stat, predicted): (&str, f64) = if config.experiment == Experiment::DiskCount {
                (
                    "disk-count",
                    theory::disk_count_exponent(config.params.alpha, config.params.beta)?,
                )
            } else {
                (
                    "disk-count-conditional",
                    theory::conditional_disk_count_exponent(
                        config.params.alpha,
                        config.params.beta,
                    )?,
                )
            };
            for &n in &config.ns {
                let vals: Vec<f64> = rows_for(rows, n, stat).iter().map(|r| r.value).collect();
                let censored = vals.iter().filter(|&&v| v <= 0.0).count();
                let ratios: Vec<f64> = vals
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|&v| v.ln() / (n as f64).ln())
                    .collect();
                let med = if ratios.is_empty() { None } else { Some(median(&ratios)) };
                per_size.push(PerSize {
                    n,
                    statistic: format!("{stat} log ratio"),
                    median: med,
                    samples: vals.len(),
                    censored,
                    extra: BTreeMap::new(),
                });
                match med {
                    Some(m) => checks.push(Check::band(
                        format!("median log({stat})/log N at N={n} vs predicted"),
                        m,
                        predicted,
                        tol,
                    )),
                    None => hard_fail = true,
                }
            }
        }
        Experiment::CffSpike | Experiment::CffLow => {
            params.insert("eta".into(), config.params.eta);
            mcmc_limited = true;
            let spike = config.experiment == Experiment::CffSpike;
            let stat = if spike { "low-square-side" } else { "low-count" };
            let predicted = if spike {
                theory::square_width_exponent(config.params.eta)?
            } else {
                theory::low_count_exponent(config.params.eta)?
            };
            let mut medians = Vec::new();
            let mut recorded_min = usize::MAX;
            for &n in &config.ns {
                let vals: Vec<f64> = rows_for(rows, n, stat).iter().map(|r| r.value).collect();
                recorded_min = recorded_min.min(vals.len());
                let heights: Vec<f64> = rows_for(rows, n, "mean-height-normalized")
                    .iter()
                    .map(|r| r.value)
                    .collect();
                let mut extra = BTreeMap::new();
                if !heights.is_empty() {
                    extra.insert("mean-height-normalized".into(), median(&heights));
                }
                let med = if vals.is_empty() { None } else { Some(median(&vals)) };
                per_size.push(PerSize {
                    n,
                    statistic: stat.into(),
                    median: med,
                    samples: vals.len(),
                    censored: vals.iter().filter(|&&v| v <= 0.0).count(),
                    extra,
                });
                medians.push(med.unwrap_or(0.0));
            }
            let est = extremes::exponent_fit(&config.ns, &medians, Some(predicted))?;
            checks.push(Check::band(
                format!("fitted slope of median {stat} vs predicted"),
                est.slope,
                predicted,
                tol,
            ));
            fit = Some(FitSummary { slope: est.slope, stderr: est.stderr, predicted, tolerance: tol });
            // Below the documented sweep budget the verdict is
            // observational rather than pass/fail.
            if let Some(band) = band_for(config) {
                let burn_ok = config
                    .ns
                    .iter()
                    .all(|&n| config.burn_in_for(n) >= band.min_burn_in.unwrap_or(0));
                let rec_ok = recorded_min as u64 >= band.min_recorded.unwrap_or(0);
                below_budget = !(burn_ok && rec_ok);
            }
        }
        Experiment::TheoryTable => {
            params.insert("alpha".into(), config.params.alpha);
            params.insert("beta".into(), config.params.beta);
            params.insert("eta".into(), config.params.eta);
            predictions = Some(theory::prediction_table(&config.params)?);
        }
    }

    let verdict = if below_budget {
        Verdict::Observational
    } else if hard_fail || checks.iter().any(|c| !c.pass) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };

    Ok(RunSummary {
        experiment: config.experiment.name().into(),
        target: config.experiment.target().into(),
        bands_version: default_bands().version,
        l: config.l_string(),
        ns: config.ns.clone(),
        replicas: config.replicas,
        master_seed: config.master_seed,
        params,
        per_size,
        fit,
        checks,
        predictions,
        mcmc_limited,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_table_summary_has_pair_exponent() {
        let mut config = ExperimentConfig::new(Experiment::TheoryTable);
        config.params = TheoryParams { alpha: 0.5, beta: 0.5, eta: 0.5, ..Default::default() };
        let report = run_experiment(&config).unwrap();
        let table = report.summary.predictions.unwrap();
        assert!((table.pair_exponent - 7.0 / 3.0).abs() < 1e-12);
        assert_eq!(report.summary.verdict, Verdict::Pass);
        let json = serde_json::to_string(&report.summary).unwrap();
        assert!(json.contains("2.333333333333333"));
        assert!(json.contains("\"high_count_exponent\":1.5"));
    }

    #[test]
    fn config_validation_names_the_field() {
        let mut config = ExperimentConfig::new(Experiment::HighCount);
        config.ns = vec![64, 64];
        let err = run_experiment(&config).unwrap_err();
        assert!(err.to_string().contains("ns"), "{err}");

        let mut config = ExperimentConfig::new(Experiment::DiskCount);
        config.params.alpha = 0.7;
        config.params.beta = 0.6;
        let err = run_experiment(&config).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");

        let mut config = ExperimentConfig::new(Experiment::HighCount);
        config.l = (1, 2);
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("l:"), "{err}");
    }

    #[test]
    fn green_check_passes_at_n16() {
        let mut config = ExperimentConfig::new(Experiment::GreenCheck);
        config.ns = vec![16];
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.summary.verdict, Verdict::Pass);
        assert!(report.rows[0].value < 1e-8);
    }

    #[test]
    fn high_count_runs_are_byte_identical() {
        let dir = std::env::temp_dir().join(format!("gff2d-test-{}", std::process::id()));
        let mut config = ExperimentConfig::new(Experiment::HighCount);
        config.ns = vec![16, 24, 32];
        config.replicas = 3;
        config.master_seed = 7;
        config.out = Some(dir.join("run-a"));
        let a = run_experiment(&config).unwrap();
        config.out = Some(dir.join("run-b"));
        let b = run_experiment(&config).unwrap();
        let bytes_a = std::fs::read(dir.join("run-a.csv")).unwrap();
        let bytes_b = std::fs::read(dir.join("run-b.csv")).unwrap();
        assert_eq!(bytes_a, bytes_b);
        assert_eq!(a.rows, b.rows);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn adding_replicas_preserves_existing_rows() {
        let mut config = ExperimentConfig::new(Experiment::HighCount);
        config.ns = vec![16, 24, 32];
        config.replicas = 2;
        let small = run_experiment(&config).unwrap();
        config.replicas = 4;
        let big = run_experiment(&config).unwrap();
        for row in &small.rows {
            assert!(big.rows.contains(row), "missing {row:?}");
        }
    }

    #[test]
    fn summaries_recompute_from_parsed_csv() {
        let mut config = ExperimentConfig::new(Experiment::HighCount);
        config.ns = vec![16, 24, 32];
        config.replicas = 3;
        let report = run_experiment(&config).unwrap();
        let mut buf = Vec::new();
        csvio::emit_csv(&report.rows, &mut buf).unwrap();
        let parsed = csvio::parse_csv(buf.as_slice()).unwrap();
        let again = summarize_rows(&config, &parsed).unwrap();
        assert_eq!(
            serde_json::to_string(&report.summary).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn cff_verdict_observational_below_budget() {
        let mut config = ExperimentConfig::new(Experiment::CffSpike);
        config.ns = vec![8, 12, 16];
        config.replicas = 1;
        config.recorded = 5;
        config.burn_in = Some(20);
        config.thinning = 1;
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.summary.verdict, Verdict::Observational);
        assert!(report.summary.mcmc_limited);
    }
}

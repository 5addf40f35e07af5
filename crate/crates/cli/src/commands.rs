use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tqm_core::harness::{run_trials, success_rate, sweep_with_trials};
use tqm_core::verify::{run_all, SuiteOutcome, VerifyOptions};
use tqm_core::TrialResult;

use crate::config::{ConfigError, ExperimentConfig, OutputFormat, RawConfig};
use crate::report::{csv_string, write_atomic, JsonReport};

#[derive(Debug, Parser)]
#[command(name = "tqm", version, about = "Online CDF estimation experiments under threshold queries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a batch of independent trials.
    Run(ExperimentArgs),
    /// Success rate over a grid of horizons (`--t-grid`).
    Sweep(ExperimentArgs),
    /// Run the property suites; exits 3 if any fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Key/value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub adversary: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Queries per round (simulated queries for iw_single).
    #[arg(long)]
    pub k: Option<usize>,
    /// Horizon.
    #[arg(long = "T")]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Also require success at ceil(1.5 T) and 2T.
    #[arg(long)]
    pub tau_check: bool,
    /// Monotone fit of the iw_single output.
    #[arg(long)]
    pub isotonic: bool,
    /// Leave wall_ms empty so reports are reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
    /// Comma-separated ascending horizons for `sweep`.
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<usize>>,
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// Random instances per randomized property.
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file for the suite outcomes.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(anyhow::Error),
    Verification(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
            Self::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "{m}"),
            Self::Runtime(e) => write!(f, "{e:#}"),
            Self::Verification(names) => write!(f, "verification failed: {}", names.join(", ")),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

impl ExperimentArgs {
    fn flags(&self) -> RawConfig {
        RawConfig {
            algorithm: self.algorithm.clone(),
            adversary: self.adversary.clone(),
            n: self.n,
            eps: self.eps,
            k: self.k,
            rounds: self.rounds,
            eta: self.eta,
            trials: self.trials,
            master_seed: self.seed,
            output_path: self.out.clone(),
            output_format: self.format,
            tau_check: self.tau_check.then_some(true),
            isotonic: self.isotonic.then_some(true),
            t_grid: self.t_grid.clone(),
            record_timing: self.no_timing.then_some(false),
        }
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        ExperimentConfig::resolve(file.overlay(self.flags()))
    }
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => run(&args.resolve()?),
        Command::Sweep(args) => sweep(&args.resolve()?),
        Command::Verify(args) => verify(&args),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let trial_cfg = cfg.trial_config()?;
    let results = run_trials(&trial_cfg, cfg.trials, cfg.master_seed).map_err(runtime)?;
    match success_rate(&results) {
        Ok(r) => eprintln!(
            "{} vs {}: n={} eps={} T={} success {}/{} = {:.3} (95% CI [{:.3}, {:.3}])",
            cfg.algorithm, cfg.adversary, cfg.n, cfg.eps, cfg.rounds, r.successes, r.trials, r.rate, r.lower, r.upper
        ),
        Err(_) => eprintln!("no trials run"),
    }
    emit(cfg, &results, JsonReport::new(cfg, &results))
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let grid = cfg
        .t_grid
        .as_ref()
        .ok_or_else(|| Failure::Config("sweep needs a horizon grid (t_grid / --t-grid)".into()))?;
    if cfg.trials == 0 {
        return Err(Failure::Config("sweep needs at least one trial per horizon".into()));
    }
    let trial_cfg = cfg.trial_config()?;
    let (summary, results) = sweep_with_trials(&trial_cfg, grid, cfg.trials, cfg.master_seed).map_err(runtime)?;
    for p in &summary.points {
        eprintln!(
            "T={:>8}  success {:.3}  95% CI [{:.3}, {:.3}]",
            p.rounds, p.rate.rate, p.rate.lower, p.rate.upper
        );
    }
    match summary.min_rounds {
        Some(t) => eprintln!("smallest T with lower bound >= 0.75: {t}"),
        None => eprintln!("no grid horizon reached a lower bound of 0.75"),
    }
    let mut json = JsonReport::new(cfg, &results);
    json.summary = None;
    json.sweep = Some(summary);
    emit(cfg, &results, json)
}

fn emit(cfg: &ExperimentConfig, results: &[TrialResult], json: JsonReport) -> Result<(), Failure> {
    let body = match cfg.output_format {
        OutputFormat::Csv => csv_string(results),
        OutputFormat::Json => json.to_string_pretty(),
    };
    match &cfg.output_path {
        Some(path) => write_atomic(path, body.as_bytes()).map_err(Failure::Runtime),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(runtime),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        instances: args.instances.unwrap_or(defaults.instances),
        seed: args.seed.unwrap_or(defaults.seed),
    };
    if opts.instances == 0 {
        return Err(Failure::Config("instances must be at least 1".into()));
    }
    let outcomes = run_all(opts);
    for o in &outcomes {
        println!("[{}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    if let Some(path) = &args.out {
        let mut body = serde_json::to_string_pretty(&outcomes).map_err(runtime)?;
        body.push('\n');
        write_atomic(path, body.as_bytes()).map_err(Failure::Runtime)?;
    }
    verification_status(&outcomes)
}

pub fn verification_status(outcomes: &[SuiteOutcome]) -> Result<(), Failure> {
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Config(String::new()).exit_code(), 1);
        assert_eq!(Failure::Runtime(anyhow::anyhow!("x")).exit_code(), 2);
        let bad = SuiteOutcome {
            name: "kl".into(),
            passed: false,
            checks: 1,
            detail: String::new(),
        };
        let err = verification_status(&[bad]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(err.to_string(), "verification failed: kl");
        assert!(verification_status(&[]).is_ok());
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "tqm", "sweep", "--algorithm", "mw_parallel", "--n", "16", "--eps", "0.1", "--T", "40", "--t-grid",
            "5,10,20", "--no-timing", "--tau-check", "--format", "json",
        ])
        .unwrap();
        let Command::Sweep(args) = cli.command else { panic!("not a sweep") };
        let raw = args.flags();
        assert_eq!(raw.rounds, Some(40));
        assert_eq!(raw.t_grid, Some(vec![5, 10, 20]));
        assert_eq!(raw.record_timing, Some(false));
        assert_eq!(raw.tau_check, Some(true));
        assert_eq!(raw.isotonic, None);
        assert_eq!(raw.output_format, Some(OutputFormat::Json));
    }
}

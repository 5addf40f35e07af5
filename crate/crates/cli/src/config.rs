//! Experiment configuration: a strict flat key/value file and command-line
//! flags, merged and then resolved into a fully defaulted [`ExperimentConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tqm_core::harness::validate_grid;
use tqm_core::{Algorithm, AdversaryKind, TrialConfig};

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Configuration as written by the user: every key optional, unknown keys
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_format: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_check: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isotonic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_timing: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Syntax(String),
    Missing(Vec<&'static str>),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            Self::Syntax(m) => write!(f, "malformed config: {m}"),
            Self::Missing(fields) => write!(f, "missing required field(s): {}", fields.join(", ")),
            Self::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<tqm_core::Error> for ConfigError {
    fn from(e: tqm_core::Error) -> Self {
        Self::Invalid(e.to_string())
    }
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Keys set in `top` replace those in `self`.
    pub fn overlay(self, top: RawConfig) -> RawConfig {
        RawConfig {
            algorithm: top.algorithm.or(self.algorithm),
            adversary: top.adversary.or(self.adversary),
            n: top.n.or(self.n),
            eps: top.eps.or(self.eps),
            k: top.k.or(self.k),
            rounds: top.rounds.or(self.rounds),
            eta: top.eta.or(self.eta),
            trials: top.trials.or(self.trials),
            master_seed: top.master_seed.or(self.master_seed),
            output_path: top.output_path.or(self.output_path),
            output_format: top.output_format.or(self.output_format),
            tau_check: top.tau_check.or(self.tau_check),
            isotonic: top.isotonic.or(self.isotonic),
            t_grid: top.t_grid.or(self.t_grid),
            record_timing: top.record_timing.or(self.record_timing),
        }
    }
}

/// Fully defaulted and validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub adversary: AdversaryKind,
    pub n: usize,
    pub eps: f64,
    pub k: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eta: Option<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub tau_check: bool,
    pub isotonic: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_grid: Option<Vec<usize>>,
    pub record_timing: bool,
}

impl ExperimentConfig {
    /// Fills `k`, `eta` and `T` from the algorithm's formulas, then validates.
    pub fn resolve(raw: RawConfig) -> Result<Self, ConfigError> {
        let mut missing = Vec::new();
        if raw.algorithm.is_none() {
            missing.push("algorithm");
        }
        if raw.adversary.is_none() {
            missing.push("adversary");
        }
        if raw.n.is_none() {
            missing.push("n");
        }
        if raw.eps.is_none() {
            missing.push("eps");
        }
        let (Some(alg), Some(adv), Some(n), Some(eps)) = (raw.algorithm, raw.adversary, raw.n, raw.eps) else {
            return Err(ConfigError::Missing(missing));
        };
        let algorithm: Algorithm = alg.parse()?;
        let adversary: AdversaryKind = adv.parse()?;
        if n < 2 {
            return Err(ConfigError::Invalid(format!("n = {n} must be at least 2")));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(ConfigError::Invalid(format!("eps = {eps} must lie in (0, 1/2)")));
        }
        if raw.k == Some(0) {
            return Err(ConfigError::Invalid("k must be at least 1".into()));
        }
        if raw.rounds == Some(0) {
            return Err(ConfigError::Invalid("T must be at least 1".into()));
        }
        let default_eta = algorithm.default_eta(eps);
        if raw.eta.is_some() && default_eta.is_none() {
            return Err(ConfigError::Invalid(format!("{algorithm} has no learning rate")));
        }
        if let Some(grid) = &raw.t_grid {
            validate_grid(grid)?;
        }
        let cfg = Self {
            algorithm,
            adversary,
            n,
            eps,
            k: raw.k.unwrap_or_else(|| algorithm.default_budget(n, eps)),
            rounds: raw.rounds.unwrap_or_else(|| algorithm.default_rounds(n, eps)),
            eta: raw.eta.or(default_eta),
            trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
            master_seed: raw.master_seed.unwrap_or(DEFAULT_SEED),
            output_path: raw.output_path,
            output_format: raw.output_format.unwrap_or_default(),
            tau_check: raw.tau_check.unwrap_or(false),
            isotonic: raw.isotonic.unwrap_or(false),
            t_grid: raw.t_grid,
            record_timing: raw.record_timing.unwrap_or(true),
        };
        cfg.trial_config()?;
        Ok(cfg)
    }

    pub fn trial_config(&self) -> Result<TrialConfig, ConfigError> {
        let mut cfg = TrialConfig::new(self.algorithm, self.adversary, self.n, self.eps)?
            .with_budget(self.k)
            .with_rounds(self.rounds);
        cfg.eta = self.eta;
        cfg.isotonic = self.isotonic;
        cfg.tau_check = self.tau_check;
        cfg.record_timing = self.record_timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&ExperimentConfig> for RawConfig {
    fn from(c: &ExperimentConfig) -> Self {
        RawConfig {
            algorithm: Some(c.algorithm.to_string()),
            adversary: Some(c.adversary.to_string()),
            n: Some(c.n),
            eps: Some(c.eps),
            k: Some(c.k),
            rounds: Some(c.rounds),
            eta: c.eta,
            trials: Some(c.trials),
            master_seed: Some(c.master_seed),
            output_path: c.output_path.clone(),
            output_format: Some(c.output_format),
            tau_check: Some(c.tau_check),
            isotonic: Some(c.isotonic),
            t_grid: c.t_grid.clone(),
            record_timing: Some(c.record_timing),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(text: &str) -> RawConfig {
        RawConfig::from_toml_str(text).unwrap()
    }

    #[test]
    fn mw_defaults() {
        let c = ExperimentConfig::resolve(raw(
            "algorithm = \"mw_parallel\"\nadversary = \"fixed_step\"\nn = 16\neps = 0.1",
        ))
        .unwrap();
        assert_eq!((c.k, c.rounds, c.eta), (9, 250, Some(1.0 / 3.0)));
        assert_eq!((c.trials, c.master_seed), (DEFAULT_TRIALS, DEFAULT_SEED));
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn iw_defaults() {
        let c = ExperimentConfig::resolve(raw(
            "algorithm = \"iw_single\"\nadversary = \"iid_step\"\nn = 64\neps = 0.25",
        ))
        .unwrap();
        assert_eq!(c.k, 8);
        assert_eq!(c.eta, Some(0.00390625));
        // ceil(64 ln 64 / 0.25^3)
        assert_eq!(c.rounds, 17035);
    }

    #[test]
    fn missing_fields_are_listed() {
        let e = ExperimentConfig::resolve(raw("algorithm = \"naive\"\neps = 0.1")).unwrap_err();
        assert_eq!(e, ConfigError::Missing(vec!["adversary", "n"]));
        assert_eq!(e.to_string(), "missing required field(s): adversary, n");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RawConfig::from_toml_str("n = 4\nepsilon = 0.1"), Err(ConfigError::Syntax(_))));
        assert!(matches!(RawConfig::from_toml_str("n = \"four\""), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn range_checks() {
        let base = "algorithm = \"naive\"\nadversary = \"iid_step\"\n";
        for bad in ["n = 1\neps = 0.1", "n = 8\neps = 0.5", "n = 8\neps = 0.0", "n = 8\neps = 0.1\nk = 0", "n = 8\neps = 0.1\neta = 0.1"] {
            let e = ExperimentConfig::resolve(raw(&format!("{base}{bad}"))).unwrap_err();
            assert!(matches!(e, ConfigError::Invalid(_)), "{bad}: {e}");
        }
        let e = ExperimentConfig::resolve(raw(&format!("{base}n = 8\neps = 0.1\nt_grid = [5, 3]"))).unwrap_err();
        assert!(e.to_string().contains("ascending"));
    }

    #[test]
    fn inadmissible_hard_instance_suggests_a_pair() {
        let e = ExperimentConfig::resolve(raw(
            "algorithm = \"iw_single\"\nadversary = \"hard_instance\"\nn = 65\neps = 0.0833333333333333",
        ))
        .unwrap_err();
        assert!(e.to_string().contains("nearest admissible pair is n=64"), "{e}");
    }

    #[test]
    fn overlay_prefers_the_top_layer() {
        let file = raw("n = 8\neps = 0.1\ntrials = 5");
        let flags = RawConfig {
            n: Some(16),
            ..RawConfig::default()
        };
        let m = file.overlay(flags);
        assert_eq!((m.n, m.eps, m.trials), (Some(16), Some(0.1), Some(5)));
    }
}

//! CSV and JSON reports, written atomically.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use tqm_core::harness::{SuccessRate, SweepResult};
use tqm_core::TrialResult;

use crate::config::ExperimentConfig;

pub const CSV_HEADER: &str = "trial,seed,T,sup_error,success,max_avg_width,wall_ms";

/// `x` with 12 significant digits, trailing zeros dropped; exponent form
/// outside `[1e-4, 1e12)`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        return format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn csv_string(results: &[TrialResult]) -> String {
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.trial,
            r.seed,
            r.rounds,
            format_float(r.sup_error),
            u8::from(r.success),
            opt_float(r.max_avg_width),
            opt_float(r.wall_ms),
        ));
    }
    out
}

/// One CSV row in JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub sup_error: f64,
    pub success: bool,
    pub max_avg_width: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl From<&TrialResult> for ResultRow {
    fn from(r: &TrialResult) -> Self {
        Self {
            trial: r.trial,
            seed: r.seed,
            rounds: r.rounds,
            sup_error: r.sup_error,
            success: r.success,
            max_avg_width: r.max_avg_width,
            wall_ms: r.wall_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: ExperimentConfig,
    /// Absent for zero trials.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub summary: Option<SuccessRate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepResult>,
    pub results: Vec<ResultRow>,
}

impl JsonReport {
    pub fn new(config: &ExperimentConfig, results: &[TrialResult]) -> Self {
        Self {
            config: config.clone(),
            summary: tqm_core::harness::success_rate(results).ok(),
            sweep: None,
            results: results.iter().map(ResultRow::from).collect(),
        }
    }

    pub fn to_string_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file next to {}", path.display()))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("cannot move report into {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_float(123.456), "123.456");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-0.25), "-0.25");
        assert_eq!(format_float(1e-5), "1e-05");
        assert_eq!(format_float(1.5e-7), "1.5e-07");
        assert_eq!(format_float(123456789012.0), "123456789012");
        assert_eq!(format_float(1234567890123.0), "1.23456789012e+12");
        assert_eq!(format_float(0.0001), "0.0001");
        assert_eq!(format_float(0.000123456789012345), "0.000123456789012");
    }

    #[test]
    fn header_only_for_no_results() {
        assert_eq!(csv_string(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn row_layout() {
        let r = TrialResult {
            trial: 3,
            seed: 42,
            rounds: 250,
            sup_error: 0.05,
            success: true,
            max_avg_width: None,
            wall_ms: Some(1.25),
        };
        assert_eq!(csv_string(&[r]).lines().nth(1), Some("3,42,250,0.05,1,,1.25"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.csv"), b"x").is_err());
    }
}

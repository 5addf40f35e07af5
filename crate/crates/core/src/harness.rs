//! Repeated trials, success-rate intervals and sample-complexity sweeps.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{
    admissible_params, AdaptivePastLargest, AdversaryHandle, FixedStep, HardInstance, IidSteps,
    LeastQueried, StepSampler,
};
use crate::driver::run_with_checkpoints;
use crate::error::{Error, Result};
use crate::estimators::{
    params, Estimator, IwState, MidpointInsertionState, MwState, NaiveState, SqrtGridState,
};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Success probability every estimator must reach.
pub const TARGET_SUCCESS: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MwParallel,
    IwSingle,
    Naive,
    SqrtGrid,
    MidpointInsertion,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::MwParallel,
        Algorithm::IwSingle,
        Algorithm::Naive,
        Algorithm::SqrtGrid,
        Algorithm::MidpointInsertion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::MwParallel => "mw_parallel",
            Self::IwSingle => "iw_single",
            Self::Naive => "naive",
            Self::SqrtGrid => "sqrt_grid",
            Self::MidpointInsertion => "midpoint_insertion",
        }
    }

    /// Queries per round; for `iw_single` the simulated budget.
    pub fn default_budget(self, n: usize, eps: f64) -> usize {
        match self {
            Self::MwParallel => params::mw_budget(eps),
            Self::IwSingle => params::iw_budget(eps),
            Self::Naive => 1,
            Self::SqrtGrid => params::sqrt_grid_budget(n, eps),
            Self::MidpointInsertion => params::midpoint_budget(n, eps),
        }
    }

    pub fn default_rounds(self, n: usize, eps: f64) -> usize {
        match self {
            Self::MwParallel => params::mw_rounds(n, eps),
            Self::IwSingle => params::iw_rounds(n, eps),
            Self::Naive => params::naive_rounds(n, eps),
            Self::SqrtGrid => params::sqrt_grid_rounds(eps),
            Self::MidpointInsertion => params::midpoint_rounds(n, eps),
        }
    }

    /// Learning rate, for the weight-based algorithms.
    pub fn default_eta(self, eps: f64) -> Option<f64> {
        match self {
            Self::MwParallel => Some(params::MW_ETA),
            Self::IwSingle => Some(params::iw_eta(eps)),
            _ => None,
        }
    }

    pub fn is_deterministic(self) -> bool {
        !matches!(self, Self::IwSingle | Self::Naive)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    /// Step at `n/2 + 1` every round.
    FixedStep,
    /// Step position uniform on `[n + 1]`.
    IidStep,
    /// i.i.d. draws from a hard distribution with a per-trial random offset.
    HardInstance,
    /// Steps at the least-queried point so far.
    PigeonholeDemo,
    /// Steps just past the previous round's largest query.
    AdaptivePastLargest,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 5] = [
        AdversaryKind::FixedStep,
        AdversaryKind::IidStep,
        AdversaryKind::HardInstance,
        AdversaryKind::PigeonholeDemo,
        AdversaryKind::AdaptivePastLargest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FixedStep => "fixed_step",
            Self::IidStep => "iid_step",
            Self::HardInstance => "hard_instance",
            Self::PigeonholeDemo => "pigeonhole_demo",
            Self::AdaptivePastLargest => "adaptive_past_largest",
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown adversary `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub algorithm: Algorithm,
    pub adversary: AdversaryKind,
    pub n: usize,
    /// Success threshold on the sup error.
    pub eps: f64,
    pub k: usize,
    pub eta: Option<f64>,
    pub rounds: usize,
    pub isotonic: bool,
    /// Also require success at `ceil(1.5 T)` and `2T`.
    pub tau_check: bool,
    /// Wall-clock time makes results differ between identical runs.
    pub record_timing: bool,
}

impl TrialConfig {
    /// Budget, learning rate and rounds from the algorithm's defaults.
    pub fn new(algorithm: Algorithm, adversary: AdversaryKind, n: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("accuracy {eps} outside (0, 1)")));
        }
        let cfg = Self {
            algorithm,
            adversary,
            n,
            eps,
            k: algorithm.default_budget(n, eps),
            eta: algorithm.default_eta(eps),
            rounds: algorithm.default_rounds(n, eps),
            isotonic: false,
            tau_check: false,
            record_timing: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_budget(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("accuracy {} outside (0, 1)", self.eps)));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("query budget must be at least 1".into()));
        }
        if self.rounds == 0 {
            return Err(Error::ZeroRounds);
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter(format!("learning rate {eta} must be positive")));
            }
        }
        if self.adversary == AdversaryKind::HardInstance {
            admissible_params(self.n, self.eps)?;
        }
        Ok(())
    }

    fn checkpoints(&self) -> Vec<usize> {
        if self.tau_check {
            let t = self.rounds;
            let mut c = vec![t, (3 * t).div_ceil(2), 2 * t];
            c.dedup();
            c
        } else {
            vec![self.rounds]
        }
    }

    fn build_estimator(&self, seed: u64) -> Result<Box<dyn Estimator>> {
        let (n, k) = (self.n, self.k);
        let eta = self.eta.or(self.algorithm.default_eta(self.eps));
        Ok(match self.algorithm {
            Algorithm::MwParallel => Box::new(MwState::new(n, k, eta.unwrap())?),
            Algorithm::IwSingle => {
                Box::new(IwState::new(n, k, eta.unwrap(), seed)?.with_isotonic(self.isotonic))
            }
            Algorithm::Naive => Box::new(NaiveState::new(n, seed)?),
            Algorithm::SqrtGrid => Box::new(SqrtGridState::new(n, self.eps, k)?),
            Algorithm::MidpointInsertion => Box::new(MidpointInsertionState::new(n, k)?),
        })
    }

    fn build_adversary(&self, seed: u64) -> Result<AdversaryHandle> {
        let n = self.n;
        Ok(match self.adversary {
            AdversaryKind::FixedStep => AdversaryHandle::new(FixedStep::new(n, n / 2 + 1)?),
            AdversaryKind::IidStep => AdversaryHandle::new(IidSteps::new(StepSampler::Uniform { n }, seed)?),
            AdversaryKind::HardInstance => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let inst = HardInstance::random(n, self.eps, &mut rng)?;
                AdversaryHandle::new(IidSteps::new(StepSampler::Hard(inst), rng.next_u64())?)
            }
            AdversaryKind::PigeonholeDemo => AdversaryHandle::new(LeastQueried::new(n)?),
            AdversaryKind::AdaptivePastLargest => AdversaryHandle::new(AdaptivePastLargest::new(n)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub rounds: usize,
    /// Largest `|G_tau - F_tau|_inf` over the checked horizons.
    pub sup_error: f64,
    /// `sup_error <= eps`.
    pub success: bool,
    pub max_avg_width: Option<f64>,
    pub wall_ms: Option<f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i`; depends only on `(master_seed, i)`.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    splitmix64(splitmix64(master_seed) ^ trial as u64)
}

/// One trial with an explicit seed.
pub fn run_trial(cfg: &TrialConfig, trial: usize, seed: u64) -> Result<TrialResult> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimator = cfg.build_estimator(rng.next_u64())?;
    let mut adversary = cfg.build_adversary(rng.next_u64())?;
    let outcomes = run_with_checkpoints(estimator.as_mut(), &mut adversary, &cfg.checkpoints())?;
    let sup_error = outcomes.iter().map(|o| o.sup_error).fold(0.0, f64::max);
    let wall_ms = cfg
        .record_timing
        .then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(TrialResult {
        trial,
        seed,
        rounds: cfg.rounds,
        sup_error,
        success: sup_error <= cfg.eps,
        max_avg_width: outcomes[0].report.max_avg_width,
        wall_ms,
    })
}

/// Independent trials, in parallel; results come back in trial order.
pub fn run_trials(cfg: &TrialConfig, trials: usize, master_seed: u64) -> Result<Vec<TrialResult>> {
    cfg.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i, trial_seed(master_seed, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessRate {
    pub successes: usize,
    pub trials: usize,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// 95% Wilson score interval for `successes / trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::Empty("no trials"));
    }
    if successes > trials {
        return Err(Error::InvalidParameter(format!("{successes} successes out of {trials}")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

pub fn success_rate(results: &[TrialResult]) -> Result<SuccessRate> {
    let trials = results.len();
    let successes = results.iter().filter(|r| r.success).count();
    let (lower, upper) = wilson_interval(successes, trials)?;
    Ok(SuccessRate {
        successes,
        trials,
        rate: successes as f64 / trials as f64,
        lower,
        upper,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub rounds: usize,
    pub rate: SuccessRate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n: usize,
    pub eps: f64,
    pub points: Vec<SweepPoint>,
    /// First grid value whose interval lower bound reaches the target.
    pub min_rounds: Option<usize>,
}

/// Success rates over a strictly ascending grid of horizons. Raw
/// measurements, no monotone smoothing.
pub fn min_sample_complexity(
    cfg: &TrialConfig,
    grid: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<SweepResult> {
    sweep_with_trials(cfg, grid, trials, master_seed).map(|(sweep, _)| sweep)
}

/// [`min_sample_complexity`] plus the per-trial results of every grid point,
/// concatenated in grid order.
pub fn sweep_with_trials(
    cfg: &TrialConfig,
    grid: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<(SweepResult, Vec<TrialResult>)> {
    validate_grid(grid)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut all = Vec::with_capacity(grid.len() * trials);
    for &rounds in grid {
        let results = run_trials(&cfg.clone().with_rounds(rounds), trials, master_seed)?;
        points.push(SweepPoint {
            rounds,
            rate: success_rate(&results)?,
        });
        all.extend(results);
    }
    let min_rounds = points
        .iter()
        .find(|p| p.rate.lower >= TARGET_SUCCESS)
        .map(|p| p.rounds);
    let sweep = SweepResult {
        n: cfg.n,
        eps: cfg.eps,
        points,
        min_rounds,
    };
    Ok((sweep, all))
}

/// Non-empty, positive and strictly ascending.
pub fn validate_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty("horizon grid"));
    }
    if grid[0] == 0 {
        return Err(Error::ZeroRounds);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("horizon grid must be strictly ascending".into()));
    }
    Ok(())
}

//! Single-query estimator that simulates the `k`-query multiplicative weights
//! rule with importance weighting.
//!
//! Each round one of the `k` query points is sampled uniformly and its answer
//! is scaled by `k`; the other feedback coordinates are set to zero. The
//! boundary pairs `(0, 0)` and `(n + 1, 1)` stay deterministic, which keeps the
//! reconstructed bounds unbiased: averaging over the `k` equally likely draws
//! gives back `l_t` and `u_t` exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::fill_indexed;
use crate::ecdf::{midpoint_estimate, CdfEstimate};
use crate::error::{Error, Result};

use super::{normalize, params, select_query_points, Estimator, EstimatorReport};

#[derive(Debug, Clone)]
struct Pending {
    queries: Vec<usize>,
    /// 1-based index of the sampled query.
    sampled: usize,
}

#[derive(Debug, Clone)]
pub struct IwState {
    n: usize,
    k: usize,
    eta: f64,
    weights: Vec<f64>,
    hat_lower_sum: Vec<f64>,
    hat_upper_sum: Vec<f64>,
    t: usize,
    rng: ChaCha8Rng,
    pending: Option<Pending>,
    isotonic: bool,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Importance-weighted bounds `(l_hat, u_hat)` for one draw.
///
/// `sampled` is the 1-based index `m` of the queried point and `answer` is
/// `v_t(q_m)`. `l_hat(i)` is `y_hat_r` with `r` the largest index whose query
/// is `<= i`, `u_hat(i)` uses the smallest index whose query is `>= i`.
pub fn importance_weighted_bounds(
    queries: &[usize],
    sampled: usize,
    answer: f64,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    crate::bounds::validate_queries(queries, n)?;
    if sampled == 0 || sampled > queries.len() {
        return Err(Error::Contract(format!(
            "sampled index {sampled} outside [1, {}]",
            queries.len()
        )));
    }
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    fill_hat(queries, sampled, answer, &mut lower, &mut upper);
    Ok((lower, upper))
}

fn fill_hat(queries: &[usize], sampled: usize, answer: f64, lower: &mut [f64], upper: &mut [f64]) {
    let k = queries.len();
    let scaled = k as f64 * answer;
    fill_indexed(
        queries,
        |j| {
            if j == sampled {
                scaled
            } else if j > k {
                1.0
            } else {
                0.0
            }
        },
        lower,
        upper,
    );
}

impl IwState {
    pub fn new(n: usize, k: usize, eta: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("query budget must be at least 1".into()));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("learning rate {eta} must be positive")));
        }
        Ok(Self {
            n,
            k,
            eta,
            weights: vec![1.0 / n as f64; n],
            hat_lower_sum: vec![0.0; n],
            hat_upper_sum: vec![0.0; n],
            t: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending: None,
            isotonic: false,
            lower: vec![0.0; n],
            upper: vec![0.0; n],
        })
    }

    /// `k = ceil(2/eps)`, `eta = eps^2 / 16`.
    pub fn for_accuracy(n: usize, eps: f64, seed: u64) -> Result<Self> {
        Self::new(n, params::iw_budget(eps), params::iw_eta(eps), seed)
    }

    /// Apply a monotone least-squares fit after clamping the output.
    pub fn with_isotonic(mut self, on: bool) -> Self {
        self.isotonic = on;
        self
    }

    /// Simulated budget `k` (the real per-round budget is one query).
    pub fn simulated_budget(&self) -> usize {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.weights
    }

    pub fn hat_lower_sum(&self) -> &[f64] {
        &self.hat_lower_sum
    }

    pub fn hat_upper_sum(&self) -> &[f64] {
        &self.hat_upper_sum
    }

    /// The `k` points the deterministic rule would query this round.
    pub fn simulated_queries(&self) -> Vec<usize> {
        select_query_points(&self.weights, self.k).expect("weights stay a distribution")
    }

    /// Samples `m` uniformly from `[k]` and publishes `q_m`.
    pub fn begin_round(&mut self) -> Result<usize> {
        if self.pending.is_some() {
            return Err(Error::Protocol("queries requested twice in one round".into()));
        }
        let queries = self.simulated_queries();
        let sampled = self.rng.gen_range(1..=self.k);
        let q = queries[sampled - 1];
        self.pending = Some(Pending { queries, sampled });
        Ok(q)
    }

    /// Completes the round with `answer = v_t(q_m)`.
    pub fn round(&mut self, answer: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&answer) {
            return Err(Error::Contract(format!("answer {answer} outside [0, 1]")));
        }
        let Pending { queries, sampled } = self
            .pending
            .take()
            .ok_or_else(|| Error::Protocol("answer received before the query".into()))?;
        fill_hat(&queries, sampled, answer, &mut self.lower, &mut self.upper);

        let growth = self.eta.ln_1p();
        for i in 0..self.n {
            let d_hat = self.upper[i] - self.lower[i];
            self.weights[i] *= (growth * d_hat).exp();
            self.hat_lower_sum[i] += self.lower[i];
            self.hat_upper_sum[i] += self.upper[i];
        }
        normalize(&mut self.weights);
        self.t += 1;
        Ok(())
    }

    /// Midpoints of the importance-weighted sums before clamping.
    pub fn raw_estimate(&self) -> Result<CdfEstimate> {
        midpoint_estimate(&self.hat_lower_sum, &self.hat_upper_sum, self.t)
    }

    pub fn finalize(&self) -> Result<EstimatorReport> {
        let mut estimate = self.raw_estimate()?.clamped();
        if self.isotonic {
            estimate = estimate.isotonic();
        }
        Ok(EstimatorReport {
            estimate,
            rounds_used: self.t,
            max_avg_width: None,
            per_round_certificates: None,
        })
    }
}

impl Estimator for IwState {
    fn name(&self) -> &'static str {
        "iw_single"
    }

    fn domain(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        1
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn rounds(&self) -> usize {
        self.t
    }

    fn queries(&mut self) -> Result<Vec<usize>> {
        Ok(vec![self.begin_round()?])
    }

    fn observe(&mut self, answers: &[f64]) -> Result<()> {
        match answers {
            [a] => self.round(*a),
            _ => Err(Error::Contract(format!("expected 1 answer, got {}", answers.len()))),
        }
    }

    fn report(&self) -> Result<EstimatorReport> {
        self.finalize()
    }
}

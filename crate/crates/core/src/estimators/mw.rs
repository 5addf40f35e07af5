//! Deterministic multiplicative-weights estimator with `k` parallel queries.
//!
//! Each round the normalized weights `a` pick query points with
//! [`select_query_points`]; the resulting interval widths `d_t` act as the
//! Hedge gains, `w_i <- w_i (1 + eta)^{d_t(i)}`. With `k + 1 >= 1/eps`,
//! `eta = 1/3` and `T >= 9 ln n / eps`, every average width is at most
//! `2 eps`, so the midpoint estimate is within `eps` of `F_T` with certainty.

use crate::bounds::{fill_bounds, validate_answers, RoundBounds};
use crate::ecdf::midpoint_estimate;
use crate::error::{Error, Result};

use super::{normalize, params, select_query_points, Estimator, EstimatorReport};

#[derive(Debug, Clone)]
pub struct MwState {
    n: usize,
    k: usize,
    eta: f64,
    /// Normalized after every round, so these are the coefficients `a_i`.
    weights: Vec<f64>,
    lower_sum: Vec<f64>,
    upper_sum: Vec<f64>,
    t: usize,
    certificates: Option<Vec<f64>>,
    awaiting_answers: bool,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl MwState {
    pub fn new(n: usize, k: usize, eta: f64) -> Result<Self> {
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
            lower_sum: vec![0.0; n],
            upper_sum: vec![0.0; n],
            t: 0,
            certificates: None,
            awaiting_answers: false,
            lower: vec![0.0; n],
            upper: vec![0.0; n],
        })
    }

    /// Budget `ceil(1/eps) - 1` and `eta = 1/3`.
    pub fn for_accuracy(n: usize, eps: f64) -> Result<Self> {
        Self::new(n, params::mw_budget(eps), params::MW_ETA)
    }

    /// Record `sum_i a_i d_t(i)` for every subsequent round.
    pub fn with_certificates(mut self) -> Self {
        self.certificates = Some(Vec::new());
        self
    }

    pub fn budget(&self) -> usize {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn rounds(&self) -> usize {
        self.t
    }

    /// Current coefficients `a_i`; they sum to one.
    pub fn coefficients(&self) -> &[f64] {
        &self.weights
    }

    pub fn lower_sum(&self) -> &[f64] {
        &self.lower_sum
    }

    pub fn upper_sum(&self) -> &[f64] {
        &self.upper_sum
    }

    pub fn current_queries(&self) -> Vec<usize> {
        select_query_points(&self.weights, self.k).expect("weights stay a distribution")
    }

    /// One full round: queries from the current weights, the given feedback at
    /// those points, then the multiplicative update.
    pub fn round(&mut self, answers: &[f64]) -> Result<RoundBounds> {
        let queries = self.current_queries();
        validate_answers(answers, queries.len())?;
        fill_bounds(&queries, answers, &mut self.lower, &mut self.upper);

        let growth = self.eta.ln_1p();
        let mut certificate = 0.0;
        for i in 0..self.n {
            let d = self.upper[i] - self.lower[i];
            certificate += self.weights[i] * d;
            self.weights[i] *= (growth * d).exp();
            self.lower_sum[i] += self.lower[i];
            self.upper_sum[i] += self.upper[i];
        }
        normalize(&mut self.weights);
        if let Some(c) = self.certificates.as_mut() {
            c.push(certificate);
        }
        self.t += 1;

        Ok(RoundBounds {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            width: self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect(),
        })
    }

    /// `max_i (1/T) sum_t d_t(i)`.
    pub fn max_avg_width(&self) -> Result<f64> {
        if self.t == 0 {
            return Err(Error::ZeroRounds);
        }
        let t = self.t as f64;
        Ok(self
            .upper_sum
            .iter()
            .zip(&self.lower_sum)
            .map(|(u, l)| (u - l) / t)
            .fold(0.0, f64::max))
    }

    pub fn finalize(&self) -> Result<EstimatorReport> {
        let estimate = midpoint_estimate(&self.lower_sum, &self.upper_sum, self.t)?;
        Ok(EstimatorReport {
            estimate,
            rounds_used: self.t,
            max_avg_width: Some(self.max_avg_width()?),
            per_round_certificates: self.certificates.clone(),
        })
    }
}

impl Estimator for MwState {
    fn name(&self) -> &'static str {
        "mw_parallel"
    }

    fn domain(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.k
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn rounds(&self) -> usize {
        self.t
    }

    fn queries(&mut self) -> Result<Vec<usize>> {
        if self.awaiting_answers {
            return Err(Error::Protocol("queries requested twice in one round".into()));
        }
        self.awaiting_answers = true;
        Ok(self.current_queries())
    }

    fn observe(&mut self, answers: &[f64]) -> Result<()> {
        if !self.awaiting_answers {
            return Err(Error::Protocol("answers received before queries".into()));
        }
        self.round(answers)?;
        self.awaiting_answers = false;
        Ok(())
    }

    fn report(&self) -> Result<EstimatorReport> {
        self.finalize()
    }
}

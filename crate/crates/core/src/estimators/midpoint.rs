//! Midpoint insertion for step-function adversaries.
//!
//! The active set starts as `{n}` plus the sentinel `0`. A step function
//! leaves at most one uncertain interval `(a, b)` between adjacent active
//! points, with `v(a) = 0` and `v(b) = 1`; its interior is imputed `1/2` and
//! its midpoint becomes active. A point is imputed only while its interval is
//! being halved, so after `t` rounds the error at `p` between adjacent active
//! points `p1 < p2` is at most `(log2 n - log2(p2 - p1)) / (2t)`. The bound is
//! exact when `n` is a power of two.

use std::collections::BTreeSet;

use crate::ecdf::CdfEstimate;
use crate::error::{Error, Result};

use super::{params, Estimator, EstimatorReport};

#[derive(Debug, Clone)]
pub struct MidpointInsertionState {
    n: usize,
    budget: usize,
    /// Always contains `0` and `n`.
    active: BTreeSet<usize>,
    sums: Vec<f64>,
    t: usize,
    pending: Option<Vec<usize>>,
}

impl MidpointInsertionState {
    pub fn new(n: usize, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        if budget == 0 {
            return Err(Error::InvalidParameter("query budget must be at least 1".into()));
        }
        Ok(Self {
            n,
            budget,
            active: [0, n].into_iter().collect(),
            sums: vec![0.0; n],
            t: 0,
            pending: None,
        })
    }

    /// Budget `ceil(log2 n / eps^2)`.
    pub fn for_accuracy(n: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("accuracy {eps} outside (0, 1)")));
        }
        Self::new(n, params::midpoint_budget(n, eps))
    }

    /// Active points in `[n]`, i.e. this round's queries.
    pub fn active_points(&self) -> Vec<usize> {
        self.active.iter().copied().filter(|&p| p > 0).collect()
    }

    pub fn begin_round(&mut self) -> Result<Vec<usize>> {
        if self.pending.is_some() {
            return Err(Error::Protocol("queries requested twice in one round".into()));
        }
        let queries = self.active_points();
        if queries.len() > self.budget {
            return Err(Error::BudgetExceeded {
                round: self.t + 1,
                needed: queries.len(),
                budget: self.budget,
            });
        }
        self.pending = Some(queries.clone());
        Ok(queries)
    }

    /// Returns the inserted point, if any.
    pub fn round(&mut self, answers: &[f64]) -> Result<Option<usize>> {
        let queries = self
            .pending
            .as_ref()
            .ok_or_else(|| Error::Protocol("answers received before queries".into()))?;
        crate::bounds::validate_answers(answers, queries.len())?;
        if let Some(a) = answers.iter().find(|&&a| a != 0.0 && a != 1.0) {
            return Err(Error::UnsupportedAdversary(format!(
                "midpoint insertion needs step functions, got feedback {a}"
            )));
        }
        let queries = self.pending.take().unwrap();

        // a: last active point reading 0 (or the sentinel), b: first reading 1
        let zeros = answers.iter().take_while(|&&y| y == 0.0).count();
        let a = if zeros == 0 { 0 } else { queries[zeros - 1] };
        let b = queries.get(zeros).copied().unwrap_or(self.n + 1);
        for p in 1..=self.n {
            self.sums[p - 1] += if p <= a {
                0.0
            } else if p >= b {
                1.0
            } else {
                0.5
            };
        }
        self.t += 1;

        if b <= self.n && b - a >= 2 {
            let mid = (a + b) / 2;
            self.active.insert(mid);
            return Ok(Some(mid));
        }
        Ok(None)
    }

    pub fn estimate(&self) -> Result<CdfEstimate> {
        if self.t == 0 {
            return Err(Error::ZeroRounds);
        }
        let t = self.t as f64;
        Ok(CdfEstimate::new(self.sums.iter().map(|s| s / t).collect()))
    }

    /// `(log2 n - log2 g) / (2t)` for every point, where `g` is the gap of the
    /// active interval containing it; an active point uses its wider
    /// neighbouring gap.
    pub fn pointwise_bounds(&self) -> Result<Vec<f64>> {
        if self.t == 0 {
            return Err(Error::ZeroRounds);
        }
        let log_n = (self.n as f64).log2();
        let denom = 2.0 * self.t as f64;
        let points: Vec<usize> = self.active.iter().copied().collect();
        let mut out = vec![0.0; self.n];
        for w in points.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let gap = (hi - lo) as f64;
            for p in lo + 1..hi {
                out[p - 1] = (log_n - gap.log2()) / denom;
            }
        }
        for (idx, &p) in points.iter().enumerate().skip(1) {
            let left = p - points[idx - 1];
            let right = points.get(idx + 1).map_or(0, |&r| r - p);
            out[p - 1] = (log_n - (left.max(right) as f64).log2()) / denom;
        }
        Ok(out)
    }
}

impl Estimator for MidpointInsertionState {
    fn name(&self) -> &'static str {
        "midpoint_insertion"
    }

    fn domain(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn rounds(&self) -> usize {
        self.t
    }

    fn queries(&mut self) -> Result<Vec<usize>> {
        self.begin_round()
    }

    fn observe(&mut self, answers: &[f64]) -> Result<()> {
        self.round(answers).map(|_| ())
    }

    fn report(&self) -> Result<EstimatorReport> {
        Ok(EstimatorReport {
            estimate: self.estimate()?,
            rounds_used: self.t,
            max_avg_width: None,
            per_round_certificates: None,
        })
    }
}

//! Deterministic grid estimator with budget `O(sqrt(n) / eps)`.
//!
//! Grid points `0, s, 2s, ..., n` with `s = floor(sqrt(n))` are queried every
//! round. An interval between neighbouring grid points is *tracked* when its
//! averaged gap reached `eps / 4` after the previous round; every interior
//! point of a tracked interval is queried too. Interior points of untracked
//! intervals are imputed with the midpoint of the two grid answers, so their
//! running average never leaves the band between the neighbouring grid
//! averages. After `t >= 4/eps` rounds the sup error is at most
//! `1/t + 3 eps / 4 <= eps` for any monotone adversary.

use crate::ecdf::CdfEstimate;
use crate::error::{Error, Result};

use super::{params, Estimator, EstimatorReport};

#[derive(Debug, Clone)]
pub struct SqrtGridState {
    n: usize,
    eps: f64,
    budget: usize,
    /// Grid points including the sentinel 0 and the last point n.
    grid: Vec<usize>,
    /// `tracked[m]` refers to the interval `(grid[m], grid[m + 1])`.
    tracked: Vec<bool>,
    sums: Vec<f64>,
    t: usize,
    pending: Option<Vec<usize>>,
}

impl SqrtGridState {
    pub fn new(n: usize, eps: f64, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("accuracy {eps} outside (0, 1)")));
        }
        let spacing = ((n as f64).sqrt().floor() as usize).max(1);
        let mut grid: Vec<usize> = (0..=n).step_by(spacing).collect();
        if *grid.last().unwrap() != n {
            grid.push(n);
        }
        let intervals = grid.len() - 1;
        Ok(Self {
            n,
            eps,
            budget,
            grid,
            tracked: vec![false; intervals],
            sums: vec![0.0; n],
            t: 0,
            pending: None,
        })
    }

    /// Budget `ceil((4/eps + 1) sqrt(n))`.
    pub fn for_accuracy(n: usize, eps: f64) -> Result<Self> {
        Self::new(n, eps, params::sqrt_grid_budget(n, eps))
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    /// Left endpoints of the currently tracked intervals.
    pub fn tracked_intervals(&self) -> Vec<(usize, usize)> {
        self.tracked
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(m, _)| (self.grid[m], self.grid[m + 1]))
            .collect()
    }

    pub fn planned_queries(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for m in 0..self.tracked.len() {
            let (lo, hi) = (self.grid[m], self.grid[m + 1]);
            if self.tracked[m] {
                out.extend(lo + 1..hi);
            }
            out.push(hi);
        }
        out
    }

    pub fn begin_round(&mut self) -> Result<Vec<usize>> {
        if self.pending.is_some() {
            return Err(Error::Protocol("queries requested twice in one round".into()));
        }
        let queries = self.planned_queries();
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

    pub fn round(&mut self, answers: &[f64]) -> Result<()> {
        let queries = self
            .pending
            .as_ref()
            .ok_or_else(|| Error::Protocol("answers received before queries".into()))?;
        crate::bounds::validate_answers(answers, queries.len())?;
        let queries = self.pending.take().unwrap();

        let mut observed = vec![None; self.n + 1];
        for (&q, &y) in queries.iter().zip(answers) {
            observed[q] = Some(y);
        }
        let value_at = |p: usize| if p == 0 { 0.0 } else { observed[p].expect("grid point queried") };
        for m in 0..self.tracked.len() {
            let (lo, hi) = (self.grid[m], self.grid[m + 1]);
            let (y_lo, y_hi) = (value_at(lo), value_at(hi));
            let imputed = 0.5 * (y_lo + y_hi);
            for p in lo + 1..hi {
                self.sums[p - 1] += observed[p].unwrap_or(imputed);
            }
            self.sums[hi - 1] += y_hi;
        }
        self.t += 1;

        let t = self.t as f64;
        let avg = |p: usize| if p == 0 { 0.0 } else { self.sums[p - 1] / t };
        let threshold = self.eps / 4.0;
        for m in 0..self.tracked.len() {
            self.tracked[m] = avg(self.grid[m + 1]) - avg(self.grid[m]) >= threshold;
        }
        Ok(())
    }

    pub fn estimate(&self) -> Result<CdfEstimate> {
        if self.t == 0 {
            return Err(Error::ZeroRounds);
        }
        let t = self.t as f64;
        Ok(CdfEstimate::new(self.sums.iter().map(|s| s / t).collect()))
    }
}

impl Estimator for SqrtGridState {
    fn name(&self) -> &'static str {
        "sqrt_grid"
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
        self.round(answers)
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

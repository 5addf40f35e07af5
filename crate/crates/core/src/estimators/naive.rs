//! Baseline that queries one uniformly random threshold per round and
//! averages the feedback seen at each point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ecdf::CdfEstimate;
use crate::error::{Error, Result};

use super::{Estimator, EstimatorReport};

/// Estimate at a point that has never been queried.
pub const UNVISITED_ESTIMATE: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct NaiveState {
    n: usize,
    sums: Vec<f64>,
    counts: Vec<u64>,
    t: usize,
    rng: ChaCha8Rng,
    pending: Option<usize>,
}

impl NaiveState {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        Ok(Self {
            n,
            sums: vec![0.0; n],
            counts: vec![0; n],
            t: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending: None,
        })
    }

    pub fn begin_round(&mut self) -> Result<usize> {
        if self.pending.is_some() {
            return Err(Error::Protocol("queries requested twice in one round".into()));
        }
        let q = self.rng.gen_range(1..=self.n);
        self.pending = Some(q);
        Ok(q)
    }

    pub fn round(&mut self, answer: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&answer) {
            return Err(Error::Contract(format!("answer {answer} outside [0, 1]")));
        }
        let q = self
            .pending
            .take()
            .ok_or_else(|| Error::Protocol("answer received before the query".into()))?;
        self.record(q, answer);
        Ok(())
    }

    fn record(&mut self, q: usize, answer: f64) {
        self.sums[q - 1] += answer;
        self.counts[q - 1] += 1;
        self.t += 1;
    }

    pub fn estimate(&self) -> CdfEstimate {
        CdfEstimate::new(
            self.sums
                .iter()
                .zip(&self.counts)
                .map(|(&s, &c)| if c == 0 { UNVISITED_ESTIMATE } else { s / c as f64 })
                .collect(),
        )
    }
}

impl Estimator for NaiveState {
    fn name(&self) -> &'static str {
        "naive"
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
        if self.t == 0 {
            return Err(Error::ZeroRounds);
        }
        Ok(EstimatorReport {
            estimate: self.estimate(),
            rounds_used: self.t,
            max_avg_width: None,
            per_round_certificates: None,
        })
    }
}

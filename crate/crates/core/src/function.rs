//! Monotone functions `v: [n] -> [0, 1]` committed by the adversary each round.
//!
//! Points of the domain are 1-based. `eval` additionally accepts the two
//! sentinels `0` (value 0) and `n + 1` (value 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneFunction {
    /// `v(i) = 1` iff `i >= x`; `x = n + 1` is the all-zeros function.
    Step { n: usize, x: usize },
    /// Explicit values `v(1), ..., v(n)`.
    Dense { values: Vec<f64> },
}

impl MonotoneFunction {
    pub fn step(n: usize, x: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        if x == 0 || x > n + 1 {
            return Err(Error::Contract(format!(
                "step position {x} outside [1, {}]",
                n + 1
            )));
        }
        Ok(Self::Step { n, x })
    }

    pub fn dense(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        let mut prev = 0.0;
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Contract(format!("value {v} at {} outside [0, 1]", i + 1)));
            }
            if v < prev {
                return Err(Error::Contract(format!("values decrease at {}", i + 1)));
            }
            prev = v;
        }
        Ok(Self::Dense { values })
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Step { n, .. } => *n,
            Self::Dense { values } => values.len(),
        }
    }

    /// Breakpoint of a step function, `None` for dense functions.
    pub fn step_position(&self) -> Option<usize> {
        match self {
            Self::Step { x, .. } => Some(*x),
            Self::Dense { .. } => None,
        }
    }

    pub fn eval(&self, i: usize) -> f64 {
        let n = self.n();
        if i == 0 {
            return 0.0;
        }
        if i > n {
            return 1.0;
        }
        match self {
            Self::Step { x, .. } => {
                if i >= *x {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Dense { values } => values[i - 1],
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Self::Step { n, x } => (1..=*n).map(|i| if i >= *x { 1.0 } else { 0.0 }).collect(),
            Self::Dense { values } => values.clone(),
        }
    }

    /// Adds `v(i)` into `sums[i - 1]` for every point.
    pub(crate) fn add_into(&self, sums: &mut [f64]) {
        match self {
            Self::Step { x, .. } => {
                for s in sums.iter_mut().skip(x - 1) {
                    *s += 1.0;
                }
            }
            Self::Dense { values } => {
                for (s, v) in sums.iter_mut().zip(values) {
                    *s += v;
                }
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::function::MonotoneFunction;

/// An estimate `G: [n] -> R` of the empirical CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfEstimate {
    pub values: Vec<f64>,
}

impl CdfEstimate {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Value at the 1-based point `i`.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// Pointwise projection onto `[0, 1]`.
    pub fn clamped(mut self) -> Self {
        for v in &mut self.values {
            *v = v.clamp(0.0, 1.0);
        }
        self
    }

    /// Least-squares non-decreasing fit (pool adjacent violators).
    pub fn isotonic(self) -> Self {
        let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(self.values.len());
        for v in self.values {
            let mut sum = v;
            let mut count = 1usize;
            while let Some(&(prev_sum, prev_count)) = blocks.last() {
                if prev_sum / prev_count as f64 <= sum / count as f64 {
                    break;
                }
                sum += prev_sum;
                count += prev_count;
                blocks.pop();
            }
            blocks.push((sum, count));
        }
        let values = blocks
            .into_iter()
            .flat_map(|(sum, count)| std::iter::repeat(sum / count as f64).take(count))
            .collect();
        Self { values }
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Running totals `sum_tau v_tau(i)` of the committed functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    n: usize,
    t: usize,
    sums: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            t: 0,
            sums: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.t
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn accumulate(&mut self, v: &MonotoneFunction) -> Result<()> {
        ensure_len(self.n, v.n())?;
        v.add_into(&mut self.sums);
        self.t += 1;
        Ok(())
    }

    /// `F_t(i) = sums(i) / t`. All zeros before the first round.
    pub fn values(&self) -> Vec<f64> {
        if self.t == 0 {
            return vec![0.0; self.n];
        }
        let t = self.t as f64;
        self.sums.iter().map(|s| s / t).collect()
    }
}

/// Value-returning form of [`EmpiricalCdf::accumulate`].
pub fn accumulate_round(mut acc: EmpiricalCdf, v: &MonotoneFunction) -> Result<EmpiricalCdf> {
    acc.accumulate(v)?;
    Ok(acc)
}

/// `max_i |f(i) - g(i)|`.
pub fn sup_norm_distance(f: &[f64], g: &[f64]) -> Result<f64> {
    ensure_len(f.len(), g.len())?;
    Ok(f.iter()
        .zip(g)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `G(i) = (lower_sum(i) + upper_sum(i)) / (2T)`.
pub fn midpoint_estimate(lower_sum: &[f64], upper_sum: &[f64], rounds: usize) -> Result<CdfEstimate> {
    ensure_len(lower_sum.len(), upper_sum.len())?;
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    let denom = 2.0 * rounds as f64;
    Ok(CdfEstimate::new(
        lower_sum
            .iter()
            .zip(upper_sum)
            .map(|(l, u)| (l + u) / denom)
            .collect(),
    ))
}

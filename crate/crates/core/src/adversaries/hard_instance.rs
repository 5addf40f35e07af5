//! Block-structured hard distributions `D_theta` on `[n]`.
//!
//! The domain splits into `k` blocks of width `m`. Half of the mass is
//! uniform over `I_theta = {(a - 1) m + theta_a}`, one quarter sits on `1` and
//! one quarter on `n`. With `eps = 1/(6k)` each uniform atom has mass `3 eps`,
//! so CDFs of distinct `theta` are exactly `3 eps` apart in sup norm.

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance for "1/(6 eps) is an integer".
const INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    n: usize,
    k: usize,
    m: usize,
    theta: Vec<usize>,
}

/// Block count `k = max(1, floor(1/(6 eps)))` and the instance accuracy
/// `1/(6k)` for a target accuracy `eps`.
///
/// Fails with the nearest admissible pair when `k` does not divide `n`.
pub fn admissible_params(n: usize, eps: f64) -> Result<(usize, f64)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("accuracy {eps} must be positive")));
    }
    let k = ((1.0 / (6.0 * eps) + INTEGRALITY_TOL).floor() as usize).max(1);
    let eps_inst = 1.0 / (6.0 * k as f64);
    if n == 0 || n % k != 0 {
        return Err(Error::Inadmissible {
            n,
            eps,
            suggested_n: (n / k).max(1) * k,
            suggested_eps: eps_inst,
        });
    }
    Ok((k, eps_inst))
}

impl HardInstance {
    /// Requires `1/(6 eps)` integral, `k | n` and `theta in [m]^k`.
    pub fn new(n: usize, eps: f64, theta: Vec<usize>) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("accuracy {eps} must be positive")));
        }
        let inv = 1.0 / (6.0 * eps);
        if (inv - inv.round()).abs() > INTEGRALITY_TOL {
            let k = ((inv + INTEGRALITY_TOL).floor() as usize).max(1);
            return Err(Error::Inadmissible {
                n,
                eps,
                suggested_n: (n / k).max(1) * k,
                suggested_eps: 1.0 / (6.0 * k as f64),
            });
        }
        let (k, _) = admissible_params(n, eps)?;
        let m = n / k;
        if theta.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: theta.len(),
            });
        }
        if let Some(&t) = theta.iter().find(|&&t| t == 0 || t > m) {
            return Err(Error::Contract(format!("block offset {t} outside [1, {m}]")));
        }
        Ok(Self { n, k, m, theta })
    }

    /// Uniformly random `theta`.
    pub fn random(n: usize, eps: f64, rng: &mut impl Rng) -> Result<Self> {
        let (k, _) = admissible_params(n, eps)?;
        let m = n / k;
        let theta = (0..k).map(|_| rng.gen_range(1..=m)).collect();
        Self::new(n, 1.0 / (6.0 * k as f64), theta)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        1.0 / (6.0 * self.k as f64)
    }

    pub fn blocks(&self) -> usize {
        self.k
    }

    pub fn block_width(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    /// `I_theta`, sorted.
    pub fn support_points(&self) -> Vec<usize> {
        self.theta
            .iter()
            .enumerate()
            .map(|(a, &t)| a * self.m + t)
            .collect()
    }

    fn low(&self, block: usize) -> f64 {
        0.25 + 3.0 * block as f64 * self.eps()
    }

    /// `F_theta` on `[n]`.
    pub fn cdf(&self) -> Vec<f64> {
        let step = 3.0 * self.eps();
        let mut out = Vec::with_capacity(self.n);
        for a in 0..self.k {
            for b in 1..=self.m {
                let i = a * self.m + b;
                out.push(if i == self.n {
                    1.0
                } else if b < self.theta[a] {
                    self.low(a)
                } else {
                    self.low(a) + step
                });
            }
        }
        out
    }

    /// Exact single-draw probabilities on `[n]`.
    pub fn point_mass(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        p[0] += 0.25;
        p[self.n - 1] += 0.25;
        let atom = 0.5 / self.k as f64;
        for i in self.support_points() {
            p[i - 1] += atom;
        }
        p
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        match rng.gen_range(0..4u8) {
            0 | 1 => {
                let a = rng.gen_range(0..self.k);
                a * self.m + self.theta[a]
            }
            2 => 1,
            _ => self.n,
        }
    }

    /// The unique `theta` whose CDF is within `3 eps / 2` of `estimate`, if any.
    pub fn decode(&self, estimate: &[f64]) -> Option<Vec<usize>> {
        if estimate.len() != self.n {
            return None;
        }
        let step = 3.0 * self.eps();
        let mut theta = Vec::with_capacity(self.k);
        let mut worst: f64 = 0.0;
        for a in 0..self.k {
            let block = &estimate[a * self.m..(a + 1) * self.m];
            let low = self.low(a);
            let high = |b: usize| {
                if a * self.m + b == self.n {
                    1.0
                } else {
                    low + step
                }
            };
            // err(t) = max(max_{b < t} |e_b - low|, max_{b >= t} |e_b - high_b|)
            let mut suffix = vec![0.0f64; self.m + 2];
            for b in (1..=self.m).rev() {
                suffix[b] = suffix[b + 1].max((block[b - 1] - high(b)).abs());
            }
            let mut prefix: f64 = 0.0;
            let mut best = (f64::INFINITY, 1);
            for t in 1..=self.m {
                let err = prefix.max(suffix[t]);
                if err < best.0 {
                    best = (err, t);
                }
                prefix = prefix.max((block[t - 1] - low).abs());
            }
            worst = worst.max(best.0);
            theta.push(best.1);
        }
        (worst < step / 2.0).then_some(theta)
    }
}

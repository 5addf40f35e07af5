//! KL divergence and related bounds on finite sets. Natural logarithms
//! throughout.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};

/// Allowed deviation of the total mass from 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::NotADistribution("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::NotADistribution(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotADistribution(format!("mass sums to {total}")));
        }
        Ok(Self { probs })
    }

    /// Rescales non-negative weights to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::NotADistribution("weights cannot be normalized".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn bernoulli(p1: f64) -> Result<Self> {
        Self::new(vec![1.0 - p1, p1])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Joint law of independent coordinates; outcome `(i, j)` sits at
    /// `i * other.len() + j`.
    pub fn product(&self, other: &Self) -> Self {
        let probs = self
            .probs
            .iter()
            .flat_map(|a| other.probs.iter().map(move |b| a * b))
            .collect();
        Self { probs }
    }

    /// Law of `f(X)` for `f` given as a table into `[0, codomain)`.
    pub fn pushforward(&self, f: &[usize], codomain: usize) -> Result<Self> {
        ensure_len(self.len(), f.len())?;
        if let Some(&y) = f.iter().find(|&&y| y >= codomain) {
            return Err(Error::Contract(format!("image {y} outside [0, {codomain})")));
        }
        let mut probs = vec![0.0; codomain];
        for (p, &y) in self.probs.iter().zip(f) {
            probs[y] += p;
        }
        Ok(Self { probs })
    }
}

/// `sum p ln(p / q)` with `0 ln(0/q) = 0`; infinite when `p > 0 = q`.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    ensure_len(p.len(), q.len())?;
    let mut total = 0.0;
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += a * (a / b).ln();
    }
    // rounding can leave a tiny negative value when p and q nearly agree
    Ok(total.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliKlBounds {
    pub kl: f64,
    /// `(p0 - q0)^2 (1/q0 + 1/q1)`.
    pub quadratic_upper: f64,
    /// `ln(1 / (4 q1)) / 2`, present when `q1 <= 1/2 <= p1`.
    pub logarithmic_lower: Option<f64>,
}

pub fn bernoulli_kl_bounds(p1: f64, q1: f64) -> Result<BernoulliKlBounds> {
    if !(q1 > 0.0 && q1 < 1.0) {
        return Err(Error::InvalidParameter(format!("q1 = {q1} must lie in (0, 1)")));
    }
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParameter(format!("p1 = {p1} must lie in [0, 1]")));
    }
    let kl = kl_divergence(&FiniteDistribution::bernoulli(p1)?, &FiniteDistribution::bernoulli(q1)?)?;
    let (p0, q0) = (1.0 - p1, 1.0 - q1);
    let quadratic_upper = (p0 - q0).powi(2) * (1.0 / q0 + 1.0 / q1);
    let logarithmic_lower = (q1 <= 0.5 && p1 >= 0.5).then(|| 0.5 * (1.0 / (4.0 * q1)).ln());
    Ok(BernoulliKlBounds {
        kl,
        quadratic_upper,
        logarithmic_lower,
    })
}

/// `(k/2) ln(m/4)`: lower bound on `kl(p || q)` for product laws on
/// `k`-tuples with `p(X = x*) >= 1/2` and `q(X_i = x*_i) <= 1/m`.
pub fn product_forward_lower(k: usize, m: usize) -> f64 {
    0.5 * k as f64 * (m as f64 / 4.0).ln()
}

/// `(k/2) ln(k/3)`: lower bound on `kl(q || p)` under the same hypotheses.
pub fn product_reverse_lower(k: usize) -> f64 {
    0.5 * k as f64 * (k as f64 / 3.0).ln()
}

/// `min(1, 2 exp(-T eps^2 / 2))`.
pub fn dkw_tail_bound(rounds: usize, eps: f64) -> f64 {
    (2.0 * (-(rounds as f64) * eps * eps / 2.0).exp()).min(1.0)
}

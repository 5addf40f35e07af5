use crate::error::{Error, Result};

/// Threshold below which a cumulative sum counts as having reached `j/(k+1)`.
const THRESHOLD_SLACK: f64 = 1e-13;

/// Query points `q_j = min { q : sum_{i<=q} a_i >= j/(k+1) }` for `j = 1..=k`.
///
/// `weights` must be a probability vector over `[n]` (1-based points). With
/// these points every bracket between consecutive queries carries less than
/// `1/(k+1)` of the weight, which bounds `sum_i a_i d_t(i)` by `1/(k+1)` for
/// any monotone feedback.
pub fn select_query_points(weights: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty weight vector".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("query budget must be at least 1".into()));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::NotADistribution("negative or non-finite weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotADistribution(format!("weights sum to {total}")));
    }

    let denom = (k + 1) as f64;
    let mut out = Vec::with_capacity(k);
    // Neumaier-compensated running sum
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut q = 0usize;
    for j in 1..=k {
        let target = j as f64 / denom - THRESHOLD_SLACK;
        while q < n && sum + comp < target {
            let w = weights[q];
            let t = sum + w;
            if sum.abs() >= w.abs() {
                comp += (sum - t) + w;
            } else {
                comp += (w - t) + sum;
            }
            sum = t;
            q += 1;
        }
        // rounding can leave the total a hair short of the last thresholds
        out.push(q.max(1));
    }
    Ok(out)
}

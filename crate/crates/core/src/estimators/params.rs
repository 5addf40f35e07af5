//! Default budgets, learning rates and round counts derived from the
//! accuracy target. Rounding is always toward satisfying the guarantee.

/// `ceil(x)`, ignoring floating-point noise just above an integer.
pub fn ceil_tol(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Parallel multiplicative weights: `k = ceil(1/eps) - 1`, so `k + 1 >= 1/eps`.
pub fn mw_budget(eps: f64) -> usize {
    ceil_tol(1.0 / eps).saturating_sub(1).max(1)
}

pub const MW_ETA: f64 = 1.0 / 3.0;

/// `T = ceil(9 ln n / eps)`.
pub fn mw_rounds(n: usize, eps: f64) -> usize {
    ceil_tol(9.0 * (n as f64).ln() / eps).max(1)
}

/// Importance weighting: `k = ceil(2/eps)`.
pub fn iw_budget(eps: f64) -> usize {
    ceil_tol(2.0 / eps).max(1)
}

/// `eta = eps^2 / 16`.
pub fn iw_eta(eps: f64) -> f64 {
    eps * eps / 16.0
}

/// `T = ceil(64 ln n / eps^3)`.
pub fn iw_rounds(n: usize, eps: f64) -> usize {
    ceil_tol(64.0 * (n as f64).ln() / eps.powi(3)).max(1)
}

/// Uniform-threshold baseline: `T = ceil(n ln n / eps^2)`.
pub fn naive_rounds(n: usize, eps: f64) -> usize {
    ceil_tol(n as f64 * (n as f64).ln() / (eps * eps)).max(1)
}

/// Robust sqrt(n)-grid: `k = ceil((4/eps + 1) sqrt(n))`.
pub fn sqrt_grid_budget(n: usize, eps: f64) -> usize {
    ceil_tol((4.0 / eps + 1.0) * (n as f64).sqrt())
}

/// `T_0 = ceil(4/eps)`.
pub fn sqrt_grid_rounds(eps: f64) -> usize {
    ceil_tol(4.0 / eps).max(1)
}

/// Midpoint insertion: `k = ceil(log2 n / eps^2)`.
pub fn midpoint_budget(n: usize, eps: f64) -> usize {
    ceil_tol((n as f64).log2() / (eps * eps)).max(1)
}

/// `T_0 = ceil(log2 n / eps)`.
pub fn midpoint_rounds(n: usize, eps: f64) -> usize {
    ceil_tol((n as f64).log2() / eps).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_defaults() {
        assert_eq!(mw_budget(0.1), 9);
        assert_eq!(mw_rounds(16, 0.1), 250);
        assert_eq!(mw_budget(0.05), 19);
        assert_eq!(iw_budget(0.25), 8);
        assert_eq!(iw_eta(0.25), 0.00390625);
        // 64 ln 64 / 0.25^3 = 17034.79
        assert_eq!(iw_rounds(64, 0.25), 17035);
        assert_eq!(sqrt_grid_budget(100, 0.2), 210);
        assert_eq!(sqrt_grid_rounds(0.2), 20);
    }

    #[test]
    fn ceil_ignores_noise() {
        assert_eq!(ceil_tol(10.000000000001), 10);
        assert_eq!(ceil_tol(9.5), 10);
        assert_eq!(ceil_tol(3.0), 3);
    }
}

//! Deterministic fixtures shared by the benchmarks.

use tqm_core::MonotoneFunction;

/// Positive weights with a fixed irregular profile, normalized.
pub fn weights(n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Steps cycling through the domain with a stride coprime to `n + 1`.
pub fn step_stream(n: usize, len: usize) -> Vec<MonotoneFunction> {
    let stride = (n + 1) / 2 + 1;
    (0..len)
        .map(|t| MonotoneFunction::step(n, 1 + (t * stride) % (n + 1)).expect("position in range"))
        .collect()
}

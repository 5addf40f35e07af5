//! CDF estimators for the threshold query model.
//!
//! Every estimator follows the same round protocol: [`Estimator::queries`]
//! publishes this round's query points, then [`Estimator::observe`] receives
//! the feedback at exactly those points, in order.

mod iw;
mod midpoint;
mod mw;
mod naive;
pub mod params;
mod query;
mod sqrt_grid;

use serde::{Deserialize, Serialize};

use crate::ecdf::CdfEstimate;
use crate::error::Result;

pub use iw::{importance_weighted_bounds, IwState};
pub use midpoint::MidpointInsertionState;
pub use mw::MwState;
pub use naive::NaiveState;
pub use query::select_query_points;
pub use sqrt_grid::SqrtGridState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimate: CdfEstimate,
    pub rounds_used: usize,
    /// `max_i (1/T) sum_t d_t(i)`, when the estimator observes the true widths.
    pub max_avg_width: Option<f64>,
    /// `sum_i a_i d_t(i)` per round, when recorded.
    pub per_round_certificates: Option<Vec<f64>>,
}

pub trait Estimator: Send {
    fn name(&self) -> &'static str;

    fn domain(&self) -> usize;

    /// Maximum number of queries per round.
    fn budget(&self) -> usize;

    fn is_deterministic(&self) -> bool;

    fn rounds(&self) -> usize;

    /// Publishes the sorted query points of the next round.
    fn queries(&mut self) -> Result<Vec<usize>>;

    /// Feedback `v_t(q)` for each point returned by the last `queries` call.
    fn observe(&mut self, answers: &[f64]) -> Result<()>;

    fn report(&self) -> Result<EstimatorReport>;
}

pub(crate) fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
}

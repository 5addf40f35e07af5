//! Estimating empirical CDFs from threshold feedback.
//!
//! Each round an adversary commits a monotone `v_t: [n] -> [0, 1]`, the
//! estimator picks up to `k` query points and learns `v_t` only there. The
//! goal is an estimate `G` with `|G - F_T|_inf <= eps`, where `F_T` is the
//! running average of the committed functions.

pub mod adversaries;
pub mod bounds;
pub mod driver;
pub mod ecdf;
pub mod error;
pub mod estimators;
pub mod function;
pub mod harness;
pub mod infotheory;
pub mod verify;

pub use adversaries::{Adversary, AdversaryHandle, HardInstance};
pub use bounds::{bounds_from_feedback, QueryRound, RoundBounds};
pub use driver::{run_estimator, RunOutcome};
pub use ecdf::{accumulate_round, midpoint_estimate, sup_norm_distance, CdfEstimate, EmpiricalCdf};
pub use error::{Error, Result};
pub use estimators::{
    Estimator, EstimatorReport, IwState, MidpointInsertionState, MwState, NaiveState, SqrtGridState,
};
pub use function::MonotoneFunction;
pub use harness::{Algorithm, AdversaryKind, TrialConfig, TrialResult};

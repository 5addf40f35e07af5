//! The round loop: the adversary commits, the estimator queries, feedback is
//! revealed, the adversary observes.

use crate::adversaries::AdversaryHandle;
use crate::ecdf::{sup_norm_distance, EmpiricalCdf};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, EstimatorReport};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: EstimatorReport,
    /// `F_T` of the realized functions.
    pub empirical: Vec<f64>,
    /// `|G_T - F_T|_inf`.
    pub sup_error: f64,
}

pub fn run_estimator(
    estimator: &mut dyn Estimator,
    adversary: &mut AdversaryHandle,
    rounds: usize,
) -> Result<RunOutcome> {
    let mut out = run_with_checkpoints(estimator, adversary, &[rounds])?;
    Ok(out.pop().expect("one checkpoint"))
}

/// Runs to the last checkpoint and reports after each one.
///
/// Checkpoints must be positive and strictly increasing.
pub fn run_with_checkpoints(
    estimator: &mut dyn Estimator,
    adversary: &mut AdversaryHandle,
    checkpoints: &[usize],
) -> Result<Vec<RunOutcome>> {
    if checkpoints.first().map_or(true, |&c| c == 0) {
        return Err(Error::ZeroRounds);
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("checkpoints must be strictly increasing".into()));
    }
    let n = estimator.domain();
    if adversary.domain() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: adversary.domain(),
        });
    }

    let mut acc = EmpiricalCdf::new(n);
    let mut outcomes = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let last = *checkpoints.last().unwrap();
    for t in 1..=last {
        let v = adversary.next_function()?;
        let queries = estimator.queries()?;
        if queries.len() > estimator.budget() {
            return Err(Error::BudgetExceeded {
                round: t,
                needed: queries.len(),
                budget: estimator.budget(),
            });
        }
        let answers = adversary.answer(&queries)?;
        estimator.observe(&answers)?;
        acc.accumulate(&v)?;

        if t == checkpoints[next] {
            let report = estimator.report()?;
            let empirical = acc.values();
            let sup_error = sup_norm_distance(&report.estimate.values, &empirical)?;
            outcomes.push(RunOutcome {
                report,
                empirical,
                sup_error,
            });
            next += 1;
        }
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{iid_adversary, FixedStep, StepSampler};
    use crate::estimators::{params, MwState};

    #[test]
    fn single_round() {
        let mut est = MwState::new(8, 3, 1.0 / 3.0).unwrap();
        let mut adv = AdversaryHandle::new(FixedStep::new(8, 5).unwrap());
        let out = run_estimator(&mut est, &mut adv, 1).unwrap();
        assert_eq!(out.report.rounds_used, 1);
        assert_eq!(adv.rounds(), 1);
    }

    #[test]
    fn mw_width_guarantee() {
        let (n, eps) = (64, 0.1);
        let rounds = params::mw_rounds(n, eps);
        let mut est = MwState::for_accuracy(n, eps).unwrap();
        let mut adv = iid_adversary(StepSampler::Uniform { n }, 4).unwrap();
        let out = run_estimator(&mut est, &mut adv, rounds).unwrap();
        assert!(out.report.max_avg_width.unwrap() <= 2.0 * eps + 1e-12);
        assert!(out.sup_error <= eps + 1e-12);
    }

    #[test]
    fn deterministic_pairs_repeat() {
        let run = || {
            let mut est = MwState::new(16, 4, 1.0 / 3.0).unwrap();
            let mut adv = AdversaryHandle::new(FixedStep::new(16, 7).unwrap());
            run_estimator(&mut est, &mut adv, 30).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn checkpoints() {
        let mut est = MwState::new(16, 4, 1.0 / 3.0).unwrap();
        let mut adv = AdversaryHandle::new(FixedStep::new(16, 7).unwrap());
        let out = run_with_checkpoints(&mut est, &mut adv, &[3, 5, 10]).unwrap();
        let used: Vec<_> = out.iter().map(|o| o.report.rounds_used).collect();
        assert_eq!(used, vec![3, 5, 10]);
        assert!(run_with_checkpoints(&mut est, &mut adv, &[5, 5]).is_err());
        assert_eq!(run_estimator(&mut est, &mut adv, 0), Err(Error::ZeroRounds));
        let mut other = AdversaryHandle::new(FixedStep::new(8, 7).unwrap());
        assert!(matches!(
            run_estimator(&mut est, &mut other, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

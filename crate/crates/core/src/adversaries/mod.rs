//! Adversaries that commit one monotone function per round.

mod hard_instance;
mod pigeonhole;
mod step;

pub use hard_instance::{admissible_params, HardInstance};
pub use pigeonhole::{pigeonhole_attack, probe_points, verify_consistency, AttackCertificate};
pub use step::{
    iid_adversary, step_function, AdaptivePastLargest, FixedStep, IidSteps, LeastQueried, StepSampler,
};

use crate::error::{Error, Result};
use crate::function::MonotoneFunction;

pub trait Adversary: Send {
    fn domain(&self) -> usize;

    /// Commits `v_t` before this round's queries are revealed.
    fn next_function(&mut self) -> MonotoneFunction;

    /// Sees the round's queries and feedback after the commitment.
    fn observe(&mut self, _queries: &[usize], _answers: &[f64]) {}
}

/// Enforces the round order: `next_function` once, then `observe` once.
pub struct AdversaryHandle {
    inner: Box<dyn Adversary>,
    committed: Option<MonotoneFunction>,
    rounds: usize,
}

impl AdversaryHandle {
    pub fn new(adversary: impl Adversary + 'static) -> Self {
        Self::from_box(Box::new(adversary))
    }

    pub fn from_box(inner: Box<dyn Adversary>) -> Self {
        Self {
            inner,
            committed: None,
            rounds: 0,
        }
    }

    pub fn domain(&self) -> usize {
        self.inner.domain()
    }

    /// Completed rounds.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn next_function(&mut self) -> Result<MonotoneFunction> {
        if self.committed.is_some() {
            return Err(Error::Protocol("function committed twice in one round".into()));
        }
        let v = self.inner.next_function();
        self.committed = Some(v.clone());
        Ok(v)
    }

    /// Reveals the queries, returns the committed function's feedback and
    /// closes the round.
    pub fn answer(&mut self, queries: &[usize]) -> Result<Vec<f64>> {
        let v = self
            .committed
            .take()
            .ok_or_else(|| Error::Protocol("queries revealed before the commitment".into()))?;
        let answers: Vec<f64> = queries.iter().map(|&q| v.eval(q)).collect();
        self.inner.observe(queries, &answers);
        self.rounds += 1;
        Ok(answers)
    }
}

impl std::fmt::Debug for AdversaryHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdversaryHandle")
            .field("n", &self.domain())
            .field("rounds", &self.rounds)
            .field("committed", &self.committed.is_some())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_enforced() {
        let mut h = AdversaryHandle::new(FixedStep::new(4, 2).unwrap());
        assert!(matches!(h.answer(&[1]), Err(Error::Protocol(_))));
        h.next_function().unwrap();
        assert!(matches!(h.next_function(), Err(Error::Protocol(_))));
        assert_eq!(h.answer(&[1, 2, 4]).unwrap(), vec![0.0, 1.0, 1.0]);
        assert_eq!(h.rounds(), 1);
        assert!(matches!(h.answer(&[1]), Err(Error::Protocol(_))));
    }
}

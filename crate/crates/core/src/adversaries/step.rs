use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function::MonotoneFunction;

use super::{Adversary, AdversaryHandle, HardInstance};

/// `v(i) = 1(x <= i)`; `x = n + 1` is the zero function.
pub fn step_function(x: usize, n: usize) -> Result<MonotoneFunction> {
    MonotoneFunction::step(n, x)
}

#[derive(Debug, Clone)]
pub struct FixedStep {
    v: MonotoneFunction,
}

impl FixedStep {
    pub fn new(n: usize, x: usize) -> Result<Self> {
        Ok(Self {
            v: step_function(x, n)?,
        })
    }
}

impl Adversary for FixedStep {
    fn domain(&self) -> usize {
        self.v.n()
    }

    fn next_function(&mut self) -> MonotoneFunction {
        self.v.clone()
    }
}

/// Distribution of the step position.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSampler {
    /// Uniform on `[n + 1]`.
    Uniform { n: usize },
    Constant { n: usize, x: usize },
    Hard(HardInstance),
}

impl StepSampler {
    pub fn n(&self) -> usize {
        match self {
            Self::Uniform { n } | Self::Constant { n, .. } => *n,
            Self::Hard(inst) => inst.n(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform { n } if *n == 0 => {
                Err(Error::InvalidParameter("domain size must be positive".into()))
            }
            Self::Constant { n, x } => step_function(*x, *n).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        match self {
            Self::Uniform { n } => rng.gen_range(1..=*n + 1),
            Self::Constant { x, .. } => *x,
            Self::Hard(inst) => inst.sample(rng),
        }
    }
}

/// Steps at i.i.d. positions; ignores observations.
#[derive(Debug, Clone)]
pub struct IidSteps {
    sampler: StepSampler,
    rng: ChaCha8Rng,
}

impl IidSteps {
    pub fn new(sampler: StepSampler, seed: u64) -> Result<Self> {
        sampler.validate()?;
        Ok(Self {
            sampler,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl Adversary for IidSteps {
    fn domain(&self) -> usize {
        self.sampler.n()
    }

    fn next_function(&mut self) -> MonotoneFunction {
        let n = self.sampler.n();
        MonotoneFunction::Step {
            n,
            x: self.sampler.sample(&mut self.rng),
        }
    }
}

pub fn iid_adversary(sampler: StepSampler, seed: u64) -> Result<AdversaryHandle> {
    Ok(AdversaryHandle::new(IidSteps::new(sampler, seed)?))
}

/// Steps just past the largest point queried in the previous round, which is
/// where the bounds leave `v` undetermined.
#[derive(Debug, Clone)]
pub struct AdaptivePastLargest {
    n: usize,
    x: usize,
}

impl AdaptivePastLargest {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        Ok(Self { n, x: n / 2 + 1 })
    }
}

impl Adversary for AdaptivePastLargest {
    fn domain(&self) -> usize {
        self.n
    }

    fn next_function(&mut self) -> MonotoneFunction {
        MonotoneFunction::Step { n: self.n, x: self.x }
    }

    fn observe(&mut self, queries: &[usize], _answers: &[f64]) {
        if let Some(&q) = queries.iter().max() {
            self.x = (q + 1).min(self.n + 1);
        }
    }
}

/// Steps at the point queried least often so far (smallest on ties).
#[derive(Debug, Clone)]
pub struct LeastQueried {
    counts: Vec<u64>,
}

impl LeastQueried {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("domain size must be positive".into()));
        }
        Ok(Self { counts: vec![0; n] })
    }
}

impl Adversary for LeastQueried {
    fn domain(&self) -> usize {
        self.counts.len()
    }

    fn next_function(&mut self) -> MonotoneFunction {
        let (idx, _) = self
            .counts
            .iter()
            .enumerate()
            .min_by_key(|&(i, &c)| (c, i))
            .expect("non-empty domain");
        MonotoneFunction::Step {
            n: self.counts.len(),
            x: idx + 1,
        }
    }

    fn observe(&mut self, queries: &[usize], _answers: &[f64]) {
        for &q in queries {
            self.counts[q - 1] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_examples() {
        assert_eq!(step_function(1, 3).unwrap().to_dense(), vec![1.0, 1.0, 1.0]);
        assert_eq!(step_function(4, 3).unwrap().to_dense(), vec![0.0, 0.0, 0.0]);
        assert_eq!(step_function(2, 3).unwrap().to_dense(), vec![0.0, 1.0, 1.0]);
        assert!(step_function(0, 3).is_err());
        assert!(step_function(5, 3).is_err());
    }

    #[test]
    fn constant_sampler_matches_fixed_step() {
        let mut iid = IidSteps::new(StepSampler::Constant { n: 5, x: 3 }, 1).unwrap();
        let mut fixed = FixedStep::new(5, 3).unwrap();
        for _ in 0..10 {
            assert_eq!(iid.next_function(), fixed.next_function());
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let stream = |seed| {
            let mut a = IidSteps::new(StepSampler::Uniform { n: 7 }, seed).unwrap();
            (0..50).map(|_| a.next_function()).collect::<Vec<_>>()
        };
        assert_eq!(stream(3), stream(3));
        assert_ne!(stream(3), stream(4));
        assert!(stream(5).iter().all(|v| (1..=8).contains(&v.step_position().unwrap())));
    }

    #[test]
    fn adaptive_adversaries_follow_queries() {
        let mut a = AdaptivePastLargest::new(10).unwrap();
        assert_eq!(a.next_function().step_position(), Some(6));
        a.observe(&[2, 7], &[0.0, 1.0]);
        assert_eq!(a.next_function().step_position(), Some(8));
        a.observe(&[10], &[0.0]);
        assert_eq!(a.next_function().step_position(), Some(11));

        let mut b = LeastQueried::new(3).unwrap();
        assert_eq!(b.next_function().step_position(), Some(1));
        b.observe(&[1, 3], &[0.0, 1.0]);
        assert_eq!(b.next_function().step_position(), Some(2));
    }
}

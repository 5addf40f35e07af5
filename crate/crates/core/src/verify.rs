//! Self-checks of the library's guarantees and information-theoretic
//! identities on randomized instances. Each suite reports pass/fail with a
//! short detail line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversaries::{
    pigeonhole_attack, verify_consistency, AdaptivePastLargest, AdversaryHandle, FixedStep, HardInstance,
    IidSteps, StepSampler,
};
use crate::bounds::{bounds_from_feedback, QueryRound};
use crate::driver::run_estimator;
use crate::ecdf::{sup_norm_distance, EmpiricalCdf};
use crate::error::Result;
use crate::estimators::{
    importance_weighted_bounds, params, select_query_points, MidpointInsertionState, MwState, SqrtGridState,
};
use crate::function::MonotoneFunction;
use crate::infotheory::{
    bernoulli_kl_bounds, dkw_tail_bound, kl_divergence, product_forward_lower, product_reverse_lower,
    FiniteDistribution,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Random instances per randomized property.
    pub instances: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            instances: 2_000,
            seed: 0x5eed,
        }
    }
}

pub fn run_all(opts: VerifyOptions) -> Vec<SuiteOutcome> {
    let suites: [(&str, fn(VerifyOptions) -> Result<(usize, Option<String>)>); 8] = [
        ("certificate", certificate),
        ("iw_moments", iw_moments),
        ("hard_instance", hard_instance),
        ("kl", kl),
        ("dkw", dkw),
        ("pigeonhole", pigeonhole),
        ("mw_guarantee", mw_guarantee),
        ("elementary", elementary),
    ];
    suites
        .iter()
        .map(|(name, f)| match f(opts) {
            Ok((checks, None)) => SuiteOutcome {
                name: name.to_string(),
                passed: true,
                checks,
                detail: format!("{checks} checks"),
            },
            Ok((checks, Some(why))) => SuiteOutcome {
                name: name.to_string(),
                passed: false,
                checks,
                detail: why,
            },
            Err(e) => SuiteOutcome {
                name: name.to_string(),
                passed: false,
                checks: 0,
                detail: e.to_string(),
            },
        })
        .collect()
}

/// Step at a uniform position or sorted uniform values, with equal odds.
pub fn random_monotone(n: usize, rng: &mut impl Rng) -> MonotoneFunction {
    if rng.gen_bool(0.5) {
        MonotoneFunction::Step {
            n,
            x: rng.gen_range(1..=n + 1),
        }
    } else {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        v.sort_by(f64::total_cmp);
        MonotoneFunction::Dense { values: v }
    }
}

/// Random probability vector; roughly a quarter of the entries are zero.
pub fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen::<f64>() })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.iter().map(|x| x / total).collect();
        }
    }
}

/// Hard instance on `[n]` with the most blocks that divide `n` and keep
/// `1/(6k) >= eps`.
pub fn hard_instance_near(n: usize, eps: f64, rng: &mut impl Rng) -> Result<HardInstance> {
    let cap = ((1.0 / (6.0 * eps) + 1e-9).floor() as usize).max(1);
    let k = (1..=cap).rev().find(|k| n % k == 0).unwrap_or(1);
    HardInstance::random(n, 1.0 / (6.0 * k as f64), rng)
}

type Check = Result<(usize, Option<String>)>;

fn certificate(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for r in 0..opts.instances {
        let n = rng.gen_range(1..=64);
        let k = rng.gen_range(1..=32);
        let a = random_simplex(n, &mut rng);
        let v = random_monotone(n, &mut rng);
        let q = select_query_points(&a, k)?;
        let b = bounds_from_feedback(&QueryRound::observe(&v, q)?, n)?;
        let c: f64 = a.iter().zip(&b.width).map(|(a, d)| a * d).sum();
        if c > 1.0 / (k + 1) as f64 + 1e-12 {
            return Ok((r, Some(format!("round {r}: n={n} k={k} certificate {c}"))));
        }
    }
    Ok((opts.instances, None))
}

fn iw_moments(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 1);
    for r in 0..opts.instances {
        let n = rng.gen_range(1..=48);
        let k = rng.gen_range(1..=16);
        let q = select_query_points(&random_simplex(n, &mut rng), k)?;
        let v = random_monotone(n, &mut rng);
        let exact = bounds_from_feedback(&QueryRound::observe(&v, q.clone())?, n)?;
        let mut mean = vec![0.0; n];
        let mut second = vec![0.0; n];
        for m in 1..=k {
            let (l, u) = importance_weighted_bounds(&q, m, v.eval(q[m - 1]), n)?;
            for i in 0..n {
                let d = u[i] - l[i];
                mean[i] += d / k as f64;
                second[i] += d * d / k as f64;
            }
        }
        for i in 0..n {
            if (mean[i] - exact.width[i]).abs() > 1e-12 {
                return Ok((r, Some(format!("round {r}: mean width off at {}", i + 1))));
            }
            if second[i] > 2.0 * k as f64 {
                return Ok((r, Some(format!("round {r}: second moment {} > 2k", second[i]))));
            }
        }
    }
    Ok((opts.instances, None))
}

fn hard_instance(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 2);
    let mut checks = 0;
    for (n, eps) in [(36, 1.0 / 12.0), (600, 1.0 / 60.0)] {
        for _ in 0..100 {
            let a = HardInstance::random(n, eps, &mut rng)?;
            let mut b = HardInstance::random(n, eps, &mut rng)?;
            while b.theta() == a.theta() {
                b = HardInstance::random(n, eps, &mut rng)?;
            }
            let dist = sup_norm_distance(&a.cdf(), &b.cdf())?;
            if (dist - 3.0 * eps).abs() > 1e-12 {
                return Ok((checks, Some(format!("n={n}: separation {dist}"))));
            }
            let g: Vec<f64> = a
                .cdf()
                .iter()
                .map(|f| f + rng.gen_range(-1.0..1.0) * 0.499 * 3.0 * eps)
                .collect();
            if a.decode(&g).as_deref() != Some(a.theta()) {
                return Ok((checks, Some(format!("n={n}: decoding failed"))));
            }
            checks += 2;
        }
    }
    Ok((checks, None))
}

fn random_distribution(n: usize, rng: &mut impl Rng) -> FiniteDistribution {
    FiniteDistribution::from_weights(&random_simplex(n, rng)).expect("normalized")
}

fn positive_distribution(n: usize, rng: &mut impl Rng) -> FiniteDistribution {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    FiniteDistribution::from_weights(&w).expect("normalized")
}

fn kl(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 3);
    let fail = |what: &str, r: usize| Ok((r, Some(format!("{what} violated on instance {r}"))));
    for r in 0..opts.instances {
        let size = rng.gen_range(1..=8);
        let p = random_distribution(size, &mut rng);
        let q = random_distribution(size, &mut rng);
        if !(kl_divergence(&p, &q)? >= 0.0) {
            return fail("non-negativity", r);
        }

        // chain rule on a 4x4 joint, outcome (y, x) at 4y + x
        let pj = positive_distribution(16, &mut rng);
        let qj = positive_distribution(16, &mut rng);
        let marg = |d: &FiniteDistribution| -> Vec<f64> {
            (0..4).map(|y| d.probs()[4 * y..4 * y + 4].iter().sum()).collect()
        };
        let (py, qy) = (marg(&pj), marg(&qj));
        let mut rhs = kl_divergence(&FiniteDistribution::from_weights(&py)?, &FiniteDistribution::from_weights(&qy)?)?;
        for y in 0..4 {
            let pc = FiniteDistribution::from_weights(&pj.probs()[4 * y..4 * y + 4])?;
            let qc = FiniteDistribution::from_weights(&qj.probs()[4 * y..4 * y + 4])?;
            rhs += py[y] * kl_divergence(&pc, &qc)?;
        }
        if (kl_divergence(&pj, &qj)? - rhs).abs() > 1e-9 {
            return fail("chain rule", r);
        }

        // additivity on products
        let (p2, q2) = (positive_distribution(3, &mut rng), positive_distribution(3, &mut rng));
        let (p3, q3) = (positive_distribution(4, &mut rng), positive_distribution(4, &mut rng));
        let sum = kl_divergence(&p2, &q2)? + kl_divergence(&p3, &q3)?;
        if (kl_divergence(&p2.product(&p3), &q2.product(&q3))? - sum).abs() > 1e-9 {
            return fail("additivity", r);
        }

        // data processing
        let codomain = rng.gen_range(1..=size);
        let f: Vec<usize> = (0..size).map(|_| rng.gen_range(0..codomain)).collect();
        let before = kl_divergence(&p, &q)?;
        let after = kl_divergence(&p.pushforward(&f, codomain)?, &q.pushforward(&f, codomain)?)?;
        if after > before + 1e-12 && before.is_finite() {
            return fail("data processing", r);
        }

        // Bernoulli bounds
        let p1 = rng.gen::<f64>();
        let q1 = rng.gen_range(1e-6..1.0 - 1e-6);
        let b = bernoulli_kl_bounds(p1, q1)?;
        if b.kl > b.quadratic_upper * (1.0 + 1e-12) + 1e-15 {
            return fail("quadratic upper bound", r);
        }
        if b.logarithmic_lower.is_some_and(|lo| b.kl < lo - 1e-12) {
            return fail("logarithmic lower bound", r);
        }
    }

    for r in 0..100 {
        let (p, q, k, m) = product_bound_instance(&mut rng);
        if kl_divergence(&p, &q)? < product_forward_lower(k, m) - 1e-9 {
            return fail("product forward bound", r);
        }
        if kl_divergence(&q, &p)? < product_reverse_lower(k) - 1e-9 {
            return fail("product reverse bound", r);
        }
    }
    Ok((opts.instances + 100, None))
}

/// Product laws `p, q` on `k`-tuples over a small alphabet with
/// `p(X = x*) >= 1/2` and `q(X_i = x*_i) <= 1/m`, as full joints.
pub fn product_bound_instance(rng: &mut impl Rng) -> (FiniteDistribution, FiniteDistribution, usize, usize) {
    let k = rng.gen_range(1..=4);
    let alphabet = rng.gen_range(2..=4);
    let m = rng.gen_range(2..=12);
    let keep = 0.5f64.powf(1.0 / k as f64);
    let mut p = FiniteDistribution::new(vec![1.0]).unwrap();
    let mut q = p.clone();
    for _ in 0..k {
        let star = rng.gen_range(0..alphabet);
        let pi = coordinate(alphabet, star, rng.gen_range(keep..=1.0), rng);
        let qi = coordinate(alphabet, star, rng.gen_range(0.0..=1.0 / m as f64), rng);
        p = p.product(&pi);
        q = q.product(&qi);
    }
    (p, q, k, m)
}

fn coordinate(alphabet: usize, star: usize, mass: f64, rng: &mut impl Rng) -> FiniteDistribution {
    let rest: Vec<f64> = (0..alphabet - 1).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = rest.iter().sum();
    let mut it = rest.into_iter();
    let probs: Vec<f64> = (0..alphabet)
        .map(|a| if a == star { mass } else { (1.0 - mass) * it.next().unwrap() / total })
        .collect();
    FiniteDistribution::from_weights(&probs).expect("normalized")
}

fn dkw(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 4);
    let eps = 1.0 / 12.0;
    let inst = HardInstance::random(36, eps, &mut rng)?;
    let f = inst.cdf();
    let (reps, draws) = (500, 2_000);
    let mut exceed = 0;
    for _ in 0..reps {
        let mut counts = vec![0usize; 36];
        for _ in 0..draws {
            counts[inst.sample(&mut rng) - 1] += 1;
        }
        let mut acc = 0;
        let mut worst: f64 = 0.0;
        for i in 0..36 {
            acc += counts[i];
            worst = worst.max((acc as f64 / draws as f64 - f[i]).abs());
        }
        if worst >= eps / 2.0 {
            exceed += 1;
        }
    }
    let bound = dkw_tail_bound(draws, eps / 2.0);
    let slack = 3.0 * (bound * (1.0 - bound) / reps as f64).sqrt();
    let freq = exceed as f64 / reps as f64;
    if freq > bound + slack {
        return Ok((reps, Some(format!("frequency {freq} exceeds {bound} + {slack}"))));
    }
    Ok((reps, None))
}

fn pigeonhole(_: VerifyOptions) -> Check {
    let (n, k, eps) = (12, 2, 0.05);
    let factory = || MwState::new(n, k, params::MW_ETA);
    let cert = pigeonhole_attack(factory, n, k, eps, 300)?;
    if !(cert.certified && cert.ambiguity >= 1.0 / 6.0) {
        return Ok((1, Some(format!("ambiguity {} not certified", cert.ambiguity))));
    }
    if cert.worst_error < cert.ambiguity - 1e-12 {
        return Ok((2, Some("worst error below the ambiguity".into())));
    }
    if !verify_consistency(factory, &cert)? {
        return Ok((3, Some("worlds disagree with the transcript".into())));
    }
    Ok((3, None))
}

fn mw_guarantee(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 5);
    let mut checks = 0;
    for n in [16, 256] {
        for eps in [0.05, 0.1] {
            let rounds = params::mw_rounds(n, eps);
            let hard = hard_instance_near(n, eps, &mut rng)?;
            let adversaries = vec![
                AdversaryHandle::new(FixedStep::new(n, n / 2 + 1)?),
                AdversaryHandle::new(IidSteps::new(StepSampler::Uniform { n }, rng.gen())?),
                AdversaryHandle::new(IidSteps::new(StepSampler::Hard(hard), rng.gen())?),
                AdversaryHandle::new(AdaptivePastLargest::new(n)?),
            ];
            for mut adv in adversaries {
                let mut est = MwState::for_accuracy(n, eps)?;
                let out = run_estimator(&mut est, &mut adv, rounds)?;
                if out.sup_error > eps + 1e-12 {
                    return Ok((checks, Some(format!("n={n} eps={eps}: error {}", out.sup_error))));
                }
                checks += 1;
            }
        }
    }
    Ok((checks, None))
}

fn elementary(opts: VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 6);
    let (n, eps) = (100, 0.2);
    let warmup = params::sqrt_grid_rounds(eps);
    let mut checks = 0;
    for _ in 0..5 {
        let mut est = SqrtGridState::for_accuracy(n, eps)?;
        let mut acc = EmpiricalCdf::new(n);
        for t in 1..=4 * warmup {
            let v = MonotoneFunction::step(n, rng.gen_range(1..=n + 1))?;
            let q = est.begin_round()?;
            let a: Vec<f64> = q.iter().map(|&p| v.eval(p)).collect();
            est.round(&a)?;
            acc.accumulate(&v)?;
            if t >= warmup {
                let err = sup_norm_distance(&est.estimate()?.values, &acc.values())?;
                if err > eps + 1e-12 {
                    return Ok((checks, Some(format!("sqrt grid error {err} at t={t}"))));
                }
                checks += 1;
            }
        }
    }

    let n = 256;
    let mut est = MidpointInsertionState::new(n, n)?;
    let mut acc = EmpiricalCdf::new(n);
    for t in 1..=200 {
        let v = MonotoneFunction::step(n, rng.gen_range(1..=n + 1))?;
        let q = est.begin_round()?;
        let a: Vec<f64> = q.iter().map(|&p| v.eval(p)).collect();
        est.round(&a)?;
        acc.accumulate(&v)?;
        let bound = est.pointwise_bounds()?;
        let f = acc.values();
        for (i, g) in est.estimate()?.values.iter().enumerate() {
            if (g - f[i]).abs() > bound[i] + 1e-12 {
                return Ok((checks, Some(format!("midpoint bound fails at t={t}, p={}", i + 1))));
            }
        }
        checks += 1;
    }
    Ok((checks, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_small_instances() {
        let out = run_all(VerifyOptions {
            instances: 200,
            seed: 1,
        });
        for s in &out {
            assert!(s.passed, "{}: {}", s.name, s.detail);
        }
        assert_eq!(out.len(), 8);
    }
}

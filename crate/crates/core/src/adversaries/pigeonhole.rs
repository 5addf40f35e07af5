//! Ambiguity certificates against under-budgeted deterministic estimators.
//!
//! Fix `k + 1` distinct probe points. A deterministic estimator's queries are
//! a function of past feedback, so the adversary can predict them before
//! committing. Each round it steps just above an unqueried probe `p`
//! (world A). Some probe `p*` is credited in at least `T/(k+1)` rounds, and
//! moving the step onto `p*` in exactly those rounds (world B) changes no
//! answer the estimator sees. Both worlds produce one transcript and one
//! output, while their empirical CDFs at `p*` differ by the credited
//! fraction; one of them is missed by at least half of it.

use serde::{Deserialize, Serialize};

use crate::bounds::QueryRound;
use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::function::MonotoneFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackCertificate {
    pub point: usize,
    pub rounds: usize,
    /// Rounds in which `point` was unqueried and the worlds differ there.
    pub unqueried_rounds: usize,
    /// `unqueried_rounds / (2 T)`.
    pub ambiguity: f64,
    pub estimate_at_point: f64,
    pub world_a_value: f64,
    pub world_b_value: f64,
    /// `max(|G(p) - F_A(p)|, |G(p) - F_B(p)|)`; at least `ambiguity`.
    pub worst_error: f64,
    /// `ambiguity > eps`.
    pub certified: bool,
    pub world_a_steps: Vec<usize>,
    pub world_b_steps: Vec<usize>,
    pub transcript: Vec<QueryRound>,
}

/// `floor(j n / (k + 1))` for `j = 1..=k+1`; distinct when `n >= k + 1`.
pub fn probe_points(n: usize, k: usize) -> Vec<usize> {
    (1..=k + 1).map(|j| j * n / (k + 1)).collect()
}

pub fn pigeonhole_attack<E, F>(
    factory: F,
    n: usize,
    k: usize,
    eps: f64,
    rounds: usize,
) -> Result<AttackCertificate>
where
    E: Estimator + Clone,
    F: Fn() -> Result<E>,
{
    let mut est = factory()?;
    if !est.is_deterministic() {
        return Err(Error::UnsupportedEstimator(format!(
            "{} is randomized; the attack needs predictable queries",
            est.name()
        )));
    }
    if est.domain() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: est.domain(),
        });
    }
    if est.budget() > k {
        return Err(Error::InvalidParameter(format!(
            "estimator budget {} exceeds k = {k}",
            est.budget()
        )));
    }
    if rounds == 0 {
        return Err(Error::InvalidParameter("attack needs at least one round".into()));
    }
    if n < k + 1 {
        return Err(Error::CannotCertify { n, k });
    }

    let probes = probe_points(n, k);
    let mut credit = vec![0usize; probes.len()];
    let mut credited = Vec::with_capacity(rounds);
    let mut world_a_steps = Vec::with_capacity(rounds);
    let mut transcript = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let predicted = est.clone().queries()?;
        let j = (0..probes.len())
            .filter(|&j| predicted.binary_search(&probes[j]).is_err())
            .max_by_key(|&j| (credit[j], std::cmp::Reverse(j)))
            .ok_or(Error::CannotCertify { n, k })?;
        let v = MonotoneFunction::step(n, probes[j] + 1)?;

        let queries = est.queries()?;
        if queries != predicted {
            return Err(Error::UnsupportedEstimator(format!(
                "{} changed its queries between identical states",
                est.name()
            )));
        }
        let round = QueryRound::observe(&v, queries)?;
        est.observe(round.answers())?;
        transcript.push(round);
        credit[j] += 1;
        credited.push(j);
        world_a_steps.push(probes[j] + 1);
    }

    let star = (0..probes.len())
        .max_by_key(|&j| (credit[j], std::cmp::Reverse(j)))
        .expect("at least one probe");
    let point = probes[star];
    let world_b_steps: Vec<usize> = world_a_steps
        .iter()
        .zip(&credited)
        .map(|(&x, &j)| if j == star { point } else { x })
        .collect();

    let t = rounds as f64;
    let frac = |steps: &[usize]| steps.iter().filter(|&&x| x <= point).count() as f64 / t;
    let world_a_value = frac(&world_a_steps);
    let world_b_value = frac(&world_b_steps);
    let estimate_at_point = est.report()?.estimate.at(point);
    let unqueried_rounds = credit[star];
    let ambiguity = unqueried_rounds as f64 / (2.0 * t);
    Ok(AttackCertificate {
        point,
        rounds,
        unqueried_rounds,
        ambiguity,
        estimate_at_point,
        world_a_value,
        world_b_value,
        worst_error: (estimate_at_point - world_a_value)
            .abs()
            .max((estimate_at_point - world_b_value).abs()),
        certified: ambiguity > eps,
        world_a_steps,
        world_b_steps,
        transcript,
    })
}

/// Replays both worlds on fresh estimators and checks that each reproduces
/// the recorded transcript and that the final estimates coincide.
pub fn verify_consistency<E, F>(factory: F, cert: &AttackCertificate) -> Result<bool>
where
    E: Estimator,
    F: Fn() -> Result<E>,
{
    let replay = |steps: &[usize]| -> Result<Option<Vec<f64>>> {
        let mut est = factory()?;
        let n = est.domain();
        for (x, recorded) in steps.iter().zip(&cert.transcript) {
            let v = MonotoneFunction::step(n, *x)?;
            let round = QueryRound::observe(&v, est.queries()?)?;
            if &round != recorded {
                return Ok(None);
            }
            est.observe(round.answers())?;
        }
        Ok(Some(est.report()?.estimate.values))
    };
    let a = replay(&cert.world_a_steps)?;
    let b = replay(&cert.world_b_steps)?;
    Ok(a.is_some() && a == b)
}

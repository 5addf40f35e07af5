//! Interval bounds on `v_t(i)` deduced from one round of threshold feedback.
//!
//! With sentinels `(q_0, y_0) = (0, 0)` and `(q_{k+1}, y_{k+1}) = (n + 1, 1)`,
//! the tightest bounds are
//! `lower(i) = max { y_j : q_j <= i }` and `upper(i) = min { y_j : q_j >= i }`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::MonotoneFunction;

/// Sorted query points and the feedback observed at them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRound {
    queries: Vec<usize>,
    answers: Vec<f64>,
}

impl QueryRound {
    pub fn new(queries: Vec<usize>, answers: Vec<f64>, n: usize) -> Result<Self> {
        validate_queries(&queries, n)?;
        validate_answers(&answers, queries.len())?;
        Ok(Self { queries, answers })
    }

    /// Evaluates `v` at each query point.
    pub fn observe(v: &MonotoneFunction, queries: Vec<usize>) -> Result<Self> {
        let answers = queries.iter().map(|&q| v.eval(q)).collect();
        Self::new(queries, answers, v.n())
    }

    pub fn queries(&self) -> &[usize] {
        &self.queries
    }

    pub fn answers(&self) -> &[f64] {
        &self.answers
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub width: Vec<f64>,
}

pub fn bounds_from_feedback(round: &QueryRound, n: usize) -> Result<RoundBounds> {
    validate_queries(&round.queries, n)?;
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    fill_bounds(&round.queries, &round.answers, &mut lower, &mut upper);
    let width = upper.iter().zip(&lower).map(|(u, l)| u - l).collect();
    Ok(RoundBounds {
        lower,
        upper,
        width,
    })
}

pub(crate) fn validate_queries(queries: &[usize], n: usize) -> Result<()> {
    if let Some(&q) = queries.iter().find(|&&q| q == 0 || q > n) {
        return Err(Error::Contract(format!("query {q} outside [1, {n}]")));
    }
    if queries.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Contract("queries are not sorted".into()));
    }
    Ok(())
}

pub(crate) fn validate_answers(answers: &[f64], expected: usize) -> Result<()> {
    if answers.len() != expected {
        return Err(Error::Contract(format!(
            "expected {expected} answers, got {}",
            answers.len()
        )));
    }
    if let Some(a) = answers.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Contract(format!("answer {a} outside [0, 1]")));
    }
    if answers.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Contract("answers are not sorted".into()));
    }
    Ok(())
}

/// Fills `lower`/`upper` from feedback indexed `0..=k+1`.
///
/// `value(j)` gives the feedback attached to index `j`, with `j = 0` and
/// `j = k + 1` the sentinels. `lower(i)` reads the largest index whose query
/// is `<= i`, `upper(i)` the smallest index whose query is `>= i`. When the
/// values are sorted this is the max/min definition.
pub(crate) fn fill_indexed(
    queries: &[usize],
    value: impl Fn(usize) -> f64,
    lower: &mut [f64],
    upper: &mut [f64],
) {
    let k = queries.len();
    // at_most: number of queries <= i; below: number of queries < i
    let mut at_most = 0;
    let mut below = 0;
    for i in 1..=lower.len() {
        while at_most < k && queries[at_most] <= i {
            at_most += 1;
        }
        while below < k && queries[below] < i {
            below += 1;
        }
        lower[i - 1] = value(at_most);
        upper[i - 1] = value(below + 1);
    }
}

pub(crate) fn fill_bounds(queries: &[usize], answers: &[f64], lower: &mut [f64], upper: &mut [f64]) {
    let k = queries.len();
    fill_indexed(
        queries,
        |j| {
            if j == 0 {
                0.0
            } else if j > k {
                1.0
            } else {
                answers[j - 1]
            }
        },
        lower,
        upper,
    );
}

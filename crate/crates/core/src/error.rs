use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Malformed queries, answers or function values.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("estimator has not completed any rounds")]
    ZeroRounds,

    /// Query/answer calls made out of order.
    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("round {round} needs {needed} queries but the budget is {budget}")]
    BudgetExceeded {
        round: usize,
        needed: usize,
        budget: usize,
    },

    #[error("unsupported adversary: {0}")]
    UnsupportedAdversary(String),

    #[error("unsupported estimator: {0}")]
    UnsupportedEstimator(String),

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error(
        "inadmissible hard instance (n={n}, eps={eps}); nearest admissible pair is n={suggested_n}, eps={suggested_eps}"
    )]
    Inadmissible {
        n: usize,
        eps: f64,
        suggested_n: usize,
        suggested_eps: f64,
    },

    #[error("cannot certify: budget {k} leaves no unqueried point among n={n}")]
    CannotCertify { n: usize, k: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub(crate) fn ensure_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

use thiserror::Error;

/// Errors shared by the symbolic and analytic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("term budget exceeded: expansion needs more than {budget} terms")]
    TermBudgetExceeded { budget: usize },

    #[error("operation requires a finite weight, but alpha = -inf")]
    AlphaNotFinite,

    #[error("dominance unavailable: delta > d with alpha > gamma/(delta-d); only the weighted closed form applies")]
    DominanceUnavailable,

    #[error("wrong case for this evaluator: requires {required}")]
    WrongCase { required: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exponents of h(1,c) are not congruent modulo the weight denominator")]
    DecompositionFailure,
}

pub type Result<T> = std::result::Result<T, Error>;

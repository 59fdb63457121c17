use thiserror::Error;

/// Errors raised by the mode-structure computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Gauss-Hermite node iteration did not converge for rule order {order}")]
    RuleNotConverged { order: usize },

    #[error("Gauss-Hermite rule order {requested} exceeds the supported maximum of {max}")]
    RuleOrderTooLarge { requested: usize, max: usize },

    #[error(
        "rule order {rule_order} cannot resolve polynomial degree {degree} (needs order >= {needed}) for {context}"
    )]
    QuadratureUnderresolved {
        rule_order: usize,
        degree: usize,
        needed: usize,
        context: String,
    },

    #[error("quadrature not converged: doubling the rule changed the result by {change:e} (tolerance {tolerance:e})")]
    QuadratureNotConverged { change: f64, tolerance: f64 },

    #[error("Q_{m} tail at a={a} not converged at n_max={n_max}: last term carries {ratio:e} of the sum")]
    UnconvergedTail {
        m: u32,
        a: f64,
        n_max: u32,
        ratio: f64,
    },

    #[error("probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("conversion block of order {order} is not unitary (max deviation {deviation:e})")]
    NonUnitaryBlock { order: u32, deviation: f64 },

    #[error("state order {order} exceeds the supported conversion order {max}")]
    TruncationOverflow { order: u32, max: u32 },

    #[error("state must be normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("label {label} does not belong to the {basis} basis")]
    BasisMismatch { label: String, basis: String },

    #[error("malformed state file: {0}")]
    MalformedState(String),

    #[error("label {label} exceeds truncation order {truncation_order}")]
    LabelOutOfRange {
        label: String,
        truncation_order: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pushforward polynomial is constant; no integration-by-parts identity exists")]
    DegeneratePushforward,

    #[error("inconsistent search bounds: {0}")]
    InconsistentBounds(String),

    #[error("zero operator has no normal form")]
    ZeroOperator,

    #[error("conjectured polynomial must be nonzero")]
    ZeroConjecture,

    #[error("result has status `{0}`; a found operator is required")]
    NotFound(&'static str),

    #[error("moment recursion is not closed: {0}")]
    RecursionNotClosed(String),

    #[error("insufficient seed moments: need at least {needed}, got {given}")]
    InsufficientSeeds { needed: usize, given: usize },

    #[error("seed moment mu_{index} = {seed} contradicts the operator, which forces {forced}")]
    SeedMismatch { index: usize, seed: String, forced: String },

    #[error("unknown catalog key `{0}`")]
    UnknownCatalogKey(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("quadrature rule with {n} nodes failed moment validation at degree {degree} (relative error {error:e})")]
    QuadratureValidation { n: usize, degree: usize, error: f64 },

    #[error("test function `{name}` has no derivative of order {order}")]
    DerivativeUnavailable { name: String, order: usize },

    #[error("Bessel series overflowed at x = {0}")]
    BesselOverflow(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

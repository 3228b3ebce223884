use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divisor has zero constant term")]
    ZeroConstantDivisor,

    #[error("square root requires constant term 1")]
    BadConstantTerm,

    #[error("inner series of a composition must have zero constant term")]
    NonzeroInnerConstant,

    #[error("degree caps only guarantee order {guaranteed}, but order {requested} was requested")]
    DegreeCapTooLow { guaranteed: usize, requested: usize },

    #[error("grammar iteration did not become stationary within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("size {requested} exceeds the brute-force cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("argument outside the domain of the closed form: {0}")]
    OutOfDomain(String),

    #[error("no sign change found: {0}")]
    RootNotFound(String),

    #[error("first sign change lies at the boundary of the search interval")]
    RootAtBoundary,

    #[error("accelerated estimates disagree by {spread:e} (tolerance {tolerance:e})")]
    PoorConvergence { spread: f64, tolerance: f64 },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("coefficient {index} is not an integer")]
    NonInteger { index: usize },

    #[error("series order {available} is too small; need {needed}")]
    OrderTooSmall { available: usize, needed: usize },
}

use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("associativity fails at ({x}, {y}, {z})")]
    AssociativityViolation { x: usize, y: usize, z: usize },
    #[error("element {x} breaks the identity law")]
    IdentityViolation { x: usize },
    #[error("action law fails: {0}")]
    ActionViolation(String),
    #[error("enumeration of {requested} items exceeds the limit of {limit}")]
    ResourceLimit { requested: u128, limit: u128 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("carrier mismatch: {left} vs {right} points")]
    CarrierMismatch { left: usize, right: usize },
    #[error("chain level {level} does not refine level {prev}", prev = .level - 1)]
    ChainNotMonotone { level: usize },
    #[error("not an ultra-pseudometric: {0}")]
    InvalidMetric(String),
    #[error("invalid ring endomorphism: {0}")]
    InvalidEndomorphism(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error(
        "relation is not an equivalence: ({x}, {y}) and ({y}, {z}) related but not ({x}, {z})"
    )]
    NotTransitive { x: usize, y: usize, z: usize },
    #[error("precondition unverified: {0}")]
    PreconditionUnverified(String),
    #[error("map is not 1-Lipschitz at ({x}, {y})")]
    NotLipschitz { x: usize, y: usize },
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("index {index} out of range for {size} points")]
    OutOfRange { index: usize, size: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

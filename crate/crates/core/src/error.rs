use thiserror::Error;

use crate::fields::FieldError;
use crate::polyexpr::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("coordinate vector is zero")]
    ZeroVector,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("enumeration needs {cost} evaluations, budget is {budget}")]
    BudgetExceeded { cost: u128, budget: u64 },
    #[error("every component of the morphism vanishes at {point:?}")]
    BasePointHit { point: Vec<u32> },
    #[error("invalid variety: {0}")]
    InvalidVariety(String),
    #[error("collision sum {collision_sum} exceeds |X|^2 = {max}")]
    InconsistentCollisionSum { collision_sum: u128, max: u128 },
    #[error("t must be positive")]
    NonpositiveT,
    #[error("dimension must be at least 1")]
    DimensionTooSmall,
    #[error("fit needs at least 3 points with nonzero counts, got {usable}")]
    FitUnderdetermined { usable: usize },
    #[error("declared dimension {declared} disagrees with the point-count estimate {estimated} over GF({q})")]
    DimensionCheckFailed { declared: u32, estimated: i64, q: u64 },
    #[error("affine cone count {cone} is inconsistent with {points} projective points")]
    ConeMismatch { cone: u64, points: u64 },
    #[error("at least 2 samples are required")]
    TooFewSamples,
    #[error("invalid scenario: {0}")]
    Scenario(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::monotone::CycleWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is not listed on the tabulated cost grid")]
    OffGrid,

    #[error("index {index} out of range for {len} marginals")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("pair indices must satisfy i < j, got ({0}, {1})")]
    UnorderedPair(usize, usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("enumeration of order {order} needs {required} evaluations, cap is {cap}")]
    OrderTooLarge { order: usize, required: u128, cap: u128 },

    #[error("brute force budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("set is not c-cyclically monotone (cycle gain {})", .0.gain)]
    NotCyclicallyMonotone(Box<CycleWitness>),

    #[error("base point is not in the first projection of the pairs")]
    BasePointNotInProjection,

    #[error("base point is not in gamma")]
    BasePointNotInGamma,

    #[error("potential is improper (no finite value)")]
    ImproperInput,

    #[error("point lies outside the potential's domain")]
    OutsideDomain,

    #[error("projection ({}, {}) is not cyclically monotone (cycle gain {})", .i + 1, .j + 1, .cycle.gain)]
    ProjectionNotMonotone {
        i: usize,
        j: usize,
        cycle: Box<CycleWitness>,
    },

    #[error("potential {marginal} is +inf at a point of gamma")]
    UndefinedOnGamma { marginal: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("inversion failed: {0}")]
    InversionFailure(String),

    #[error("matrices {0} and {1} do not commute")]
    NotCommuting(usize, usize),

    #[error("matrix {0} is not positive definite")]
    NotPositiveDefinite(usize),

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("all marginals must be one-dimensional")]
    NotOneDimensional,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

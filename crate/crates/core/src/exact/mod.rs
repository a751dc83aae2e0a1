//! Exact rational arithmetic, linear algebra and polyhedral feasibility.
//!
//! Nothing in here touches floating point. Every routine is a pure function
//! of its inputs and produces the same output bit for bit on every call.

mod fm;
mod linalg;
mod rat;

pub use fm::{feasible_witness, is_bounded, LinearConstraint, Relation};
pub use linalg::{determinant, nullspace, rank, solve_affine, AffineSolution, RatMat, RatVec};
pub use rat::{ParseRatError, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("region is empty")]
    EmptyRegion,
}

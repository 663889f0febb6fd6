//! Exact scalars, sparse vectors/matrices with id-preserving blocks, and an
//! exact elimination fallback solver.

mod eliminate;
mod scalar;
mod sparse;

pub use eliminate::{exact_eliminate_solve, rank, Elimination};
pub use scalar::{ParseScalarError, Scalar};
pub use sparse::{AlgebraError, Cochain, Id, SignedSparseMatrix};

//! Discrete vector potentials on tetrahedral meshes.
//!
//! Given a face cochain i with zero discrete divergence, this crate finds an
//! edge cochain h with C h = i, where C is the face-edge incidence matrix:
//! an exact inverse of the discrete curl. Instead of eliminating on the
//! sparse matrix, the solver builds acyclic matchings of basis elements
//! (free and flat collapses) whose matched block is upper triangular by
//! construction, back-substitutes, and recurses on the critical sub-basis
//! when the matching is not complete. Spanning-tree solvers cover the
//! analogous gradient and divergence problems, and the classical spanning
//! tree technique (STT) is included for comparison.
//!
//! All arithmetic is exact rational; residuals are asserted to be zero, not
//! small.

pub mod algebra;
pub mod complex;
pub mod generators;
pub mod io;
pub mod matching;
pub mod solver;

mod rng;

pub use algebra::{Cochain, Id, Scalar, SignedSparseMatrix};
pub use complex::{CellComplex, ValidationReport};
pub use generators::{cube_grid, furch_ball, random_solenoidal_field, GridSpec, KnotPath};
pub use matching::{Matching, Selection, SpanningTree, SttOutcome};
pub use solver::{
    solve_divergence_potential, solve_gradient_potential, solve_vector_potential, BasisLedger,
    SolveOptions, SolveTrace,
};

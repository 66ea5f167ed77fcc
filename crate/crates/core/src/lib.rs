//! Certifying exact treewidth by recursion on edge contractions.
//!
//! [`solver::compute_treewidth`] returns an optimal tree-decomposition
//! together with a minimal contraction of the input of the same width.

pub mod bitset;
pub mod bridge;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod hpid;
pub mod io;
pub mod oracle;
pub mod pmc;
pub mod solver;

pub use bitset::VertexSet;
pub use decomposition::TreeDecomposition;
pub use error::{DecompositionError, GraphError, ParseError, PmcError, SolveError};
pub use graph::{Contractor, Graph};
pub use pmc::{PmcSet, Width};
pub use solver::{
    compute_treewidth, compute_treewidth_with, verify_certificate, Certificate, SolverConfig,
};

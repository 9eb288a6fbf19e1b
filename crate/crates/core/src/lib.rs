//! Sparsest null-space bases and structured row-space bases for
//! zero-diagonal matrices whose nonzero pattern is a forest.
//!
//! Every such matrix `M` is related to the adjacency matrix `A(F)` of its
//! pattern by nonsingular diagonal scalings: `x` is in Null(M) iff `D x` is
//! in Null(A(F)) for the scaling `D` built in [`scalation`], and the row
//! space of M is the image of the row space of A(F) under the
//! rank-normalization of [`rank`]. The combinatorial side (matching,
//! support, a {-1, 0, 1} sparsest basis of the forest) lives in [`kernel`].

pub mod cli;
pub mod error;
pub mod field;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod oracle;
pub mod rank;
pub mod scalation;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use graph::Forest;
pub use kernel::{Basis, MatchingInfo, SupportInfo};
pub use matrix::{AcyclicMatrix, SparseVector};
pub use oracle::Oracle;
pub use scalation::DiagonalScaling;

//! Galerkin boundary elements for mixed Dirichlet-Neumann problems of the
//! Helmholtz and Poisson equations on closed triangulated surfaces.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive
// values; index loops read better in the small fixed-size kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod measure;
pub mod operators;
pub mod quadrature;
pub mod solver;
pub mod verify;

pub use error::{BemError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

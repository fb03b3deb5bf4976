//! Sparse-recovery laboratory.
//!
//! L₂Boosting (matching pursuit with a step length), Lasso coordinate descent
//! and basis pursuit along a λ-path, certifiers for cone, restricted nullspace,
//! restricted eigenvalue, restricted isometry and spark properties, and an
//! explicit instance family on which boosting provably never touches the
//! active set while ℓ₁ methods recover it.
//!
//! Indices are 0-based in the API. Every file written by [`report`] and the
//! CLI uses 1-based column indices.

pub mod boosting;
pub mod counterexample;
pub mod error;
pub mod io;
pub mod lasso;
pub mod linalg;
pub mod properties;
pub mod report;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;

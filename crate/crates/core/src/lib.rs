//! Statevector simulation of quantum ridge regression: prediction of a new
//! response and regularization-parameter selection, both checked against an
//! exact SVD-based ridge oracle.

pub mod alpha;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod predict;
pub mod qprimitives;
pub mod qstate;

pub use error::{Error, Result};

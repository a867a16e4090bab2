//! Real dense linear algebra: matrices, a Jacobi SVD and eigensolver, and the
//! closed-form ridge-regression oracle.

mod dense;
mod eigen;
mod ridge;
mod svd;

pub use dense::{RealMatrix, RealVector};
pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use ridge::{
    argmin_prefer_larger, classical_alpha_argmin, classical_loss, filter_factor, fitted_values,
    residual_floor, ridge_predict, ridge_weights, ridge_weights_direct, shrinkage, RidgeSolution,
    LOSS_TIE_TOLERANCE,
};
pub use svd::{svd, SvdResult, DEFAULT_LAMBDA_CUTOFF};

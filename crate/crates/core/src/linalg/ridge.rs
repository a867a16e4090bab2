//! Exact ridge regression in spectral form. This is the oracle every quantum
//! pipeline in the crate is validated against.

use super::dense::{RealMatrix, RealVector};
use super::svd::SvdResult;
use crate::error::{Error, Result};

/// Losses closer than this are treated as tied; ties go to the larger alpha.
pub const LOSS_TIE_TOLERANCE: f64 = 1e-12;

const OLR_CONDITION_FLOOR: f64 = 1e-12;
const UNIT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSolution {
    pub alpha: f64,
    pub weights: RealVector,
}

/// Spectral shrinkage `σ_r = λ_r / (λ_r² + α)`.
pub fn shrinkage(lambda: f64, alpha: f64) -> f64 {
    lambda / (lambda * lambda + alpha)
}

/// Fit-retention factor `λ_r² / (λ_r² + α)`; zero for a null direction.
pub fn filter_factor(lambda_sq: f64, alpha: f64) -> f64 {
    let denom = lambda_sq + alpha;
    if denom == 0.0 {
        0.0
    } else {
        lambda_sq / denom
    }
}

fn check_alpha(svd: &SvdResult, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be finite and ≥ 0, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        let values = svd.singular_values();
        let smallest = values[values.len() - 1];
        if smallest < OLR_CONDITION_FLOOR * values[0] {
            return Err(Error::IllConditioned(smallest));
        }
    }
    Ok(())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// `w = Σ_r σ_r (u_r·y) v_r`.
pub fn ridge_weights(svd: &SvdResult, y: &RealVector, alpha: f64) -> Result<RidgeSolution> {
    let (m, n) = svd.shape();
    check_len(m, y.len())?;
    check_alpha(svd, alpha)?;
    let mut w = vec![0.0; n];
    for r in 0..svd.rank() {
        let lambda = svd.singular_values()[r];
        let coeff = shrinkage(lambda, alpha) * svd.left_vector(r).dot(y);
        for (wi, vi) in w.iter_mut().zip(svd.right_vector(r).iter()) {
            *wi += coeff * vi;
        }
    }
    Ok(RidgeSolution {
        alpha,
        weights: RealVector(w),
    })
}

pub fn ridge_predict(solution: &RidgeSolution, x_new: &RealVector) -> Result<f64> {
    check_len(solution.weights.len(), x_new.len())?;
    Ok(solution.weights.dot(x_new))
}

/// `ŷ = Σ_r [λ_r² / (λ_r² + α)] (u_r·y) u_r`.
pub fn fitted_values(svd: &SvdResult, y: &RealVector, alpha: f64) -> Result<RealVector> {
    let (m, _) = svd.shape();
    check_len(m, y.len())?;
    check_alpha(svd, alpha)?;
    let mut fitted = vec![0.0; m];
    for r in 0..svd.rank() {
        let lambda = svd.singular_values()[r];
        let u = svd.left_vector(r);
        let coeff = filter_factor(lambda * lambda, alpha) * u.dot(y);
        for (f, ui) in fitted.iter_mut().zip(u.iter()) {
            *f += coeff * ui;
        }
    }
    Ok(RealVector(fitted))
}

/// `E(α) = ‖ŷ − y‖²` for a unit-norm target.
pub fn classical_loss(svd: &SvdResult, y: &RealVector, alpha: f64) -> Result<f64> {
    let norm_sq = y.dot(y);
    if (norm_sq - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NotNormalized(norm_sq));
    }
    let fitted = fitted_values(svd, y, alpha)?;
    Ok(fitted
        .iter()
        .zip(y.iter())
        .map(|(f, t)| (f - t) * (f - t))
        .sum())
}

/// Squared mass of `y` outside the retained column space; the floor of `E(α)`.
pub fn residual_floor(svd: &SvdResult, y: &RealVector) -> f64 {
    let inside: f64 = (0..svd.rank())
        .map(|r| svd.left_vector(r).dot(y).powi(2))
        .sum();
    (y.dot(y) - inside).max(0.0)
}

/// Index of the minimum of `losses`, ties (within [`LOSS_TIE_TOLERANCE`])
/// resolved toward the larger alpha.
pub fn argmin_prefer_larger(alphas: &[f64], losses: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..alphas.len().min(losses.len()) {
        best = match best {
            None => Some(i),
            Some(b) => {
                let gap = losses[i] - losses[b];
                if gap < -LOSS_TIE_TOLERANCE
                    || (gap.abs() <= LOSS_TIE_TOLERANCE && alphas[i] > alphas[b])
                {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

pub fn classical_alpha_argmin(svd: &SvdResult, y: &RealVector, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let losses = grid
        .iter()
        .map(|&a| classical_loss(svd, y, a))
        .collect::<Result<Vec<_>>>()?;
    let best = argmin_prefer_larger(grid, &losses).ok_or(Error::EmptyGrid)?;
    Ok(grid[best])
}

/// Closed form `(XᵀX + αI)⁻¹ Xᵀ y` through a linear solve. Independent of the
/// spectral route, used to cross-check it.
pub fn ridge_weights_direct(x: &RealMatrix, y: &RealVector, alpha: f64) -> Result<RealVector> {
    check_len(x.rows(), y.len())?;
    let xt = x.transpose();
    let mut gram = xt.matmul(x)?;
    for i in 0..gram.rows() {
        gram.set(i, i, gram.get(i, i) + alpha);
    }
    let rhs = xt.matvec(y)?;
    gram.solve(&rhs)
}

//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.

use super::dense::{dot, RealMatrix, RealVector};
use crate::error::{Error, Result};

/// Relative truncation threshold used when the caller has no opinion.
pub const DEFAULT_LAMBDA_CUTOFF: f64 = 1e-12;

const ORTHOGONALITY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Reduced decomposition `X = Σ_r λ_r u_r v_rᵀ` over the retained spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    u: RealMatrix,
    v: RealMatrix,
    singular_values: RealVector,
    input_rows: usize,
    input_cols: usize,
}

impl SvdResult {
    /// Left singular vectors as the columns of an M×R matrix.
    pub fn u(&self) -> &RealMatrix {
        &self.u
    }

    /// Right singular vectors as the columns of an N×R matrix.
    pub fn v(&self) -> &RealMatrix {
        &self.v
    }

    /// Retained singular values, descending.
    pub fn singular_values(&self) -> &RealVector {
        &self.singular_values
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `λ_max / λ_min` over the retained values.
    pub fn condition_number(&self) -> f64 {
        self.singular_values[0] / self.singular_values[self.rank() - 1]
    }

    /// Shape `(M, N)` of the decomposed matrix.
    pub fn shape(&self) -> (usize, usize) {
        (self.input_rows, self.input_cols)
    }

    pub fn left_vector(&self, r: usize) -> RealVector {
        self.u.column(r)
    }

    pub fn right_vector(&self, r: usize) -> RealVector {
        self.v.column(r)
    }

    /// `Σ_r λ_r²`, the squared Frobenius norm of the retained part.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.singular_values.iter().map(|l| l * l).sum()
    }

    /// Eigenvalues `λ_r² / Σ λ²` of the trace-one Gram operator.
    pub fn normalized_spectrum(&self) -> Vec<f64> {
        let total = self.frobenius_norm_sq();
        self.singular_values.iter().map(|l| l * l / total).collect()
    }

    pub fn reconstruct(&self) -> RealMatrix {
        let (m, n) = self.shape();
        let mut out = RealMatrix::zeros(m, n);
        for r in 0..self.rank() {
            let l = self.singular_values[r];
            for i in 0..m {
                let ui = l * self.u.get(i, r);
                for j in 0..n {
                    out.set(i, j, out.get(i, j) + ui * self.v.get(j, r));
                }
            }
        }
        out
    }
}

/// Computes the SVD of `x`, discarding singular values `λ ≤ lambda_cutoff · λ_1`.
pub fn svd(x: &RealMatrix, lambda_cutoff: f64) -> Result<SvdResult> {
    if !(0.0..1.0).contains(&lambda_cutoff) {
        return Err(Error::InvalidConfig(format!(
            "lambda_cutoff must lie in [0, 1), got {lambda_cutoff}"
        )));
    }
    if x.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let (m, n) = (x.rows(), x.cols());
    // Orthogonalize the columns of the taller orientation.
    let tall = if m >= n { x.clone() } else { x.transpose() };
    let (mut cols, mut basis) = one_sided_jacobi(&tall);

    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let lambda_1 = norms[order[0]];
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| norms[i] > 0.0 && norms[i] > lambda_cutoff * lambda_1)
        .collect();
    if keep.is_empty() {
        return Err(Error::ZeroMatrix);
    }

    let rank = keep.len();
    let tall_rows = tall.rows();
    let tall_cols = tall.cols();
    let mut left = RealMatrix::zeros(tall_rows, rank);
    let mut right = RealMatrix::zeros(tall_cols, rank);
    let mut values = Vec::with_capacity(rank);
    for (r, &i) in keep.iter().enumerate() {
        let sigma = norms[i];
        values.push(sigma);
        for (row, v) in cols[i].iter_mut().enumerate() {
            left.set(row, r, *v / sigma);
        }
        for (row, v) in basis[i].iter_mut().enumerate() {
            right.set(row, r, *v);
        }
    }
    let (u, v) = if m >= n { (left, right) } else { (right, left) };
    Ok(SvdResult {
        u,
        v,
        singular_values: RealVector(values),
        input_rows: m,
        input_cols: n,
    })
}

/// Rotates column pairs of `a` until mutually orthogonal. Returns the rotated
/// columns and the accumulated right rotation, both column-major.
fn one_sided_jacobi(a: &RealMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = a.cols();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|c| a.column(c).into_inner()).collect();
    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, i, j, c, s);
                rotate_pair(&mut basis, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, basis)
}

fn rotate_pair(vectors: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (head, tail) = vectors.split_at_mut(j);
    for (x, y) in head[i].iter_mut().zip(tail[0].iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};

/// Tolerance on Hermiticity and unit trace.
pub const DENSITY_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted as round-off.
pub const PSD_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// For matrices that are density operators by construction, such as
    /// partial traces of normalized states.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.matrix.is_square() {
            return Err(Error::Dimension {
                expected: self.matrix.rows(),
                got: self.matrix.cols(),
            });
        }
        let herm = self.matrix.hermiticity_deviation();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidConfig(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotNormalized(tr));
        }
        let min = self.min_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(Error::InvalidConfig(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix.hermitian_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }
}

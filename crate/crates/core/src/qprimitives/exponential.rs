use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix};

/// Widest clock register supported.
pub const MAX_PRECISION_BITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimationConfig {
    /// Clock register width `t`.
    pub precision_bits: usize,
    /// `t₀` in `U = e^{iρt₀}`.
    pub evolution_time: f64,
    /// Exact spectral exponential when set, otherwise `lmr_steps` slices.
    pub exact_unitary: bool,
    pub lmr_steps: usize,
}

impl Default for PhaseEstimationConfig {
    fn default() -> Self {
        Self {
            precision_bits: 10,
            evolution_time: PI,
            exact_unitary: true,
            lmr_steps: 256,
        }
    }
}

impl PhaseEstimationConfig {
    pub fn with_bits(precision_bits: usize) -> Self {
        Self {
            precision_bits,
            ..Self::default()
        }
    }

    pub fn lmr(mut self, steps: usize) -> Self {
        self.exact_unitary = false;
        self.lmr_steps = steps;
        self
    }

    pub fn lmr_slice(&self) -> f64 {
        self.evolution_time / self.lmr_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_PRECISION_BITS).contains(&self.precision_bits) {
            return Err(Error::InvalidConfig(format!(
                "precision bits {} outside 1..={MAX_PRECISION_BITS}",
                self.precision_bits
            )));
        }
        if !(self.evolution_time.is_finite() && self.evolution_time > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "evolution time {} must be positive",
                self.evolution_time
            )));
        }
        if !self.exact_unitary && self.lmr_steps == 0 {
            return Err(Error::InvalidConfig("LMR needs at least one step".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityExponential {
    /// `e^{iρt₀}` in exact mode; the product of slices otherwise.
    pub matrix: CMatrix,
    /// Nearest unitary to `matrix`, used inside circuits.
    pub unitary: CMatrix,
    /// `‖matrix − e^{iρt₀}‖` in operator norm (slice mode only).
    pub lmr_error: Option<f64>,
    /// `t₀²/Q` (slice mode only).
    pub lmr_bound: Option<f64>,
}

fn exact_exponential(rho: &DensityMatrix, t0: f64) -> Result<CMatrix> {
    rho.matrix()
        .hermitian_map(|mu| Complex64::from_polar(1.0, mu * t0))
}

/// One slice: the partial swap `e^{iSΔt} = cos Δt·I + i sin Δt·S` on the
/// target and a fresh copy of `ρ`, contracted against that copy.
pub fn lmr_slice(rho: &DensityMatrix, dt: f64) -> CMatrix {
    let d = rho.dim();
    let m = rho.matrix();
    let (c, s) = (dt.cos(), dt.sin());
    // ⟨i,a| e^{iSΔt} |j,b⟩ = c δ_ij δ_ab + i s δ_ib δ_aj, summed against ρ_ba.
    CMatrix::from_fn(d, d, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                let mut e = Complex64::new(0.0, 0.0);
                if i == j && a == b {
                    e += c;
                }
                if i == b && a == j {
                    e += Complex64::new(0.0, s);
                }
                if e != Complex64::new(0.0, 0.0) {
                    acc += e * m.get(b, a);
                }
            }
        }
        acc
    })
}

fn matrix_power(m: &CMatrix, mut n: usize) -> Result<CMatrix> {
    let mut result = CMatrix::identity(m.rows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = result.matmul(&base)?;
        }
        n >>= 1;
        if n > 0 {
            base = base.matmul(&base)?;
        }
    }
    Ok(result)
}

/// Unitary factor `K (K†K)^{-1/2}` of an invertible `K`.
pub fn polar_unitary(k: &CMatrix) -> Result<CMatrix> {
    let gram = k.adjoint().matmul(k)?;
    let inv_sqrt = gram.hermitian_map(|x| Complex64::new(1.0 / x.max(f64::MIN_POSITIVE).sqrt(), 0.0))?;
    k.matmul(&inv_sqrt)
}

/// `e^{iρt₀}`, exactly or as `Q` partial-swap slices of length `t₀/Q`.
pub fn density_exponential(
    rho: &DensityMatrix,
    t0: f64,
    cfg: &PhaseEstimationConfig,
) -> Result<DensityExponential> {
    if !(t0.is_finite() && t0 >= 0.0) {
        return Err(Error::InvalidConfig(format!("evolution time {t0} must be ≥ 0")));
    }
    let top = rho.eigenvalues()?.into_iter().fold(0.0f64, f64::max);
    let turns = top * t0 / (2.0 * PI);
    if turns >= 1.0 {
        return Err(Error::Wraparound(turns));
    }
    let exact = exact_exponential(rho, t0)?;
    if cfg.exact_unitary {
        return Ok(DensityExponential {
            unitary: exact.clone(),
            matrix: exact,
            lmr_error: None,
            lmr_bound: None,
        });
    }
    if cfg.lmr_steps == 0 {
        return Err(Error::InvalidConfig("LMR needs at least one step".into()));
    }
    let q = cfg.lmr_steps;
    let product = matrix_power(&lmr_slice(rho, t0 / q as f64), q)?;
    let error = product.sub(&exact)?.operator_norm()?;
    Ok(DensityExponential {
        unitary: polar_unitary(&product)?,
        matrix: product,
        lmr_error: Some(error),
        lmr_bound: Some(t0 * t0 / q as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_rho(values: &[f64]) -> DensityMatrix {
        let d: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        DensityMatrix::new(CMatrix::diagonal(&d)).unwrap()
    }

    #[test]
    fn projector_at_pi() {
        let u = density_exponential(&diag_rho(&[1.0, 0.0]), PI, &Default::default()).unwrap();
        let expected = CMatrix::diagonal(&[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(u.matrix.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let u = density_exponential(&diag_rho(&[0.7, 0.3]), 0.0, &Default::default()).unwrap();
        assert!(u.matrix.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn wraparound_rejected() {
        assert!(matches!(
            density_exponential(&diag_rho(&[1.0, 0.0]), 2.0 * PI, &Default::default()),
            Err(Error::Wraparound(_))
        ));
    }

    #[test]
    fn slices_approach_exact() {
        let rho = diag_rho(&[0.8, 0.2]);
        let cfg = PhaseEstimationConfig::default().lmr(256);
        let e = density_exponential(&rho, PI, &cfg).unwrap();
        let err = e.lmr_error.unwrap();
        assert!(err <= 0.05, "error {err}");
        let direct = e.matrix.sub(&exact_exponential(&rho, PI).unwrap()).unwrap();
        assert!((direct.operator_norm().unwrap() - err).abs() < 1e-12);
        assert!(e.unitary.unitarity_deviation() < 1e-10);
    }

    #[test]
    fn slice_is_partial_swap_contraction() {
        // Contract the explicit 4×4 partial swap against ρ on the copy.
        let rho = DensityMatrix::new(CMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => Complex64::new(0.6, 0.0),
            (1, 1) => Complex64::new(0.4, 0.0),
            (0, 1) => Complex64::new(0.1, -0.2),
            _ => Complex64::new(0.1, 0.2),
        }))
        .unwrap();
        let dt: f64 = 0.3;
        let swap = CMatrix::from_fn(4, 4, |r, c| {
            let (i, a) = (r >> 1, r & 1);
            let (j, b) = (c >> 1, c & 1);
            if i == b && a == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let e = CMatrix::identity(4)
            .scale(Complex64::new(dt.cos(), 0.0))
            .sub(&swap.scale(Complex64::new(0.0, -dt.sin())))
            .unwrap();
        let contracted = CMatrix::from_fn(2, 2, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += e.get(2 * i + a, 2 * j + b) * rho.matrix().get(b, a);
                }
            }
            acc
        });
        assert!(lmr_slice(&rho, dt).max_abs_diff(&contracted) < 1e-15);
    }

    #[test]
    fn exact_commutes_with_rho() {
        let rho = DensityMatrix::new(CMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => Complex64::new(0.7, 0.0),
            (1, 1) => Complex64::new(0.3, 0.0),
            (0, 1) => Complex64::new(0.2, 0.1),
            _ => Complex64::new(0.2, -0.1),
        }))
        .unwrap();
        let u = density_exponential(&rho, PI, &Default::default()).unwrap().matrix;
        let lhs = u.matmul(rho.matrix()).unwrap();
        let rhs = rho.matrix().matmul(&u).unwrap();
        assert!(lhs.sub(&rhs).unwrap().operator_norm().unwrap() < 1e-10);
        assert!(u.unitarity_deviation() < 1e-12);
    }
}

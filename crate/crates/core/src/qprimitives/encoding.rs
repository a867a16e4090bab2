use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, RealVector};
use crate::qstate::{ry_amplitude, width_for, QubitRegisterLayout, StateVector};

use super::fourier::apply_qft;

/// Name of the single-qubit flag register heralding a successful load.
pub const FLAG: &str = "flag";

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingResult {
    /// Data registers only; the flag has been post-selected and removed.
    pub state: StateVector,
    pub success_probability: f64,
    /// `‖v‖` (or `‖X‖_F`) of the raw input.
    pub source_norm: f64,
}

/// `Σ v_i² / (D · max_i v_i²)` for `D` padded basis states.
pub fn encoding_probability(values: &[f64], padded_dim: usize) -> f64 {
    let max_sq = values.iter().fold(0.0f64, |m, v| m.max(v * v));
    let total: f64 = values.iter().map(|v| v * v).sum();
    total / (padded_dim as f64 * max_sq)
}

/// State before the flag is measured: uniform superposition over the data
/// registers, then a flag rotation by `v_i / max|v|` controlled on index `i`.
/// Loading `v_i` into a value register, rotating on it and unloading it is
/// the same block-diagonal rotation, so the value register is not simulated.
pub fn prepare_flagged(values: &[f64], layout: &QubitRegisterLayout) -> Result<StateVector> {
    if values.len() > layout.dim() {
        return Err(Error::Dimension {
            expected: layout.dim(),
            got: values.len(),
        });
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Err(Error::ZeroVector);
    }
    let flag = QubitRegisterLayout::with_budget(&[(FLAG, 1)], layout.budget())?;
    let mut state = StateVector::zero(layout.concat(&flag)?);
    let data: Vec<&str> = layout.registers().iter().map(|r| r.name.as_str()).collect();
    for name in &data {
        state = apply_qft(&state, name, false)?;
    }
    let blocks: Vec<_> = (0..layout.dim())
        .map(|i| ry_amplitude(values.get(i).copied().unwrap_or(0.0) / max))
        .collect();
    state.apply_multiplexed(&data, FLAG, &blocks)
}

/// Encodes `values` (zero-padded) over `layout` by post-selecting the flag.
pub fn encode_values(values: &[f64], layout: &QubitRegisterLayout) -> Result<EncodingResult> {
    let prepared = prepare_flagged(values, layout)?;
    let (state, success_probability) = prepared.project_out(FLAG, 1)?;
    Ok(EncodingResult {
        state,
        success_probability,
        source_norm: values.iter().map(|v| v * v).sum::<f64>().sqrt(),
    })
}

/// `|v⟩ = Σ_i v_i/‖v‖ |i⟩` on a register wide enough for `v`.
pub fn amplitude_encode(v: &RealVector, register: &str) -> Result<EncodingResult> {
    let layout = QubitRegisterLayout::new(&[(register, width_for(v.len()))])?;
    encode_values(v, &layout)
}

/// `|X⟩ = Σ_{mn} x_mn/‖X‖_F |m⟩|n⟩` with rows and columns on separate registers.
pub fn encode_matrix(x: &RealMatrix, row_register: &str, col_register: &str) -> Result<EncodingResult> {
    if x.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let (wr, wc) = (width_for(x.rows()), width_for(x.cols()));
    let layout = QubitRegisterLayout::new(&[(row_register, wr), (col_register, wc)])?;
    let mut padded = vec![0.0; layout.dim()];
    for m in 0..x.rows() {
        for n in 0..x.cols() {
            padded[(m << wc) + n] = x.get(m, n);
        }
    }
    encode_values(&padded, &layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd;

    fn vector(v: &[f64]) -> RealVector {
        RealVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalizes_amplitudes() {
        let enc = amplitude_encode(&vector(&[3.0, 4.0]), "y").unwrap();
        let a = enc.state.amplitudes();
        assert!((a[0].re - 0.6).abs() < 1e-15 && (a[1].re - 0.8).abs() < 1e-15);
        assert_eq!(enc.source_norm, 5.0);
    }

    #[test]
    fn success_probability_examples() {
        let balanced = amplitude_encode(&vector(&[1.0, 1.0]), "y").unwrap();
        assert!((balanced.success_probability - 1.0).abs() < 1e-15);
        let skewed = amplitude_encode(&vector(&[1.0, 0.0]), "y").unwrap();
        // Σv² / (M max²) = 1 / (2 · 1)
        assert!((skewed.success_probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pads_to_power_of_two() {
        let v = [1.0, -2.0, 0.5];
        let enc = amplitude_encode(&vector(&v), "y").unwrap();
        assert_eq!(enc.state.amplitudes().len(), 4);
        assert!(enc.state.amplitudes()[3].norm() < 1e-15);
        assert!((enc.success_probability - encoding_probability(&v, 4)).abs() < 1e-15);
        let norm = enc.source_norm;
        for (a, x) in enc.state.amplitudes().iter().zip(v) {
            assert!((a.re - x / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_input() {
        assert_eq!(
            amplitude_encode(&vector(&[0.0, 0.0]), "y"),
            Err(Error::ZeroVector)
        );
        assert_eq!(
            encode_matrix(&RealMatrix::zeros(2, 2), "r", "c"),
            Err(Error::ZeroMatrix)
        );
    }

    #[test]
    fn identity_matrix_state() {
        let enc = encode_matrix(&RealMatrix::identity(2), "r", "c").unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [h, 0.0, 0.0, h];
        for (a, e) in enc.state.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn schmidt_weights_match_svd() {
        let x = RealMatrix::diag(&[1.0, 0.5]);
        let enc = encode_matrix(&x, "r", "c").unwrap();
        let rho = enc.state.partial_trace("r").unwrap();
        let eig = rho.eigenvalues().unwrap();
        // λ / ‖X‖_F = (1, 0.5) / √1.25
        let schmidt: Vec<f64> = eig.iter().rev().map(|e| e.sqrt()).collect();
        assert!((schmidt[0] - 1.0 / 1.25f64.sqrt()).abs() < 1e-12);
        assert!((schmidt[1] - 0.5 / 1.25f64.sqrt()).abs() < 1e-12);
        let s = svd(&x, 1e-12).unwrap();
        let spec = s.normalized_spectrum();
        assert!((eig[1] - spec[0]).abs() < 1e-12 && (eig[0] - spec[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_one_reduced_state_is_pure() {
        let x = RealMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-2.0, -4.0, -6.0]]).unwrap();
        let enc = encode_matrix(&x, "r", "c").unwrap();
        let rho = enc.state.partial_trace("r").unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, StateVector};

/// Widest register for which [`qft`] materializes a matrix.
pub const MAX_QFT_WIDTH: usize = 12;

/// Dense QFT with entries `e^{2πijk/2^w} / √(2^w)`.
pub fn qft(width: usize) -> Result<CMatrix> {
    if !(1..=MAX_QFT_WIDTH).contains(&width) {
        return Err(Error::InvalidConfig(format!(
            "QFT width {width} outside 1..={MAX_QFT_WIDTH}"
        )));
    }
    let n = 1usize << width;
    let scale = 1.0 / (n as f64).sqrt();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        let angle = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(scale, angle)
    }))
}

/// Applies the QFT (or its inverse) to one register with an FFT per fiber.
/// Equivalent to `apply_unitary(&qft(w), ...)` without the dense matrix.
pub fn apply_qft(state: &StateVector, register: &str, inverse: bool) -> Result<StateVector> {
    let qubits = state.positions(&[register])?;
    let n = 1usize << qubits.len();
    // The QFT sign convention matches the FFT's inverse direction.
    let direction = if inverse {
        FftDirection::Forward
    } else {
        FftDirection::Inverse
    };
    let fft = FftPlanner::new().plan_fft(n, direction);
    let scale = 1.0 / (n as f64).sqrt();
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut out = state.clone();
    out.for_each_fiber(&qubits, |fiber| {
        fft.process_with_scratch(fiber, &mut scratch);
        fiber.iter_mut().for_each(|a| *a *= scale);
    });
    Ok(out)
}

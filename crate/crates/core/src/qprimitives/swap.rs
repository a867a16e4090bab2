use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{hadamard, QubitRegisterLayout, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTestEstimate {
    /// Recovered overlap: `⟨a|b⟩` (signed) or `|⟨a|b⟩|²` (plain).
    pub estimate: f64,
    /// Observed success frequency, or the exact probability when `shots == 0`.
    pub probability: f64,
    pub exact_probability: f64,
    pub shots: usize,
}

impl SwapTestEstimate {
    fn new(exact_probability: f64, shots: usize, hits: Option<usize>) -> (f64, Self) {
        let probability = match hits {
            Some(h) => h as f64 / shots as f64,
            None => exact_probability,
        };
        (
            probability,
            Self {
                estimate: 0.0,
                probability,
                exact_probability,
                shots,
            },
        )
    }
}

fn check_shapes(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.layout().shape() != b.layout().shape() {
        return Err(Error::Layout(format!(
            "swap test operands have shapes {:?} and {:?}",
            a.layout().shape(),
            b.layout().shape()
        )));
    }
    Ok(())
}

fn outcome_count(state: &StateVector, register: &str, outcome: &str, shots: usize, seed: u64) -> Result<Option<usize>> {
    if shots == 0 {
        return Ok(None);
    }
    Ok(Some(
        state
            .sample(register, shots, seed)?
            .get(outcome)
            .copied()
            .unwrap_or(0),
    ))
}

/// Sign-revealing swap test. Prepares `(|0⟩|a⟩ + |1⟩|b⟩)/√2`, swap-tests the
/// branch qubit against `(|0⟩ − |1⟩)/√2` and reads success with probability
/// `1/4 + ⟨a|b⟩/4`. Returns `4·Pr − 1`; `shots == 0` means exact.
pub fn signed_swap_test(
    a: &StateVector,
    b: &StateVector,
    shots: usize,
    seed: u64,
) -> Result<SwapTestEstimate> {
    check_shapes(a, b)?;
    let data = a.layout().num_qubits();
    let layout = QubitRegisterLayout::with_budget(
        &[("swap", 1), ("reference", 1), ("branch", 1), ("data", data)],
        a.layout().budget().max(data + 3),
    )?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let block = 1usize << data;
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    // swap = 0; reference carries |−⟩; branch selects a or b.
    for (reference, sign) in [(0usize, h), (1, -h)] {
        for (branch, source) in [(0usize, a), (1, b)] {
            let base = ((reference << 1) | branch) * block;
            for (k, amp) in source.amplitudes().iter().enumerate() {
                amps[base + k] = amp * sign * h;
            }
        }
    }
    let state = StateVector::new(layout, amps)?
        .apply_unitary(&hadamard(), &["swap"])?
        .apply_controlled_swap(("swap", 0), "reference", "branch")?
        .apply_unitary(&hadamard(), &["swap"])?;
    let exact = state.marginal("swap")?[1];
    let hits = outcome_count(&state, "swap", "1", shots, seed)?;
    let (p, mut est) = SwapTestEstimate::new(exact, shots, hits);
    est.estimate = 4.0 * p - 1.0;
    Ok(est)
}

/// Textbook swap test: success (ancilla 0) with probability
/// `1/2 + |⟨a|b⟩|²/2`. Returns `2·Pr − 1`.
pub fn plain_swap_test(
    a: &StateVector,
    b: &StateVector,
    shots: usize,
    seed: u64,
) -> Result<SwapTestEstimate> {
    check_shapes(a, b)?;
    let data = a.layout().num_qubits();
    let ancilla = QubitRegisterLayout::with_budget(&[("swap", 1)], 2 * data + 1)?;
    let left = QubitRegisterLayout::with_budget(&[("left", data)], 2 * data + 1)?;
    let right = QubitRegisterLayout::with_budget(&[("right", data)], 2 * data + 1)?;
    let state = StateVector::zero(ancilla)
        .tensor(&StateVector::new(left, a.amplitudes().to_vec())?)?
        .tensor(&StateVector::new(right, b.amplitudes().to_vec())?)?
        .apply_unitary(&hadamard(), &["swap"])?
        .apply_controlled_swap(("swap", 0), "left", "right")?
        .apply_unitary(&hadamard(), &["swap"])?;
    let exact = state.marginal("swap")?[0];
    let hits = outcome_count(&state, "swap", "0", shots, seed)?;
    let (p, mut est) = SwapTestEstimate::new(exact, shots, hits);
    est.estimate = 2.0 * p - 1.0;
    Ok(est)
}

/// One standard deviation of a signed estimate from `shots` samples at
/// success probability `p`.
pub fn signed_standard_error(p: f64, shots: usize) -> f64 {
    4.0 * (p * (1.0 - p) / shots as f64).sqrt()
}

//! Prediction of a new response: encode, estimate phases, invert the shifted
//! spectrum, uncompute, post-select, then swap-test against the query.

use crate::error::{Error, Result};
use crate::linalg::{svd, RealMatrix, RealVector, SvdResult, DEFAULT_LAMBDA_CUTOFF};
use crate::qprimitives::{
    amplitude_encode, decode_clock, density_exponential, eigen_rotation, encode_clock,
    encode_matrix, inverse_phase_estimation, is_dyadic, phase_estimation, signed_swap_test,
    EigenRotationSpec, PhaseEstimationConfig,
};
use crate::qstate::{StateVector, DEFAULT_QUBIT_BUDGET};

pub(crate) const ROW: &str = "row";
pub(crate) const COL: &str = "col";
pub(crate) const CLOCK: &str = "clock";
pub(crate) const ANCILLA: &str = "ancilla";

/// Smallest post-selection probability a pipeline accepts.
pub const STARVATION_LIMIT: f64 = 1e-12;
/// Clock residual tolerated after uncomputation on exactly representable spectra.
pub const DYADIC_RESIDUAL_LIMIT: f64 = 1e-6;
/// Distance (in clock units) under which an eigenvalue counts as representable.
pub(crate) const DYADIC_TOL: f64 = 1e-9;
/// Clock bins lighter than this are left out of readouts.
const READOUT_CUTOFF: f64 = 1e-12;
const C1_SAFETY: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C1Policy {
    /// Derived from the retained spectrum so no clock bin saturates.
    Auto,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictConfig {
    pub pe: PhaseEstimationConfig,
    pub c1_policy: C1Policy,
    /// Zero runs the swap test in exact mode.
    pub swap_test_shots: usize,
    pub seed: u64,
    pub lambda_cutoff: f64,
    pub qubit_budget: usize,
    /// Clock bins below this fraction of the smallest retained eigenvalue are
    /// treated as leakage and not inverted.
    pub floor_fraction: f64,
}

impl Default for PredictConfig {
    fn default() -> Self {
        Self {
            pe: PhaseEstimationConfig::default(),
            c1_policy: C1Policy::Auto,
            swap_test_shots: 0,
            seed: 0,
            lambda_cutoff: DEFAULT_LAMBDA_CUTOFF,
            qubit_budget: DEFAULT_QUBIT_BUDGET,
            floor_fraction: 0.5,
        }
    }
}

impl PredictConfig {
    pub fn with_bits(precision_bits: usize) -> Self {
        Self {
            pe: PhaseEstimationConfig::with_bits(precision_bits),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pe.validate()?;
        if !(self.floor_fraction > 0.0 && self.floor_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "floor fraction {} outside (0, 1]",
                self.floor_fraction
            )));
        }
        if let C1Policy::Explicit(c) = self.c1_policy {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidConfig(format!("C₁ = {c} must be positive")));
            }
        }
        Ok(())
    }
}

/// Weight found on one decoded clock value after phase estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockBin {
    pub value: usize,
    pub eigenvalue: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictOutcome {
    /// Prediction in the units of the raw data.
    pub y_prime: f64,
    /// Prediction for unit `y`, unit `x′` and `X/‖X‖_F`.
    pub y_prime_normalized: f64,
    pub p1: f64,
    pub swap_estimate: f64,
    pub c1_used: f64,
    pub clock_readout: Vec<ClockBin>,
    pub lmr_error: Option<f64>,
    /// Off-zero clock mass left after uncomputation.
    pub clock_residual: f64,
    /// `‖y‖ ‖x′‖ / ‖X‖_F`, mapping normalized to raw predictions.
    pub scale: f64,
    /// Regularization seen by the normalized problem, `α/‖X‖_F²`.
    pub alpha_normalized: f64,
    pub rotation_floor: f64,
    /// Every retained eigenvalue sits exactly on a clock value.
    pub dyadic: bool,
    pub condition_number: f64,
    pub y_success_probability: Option<f64>,
    pub x_success_probability: Option<f64>,
}

/// Spectral facts the circuit is allowed to know from classical preprocessing.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub svd: SvdResult,
    /// `λ_r² / ‖X‖_F²`, descending.
    pub normalized: Vec<f64>,
    pub frobenius: f64,
    pub dyadic: bool,
}

impl Spectrum {
    pub fn of(x: &RealMatrix, cutoff: f64, pe: &PhaseEstimationConfig) -> Result<Self> {
        let svd = svd(x, cutoff)?;
        let normalized = svd.normalized_spectrum();
        let dyadic = normalized
            .iter()
            .all(|&l| is_dyadic(l, pe.precision_bits, pe.evolution_time, DYADIC_TOL));
        Ok(Self {
            frobenius: svd.frobenius_norm_sq().sqrt(),
            svd,
            normalized,
            dyadic,
        })
    }

    pub fn smallest(&self) -> f64 {
        self.normalized.last().copied().unwrap_or(0.0)
    }

    /// The retained eigenvalue as the clock represents it.
    pub fn binned(&self, pe: &PhaseEstimationConfig) -> Vec<f64> {
        self.normalized
            .iter()
            .map(|&l| {
                let j = encode_clock(l, pe.precision_bits, pe.evolution_time);
                decode_clock(j, pe.precision_bits, pe.evolution_time)
            })
            .collect()
    }
}

pub(crate) fn check_budget(needed: usize, budget: usize) -> Result<()> {
    if needed > budget {
        return Err(Error::Layout(format!(
            "pipeline needs {needed} qubits, budget is {budget}"
        )));
    }
    Ok(())
}

pub(crate) fn clock_readout(state: &StateVector, pe: &PhaseEstimationConfig) -> Result<Vec<ClockBin>> {
    Ok(state
        .marginal(CLOCK)?
        .into_iter()
        .enumerate()
        .filter(|(_, w)| *w > READOUT_CUTOFF)
        .map(|(value, weight)| ClockBin {
            value,
            eigenvalue: decode_clock(value, pe.precision_bits, pe.evolution_time),
            weight,
        })
        .collect())
}

/// Picks the rotation floor and `C₁`. Auto: the floor sits at a fraction of
/// the smallest retained eigenvalue and `C₁` is just under the smallest
/// `λ̃² + α` the clock can report above it. Explicit: bins that would need an
/// amplitude above one are floored, and a retained eigenvalue among them is a
/// saturation error.
pub(crate) fn rotation_spec(
    spectrum: &Spectrum,
    alpha_normalized: f64,
    cfg: &PredictConfig,
) -> Result<EigenRotationSpec> {
    let pe = &cfg.pe;
    let auto_floor = cfg.floor_fraction * spectrum.smallest();
    let (constant, floor) = match cfg.c1_policy {
        C1Policy::Auto => {
            let lowest = (0..1usize << pe.precision_bits)
                .map(|j| decode_clock(j, pe.precision_bits, pe.evolution_time))
                .filter(|&v| v >= auto_floor)
                .fold(f64::INFINITY, f64::min);
            (C1_SAFETY * (lowest + alpha_normalized), auto_floor)
        }
        C1Policy::Explicit(c) => {
            let floor = auto_floor.max(c - alpha_normalized - 1e-12);
            for &l in &spectrum.binned(pe) {
                let amplitude = c / (l + alpha_normalized);
                if l < floor || amplitude > 1.0 + 1e-12 {
                    return Err(Error::RotationSaturated {
                        eigenvalue: l,
                        amplitude,
                    });
                }
            }
            (c, floor)
        }
    };
    Ok(EigenRotationSpec::inverse_shift(alpha_normalized, constant, pe.precision_bits)
        .with_floor(floor)
        .with_evolution_time(pe.evolution_time))
}

/// Output of the inverse-shift half of the pipeline: `|φ₅⟩` on rows × columns.
#[derive(Debug, Clone)]
pub(crate) struct InverseShiftRun {
    pub phi5: StateVector,
    pub p1: f64,
    pub spec: EigenRotationSpec,
    pub clock_readout: Vec<ClockBin>,
    pub lmr_error: Option<f64>,
    pub clock_residual: f64,
    pub spectrum: Spectrum,
    pub alpha_normalized: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidConfig(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    Ok(())
}

pub(crate) fn run_inverse_shift(x: &RealMatrix, alpha: f64, cfg: &PredictConfig) -> Result<InverseShiftRun> {
    cfg.validate()?;
    check_alpha(alpha)?;
    let pe = &cfg.pe;
    let spectrum = Spectrum::of(x, cfg.lambda_cutoff, pe)?;
    let alpha_normalized = alpha / (spectrum.frobenius * spectrum.frobenius);
    let encoded = encode_matrix(x, ROW, COL)?;
    check_budget(
        encoded.state.layout().num_qubits() + pe.precision_bits + 1,
        cfg.qubit_budget,
    )?;

    let rho = encoded.state.partial_trace(ROW)?;
    let exponential = density_exponential(&rho, pe.evolution_time, pe)?;
    let u = &exponential.unitary;

    let clocked = encoded.state.with_register(CLOCK, pe.precision_bits)?;
    let estimated = phase_estimation(&clocked, u, ROW, CLOCK)?;
    let readout = clock_readout(&estimated, pe)?;

    let spec = rotation_spec(&spectrum, alpha_normalized, cfg)?;
    let rotated = eigen_rotation(&estimated.with_register(ANCILLA, 1)?, ANCILLA, CLOCK, &spec)?;
    let limit = spectrum.dyadic.then_some(DYADIC_RESIDUAL_LIMIT);
    let released = inverse_phase_estimation(&rotated, u, ROW, CLOCK, limit)?;

    let p1 = released.state.marginal(ANCILLA)?[1] * released.clock_mass;
    if p1 < STARVATION_LIMIT {
        return Err(Error::Starved(p1));
    }
    let (phi5, _) = released.state.project_out(ANCILLA, 1)?;
    Ok(InverseShiftRun {
        phi5,
        p1,
        spec,
        clock_readout: readout,
        lmr_error: exponential.lmr_error,
        clock_residual: released.residual(),
        spectrum,
        alpha_normalized,
    })
}

/// Predicts `y′ = x′ᵀ w` for ridge weights `w` at regularization `alpha`.
pub fn predict(
    x: &RealMatrix,
    y: &RealVector,
    x_new: &RealVector,
    alpha: f64,
    cfg: &PredictConfig,
) -> Result<PredictOutcome> {
    if y.len() != x.rows() {
        return Err(Error::Dimension {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if x_new.len() != x.cols() {
        return Err(Error::Dimension {
            expected: x.cols(),
            got: x_new.len(),
        });
    }
    let run = run_inverse_shift(x, alpha, cfg)?;
    let (y_norm, x_norm) = (y.norm(), x_new.norm());
    let scale = y_norm * x_norm / run.spectrum.frobenius;

    // A null y or x′ has no state; its overlap with anything is zero.
    let (swap_estimate, y_success, x_success) = if y_norm == 0.0 || x_norm == 0.0 {
        (0.0, None, None)
    } else {
        let ey = amplitude_encode(y, "y")?;
        let ex = amplitude_encode(x_new, "x")?;
        let phi6 = ey.state.tensor(&ex.state)?;
        let est = signed_swap_test(&run.phi5, &phi6, cfg.swap_test_shots, cfg.seed)?;
        (
            est.estimate,
            Some(ey.success_probability),
            Some(ex.success_probability),
        )
    };
    let c1 = run.spec.constant;
    let y_prime_normalized = run.p1.sqrt() / c1 * swap_estimate;
    Ok(PredictOutcome {
        y_prime: y_prime_normalized * scale,
        y_prime_normalized,
        p1: run.p1,
        swap_estimate,
        c1_used: c1,
        clock_readout: run.clock_readout,
        lmr_error: run.lmr_error,
        clock_residual: run.clock_residual,
        scale,
        alpha_normalized: run.alpha_normalized,
        rotation_floor: run.spec.floor,
        dyadic: run.spectrum.dyadic,
        condition_number: run.spectrum.svd.condition_number(),
        y_success_probability: y_success,
        x_success_probability: x_success,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Diagnostic {
    /// Post-selection probability of the simulated circuit.
    pub measured: f64,
    /// `Σ_r λ̃_r² f(λ̃_r²)²` over the retained spectrum as the clock bins it.
    pub predicted: f64,
    pub c1_used: f64,
    pub dyadic: bool,
}

impl P1Diagnostic {
    pub fn discrepancy(&self) -> f64 {
        (self.measured - self.predicted).abs()
    }
}

/// Runs the circuit up to the ancilla post-selection and compares `p1` with
/// its closed form.
pub fn p1_diagnostic(x: &RealMatrix, alpha: f64, cfg: &PredictConfig) -> Result<P1Diagnostic> {
    let run = run_inverse_shift(x, alpha, cfg)?;
    let predicted = run
        .spectrum
        .normalized
        .iter()
        .zip(run.spectrum.binned(&cfg.pe))
        .map(|(&weight, bin)| weight * run.spec.amplitude(bin).powi(2))
        .sum();
    Ok(P1Diagnostic {
        measured: run.p1,
        predicted,
        c1_used: run.spec.constant,
        dyadic: run.spectrum.dyadic,
    })
}

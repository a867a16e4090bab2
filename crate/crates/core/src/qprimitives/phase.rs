use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qstate::{ry_amplitude, CMatrix, StateVector};

use super::exponential::MAX_PRECISION_BITS;
use super::fourier::apply_qft;

/// Mass a "clean" register may carry off `|0…0⟩`.
const CLEAN_TOL: f64 = 1e-12;
/// Rounding slack on rotation amplitudes.
const SATURATION_TOL: f64 = 1e-12;

/// Eigenvalue `λ̃²` represented by clock value `value`. Phases past the
/// midpoint of the unused interval are read as small negative eigenvalues
/// that leaked across zero.
pub fn decode_clock(value: usize, precision_bits: usize, evolution_time: f64) -> f64 {
    let n = (1usize << precision_bits) as f64;
    let mut phase = value as f64 / n;
    if phase >= 0.5 * (1.0 + evolution_time / (2.0 * PI)) {
        phase -= 1.0;
    }
    2.0 * PI * phase / evolution_time
}

/// Clock value that an exact phase estimation assigns to `lambda_sq`.
pub fn encode_clock(lambda_sq: f64, precision_bits: usize, evolution_time: f64) -> usize {
    let n = 1usize << precision_bits;
    let phase = lambda_sq * evolution_time / (2.0 * PI);
    ((phase * n as f64).round() as i64).rem_euclid(n as i64) as usize
}

/// True when `lambda_sq` sits on a clock value within `tol`.
pub fn is_dyadic(lambda_sq: f64, precision_bits: usize, evolution_time: f64, tol: f64) -> bool {
    let n = (1usize << precision_bits) as f64;
    let scaled = lambda_sq * evolution_time / (2.0 * PI) * n;
    (scaled - scaled.round()).abs() <= tol
}

fn check_clock(state: &StateVector, clock: &str) -> Result<usize> {
    let width = state.layout().width(clock)?;
    if width > MAX_PRECISION_BITS {
        return Err(Error::InvalidConfig(format!(
            "clock width {width} exceeds {MAX_PRECISION_BITS}"
        )));
    }
    let zero_mass = state.marginal(clock)?[0];
    if zero_mass < 1.0 - CLEAN_TOL {
        return Err(Error::DirtyClock(clock.to_owned()));
    }
    Ok(width)
}

fn controlled_powers(
    state: &StateVector,
    u: &CMatrix,
    target: &str,
    clock: &str,
    width: usize,
    adjoint: bool,
) -> Result<StateVector> {
    let mut power = u.clone();
    let mut out = state.clone();
    // Clock bit `b` (MSB first) carries weight 2^(width−1−b).
    for k in 0..width {
        let op = if adjoint { power.adjoint() } else { power.clone() };
        out = out.apply_controlled(&op, (clock, width - 1 - k), &[target])?;
        if k + 1 < width {
            power = power.matmul(&power)?;
        }
    }
    Ok(out)
}

/// Writes the eigenphases of `u` on `target` into the clean `clock` register.
pub fn phase_estimation(
    state: &StateVector,
    u: &CMatrix,
    target: &str,
    clock: &str,
) -> Result<StateVector> {
    let width = check_clock(state, clock)?;
    let spread = apply_qft(state, clock, false)?;
    let kicked = controlled_powers(&spread, u, target, clock, width, false)?;
    apply_qft(&kicked, clock, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClockRelease {
    /// Remaining registers after projecting the clock onto `|0…0⟩`.
    pub state: StateVector,
    /// Mass found on `|0…0⟩`.
    pub clock_mass: f64,
}

impl ClockRelease {
    pub fn residual(&self) -> f64 {
        (1.0 - self.clock_mass).max(0.0)
    }
}

/// Runs phase estimation backwards and discards the clock by projecting it
/// onto `|0…0⟩`. With `residual_limit` set, a larger off-zero mass is an error.
pub fn inverse_phase_estimation(
    state: &StateVector,
    u: &CMatrix,
    target: &str,
    clock: &str,
    residual_limit: Option<f64>,
) -> Result<ClockRelease> {
    let width = state.layout().width(clock)?;
    let spread = apply_qft(state, clock, false)?;
    let unkicked = controlled_powers(&spread, u, target, clock, width, true)?;
    let folded = apply_qft(&unkicked, clock, true)?;
    let (rest, mass) = folded.project_out(clock, 0)?;
    let release = ClockRelease {
        state: rest,
        clock_mass: mass,
    };
    if let Some(limit) = residual_limit {
        if release.residual() > limit {
            return Err(Error::ClockResidual(release.residual()));
        }
    }
    Ok(release)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationMode {
    /// Amplitude `C/(λ²+α)`.
    InverseShift,
    /// Amplitude `C·λ²/(λ²+α)`.
    Filter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRotationSpec {
    pub mode: RotationMode,
    pub alpha: f64,
    pub constant: f64,
    pub precision_bits: usize,
    pub evolution_time: f64,
    /// Decoded eigenvalues below the floor are treated as outside the
    /// retained spectrum and rotate by zero.
    pub floor: f64,
}

impl EigenRotationSpec {
    pub fn inverse_shift(alpha: f64, constant: f64, precision_bits: usize) -> Self {
        Self {
            mode: RotationMode::InverseShift,
            alpha,
            constant,
            precision_bits,
            evolution_time: PI,
            floor: 0.0,
        }
    }

    pub fn filter(alpha: f64, constant: f64, precision_bits: usize) -> Self {
        Self {
            mode: RotationMode::Filter,
            ..Self::inverse_shift(alpha, constant, precision_bits)
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn with_evolution_time(mut self, evolution_time: f64) -> Self {
        self.evolution_time = evolution_time;
        self
    }

    /// Rotation amplitude `f(λ̃²)`.
    pub fn amplitude(&self, lambda_sq: f64) -> f64 {
        if lambda_sq < 0.0 || lambda_sq < self.floor {
            return 0.0;
        }
        let denom = lambda_sq + self.alpha;
        if denom <= 0.0 {
            return 0.0;
        }
        match self.mode {
            RotationMode::InverseShift => self.constant / denom,
            RotationMode::Filter => self.constant * lambda_sq / denom,
        }
    }

    pub fn decode(&self, value: usize) -> f64 {
        decode_clock(value, self.precision_bits, self.evolution_time)
    }

    /// Checks parameters and that no decodable clock value saturates.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.constant, self.evolution_time, self.floor]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.alpha < 0.0 || self.constant <= 0.0 || self.floor < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "rotation needs α ≥ 0, C > 0, floor ≥ 0 (got α = {}, C = {}, floor = {})",
                self.alpha, self.constant, self.floor
            )));
        }
        if !(1..=MAX_PRECISION_BITS).contains(&self.precision_bits) || self.evolution_time <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "rotation decodes {} bits at t₀ = {}",
                self.precision_bits, self.evolution_time
            )));
        }
        for value in 0..1usize << self.precision_bits {
            let eigenvalue = self.decode(value);
            let amplitude = self.amplitude(eigenvalue);
            if amplitude > 1.0 + SATURATION_TOL {
                return Err(Error::RotationSaturated {
                    eigenvalue,
                    amplitude,
                });
            }
        }
        Ok(())
    }
}

/// Rotates the clean single-qubit `ancilla` by `f(λ̃²)` for every clock value.
pub fn eigen_rotation(
    state: &StateVector,
    ancilla: &str,
    clock: &str,
    spec: &EigenRotationSpec,
) -> Result<StateVector> {
    spec.validate()?;
    if state.layout().width(ancilla)? != 1 {
        return Err(Error::Layout(format!("ancilla `{ancilla}` must be one qubit")));
    }
    if state.layout().width(clock)? != spec.precision_bits {
        return Err(Error::Layout(format!(
            "clock `{clock}` is not {} bits wide",
            spec.precision_bits
        )));
    }
    if state.marginal(ancilla)?[0] < 1.0 - CLEAN_TOL {
        return Err(Error::InvalidConfig(format!("ancilla `{ancilla}` is not in |0⟩")));
    }
    let blocks: Vec<CMatrix> = (0..1usize << spec.precision_bits)
        .map(|j| ry_amplitude(spec.amplitude(spec.decode(j)).min(1.0)))
        .collect();
    state.apply_multiplexed(&[clock], ancilla, &blocks)
}

//! Regularization selection: build the fitted-value state for each candidate
//! alpha, read its loss through a signed swap test and keep the minimizer.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    argmin_prefer_larger, classical_alpha_argmin, classical_loss, RealMatrix, RealVector,
    DEFAULT_LAMBDA_CUTOFF,
};
use crate::predict::{
    check_budget, clock_readout, ClockBin, Spectrum, ANCILLA, CLOCK, COL, DYADIC_RESIDUAL_LIMIT,
    ROW, STARVATION_LIMIT,
};
use crate::qprimitives::{
    amplitude_encode, density_exponential, eigen_rotation, encode_matrix,
    inverse_phase_estimation, phase_estimation, signed_swap_test, EigenRotationSpec,
    PhaseEstimationConfig,
};
use crate::qstate::{StateVector, DEFAULT_QUBIT_BUDGET};

const RESPONSE: &str = "y";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Candidate regularization values, strictly increasing and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub count: usize,
    pub values: Vec<f64>,
}

impl AlphaGrid {
    /// `α_j = α_min + (j−1)(α_max−α_min)/(L−1)`; a single point when `L = 1`.
    pub fn linear(alpha_min: f64, alpha_max: f64, count: usize) -> Result<Self> {
        Self::check(alpha_min, alpha_max, count)?;
        let values = if count == 1 {
            vec![alpha_min]
        } else {
            let step = (alpha_max - alpha_min) / (count - 1) as f64;
            (0..count)
                .map(|j| if j + 1 == count { alpha_max } else { alpha_min + j as f64 * step })
                .collect()
        };
        Ok(Self {
            alpha_min,
            alpha_max,
            count,
            values,
        })
    }

    pub fn log(alpha_min: f64, alpha_max: f64, count: usize) -> Result<Self> {
        Self::check(alpha_min, alpha_max, count)?;
        if alpha_min <= 0.0 {
            return Err(Error::InvalidConfig(
                "log spacing needs alpha_min > 0".into(),
            ));
        }
        let values = if count == 1 {
            vec![alpha_min]
        } else {
            let ratio = (alpha_max / alpha_min).ln() / (count - 1) as f64;
            (0..count)
                .map(|j| if j + 1 == count { alpha_max } else { alpha_min * (ratio * j as f64).exp() })
                .collect()
        };
        Ok(Self {
            alpha_min,
            alpha_max,
            count,
            values,
        })
    }

    pub fn spaced(alpha_min: f64, alpha_max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        match spacing {
            Spacing::Linear => Self::linear(alpha_min, alpha_max, count),
            Spacing::Log => Self::log(alpha_min, alpha_max, count),
        }
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if values.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidConfig("alpha values must be finite and ≥ 0".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("alpha values must increase strictly".into()));
        }
        Ok(Self {
            alpha_min: values[0],
            alpha_max: values[values.len() - 1],
            count: values.len(),
            values,
        })
    }

    /// `[λ_R², λ_1²]`, i.e. `[1/κ², 1]` in units of the largest eigenvalue.
    pub fn default_for(x: &RealMatrix, count: usize, spacing: Spacing) -> Result<Self> {
        let s = crate::linalg::svd(x, DEFAULT_LAMBDA_CUTOFF)?;
        let values = s.singular_values();
        let top = values[0] * values[0];
        let bottom = top / s.condition_number().powi(2);
        if bottom >= top {
            return Self::spaced(top, top * 2.0, count, spacing);
        }
        Self::spaced(bottom, top, count, spacing)
    }

    fn check(alpha_min: f64, alpha_max: f64, count: usize) -> Result<()> {
        if count == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(alpha_min.is_finite() && alpha_max.is_finite()) || alpha_min < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha_min must be finite and ≥ 0, got {alpha_min}"
            )));
        }
        if count > 1 && alpha_max <= alpha_min {
            return Err(Error::InvalidConfig(format!(
                "alpha_max {alpha_max} must exceed alpha_min {alpha_min}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaConfig {
    pub pe: PhaseEstimationConfig,
    /// Filter constant `C₂`, at most one.
    pub c2: f64,
    pub swap_test_shots: usize,
    pub seed: u64,
    pub lambda_cutoff: f64,
    pub qubit_budget: usize,
    /// Worker threads for [`tune`]; zero uses every core.
    pub jobs: usize,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        Self {
            pe: PhaseEstimationConfig::default(),
            c2: 1.0,
            swap_test_shots: 0,
            seed: 0,
            lambda_cutoff: DEFAULT_LAMBDA_CUTOFF,
            qubit_budget: DEFAULT_QUBIT_BUDGET,
            jobs: 0,
        }
    }
}

impl AlphaConfig {
    pub fn with_bits(precision_bits: usize) -> Self {
        Self {
            pe: PhaseEstimationConfig::with_bits(precision_bits),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pe.validate()?;
        if !(self.c2 > 0.0 && self.c2 <= 1.0) {
            return Err(Error::InvalidConfig(format!("C₂ = {} outside (0, 1]", self.c2)));
        }
        Ok(())
    }
}

/// Post-selected `|φ₄⟩ ∝ Σ_r λ̃_r²/(λ̃_r²+α) ⟨u_r|y⟩ |u_r⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedState {
    pub state: StateVector,
    pub p2: f64,
    pub c2: f64,
    pub clock_readout: Vec<ClockBin>,
    pub clock_residual: f64,
    pub lmr_error: Option<f64>,
    pub dyadic: bool,
}

impl FittedState {
    /// Amplitudes of `ŷ = (√p2/C₂)|φ₄⟩` (real parts, padding included).
    pub fn fitted_vector(&self) -> Vec<f64> {
        let scale = self.p2.sqrt() / self.c2;
        self.state.amplitudes().iter().map(|a| a.re * scale).collect()
    }
}

fn unit_response(x: &RealMatrix, y: &RealVector) -> Result<RealVector> {
    if y.len() != x.rows() {
        return Err(Error::Dimension {
            expected: x.rows(),
            got: y.len(),
        });
    }
    y.normalized().ok_or(Error::ZeroVector)
}

/// Fitted-value state of the unit-normalized response at regularization
/// `alpha` (raw units).
pub fn fitted_state(x: &RealMatrix, y: &RealVector, alpha: f64, cfg: &AlphaConfig) -> Result<FittedState> {
    cfg.validate()?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidConfig(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    let y = unit_response(x, y)?;
    let pe = &cfg.pe;
    let spectrum = Spectrum::of(x, cfg.lambda_cutoff, pe)?;
    let alpha_normalized = alpha / (spectrum.frobenius * spectrum.frobenius);

    let encoded = encode_matrix(x, ROW, COL)?;
    let rho = encoded.state.partial_trace(ROW)?;
    let exponential = density_exponential(&rho, pe.evolution_time, pe)?;
    let u = &exponential.unitary;

    let response = amplitude_encode(&y, RESPONSE)?.state;
    check_budget(response.layout().num_qubits() + pe.precision_bits + 1, cfg.qubit_budget)?;
    let estimated = phase_estimation(&response.with_register(CLOCK, pe.precision_bits)?, u, RESPONSE, CLOCK)?;
    let readout = clock_readout(&estimated, pe)?;

    let spec = EigenRotationSpec::filter(alpha_normalized, cfg.c2, pe.precision_bits)
        .with_evolution_time(pe.evolution_time);
    let rotated = eigen_rotation(&estimated.with_register(ANCILLA, 1)?, ANCILLA, CLOCK, &spec)?;
    let limit = spectrum.dyadic.then_some(DYADIC_RESIDUAL_LIMIT);
    let released = inverse_phase_estimation(&rotated, u, RESPONSE, CLOCK, limit)?;

    let p2 = released.state.marginal(ANCILLA)?[1] * released.clock_mass;
    if p2 < STARVATION_LIMIT {
        return Err(Error::Starved(p2));
    }
    let (state, _) = released.state.project_out(ANCILLA, 1)?;
    Ok(FittedState {
        state,
        p2,
        c2: cfg.c2,
        clock_readout: readout,
        clock_residual: released.residual(),
        lmr_error: exponential.lmr_error,
        dyadic: spectrum.dyadic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaResult {
    pub alpha: f64,
    /// `E(α) = p2/C₂² + 1 − 2(√p2/C₂)⟨φ₄|y⟩`.
    pub loss: f64,
    pub p2: f64,
    pub fitted_overlap: f64,
    pub c2_used: f64,
}

/// `‖ŷ − y‖²` for unit `y`, assembled from the post-selection mass and a
/// signed swap test.
pub fn assemble_loss(p2: f64, c2: f64, overlap: f64) -> f64 {
    p2 / (c2 * c2) + 1.0 - 2.0 * (p2.sqrt() / c2) * overlap
}

pub fn quantum_loss(x: &RealMatrix, y: &RealVector, alpha: f64, cfg: &AlphaConfig) -> Result<AlphaResult> {
    let fitted = fitted_state(x, y, alpha, cfg)?;
    let target = amplitude_encode(&unit_response(x, y)?, RESPONSE)?.state;
    let overlap = signed_swap_test(&fitted.state, &target, cfg.swap_test_shots, cfg.seed)?.estimate;
    Ok(AlphaResult {
        alpha,
        loss: assemble_loss(fitted.p2, fitted.c2, overlap),
        p2: fitted.p2,
        fitted_overlap: overlap,
        c2_used: fitted.c2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    /// Successful candidates in grid order.
    pub results: Vec<AlphaResult>,
    /// Candidates whose pipeline failed, with the failure.
    pub failures: Vec<(f64, Error)>,
    pub selected_alpha: f64,
    /// Grid argmin of the exact loss, for cross-checking.
    pub classical_selected_alpha: f64,
    /// Exact loss at every grid value.
    pub classical_losses: Vec<f64>,
}

/// Seed for grid index `index` derived from the master seed (SplitMix64).
pub fn derive_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn tune(x: &RealMatrix, y: &RealVector, grid: &AlphaGrid, cfg: &AlphaConfig) -> Result<TuneOutcome> {
    cfg.validate()?;
    if grid.values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let unit = unit_response(x, y)?;
    let evaluate = |(index, &alpha): (usize, &f64)| {
        let local = AlphaConfig {
            seed: derive_seed(cfg.seed, index),
            ..*cfg
        };
        quantum_loss(x, &unit, alpha, &local)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<AlphaResult>> =
        pool.install(|| grid.values.par_iter().enumerate().map(evaluate).collect());

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (outcome, &alpha) in outcomes.into_iter().zip(&grid.values) {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push((alpha, e)),
        }
    }
    if results.is_empty() {
        return Err(Error::AllCandidatesFailed(failures.len()));
    }
    let alphas: Vec<f64> = results.iter().map(|r| r.alpha).collect();
    let losses: Vec<f64> = results.iter().map(|r| r.loss).collect();
    let best = argmin_prefer_larger(&alphas, &losses).ok_or(Error::EmptyGrid)?;

    let svd = crate::linalg::svd(x, cfg.lambda_cutoff)?;
    let classical_losses = grid
        .values
        .iter()
        .map(|&a| classical_loss(&svd, &unit, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(TuneOutcome {
        selected_alpha: alphas[best],
        classical_selected_alpha: classical_alpha_argmin(&svd, &unit, &grid.values)?,
        results,
        failures,
        classical_losses,
    })
}

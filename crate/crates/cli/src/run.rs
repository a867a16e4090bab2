use std::f64::consts::PI;

use serde_json::{json, Value};

use qridge_core::alpha::{tune, AlphaConfig, AlphaGrid, Spacing};
use qridge_core::linalg::{
    fitted_values, ridge_predict, ridge_weights, svd, RealVector, SvdResult, DEFAULT_LAMBDA_CUTOFF,
};
use qridge_core::predict::{predict, C1Policy, PredictConfig, PredictOutcome};
use qridge_core::qprimitives::{is_dyadic, signed_standard_error, PhaseEstimationConfig, MAX_PRECISION_BITS};
use qridge_core::qstate::DEFAULT_QUBIT_BUDGET;

use crate::dataset::Dataset;
use crate::error::CliError;

/// Clock-representability tolerance used by the spectrum report.
const DYADIC_TOL: f64 = 1e-9;
/// Width of the shot-noise allowance, in standard errors.
const SHOT_SIGMAS: f64 = 4.0;

/// Every knob that affects a run; echoed into each report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub precision_bits: usize,
    pub evolution_time: f64,
    pub shots: usize,
    pub seed: u64,
    /// `None` runs the exact exponential, `Some(Q)` the sliced one.
    pub lmr_steps: Option<usize>,
    pub c1_policy: C1Policy,
    pub c2: f64,
    pub lambda_cutoff: f64,
    pub qubit_budget: usize,
    pub alpha: Option<f64>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub alpha_count: usize,
    pub spacing: Spacing,
    pub jobs: usize,
    pub standardize: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            precision_bits: 10,
            evolution_time: PI,
            shots: 0,
            seed: 0,
            lmr_steps: None,
            c1_policy: C1Policy::Auto,
            c2: 1.0,
            lambda_cutoff: DEFAULT_LAMBDA_CUTOFF,
            qubit_budget: DEFAULT_QUBIT_BUDGET,
            alpha: None,
            alpha_min: None,
            alpha_max: None,
            alpha_count: 16,
            spacing: Spacing::Linear,
            jobs: 0,
            standardize: false,
        }
    }
}

impl RunConfig {
    pub fn pe(&self) -> PhaseEstimationConfig {
        let pe = PhaseEstimationConfig {
            precision_bits: self.precision_bits,
            evolution_time: self.evolution_time,
            ..PhaseEstimationConfig::default()
        };
        match self.lmr_steps {
            Some(q) => pe.lmr(q),
            None => pe,
        }
    }

    pub fn predict_config(&self) -> PredictConfig {
        PredictConfig {
            pe: self.pe(),
            c1_policy: self.c1_policy,
            swap_test_shots: self.shots,
            seed: self.seed,
            lambda_cutoff: self.lambda_cutoff,
            qubit_budget: self.qubit_budget,
            ..PredictConfig::default()
        }
    }

    pub fn alpha_config(&self) -> AlphaConfig {
        AlphaConfig {
            pe: self.pe(),
            c2: self.c2,
            swap_test_shots: self.shots,
            seed: self.seed,
            lambda_cutoff: self.lambda_cutoff,
            qubit_budget: self.qubit_budget,
            jobs: self.jobs,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.predict_config().validate()?;
        self.alpha_config().validate()?;
        if !(self.lambda_cutoff.is_finite() && self.lambda_cutoff >= 0.0) {
            return Err(CliError::Usage(format!("lambda cutoff {} must be ≥ 0", self.lambda_cutoff)));
        }
        Ok(())
    }

    /// `5κ²·2^−t`, the tolerance on normalized predictions and losses.
    pub fn err_bound(&self, kappa: f64) -> f64 {
        5.0 * kappa * kappa / (1u64 << self.precision_bits) as f64
    }

    pub fn to_json(&self) -> Value {
        json!({
            "precision_bits": self.precision_bits,
            "evolution_time": self.evolution_time,
            "shots": self.shots,
            "seed": self.seed,
            "exact": self.lmr_steps.is_none(),
            "lmr_steps": self.lmr_steps,
            "c1_policy": match self.c1_policy {
                C1Policy::Auto => json!("auto"),
                C1Policy::Explicit(c) => json!(c),
            },
            "c2": self.c2,
            "lambda_cutoff": self.lambda_cutoff,
            "qubit_budget": self.qubit_budget,
            "alpha": self.alpha,
            "alpha_min": self.alpha_min,
            "alpha_max": self.alpha_max,
            "alpha_count": self.alpha_count,
            "spacing": match self.spacing {
                Spacing::Linear => "linear",
                Spacing::Log => "log",
            },
            "jobs": self.jobs,
            "standardize": self.standardize,
        })
    }
}

/// A report plus whether every compared quantity stayed within its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub report: Value,
    pub within_bound: bool,
}

fn header(mode: &str, data: &Dataset, cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("mode".into(), json!(mode));
    map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    map.insert("config".into(), cfg.to_json());
    map.insert(
        "dataset".into(),
        json!({
            "rows": data.rows(),
            "features": data.features(),
            "feature_names": data.feature_names,
            "y_norm": data.y_norm,
            "x_frobenius_norm": data.x.frobenius_norm(),
            "standardized": data.standardization.is_some(),
        }),
    );
    map
}

fn require_alpha(cfg: &RunConfig) -> Result<f64, CliError> {
    let alpha = cfg.alpha.ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(CliError::Usage(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    Ok(alpha)
}

/// Allowance for a sampled signed swap test, in normalized prediction units.
fn shot_margin(outcome: &PredictOutcome, shots: usize) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    let p = ((outcome.swap_estimate + 1.0) / 4.0).clamp(0.0, 1.0);
    SHOT_SIGMAS * signed_standard_error(p, shots) * outcome.p1.sqrt() / outcome.c1_used
}

fn outcome_json(o: &PredictOutcome) -> Value {
    json!({
        "y_prime": o.y_prime,
        "y_prime_normalized": o.y_prime_normalized,
        "p1": o.p1,
        "swap_estimate": o.swap_estimate,
        "c1_used": o.c1_used,
        "clock_readout": o.clock_readout.iter().map(|b| json!({
            "value": b.value,
            "eigenvalue": b.eigenvalue,
            "weight": b.weight,
        })).collect::<Vec<_>>(),
        "lmr_error": o.lmr_error,
        "clock_residual": o.clock_residual,
        "scale": o.scale,
        "alpha_normalized": o.alpha_normalized,
        "rotation_floor": o.rotation_floor,
        "dyadic": o.dyadic,
        "y_success_probability": o.y_success_probability,
        "x_success_probability": o.x_success_probability,
    })
}

struct Comparison {
    quantum: PredictOutcome,
    classical: f64,
    normalized_error: f64,
    tolerance: f64,
}

fn compare_one(
    data: &Dataset,
    svd: &SvdResult,
    x_new: &RealVector,
    alpha: f64,
    cfg: &RunConfig,
) -> Result<Comparison, CliError> {
    let quantum = predict(&data.x, &data.y, x_new, alpha, &cfg.predict_config())?;
    let classical = ridge_predict(&ridge_weights(svd, &data.y, alpha)?, x_new)?;
    let normalized_error = if quantum.scale > 0.0 {
        (quantum.y_prime - classical).abs() / quantum.scale
    } else {
        (quantum.y_prime - classical).abs()
    };
    let tolerance = cfg.err_bound(svd.condition_number()) + shot_margin(&quantum, cfg.shots);
    Ok(Comparison {
        quantum,
        classical,
        normalized_error,
        tolerance,
    })
}

pub fn run_predict(data: &Dataset, x_new: &[f64], cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let alpha = require_alpha(cfg)?;
    let query = data.query(x_new)?;
    let s = svd(&data.x, cfg.lambda_cutoff)?;
    let c = compare_one(data, &s, &query, alpha, cfg)?;
    let within_bound = c.normalized_error <= c.tolerance;
    let mut map = header("predict", data, cfg);
    map.insert("x_new".into(), json!(x_new));
    map.insert("outcome".into(), outcome_json(&c.quantum));
    map.insert("classical_y_prime".into(), json!(c.classical));
    map.insert("abs_error".into(), json!((c.quantum.y_prime - c.classical).abs()));
    map.insert(
        "rel_error".into(),
        json!(if c.classical != 0.0 {
            (c.quantum.y_prime - c.classical).abs() / c.classical.abs()
        } else {
            f64::NAN
        }),
    );
    map.insert("normalized_error".into(), json!(c.normalized_error));
    map.insert("condition_number".into(), json!(s.condition_number()));
    map.insert("err_bound".into(), json!(cfg.err_bound(s.condition_number())));
    map.insert("tolerance".into(), json!(c.tolerance));
    map.insert("within_bound".into(), json!(within_bound));
    Ok(RunReport {
        report: Value::Object(map),
        within_bound,
    })
}

/// Predicts every training row and compares with the classical fitted values.
pub fn run_compare(data: &Dataset, cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let alpha = require_alpha(cfg)?;
    let s = svd(&data.x, cfg.lambda_cutoff)?;
    let fitted = fitted_values(&s, &data.y, alpha)?;
    let mut rows = Vec::with_capacity(data.rows());
    let mut within_bound = true;
    let mut max_error = 0.0f64;
    for r in 0..data.rows() {
        let query = RealVector::new(data.x.row(r).to_vec())?;
        let c = compare_one(data, &s, &query, alpha, cfg)?;
        within_bound &= c.normalized_error <= c.tolerance;
        max_error = max_error.max(c.normalized_error);
        rows.push(json!({
            "row": r,
            "quantum": c.quantum.y_prime,
            "classical": c.classical,
            "fitted_value": fitted[r],
            "normalized_error": c.normalized_error,
            "p1": c.quantum.p1,
            "tolerance": c.tolerance,
        }));
    }
    let mut map = header("compare", data, cfg);
    map.insert("rows".into(), Value::Array(rows));
    map.insert("max_normalized_error".into(), json!(max_error));
    map.insert("condition_number".into(), json!(s.condition_number()));
    map.insert("err_bound".into(), json!(cfg.err_bound(s.condition_number())));
    map.insert("within_bound".into(), json!(within_bound));
    Ok(RunReport {
        report: Value::Object(map),
        within_bound,
    })
}

pub fn grid_for(data: &Dataset, cfg: &RunConfig) -> Result<AlphaGrid, CliError> {
    match (cfg.alpha_min, cfg.alpha_max) {
        (Some(lo), Some(hi)) => Ok(AlphaGrid::spaced(lo, hi, cfg.alpha_count, cfg.spacing)?),
        (None, None) => Ok(AlphaGrid::default_for(&data.x, cfg.alpha_count, cfg.spacing)?),
        _ => Err(CliError::Usage("--alpha-min and --alpha-max go together".into())),
    }
}

pub fn run_tune(data: &Dataset, cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    if data.rows() < 2 {
        return Err(CliError::Usage("tune needs at least two rows".into()));
    }
    let grid = grid_for(data, cfg)?;
    let s = svd(&data.x, cfg.lambda_cutoff)?;
    let bound = cfg.err_bound(s.condition_number());
    let out = tune(&data.x, &data.y, &grid, &cfg.alpha_config())?;

    let mut curve = Vec::new();
    let mut within_bound = out.failures.is_empty();
    let mut max_error = 0.0f64;
    for r in &out.results {
        let index = grid.values.iter().position(|&a| a == r.alpha).unwrap_or(0);
        let classical = out.classical_losses[index];
        let error = (r.loss - classical).abs();
        let margin = if cfg.shots > 0 {
            let p = ((r.fitted_overlap + 1.0) / 4.0).clamp(0.0, 1.0);
            2.0 * r.p2.sqrt() / r.c2_used * SHOT_SIGMAS * signed_standard_error(p, cfg.shots)
        } else {
            0.0
        };
        within_bound &= error <= bound + margin;
        max_error = max_error.max(error);
        curve.push(json!({
            "alpha": r.alpha,
            "loss": r.loss,
            "classical_loss": classical,
            "abs_error": error,
            "p2": r.p2,
            "fitted_overlap": r.fitted_overlap,
            "c2_used": r.c2_used,
        }));
    }
    let failures: Vec<Value> = out
        .failures
        .iter()
        .map(|(alpha, e)| json!({"alpha": alpha, "error": e.to_string()}))
        .collect();
    let mut map = header("tune", data, cfg);
    map.insert("grid".into(), json!(grid.values));
    map.insert("results".into(), Value::Array(curve));
    map.insert("failures".into(), Value::Array(failures));
    map.insert("selected_alpha".into(), json!(out.selected_alpha));
    map.insert("classical_selected_alpha".into(), json!(out.classical_selected_alpha));
    map.insert("selection_agrees".into(), json!(out.selected_alpha == out.classical_selected_alpha));
    map.insert("max_abs_error".into(), json!(max_error));
    map.insert("condition_number".into(), json!(s.condition_number()));
    map.insert("err_bound".into(), json!(bound));
    map.insert("within_bound".into(), json!(within_bound));
    Ok(RunReport {
        report: Value::Object(map),
        within_bound,
    })
}

pub fn run_spectrum(data: &Dataset, cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let s = svd(&data.x, cfg.lambda_cutoff)?;
    let normalized = s.normalized_spectrum();
    let dyadic: serde_json::Map<String, Value> = (1..=MAX_PRECISION_BITS)
        .map(|t| {
            let ok = normalized
                .iter()
                .all(|&l| is_dyadic(l, t, cfg.evolution_time, DYADIC_TOL));
            (format!("{t:02}"), json!(ok))
        })
        .collect();
    let mut map = header("spectrum", data, cfg);
    map.insert("singular_values".into(), json!(s.singular_values()[..].to_vec()));
    map.insert("normalized_eigenvalues".into(), json!(normalized));
    map.insert("condition_number".into(), json!(s.condition_number()));
    map.insert("rank".into(), json!(s.rank()));
    map.insert("full_rank".into(), json!(s.rank() == data.rows().min(data.features())));
    map.insert("dyadic_by_bits".into(), Value::Object(dyadic));
    map.insert("err_bound".into(), json!(cfg.err_bound(s.condition_number())));
    Ok(RunReport {
        report: Value::Object(map),
        within_bound: true,
    })
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qridge_cli::{emit_report, load_csv, render, run_compare, run_predict, run_spectrum, run_tune};
use qridge_cli::{CliError, RunConfig, RunReport};
use qridge_core::alpha::Spacing;
use qridge_core::predict::C1Policy;

#[derive(Parser)]
#[command(name = "qridge", version, about = "Quantum ridge regression simulator harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict the response of one new sample and compare with the exact ridge value.
    Predict {
        #[command(flatten)]
        common: Common,
        /// Comma-separated feature values of the query.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x_new: Vec<f64>,
        #[arg(long)]
        alpha: f64,
        /// Rotation constant C₁: `auto` or a number.
        #[arg(long, default_value = "auto", value_parser = parse_c1)]
        c1: C1Policy,
    },
    /// Scan an alpha grid and select the value minimizing the training loss.
    Tune {
        #[command(flatten)]
        common: Common,
        #[arg(long, requires = "alpha_max")]
        alpha_min: Option<f64>,
        #[arg(long, requires = "alpha_min")]
        alpha_max: Option<f64>,
        #[arg(long, default_value_t = 16)]
        alpha_count: usize,
        #[arg(long, value_enum, default_value_t = GridSpacing::Linear)]
        spacing: GridSpacing,
        /// Filter constant C₂ in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Predict every training row and compare with the classical fitted values.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "auto", value_parser = parse_c1)]
        c1: C1Policy,
    },
    /// Report singular values, condition number, rank and clock compatibility.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// CSV file: header row, feature columns, last column `y`.
    #[arg(long)]
    data: PathBuf,
    /// Clock register width t.
    #[arg(long, default_value_t = 10)]
    bits: usize,
    /// Swap-test samples; 0 evaluates the exact probability.
    #[arg(long, default_value_t = 0)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact matrix exponential (the default unless --lmr-steps is given).
    #[arg(long, conflicts_with = "lmr_steps")]
    exact: bool,
    /// Approximate the exponential with this many partial-swap slices.
    #[arg(long)]
    lmr_steps: Option<usize>,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    evolution_time: f64,
    #[arg(long, default_value_t = qridge_core::linalg::DEFAULT_LAMBDA_CUTOFF)]
    lambda_cutoff: f64,
    #[arg(long, default_value_t = qridge_core::qstate::DEFAULT_QUBIT_BUDGET)]
    qubit_budget: usize,
    /// Centre and scale every feature column before fitting.
    #[arg(long)]
    standardize: bool,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the report (breaks byte-identical reruns).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridSpacing {
    Linear,
    Log,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Predict { common, .. }
            | Command::Tune { common, .. }
            | Command::Compare { common, .. }
            | Command::Spectrum { common } => common,
        }
    }
}

fn parse_c1(s: &str) -> Result<C1Policy, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(C1Policy::Auto);
    }
    s.parse::<f64>()
        .map(C1Policy::Explicit)
        .map_err(|_| format!("expected `auto` or a number, got `{s}`"))
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            precision_bits: self.bits,
            evolution_time: self.evolution_time,
            shots: self.shots,
            seed: self.seed,
            lmr_steps: if self.exact { None } else { self.lmr_steps },
            lambda_cutoff: self.lambda_cutoff,
            qubit_budget: self.qubit_budget,
            standardize: self.standardize,
            ..RunConfig::default()
        }
    }
}

fn execute(command: &Command) -> Result<RunReport, CliError> {
    let common = command.common();
    let mut cfg = common.config();
    let mut data = load_csv(&common.data)?;
    if cfg.standardize {
        data = data.standardized()?;
    }
    match command {
        Command::Predict { x_new, alpha, c1, .. } => {
            cfg.alpha = Some(*alpha);
            cfg.c1_policy = *c1;
            run_predict(&data, x_new, &cfg)
        }
        Command::Tune {
            alpha_min,
            alpha_max,
            alpha_count,
            spacing,
            c2,
            jobs,
            ..
        } => {
            cfg.alpha_min = *alpha_min;
            cfg.alpha_max = *alpha_max;
            cfg.alpha_count = *alpha_count;
            cfg.spacing = match spacing {
                GridSpacing::Linear => Spacing::Linear,
                GridSpacing::Log => Spacing::Log,
            };
            cfg.c2 = *c2;
            cfg.jobs = *jobs;
            run_tune(&data, &cfg)
        }
        Command::Compare { alpha, c1, .. } => {
            cfg.alpha = Some(*alpha);
            cfg.c1_policy = *c1;
            run_compare(&data, &cfg)
        }
        Command::Spectrum { .. } => run_spectrum(&data, &cfg),
    }
}

/// A closed pipe downstream is not an error of ours.
fn to_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    let start = Instant::now();
    let outcome = execute(&cli.command).and_then(|mut run| {
        if common.timing {
            if let Value::Object(map) = &mut run.report {
                map.insert("wall_clock_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
            }
        }
        match &common.out {
            Some(path) => emit_report(&run.report, path)?,
            None => to_stdout(&render(&run.report)),
        }
        Ok(run.within_bound)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qridge: result outside the error bound");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qridge: {e}");
            to_stdout(&render(&e.to_json()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

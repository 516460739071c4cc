//! Batch command-line surface over the multiplier engine: weight regularity
//! reports, block sequences, multiplier sequences, window-norm diagnostics,
//! coefficient transforms and the randomized verification suite.
//!
//! Output is machine-readable (JSON or CSV) and byte-deterministic for a
//! fixed configuration including the seed.
//!
//! Exit codes: 0 success, 2 spec/validation/file errors, 3 numerical
//! failures, 4 coefficient range exceeded, 5 verification found a violated
//! margin.

mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use toeplitz_hv_core::blocks::{self, BlockSequence, RatioStats};
use toeplitz_hv_core::multiplier::{self, CoefficientFunction};
use toeplitz_hv_core::numerics::QuadratureConfig;
use toeplitz_hv_core::symbols::{check_hypothesis, Hypothesis, HypothesisReport, SymbolSpec};
use toeplitz_hv_core::verify;
use toeplitz_hv_core::weights::{self, ConditionReport, WeightSpec};
use toeplitz_hv_core::window::{self, DiagnoseOptions};
use toeplitz_hv_core::Error as CoreError;

use config::{resolve, resolve_opt, FileConfig};

#[derive(Parser)]
#[command(
    name = "toeplitz-hv",
    version,
    about = "Toeplitz multiplier diagnostics on weighted sup-norm spaces"
)]
struct Cli {
    /// Flat key=value config file; TOEPLITZ_HV_CONFIG names a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Weight spec: `standard:alpha=<f> | exp:alpha=<f>,beta=<f> | slowlog | table:<path>`
    #[arg(long, global = true)]
    weight: Option<String>,

    /// Symbol spec: `pow:delta=<f> | invlog | logcap | const:c=<f> |
    /// trunc:<inner>,s=<f>,side=<lo|hi> | table:<path>`
    #[arg(long, global = true)]
    symbol: Option<String>,

    /// Block builder: generic | exp | normal
    #[arg(long = "blocks-builder", alias = "builder", global = true)]
    blocks_builder: Option<String>,

    /// Construction constant for the generic builder (> 2).
    #[arg(long, global = true)]
    b: Option<f64>,

    /// Number of block indices to build.
    #[arg(long, global = true)]
    count: Option<usize>,

    /// First window position for diagnose sweeps.
    #[arg(long = "n-min", global = true)]
    n_min: Option<usize>,

    /// Last window position (diagnose) or highest multiplier index
    /// (gamma, apply).
    #[arg(long = "n-max", global = true)]
    n_max: Option<usize>,

    /// Quadrature relative tolerance.
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,

    /// Circle-grid oversampling multiple (>= 4).
    #[arg(long = "grid-mult", global = true)]
    grid_mult: Option<u32>,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: json | csv
    #[arg(long, global = true)]
    format: Option<String>,

    /// Seed for the randomized verifications.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Exponential builder parameter.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Exponential builder parameter.
    #[arg(long, global = true)]
    beta: Option<f64>,

    /// Geometric builder exponent: indices 2^(k n).
    #[arg(long, global = true)]
    k: Option<f64>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regularity reports for the weight (maximizer-ratio condition,
    /// normality, shifted-moment condition).
    WeightReport {
        /// Premise bound for the maximizer-ratio condition.
        #[arg(long)]
        b1: Option<f64>,
        /// Shift exponent for the moment condition; defaults to 1/(beta+1)
        /// for exponential weights and 1/2 otherwise.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Build a block index sequence and report its growth statistics.
    Blocks,
    /// The multiplier sequence gamma_0 .. gamma_n_max.
    Gamma,
    /// Symbol hypothesis checks side by side with the window-norm sweep.
    Diagnose,
    /// Apply the multiplier to Taylor coefficients from a CSV file.
    Apply {
        /// Input coefficients, CSV with header n,re,im.
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// Randomized verification of the supporting inequalities.
    Verify {
        /// Trials per level for the randomized L1 bounds.
        #[arg(long)]
        trials: Option<usize>,
        /// Random symbols for the monotonicity suite.
        #[arg(long)]
        symbols: Option<usize>,
    },
}

/// Process error carrying the exit code contract.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::SpecParse { .. }
            | CoreError::Io { .. }
            | CoreError::TableFormat { .. }
            | CoreError::InvalidParams(_)
            | CoreError::InvalidB(_)
            | CoreError::Overflow(_)
            | CoreError::OutOfDomain(_) => 2,
            CoreError::RangeExceeded { .. } => 4,
            CoreError::NonConvergence { .. }
            | CoreError::InvalidDomain { .. }
            | CoreError::UndersampledGrid { .. }
            | CoreError::NotDifferentiable { .. }
            | CoreError::DegenerateBlock { .. }
            | CoreError::DenominatorUnderflow { .. }
            | CoreError::DivisionDegenerate(_) => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Json,
    Csv,
}

/// Everything resolved through flag > config file > default.
struct Resolved {
    weight: Option<String>,
    symbol: Option<String>,
    blocks_builder: Option<String>,
    b: f64,
    count: usize,
    n_min: Option<usize>,
    n_max: Option<usize>,
    quad: QuadratureConfig,
    grid_mult: u32,
    out: Option<PathBuf>,
    format: OutputFormat,
    seed: u64,
    alpha: Option<f64>,
    beta: Option<f64>,
    k: f64,
}

fn run() -> Result<u8, CliError> {
    let cli = Cli::parse();
    let file = FileConfig::load(cli.config.as_deref())?;

    let format = match resolve(
        cli.format.clone(),
        file.get_str("format"),
        "json".to_string(),
    )
    .as_str()
    {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(CliError::usage(format!("unknown format `{other}`"))),
    };
    let mut quad = QuadratureConfig::default();
    quad.rel_tol = resolve(cli.rel_tol, file.get_parsed("rel-tol")?, quad.rel_tol);
    let grid_mult = resolve(cli.grid_mult, file.get_parsed("grid-mult")?, 4);
    if grid_mult < 4 {
        return Err(CliError::usage("grid-mult must be at least 4"));
    }
    let r = Resolved {
        weight: resolve_opt(cli.weight.clone(), file.get_str("weight")),
        symbol: resolve_opt(cli.symbol.clone(), file.get_str("symbol")),
        blocks_builder: resolve_opt(cli.blocks_builder.clone(), file.get_str("blocks-builder")),
        b: resolve(cli.b, file.get_parsed("b")?, 4.0),
        count: resolve(cli.count, file.get_parsed("count")?, 16),
        n_min: resolve_opt(cli.n_min, file.get_parsed("n-min")?),
        n_max: resolve_opt(cli.n_max, file.get_parsed("n-max")?),
        quad,
        grid_mult,
        out: resolve_opt(cli.out.clone(), file.get_str("out").map(PathBuf::from)),
        format,
        seed: resolve(cli.seed, file.get_parsed("seed")?, 0),
        alpha: resolve_opt(cli.alpha, file.get_parsed("alpha")?),
        beta: resolve_opt(cli.beta, file.get_parsed("beta")?),
        k: resolve(cli.k, file.get_parsed("k")?, 1.0),
    };

    match cli.cmd {
        Command::WeightReport { b1, epsilon } => cmd_weight_report(&r, &file, b1, epsilon),
        Command::Blocks => cmd_blocks(&r),
        Command::Gamma => cmd_gamma(&r),
        Command::Diagnose => cmd_diagnose(&r),
        Command::Apply { coeffs } => cmd_apply(&r, &file, coeffs),
        Command::Verify { trials, symbols } => cmd_verify(&r, &file, trials, symbols),
    }
}

fn require_weight(r: &Resolved) -> Result<WeightSpec, CliError> {
    let spec = r
        .weight
        .as_deref()
        .ok_or_else(|| CliError::usage("missing --weight"))?;
    Ok(spec.parse::<WeightSpec>()?)
}

fn require_symbol(r: &Resolved) -> Result<SymbolSpec, CliError> {
    let spec = r
        .symbol
        .as_deref()
        .ok_or_else(|| CliError::usage("missing --symbol"))?;
    let a = spec.parse::<SymbolSpec>()?;
    a.check_integrable(&r.quad)?;
    Ok(a)
}

fn emit(r: &Resolved, text: String) -> Result<u8, CliError> {
    match &r.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::usage(format!("cannot write stdout: {e}")))?;
            Ok(0)
        }
        Some(path) => {
            fs::write(path, text)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(0)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn json_only(r: &Resolved, what: &str) -> Result<(), CliError> {
    if r.format == OutputFormat::Csv {
        return Err(CliError::usage(format!(
            "csv output is not defined for {what}; use --format json"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// weight-report
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct WeightReportOutput {
    command: &'static str,
    weight: String,
    reports: Vec<ConditionReport>,
}

fn cmd_weight_report(
    r: &Resolved,
    file: &FileConfig,
    b1: Option<f64>,
    epsilon: Option<f64>,
) -> Result<u8, CliError> {
    json_only(r, "weight-report")?;
    let w = require_weight(r)?;
    let b1 = resolve(b1, file.get_parsed("b1")?, 4.0);
    let default_eps = match &w {
        WeightSpec::Exponential { beta, .. } => 1.0 / (beta + 1.0),
        _ => 0.5,
    };
    let epsilon = resolve(epsilon, file.get_parsed("epsilon")?, default_eps);
    let reports = vec![
        weights::check_condition_b(&w, b1, 1e4, 10)?,
        weights::check_normal(&w, 256, 8)?,
        weights::check_moment_shift(&w, epsilon, 4096, &r.quad)?,
    ];
    let out = WeightReportOutput {
        command: "weight-report",
        weight: w.spec_string(),
        reports,
    };
    emit(r, to_json(&out)?)
}

// ---------------------------------------------------------------------------
// blocks
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BlocksOutput {
    command: &'static str,
    builder: String,
    sequence: BlockSequence,
    ratio_stats: Option<RatioStats>,
}

/// Builder selection: explicit flag, otherwise exponential closed form for
/// exponential weights and geometric indices for everything else.
fn build_sequence(r: &Resolved) -> Result<(String, BlockSequence), CliError> {
    let parsed_weight = match r.weight.as_deref() {
        Some(s) => Some(s.parse::<WeightSpec>()?),
        None => None,
    };
    let builder = match r.blocks_builder.as_deref() {
        Some(b) => b.to_string(),
        None => match &parsed_weight {
            Some(WeightSpec::Exponential { .. }) => "exp".to_string(),
            _ => "normal".to_string(),
        },
    };
    let seq = match builder.as_str() {
        "generic" => {
            let w = parsed_weight
                .ok_or_else(|| CliError::usage("generic builder needs --weight"))?;
            blocks::build_blocks_generic(&w, r.b, r.count)?
        }
        "exp" => {
            let (alpha, beta) = match (&parsed_weight, r.alpha, r.beta) {
                (_, Some(a), Some(b)) => (a, b),
                (Some(WeightSpec::Exponential { alpha, beta }), a, b) => {
                    (a.unwrap_or(*alpha), b.unwrap_or(*beta))
                }
                (_, a, b) => (a.unwrap_or(1.0), b.unwrap_or(1.0)),
            };
            blocks::build_blocks_exponential(alpha, beta, r.count)?
        }
        "normal" => blocks::build_blocks_normal(r.k, r.count)?,
        other => {
            return Err(CliError::usage(format!(
                "unknown blocks builder `{other}` (expected generic | exp | normal)"
            )))
        }
    };
    Ok((builder, seq))
}

fn cmd_blocks(r: &Resolved) -> Result<u8, CliError> {
    let (builder, seq) = build_sequence(r)?;
    let ratio_stats = if seq.len() >= 3 {
        Some(blocks::verify_ratio_bound(&seq)?)
    } else {
        None
    };
    match r.format {
        OutputFormat::Json => {
            let out = BlocksOutput {
                command: "blocks",
                builder,
                sequence: seq,
                ratio_stats,
            };
            emit(r, to_json(&out)?)
        }
        OutputFormat::Csv => {
            let mut text = String::from("n,m,r\n");
            for e in &seq.entries {
                match e.r {
                    Some(rad) => text.push_str(&format!("{},{},{}\n", e.n, e.m, rad)),
                    None => text.push_str(&format!("{},{},\n", e.n, e.m)),
                }
            }
            emit(r, text)
        }
    }
}

// ---------------------------------------------------------------------------
// gamma
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GammaOutput {
    command: &'static str,
    weight: String,
    symbol: String,
    sequence: multiplier::MultiplierSequence,
}

fn cmd_gamma(r: &Resolved) -> Result<u8, CliError> {
    let w = require_weight(r)?;
    let a = require_symbol(r)?;
    let n_max = r.n_max.unwrap_or(32);
    let seq = multiplier::gamma_sequence(&w, &a, n_max, &r.quad)?;
    match r.format {
        OutputFormat::Json => {
            let out = GammaOutput {
                command: "gamma",
                weight: w.spec_string(),
                symbol: a.spec_string(),
                sequence: seq,
            };
            emit(r, to_json(&out)?)
        }
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            seq.write_csv(&mut buf)
                .map_err(|e| CliError::usage(format!("cannot serialize csv: {e}")))?;
            emit(r, String::from_utf8(buf).expect("csv is utf-8"))
        }
    }
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct HypothesisOutcome {
    hypothesis: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<HypothesisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

#[derive(Serialize)]
struct DiagnoseOutput {
    command: &'static str,
    weight: String,
    symbol: String,
    builder: String,
    hypotheses: Vec<HypothesisOutcome>,
    diagnosis: window::DiagnosisReport,
}

fn cmd_diagnose(r: &Resolved) -> Result<u8, CliError> {
    let w = require_weight(r)?;
    let a = require_symbol(r)?;
    let (builder, seq) = build_sequence(r)?;
    let weight_beta = match &w {
        WeightSpec::Exponential { beta, .. } => Some(*beta),
        _ => None,
    };
    let mut hypotheses = Vec::new();
    for h in Hypothesis::ALL {
        if h.needs_weight_beta() && weight_beta.is_none() {
            continue;
        }
        match check_hypothesis(&a, h, weight_beta) {
            Ok(rep) => hypotheses.push(HypothesisOutcome {
                hypothesis: h.name(),
                report: Some(rep),
                skipped: None,
            }),
            Err(CoreError::NotDifferentiable { r }) => hypotheses.push(HypothesisOutcome {
                hypothesis: h.name(),
                report: None,
                skipped: Some(format!("symbol not differentiable at r = {r}")),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    let opts = DiagnoseOptions {
        quad: r.quad.clone(),
        oversample: r.grid_mult,
        ..DiagnoseOptions::default()
    };
    let n_range = match (r.n_min, r.n_max) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(2), hi.unwrap_or(seq.len().saturating_sub(1)))),
    };
    let diagnosis = window::diagnose(&w, &a, &seq, n_range, &opts)?;
    match r.format {
        OutputFormat::Json => {
            let out = DiagnoseOutput {
                command: "diagnose",
                weight: w.spec_string(),
                symbol: a.spec_string(),
                builder,
                hypotheses,
                diagnosis,
            };
            emit(r, to_json(&out)?)
        }
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            window::write_records_csv(&diagnosis.records, &mut buf)
                .map_err(|e| CliError::usage(format!("cannot serialize csv: {e}")))?;
            emit(r, String::from_utf8(buf).expect("csv is utf-8"))
        }
    }
}

// ---------------------------------------------------------------------------
// apply
// ---------------------------------------------------------------------------

fn cmd_apply(
    r: &Resolved,
    file: &FileConfig,
    coeffs: Option<PathBuf>,
) -> Result<u8, CliError> {
    let w = require_weight(r)?;
    let a = require_symbol(r)?;
    let path = resolve_opt(coeffs, file.get_str("coeffs").map(PathBuf::from))
        .ok_or_else(|| CliError::usage("missing --coeffs <file>"))?;
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let h = CoefficientFunction::read_csv(text.as_bytes(), &path.display().to_string())?;
    let n_max = r.n_max.unwrap_or(h.degree());
    let gammas = multiplier::gamma_sequence(&w, &a, n_max, &r.quad)?;
    let out = multiplier::apply_toeplitz(&gammas, &h)?;
    let mut buf = Vec::new();
    out.write_csv(&mut buf)
        .map_err(|e| CliError::usage(format!("cannot serialize csv: {e}")))?;
    emit(r, String::from_utf8(buf).expect("csv is utf-8"))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyOutput {
    command: &'static str,
    weight: String,
    summary: verify::VerifySummary,
}

fn cmd_verify(
    r: &Resolved,
    file: &FileConfig,
    trials: Option<usize>,
    symbols: Option<usize>,
) -> Result<u8, CliError> {
    json_only(r, "verify")?;
    let w = match r.weight.as_deref() {
        Some(s) => s.parse::<WeightSpec>()?,
        None => WeightSpec::standard(1.0)?,
    };
    let trials = resolve(trials, file.get_parsed("trials")?, 200);
    let symbols = resolve(symbols, file.get_parsed("symbols")?, 50);
    let summary = verify::run_verification_suite(r.seed, &w, trials, symbols, &r.quad)?;
    let all_pass = summary.all_pass();
    let out = VerifyOutput {
        command: "verify",
        weight: w.spec_string(),
        summary,
    };
    let code = emit(r, to_json(&out)?)?;
    if all_pass {
        Ok(code)
    } else {
        Ok(5)
    }
}

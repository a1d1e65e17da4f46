//! The `cohpower` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a reproduction row failed, or an internal consistency error |
//! | 2 | usage or parse error |
//! | 3 | input violates a state/operator invariant |
//! | 4 | mode incompatible with the input dimension or measure |
//! | 5 | global optimization had no converged restart |
//! | 6 | output path not writable |

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::matrix::{parse_matrix_file, MatrixFile};
use crate::measures::CoherenceMeasureId;
use crate::operator::{
    fourier_unitary, haar_random_unitary, identity_unitary, rotation_x, UnitaryOperator,
};
use crate::optim::{brute_force_power, OptimizerConfig, BRUTE_FORCE_MAX_DIM};
use crate::power::{
    global_power, incoherent_l1_power, incoherent_relent_power, qubit_l1_power, PowerEstimate,
};
use crate::report::{
    estimate_json, format_amplitudes, format_sig, quantile, write_csv, CsvRecord, ReportRow,
};
use crate::reproduce;
use crate::state::{density_from_pure, DensityMatrix, PureState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_MODE: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;
pub const EXIT_OUTPUT: i32 = 6;

pub const SEED_ENV: &str = "COHPOWER_SEED";
const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "cohpower",
    version,
    about = "Coherence measures and coherence power of unitaries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    L1,
    Relent,
}

impl From<MeasureArg> for CoherenceMeasureId {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::L1 => Self::L1,
            MeasureArg::Relent => Self::RelEnt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Incoherent,
    Global,
    Qubit,
    Brute,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence of a density matrix or state vector file.
    Measure {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "l1")]
        measure: MeasureArg,
    },
    /// Coherence power of a unitary.
    Power {
        /// Unitary matrix file (omit when using --builtin).
        file: Option<PathBuf>,
        /// fourier:N, rx:THETA, identity:N or haar:N:SEED.
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,
        #[arg(long, value_enum, default_value = "l1")]
        measure: MeasureArg,
        #[arg(long, value_enum, default_value = "global")]
        mode: ModeArg,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Points per parameter axis for --mode brute.
        #[arg(long, default_value_t = 48)]
        grid_steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Runs the fixed reproduction suite and prints a PASS/FAIL table.
    Reproduce {
        #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Incoherent vs. global power over a population of unitaries, as CSV.
    HaarScan {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        samples: usize,
        #[arg(long, value_enum, default_value = "l1")]
        measure: MeasureArg,
        #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Evaluate this unitary in place of Haar samples.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::NotHermitian { .. }
            | Error::TraceNotOne { .. }
            | Error::NotPositive { .. }
            | Error::NotNormalized { .. }
            | Error::NotUnitary { .. }
            | Error::NonFinite { .. }
            | Error::BadShape { .. } => EXIT_INVALID,
            Error::InvalidDimension { .. } | Error::DimensionMismatch { .. } => EXIT_MODE,
            Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
            Error::Io(_) => EXIT_OUTPUT,
            Error::LimitNotConverged { .. } | Error::InconsistentEstimate { .. } => EXIT_FAIL,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult = std::result::Result<i32, CliError>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Measure { file, measure } => cmd_measure(&file, measure.into(), out),
        Command::Power {
            file,
            builtin,
            measure,
            mode,
            restarts,
            seed,
            grid_steps,
            json,
        } => {
            let (_, u) = load_unitary(file.as_deref(), builtin.as_deref())?;
            let cfg = OptimizerConfig {
                restarts,
                seed,
                ..OptimizerConfig::default()
            };
            cmd_power(&u, measure.into(), mode, &cfg, grid_steps, json, out)
        }
        Command::Reproduce { seed } => cmd_reproduce(seed, out),
        Command::HaarScan {
            dim,
            samples,
            measure,
            seed,
            restarts,
            builtin,
            out: path,
        } => cmd_haar_scan(
            dim,
            samples,
            measure.into(),
            seed,
            restarts,
            builtin.as_deref(),
            &path,
            out,
        ),
    }
}

fn read_input(path: &Path) -> std::result::Result<MatrixFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    parse_matrix_file(&text)
        .map_err(|e| CliError::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Builds a named unitary: `fourier:N`, `rx:THETA`, `identity:N`, `haar:N:SEED`.
pub fn builtin_unitary(spec: &str) -> crate::Result<UnitaryOperator> {
    let bad = || Error::InvalidParameter(format!("unknown builtin `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    let positive_dim = |s: &str| -> crate::Result<usize> {
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(bad()),
        }
    };
    match parts.as_slice() {
        ["fourier", n] => fourier_unitary(positive_dim(n)?),
        ["identity", n] => Ok(identity_unitary(positive_dim(n)?)),
        ["rx", theta] => {
            let theta: f64 = theta.parse().map_err(|_| bad())?;
            if !theta.is_finite() {
                return Err(bad());
            }
            Ok(rotation_x(theta))
        }
        ["haar", n, seed] => {
            let seed: u64 = seed.parse().map_err(|_| bad())?;
            Ok(haar_random_unitary(positive_dim(n)?, seed))
        }
        _ => Err(bad()),
    }
}

fn load_unitary(
    file: Option<&Path>,
    builtin: Option<&str>,
) -> std::result::Result<(String, UnitaryOperator), CliError> {
    match (file, builtin) {
        (_, Some(spec)) => Ok((spec.to_string(), builtin_unitary(spec)?)),
        (Some(path), None) => match read_input(path)? {
            MatrixFile::Matrix(m) => Ok((path.display().to_string(), UnitaryOperator::new(m)?)),
            MatrixFile::Vector(_) => Err(CliError::new(
                EXIT_USAGE,
                format!("{}: expected a matrix, found a vector", path.display()),
            )),
        },
        (None, None) => Err(CliError::new(
            EXIT_USAGE,
            "provide a unitary file or --builtin",
        )),
    }
}

fn cmd_measure(path: &Path, m: CoherenceMeasureId, out: &mut dyn Write) -> CliResult {
    let rho = match read_input(path)? {
        MatrixFile::Matrix(mat) => DensityMatrix::new(mat)?,
        MatrixFile::Vector(amps) => density_from_pure(&PureState::new(amps)?),
    };
    let value = m.of(&rho);
    writeln!(out, "{}", format_sig(value, 12)).map_err(Error::from)?;
    Ok(EXIT_OK)
}

fn compute_power(
    u: &UnitaryOperator,
    m: CoherenceMeasureId,
    mode: ModeArg,
    cfg: &OptimizerConfig,
    grid_steps: usize,
) -> crate::Result<PowerEstimate> {
    match (mode, m) {
        (ModeArg::Incoherent, CoherenceMeasureId::L1) => incoherent_l1_power(u),
        (ModeArg::Incoherent, CoherenceMeasureId::RelEnt) => incoherent_relent_power(u),
        (ModeArg::Global, _) => global_power(u, m, cfg),
        (ModeArg::Qubit, CoherenceMeasureId::L1) => qubit_l1_power(u),
        (ModeArg::Qubit, CoherenceMeasureId::RelEnt) => Err(Error::InvalidDimension {
            dim: u.dim(),
            reason: "qubit closed form exists only for the l1 measure",
        }),
        (ModeArg::Brute, _) => brute_force_power(u, m, grid_steps),
    }
}

fn print_estimate(
    est: &PowerEstimate,
    seed: u64,
    json: bool,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    if json {
        return writeln!(out, "{}", estimate_json(est, seed));
    }
    writeln!(out, "value: {}", format_sig(est.value, 12))?;
    writeln!(out, "measure: {}", est.measure)?;
    writeln!(out, "method: {}", est.method.as_str())?;
    writeln!(
        out,
        "achiever: {}",
        format_amplitudes(est.achiever.amplitudes())
    )?;
    let d = &est.diagnostics;
    writeln!(
        out,
        "diagnostics: restarts={} iterations={} converged={}",
        d.restarts, d.iterations, d.converged
    )
}

fn cmd_power(
    u: &UnitaryOperator,
    m: CoherenceMeasureId,
    mode: ModeArg,
    cfg: &OptimizerConfig,
    grid_steps: usize,
    json: bool,
    out: &mut dyn Write,
) -> CliResult {
    if mode == ModeArg::Brute && u.dim() > BRUTE_FORCE_MAX_DIM {
        return Err(CliError::new(
            EXIT_MODE,
            format!(
                "brute mode supports N <= {BRUTE_FORCE_MAX_DIM}, got N = {}",
                u.dim()
            ),
        ));
    }
    match compute_power(u, m, mode, cfg, grid_steps) {
        Ok(est) => {
            print_estimate(&est, cfg.seed, json, out).map_err(Error::from)?;
            Ok(EXIT_OK)
        }
        Err(Error::NotConverged { partial }) => {
            print_estimate(&partial, cfg.seed, json, out).map_err(Error::from)?;
            Err(CliError::new(
                EXIT_NOT_CONVERGED,
                "no optimizer restart converged; printed the best partial result",
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_reproduce(seed: u64, out: &mut dyn Write) -> CliResult {
    let rows = reproduce::run(seed)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    write!(out, "{}", reproduce::render(&rows)).map_err(Error::from)?;
    writeln!(
        out,
        "{} of {} rows passed (seed {seed})",
        rows.len() - failed,
        rows.len()
    )
    .map_err(Error::from)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

#[allow(clippy::too_many_arguments)]
fn cmd_haar_scan(
    dim: Option<usize>,
    samples: usize,
    m: CoherenceMeasureId,
    seed: u64,
    restarts: usize,
    builtin: Option<&str>,
    path: &Path,
    out: &mut dyn Write,
) -> CliResult {
    if samples == 0 {
        return Err(CliError::new(EXIT_USAGE, "--samples must be at least 1"));
    }
    let fixed = builtin.map(builtin_unitary).transpose()?;
    let dim = match (&fixed, dim) {
        (Some(u), Some(d)) if u.dim() != d => {
            return Err(CliError::new(
                EXIT_MODE,
                format!("--dim {d} does not match builtin dimension {}", u.dim()),
            ))
        }
        (Some(u), _) => u.dim(),
        (None, Some(d)) => d,
        (None, None) => {
            return Err(CliError::new(
                EXIT_USAGE,
                "--dim is required without --builtin",
            ))
        }
    };
    if dim < 2 {
        return Err(CliError::new(EXIT_USAGE, "--dim must be at least 2"));
    }
    let file = File::create(path)
        .map_err(|e| CliError::new(EXIT_OUTPUT, format!("cannot write {}: {e}", path.display())))?;

    let mut records = Vec::with_capacity(samples);
    for i in 0..samples {
        let row_seed = seed.wrapping_add(i as u64);
        let (label, u) = match (&fixed, builtin) {
            (Some(u), Some(spec)) => (spec.to_string(), u.clone()),
            _ => (
                format!("haar:{dim}:{row_seed}"),
                haar_random_unitary(dim, row_seed),
            ),
        };
        let cfg = OptimizerConfig {
            restarts,
            seed: row_seed,
            ..OptimizerConfig::default()
        };
        let started = Instant::now();
        let incoherent = match m {
            CoherenceMeasureId::L1 => incoherent_l1_power(&u)?,
            CoherenceMeasureId::RelEnt => incoherent_relent_power(&u)?,
        };
        let global = global_power(&u, m, &cfg)?;
        let ms = started.elapsed().as_millis() as u64;
        records.push(ReportRow::new(label, &incoherent, &global, row_seed, ms)?.csv_record());
    }

    let mut writer = BufWriter::new(file);
    write_csv(&records, &mut writer)
        .and_then(|_| writer.flush().map_err(Error::from))
        .map_err(|e| CliError::new(EXIT_OUTPUT, format!("cannot write {}: {e}", path.display())))?;

    let gaps: Vec<f64> = records.iter().map(|r: &CsvRecord| r.gap).collect();
    let summary = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|&q| format!("q{:.0}={}", q * 100.0, format_sig(quantile(&gaps, q), 12)))
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(out, "wrote {} rows to {}", records.len(), path.display()).map_err(Error::from)?;
    writeln!(out, "gap quantiles: {summary}").map_err(Error::from)?;
    Ok(EXIT_OK)
}

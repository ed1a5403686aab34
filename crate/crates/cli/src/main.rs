//! `gausscj`: Choi–Jamiolkowski analysis of finite and Gaussian channels.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 mathematically invalid
//! input, 3 verification failure.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gausscj::{Error, Tolerances};

use commands::{OracleTolerances, VerifyArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Lib(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Lib(Error::TruncationTooSmall { .. } | Error::DimensionMismatch(_)) => 1,
            CliError::Invalid(_) | CliError::Lib(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("{s} is not a finite nonnegative number"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = nonnegative(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err("must be positive".into())
    }
}

#[derive(Args, Debug)]
struct TolArgs {
    #[arg(long = "tol-hermitian", env = "GAUSSCJ_TOL_HERMITIAN", global = true, value_parser = nonnegative)]
    hermitian: Option<f64>,
    #[arg(long = "tol-psd", env = "GAUSSCJ_TOL_PSD", global = true, value_parser = nonnegative)]
    psd: Option<f64>,
    #[arg(long = "tol-trace", env = "GAUSSCJ_TOL_TRACE", global = true, value_parser = nonnegative)]
    trace: Option<f64>,
    #[arg(long = "tol-rank", env = "GAUSSCJ_TOL_RANK", global = true, value_parser = positive)]
    rank: Option<f64>,
    #[arg(long = "tol-rank-stability", env = "GAUSSCJ_TOL_RANK_STABILITY", global = true, value_parser = positive)]
    rank_stability: Option<f64>,
    #[arg(long = "tol-kraus-drop", env = "GAUSSCJ_TOL_KRAUS_DROP", global = true, value_parser = nonnegative)]
    kraus_drop: Option<f64>,
    #[arg(long = "tol-pure-window", env = "GAUSSCJ_TOL_PURE_WINDOW", global = true, value_parser = nonnegative)]
    pure_window: Option<f64>,
    #[arg(long = "tol-lambda-floor", env = "GAUSSCJ_TOL_LAMBDA_FLOOR", global = true, value_parser = nonnegative)]
    lambda_floor: Option<f64>,
    #[arg(long = "tol-unitary", env = "GAUSSCJ_TOL_UNITARY", global = true, value_parser = nonnegative)]
    unitary: Option<f64>,
    #[arg(long = "tol-symmetry", env = "GAUSSCJ_TOL_SYMMETRY", global = true, value_parser = nonnegative)]
    symmetry: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            hermitian: self.hermitian.unwrap_or(d.hermitian),
            psd: self.psd.unwrap_or(d.psd),
            trace: self.trace.unwrap_or(d.trace),
            rank: self.rank.unwrap_or(d.rank),
            rank_stability: self.rank_stability.unwrap_or(d.rank_stability),
            kraus_drop: self.kraus_drop.unwrap_or(d.kraus_drop),
            pure_window: self.pure_window.unwrap_or(d.pure_window),
            lambda_floor: self.lambda_floor.unwrap_or(d.lambda_floor),
            unitary: self.unitary.unwrap_or(d.unitary),
            symmetry: self.symmetry.unwrap_or(d.symmetry),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "gausscj", version, about = "Choi-Jamiolkowski analysis of finite and Gaussian quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, env = "GAUSSCJ_FORMAT", global = true)]
    format: Format,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a channel spec file and report its CJ norm.
    Analyze { file: PathBuf },
    /// Report on the one-mode attenuator/amplifier K = kI, mu = mI.
    OneMode {
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
    },
    /// Check the closed forms against the truncated Fock-space oracle.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
        /// Fock levels per mode.
        #[arg(long = "trunc", default_value_t = 40)]
        n_levels: usize,
        /// Levels of Tr_B Omega compared with the identity.
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Mean occupation of the thermal reference state in the PPT probe.
        #[arg(long, default_value_t = 1.0, value_parser = nonnegative)]
        sigma_mean: f64,
        #[arg(long = "oracle-norm-tol", env = "GAUSSCJ_ORACLE_NORM_TOL", value_parser = positive)]
        norm_tol: Option<f64>,
        #[arg(long = "oracle-trace-tol", env = "GAUSSCJ_ORACLE_TRACE_TOL", value_parser = positive)]
        trace_tol: Option<f64>,
        #[arg(long = "oracle-eig-tol", env = "GAUSSCJ_ORACLE_EIG_TOL", value_parser = positive)]
        eig_tol: Option<f64>,
        #[arg(long = "oracle-ppt-tol", env = "GAUSSCJ_ORACLE_PPT_TOL", value_parser = nonnegative)]
        ppt_tol: Option<f64>,
    },
    /// Extract a Kraus set from a finite or eb spec and write it as a spec file.
    Kraus {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<(report::Report, bool), CliError> {
    let tol = cli.tol.resolve();
    match &cli.command {
        Command::Analyze { file } => Ok((commands::analyze(file, &tol)?, true)),
        Command::OneMode { k, m } => Ok((commands::one_mode(*k, *m, &tol)?, true)),
        Command::Verify { k, m, n_levels, levels, sigma_mean, norm_tol, trace_tol, eig_tol, ppt_tol } => {
            let d = OracleTolerances::default();
            let oracle = OracleTolerances {
                norm: norm_tol.unwrap_or(d.norm),
                partial_trace: trace_tol.unwrap_or(d.partial_trace),
                lowest_eigenvalue: eig_tol.unwrap_or(d.lowest_eigenvalue),
                ppt: ppt_tol.unwrap_or(d.ppt),
            };
            let args = VerifyArgs { k: *k, m: *m, n_levels: *n_levels, levels: *levels, sigma_mean: *sigma_mean };
            commands::verify(&args, &tol, &oracle)
        }
        Command::Kraus { file, out } => Ok((commands::kraus(file, out, &tol)?, true)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((report, ok)) => {
            let text = match cli.format {
                Format::Human => report.human(),
                Format::Machine => report.machine(),
            };
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed");
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;

use agla_core::signal::GeneratorSpec;
use agla_core::solvers::{AGLA_GUARANTEED, DM_DEFAULT_RHO, FGLA_DEFAULT_ALPHA, RAAR_DEFAULT_LAMBDA};
use agla_core::{Algorithm, WindowKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "agla", version, about = "Phase retrieval with the Griffin-Lim family")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm and write its trace.
    Solve(SolveArgs),
    /// Run several algorithms on one target from a shared initial point.
    Compare(CompareArgs),
    /// Check a parameter triple against the convergence guarantee.
    Gate(GateArgs),
    /// Export the largest admissible alpha over a (beta, gamma) grid as CSV.
    Paramgrid(ParamgridArgs),
    /// Brute-force checks: projection optimality or a trace's descent audit.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Gaussian,
    Rect,
}

/// Dense matrix from CSV, or a Gabor frame (the default).
#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// Dense transform: one matrix row per line as `re,im` pairs.
    #[arg(long, value_name = "CSV", conflicts_with_all = ["len", "hop", "channels", "window"])]
    pub dense: Option<PathBuf>,
    /// Signal length L.
    #[arg(long = "len", short = 'L', default_value_t = 4096)]
    pub len: usize,
    /// Hop size a.
    #[arg(long, default_value_t = 32)]
    pub hop: usize,
    /// Frequency channels Mch.
    #[arg(long, default_value_t = 256)]
    pub channels: usize,
    #[arg(long, value_enum, default_value_t = WindowArg::Gaussian)]
    pub window: WindowArg,
    /// Support of the rectangular window (defaults to Mch).
    #[arg(long)]
    pub window_width: Option<usize>,
}

impl TransformArgs {
    pub fn window_kind(&self) -> WindowKind {
        match self.window {
            WindowArg::Gaussian => WindowKind::Gaussian,
            WindowArg::Rect => WindowKind::Rectangular {
                width: self.window_width.unwrap_or(self.channels),
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// PCM 16/24-bit or float32 WAV, downmixed and trimmed/padded to L.
    #[arg(long, value_name = "PATH")]
    pub wav: Option<PathBuf>,
    /// Synthetic signal such as `multitone,seed=7` (chirp, multitone, noise-burst).
    #[arg(long, value_name = "SPEC")]
    pub generator: Option<GeneratorSpec>,
    /// Target magnitudes, listed in coefficient order.
    #[arg(long, value_name = "CSV")]
    pub magnitudes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    ZeroPhase,
    RandomPhase,
}

#[derive(Debug, Clone, Args)]
pub struct InitArgs {
    #[arg(long, value_enum, default_value_t = InitArg::ZeroPhase)]
    pub init: InitArg,
    /// Seed for `--init random-phase`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial coefficients (`re,im` per line); overrides `--init`.
    #[arg(long, value_name = "CSV")]
    pub init_coefs: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Gla,
    Fgla,
    Agla,
    Raar,
    Dm,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Inertia weight for FGLA/AGLA (FGLA default 0.99, AGLA default 0.09).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = AGLA_GUARANTEED.1)]
    pub beta: f64,
    #[arg(long, default_value_t = AGLA_GUARANTEED.2)]
    pub gamma: f64,
    #[arg(long, default_value_t = RAAR_DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = DM_DEFAULT_RHO)]
    pub rho: f64,
}

impl ParamArgs {
    pub fn algorithm(&self, which: AlgorithmArg) -> Algorithm {
        match which {
            AlgorithmArg::Gla => Algorithm::Gla,
            AlgorithmArg::Fgla => Algorithm::Fgla {
                alpha: self.alpha.unwrap_or(FGLA_DEFAULT_ALPHA),
            },
            AlgorithmArg::Agla => Algorithm::Agla {
                alpha: self.alpha.unwrap_or(AGLA_GUARANTEED.0),
                beta: self.beta,
                gamma: self.gamma,
            },
            AlgorithmArg::Raar => Algorithm::Raar { lambda: self.lambda },
            AlgorithmArg::Dm => Algorithm::Dm { rho: self.rho },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub transform: TransformArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Iteration budget N.
    #[arg(long, short = 'n', default_value_t = 100)]
    pub iters: usize,
    /// Stop early once the step norm falls below this value.
    #[arg(long)]
    pub stop_delta_t: Option<f64>,
    /// Exit with status 2 unless every algorithm carries the descent guarantee.
    #[arg(long)]
    pub require_guarantee: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, short = 'a', value_enum, default_value_t = AlgorithmArg::Agla)]
    pub algorithm: AlgorithmArg,
    /// Trace output; the format follows the extension unless `--format` is given.
    #[arg(long, short = 'o', value_name = "PATH")]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Write the final coefficients (`re,im` per line).
    #[arg(long, value_name = "PATH")]
    pub coefs_out: Option<PathBuf>,
    /// Write the reconstructed signal as a float32 WAV.
    #[arg(long, value_name = "PATH")]
    pub wav_out: Option<PathBuf>,
    #[arg(long, default_value_t = 16_000)]
    pub sample_rate: u32,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgorithmArg::Gla, AlgorithmArg::Fgla, AlgorithmArg::Agla, AlgorithmArg::Raar, AlgorithmArg::Dm])]
    pub algorithms: Vec<AlgorithmArg>,
    /// One `<name>.<format>` trace per algorithm goes here.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Exit with status 2 when the triple fails.
    #[arg(long)]
    pub require_guarantee: bool,
}

#[derive(Debug, Args)]
pub struct ParamgridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Output file (stdout when omitted).
    #[arg(long, short = 'o', value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Compare the closed-form magnitude projection with a phase-grid search.
    Projection(ProjectionOracleArgs),
    /// Audit a trace against the descent inequality.
    Descent(DescentOracleArgs),
}

#[derive(Debug, Args)]
pub struct ProjectionOracleArgs {
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 16_384)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DescentOracleArgs {
    /// Trace written by `solve` or `compare` (CSV or JSON).
    pub trace: PathBuf,
    /// Constants for CSV traces; JSON traces carry their own.
    #[arg(long, requires = "k2")]
    pub k1: Option<f64>,
    #[arg(long, requires = "k1")]
    pub k2: Option<f64>,
    /// First step to check (default: 1 if the trace says the start was in range, else 2).
    #[arg(long)]
    pub from: Option<usize>,
}

//! `ndhelix` command-line front-end.
//!
//! Exit codes: 0 helix (or success), 3 non-helix, 2 degenerate input,
//! 1 any other error.

mod analyze;
mod config;
mod generate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndhelix::{Error, Signature};

pub use config::{ConfigFile, RunConfig};

pub const EXIT_HELIX: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_NOT_HELIX: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NDHELIX_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ndhelix", version, about = "Frenet apparatus and cylindrical-helix tests for curves in E^n and Minkowski space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a curve and write a helix report.
    Analyze(AnalyzeArgs),
    /// Run the four characterizations and report whether they agree.
    Verify(AnalyzeArgs),
    /// Write a generated curve file.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Args, Debug, Clone, Default)]
pub struct AnalyzeArgs {
    /// Curve file (`.csv` or JSON).
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    /// Text file listing one curve path per line; paths are relative to it.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON config file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Metric of CSV input; checked against JSON input.
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Expected dimension of the input.
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Resample the input to this arc-length spacing before analysis.
    #[arg(long)]
    pub h: Option<f64>,
    /// Physical step of the finite-difference stencil.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub tol_c: Option<f64>,
    #[arg(long)]
    pub tol_axis: Option<f64>,
    #[arg(long)]
    pub tol_mn: Option<f64>,
    #[arg(long)]
    pub tol_expand: Option<f64>,
    #[arg(long)]
    pub tol_pair: Option<f64>,
    #[arg(long)]
    pub tol_ode: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<ReportFormat>,
    /// Write the frame data as JSON.
    #[arg(long)]
    pub dump_frenet: Option<PathBuf>,
    /// Write `G_1..G_n` and their derivatives as JSON.
    #[arg(long)]
    pub dump_g: Option<PathBuf>,
    /// Write the two-column table `s,C`.
    #[arg(long)]
    pub dump_indicator: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GenerateCommand {
    /// Circular helix `(a cos s, a sin s, b s)` in E^3.
    Helix {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Timelike helix `(c s, a cos(omega s), a sin(omega s))` in Minkowski 3-space.
    TimelikeHelix {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// `s cos(theta) U + sin(theta) gamma(s)` on a built-in profile for n = 3, 4, 5.
    GeneralHelix {
        #[arg(long)]
        dimension: usize,
        /// Angle with the axis, radians.
        #[arg(long)]
        theta: f64,
        /// Comma-separated unit axis; defaults to the last coordinate axis.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        axis: Option<Vec<f64>>,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Integrate the Frenet equations for prescribed curvatures.
    FromCurvatures {
        /// Comma-separated constant curvatures.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "kappa_file", required_unless_present = "kappa_file")]
        kappa: Option<Vec<f64>>,
        /// CSV with header `s,k1,...` on a uniform grid.
        #[arg(long)]
        kappa_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "euclidean")]
        metric: MetricArg,
        /// Integration interval `start,end`.
        #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
        /// Round-trip report destination; stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Add a smooth normal displacement to an existing curve.
    Perturb {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        amplitude: f64,
        #[arg(long, value_enum, default_value = "bump")]
        mode: ModeArg,
        /// Metric of CSV input.
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Write the reference battery (six helices and their perturbations).
    Battery {
        /// Directory receiving one JSON file per curve.
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 0.05)]
        amplitude: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GenerateOutput {
    /// Curve file; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    pub output: PathBuf,
    /// Arc-length spacing of the samples.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricArg {
    Euclidean,
    Lorentzian,
}

impl From<MetricArg> for Signature {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Signature::Euclidean,
            MetricArg::Lorentzian => Signature::Lorentzian,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Bump,
    Sinusoid,
}

/// Exit code of a library error.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::DegenerateCurvature { .. }
        | Error::DegenerateFrame { .. }
        | Error::InsufficientSamples { .. } => EXIT_DEGENERATE,
        _ => EXIT_ERROR,
    }
}

/// Combined exit code of several runs: errors dominate degeneracy, which
/// dominates a negative verdict.
pub fn combine_exit_codes(codes: impl IntoIterator<Item = i32>) -> i32 {
    let rank = |c: i32| match c {
        EXIT_ERROR => 3,
        EXIT_DEGENERATE => 2,
        EXIT_NOT_HELIX => 1,
        _ => 0,
    };
    codes.into_iter().max_by_key(|c| rank(*c)).unwrap_or(EXIT_HELIX)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_HELIX };
        }
    };
    let threads = match thread_cap() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("ndhelix: error: {msg}");
            return EXIT_ERROR;
        }
    };
    with_thread_cap(threads, move || match cli.command {
        Command::Analyze(args) => analyze::cmd_analyze(&args, false),
        Command::Verify(args) => analyze::cmd_analyze(&args, true),
        Command::Generate(cmd) => generate::cmd_generate(cmd),
    })
}

fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
    }
}

#[cfg(feature = "parallel")]
fn with_thread_cap<F: FnOnce() -> i32 + Send>(threads: Option<usize>, f: F) -> i32 {
    match threads {
        None => f(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                eprintln!("ndhelix: error: cannot start thread pool: {e}");
                EXIT_ERROR
            }
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn with_thread_cap<F: FnOnce() -> i32 + Send>(_threads: Option<usize>, f: F) -> i32 {
    f()
}

fn report_error(err: &dyn std::fmt::Display) {
    eprintln!("ndhelix: error: {err}");
}

/// Destination opened before any computation so that an unwritable path
/// fails fast.
enum Sink {
    Stdout,
    File(PathBuf, std::fs::File),
}

impl Sink {
    fn open(path: Option<&PathBuf>) -> Result<Self, Error> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => std::fs::File::create(p)
                .map(|f| Sink::File(p.clone(), f))
                .map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        }
    }

    fn write(self, text: &str) -> Result<(), Error> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
            Sink::File(p, mut f) => f
                .write_all(text.as_bytes())
                .and_then(|_| f.flush())
                .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        }
        Ok(())
    }
}

//! Command-line front end for `qspectra`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 2 for invalid input, 3 for numerical failures
//! (and for failed residual checks in `check`).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod document;
pub mod format;

pub use document::{parse_document, write_document, DocError, ModelDocument, SignStyle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qspectra", version, about = "Spectra of block-partitioned pseudo-Hermitian Hamiltonians")]
pub(crate) struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write data to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Variant {
    /// F + A (G - rho)^-1 A†
    Canonical,
    /// F - A (G - rho)^-1 A†
    Hermitian,
}

#[derive(Subcommand, Debug)]
pub(crate) enum Command {
    /// List the admissible sign patterns of N partitions.
    Patterns {
        #[arg(long)]
        n: usize,
    },
    /// Reorder a model to the canonical two-block form.
    Canon {
        #[arg(long)]
        input: PathBuf,
    },
    /// Eigenvalues, reality classes, pseudo-norms and left residuals.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Relative reality tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Effective Hamiltonian of the canonical form at energy rho.
    Feshbach {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, value_enum, default_value_t = Variant::Canonical)]
        variant: Variant,
    },
    /// Self-consistent energies rho = E_n(rho).
    Selfconsistent {
        #[arg(long)]
        input: PathBuf,
        /// Only this level (default: all).
        #[arg(long)]
        level: Option<usize>,
        /// Absolute tolerance on bracket width and residual.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = Variant::Canonical)]
        variant: Variant,
    },
    /// Reality of the spectrum along a coupling scan.
    Scan {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        from: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Relative reality tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Locate the coupling where the spectrum stops being real.
    Ep {
        #[command(flatten)]
        family: FamilyArgs,
        /// `lo,hi`
        #[arg(long, allow_hyphen_values = true)]
        bracket: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Relative reality tolerance.
        #[arg(long, default_value_t = 1e-8)]
        reality_tol: f64,
    },
    /// Generate a model.
    Model {
        #[command(subcommand)]
        kind: ModelKind,
    },
    /// Run every residual check on a model.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Relative tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum FamilyModel {
    TwoLevel,
}

/// A one-parameter family: a built-in model or a document whose couplings
/// are scaled by the parameter.
#[derive(Args, Debug)]
pub(crate) struct FamilyArgs {
    #[arg(long, value_enum, conflicts_with = "input")]
    pub model: Option<FamilyModel>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub f: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
    pub g: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "-")]
    pub sign: String,
}

#[derive(Subcommand, Debug)]
pub(crate) enum ModelKind {
    /// The 2x2 model [[f, s a], [a, g]].
    TwoLevel {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        f: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
        g: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        a: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "-")]
        sign: String,
    },
    /// Seeded random model for a coloring or sign pattern.
    Random {
        /// Comma-separated block dimensions.
        #[arg(long)]
        dims: String,
        /// Comma-separated ±1 per partition.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "pattern")]
        coloring: Option<String>,
        /// Comma-separated ±1 per pair (0,1),(0,2),(1,2),(0,3),...
        #[arg(long, allow_hyphen_values = true)]
        pattern: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Quadruple well on a deformed contour: symmetry residuals and spectrum.
    PtWell {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        coupling_g: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        eps0: f64,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        /// Relative reality tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Number of lowest eigenvalues listed in the table.
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Four sectors of the undeformed well coupled by seeded random blocks.
    FourBlock {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        coupling_g: f64,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "+,-,-,-,-,+")]
        pattern: String,
        #[arg(long, default_value_t = 8)]
        keep: usize,
        /// Coupling magnitude.
        #[arg(long, default_value_t = 1e-3)]
        scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Diagnostic and exit code of a failed command.
#[derive(Debug)]
pub(crate) struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<qspectra::Error> for Failure {
    fn from(e: qspectra::Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
        Self { code, message: e.to_string() }
    }
}

/// Output of a successful command. `failed` marks a completed `check` with
/// failing entries.
pub(crate) struct Report {
    pub data: String,
    pub warnings: Vec<String>,
    pub failed: bool,
}

impl Report {
    pub fn data(data: String) -> Self {
        Self { data, warnings: Vec::new(), failed: false }
    }
}

/// Runs the command line against the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line with explicit output and diagnostic streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    let result = thread_pool().and_then(|pool| match pool {
        Some(pool) => pool.install(|| commands::execute(&cli)),
        None => commands::execute(&cli),
    });
    match result {
        Ok(report) => {
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &report.data)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(report.data.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
            if report.failed {
                let _ = writeln!(err, "error: one or more checks failed");
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(value) = std::env::var("QSPECTRA_THREADS") else {
        return Ok(None);
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::input(format!("QSPECTRA_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Failure::input(format!("cannot build thread pool: {e}")))
}

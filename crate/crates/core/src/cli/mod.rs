//! Command-line front end for the `twoq` binary.
//!
//! Exit status: 0 on success, 1 for malformed input, I/O failure or a failed
//! `verify`, 2 for a non-unitary matrix, 3 when a decomposition fails.

pub mod files;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::gate::phase_distance;
use crate::kak::{synthesize, Backend, SynthOptions};
use crate::mat::{Mat4, Tolerance};
use crate::samples;

pub use files::{format_circuit, format_matrix, parse_circuit, parse_matrix};

pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_NOT_UNITARY: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "twoq", version, about = "Synthesize two-qubit unitaries into Ry/Rz/CNOT circuits")]
struct Cli {
    /// Unitarity tolerance for input matrices and the verify threshold.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Kak,
    Qr,
    Sandwich,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Kak => Backend::Kak,
            BackendArg::Qr => Backend::Qr,
            BackendArg::Sandwich => Backend::Sandwich,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a circuit for the matrix in <MATRIX>.
    Synth {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "kak")]
        backend: BackendArg,
        /// Emit the raw template without peephole simplification.
        #[arg(long)]
        no_simplify: bool,
        /// Write the circuit here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print backend, gate counts and reconstruction error.
        #[arg(long)]
        report: bool,
    },
    /// Print the phase distance between a matrix and a circuit.
    Verify { matrix: PathBuf, circuit: PathBuf },
    /// Print the matrix a circuit evaluates to.
    Eval { circuit: PathBuf },
    /// Write the bundled example matrices (hxh.mat, uf.mat, qft.mat).
    Examples {
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// A failure with its exit status and message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure { code: EXIT_MALFORMED, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotUnitary { .. } => EXIT_NOT_UNITARY,
            Error::InvalidTolerance(_) => EXIT_MALFORMED,
            _ => EXIT_INTERNAL,
        };
        Failure { code, message: format!("{}: {e}", e.name()) }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn read_unitary(path: &Path, tol: Tolerance) -> Result<Mat4, Failure> {
    let m = parse_matrix(&read(path)?).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    let deviation = m.unitarity_deviation();
    if deviation > tol.eps() {
        return Err(Error::NotUnitary { deviation }.into());
    }
    Ok(m)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::malformed(format!("write failed: {e}")))
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let tol = Tolerance::new(cli.tolerance)?;
    match cli.command {
        Command::Synth { matrix, backend, no_simplify, out: out_path, report } => {
            let u = read_unitary(&matrix, tol)?;
            let opts = SynthOptions { tolerance: tol, simplify: !no_simplify };
            let rep = synthesize(&u, backend.into(), &opts)?;
            let text = format_circuit(&rep.circuit);
            match &out_path {
                Some(p) => write_file(p, &text)?,
                None => emit(out, &text)?,
            }
            if report {
                let line = format!("{}\n", rep.summary_line());
                // Keep stdout a valid circuit file when the circuit goes there.
                if out_path.is_some() {
                    emit(out, &line)?;
                } else {
                    emit(err, &line)?;
                }
            }
            Ok(0)
        }
        Command::Verify { matrix, circuit } => {
            let u = read_unitary(&matrix, tol)?;
            let c = parse_circuit(&read(&circuit)?).map_err(|e| Failure::malformed(format!("{}: {e}", circuit.display())))?;
            let d = phase_distance(&u, &c.eval());
            emit(out, &format!("phase_distance={d:e}\n"))?;
            if d <= tol.eps() {
                Ok(0)
            } else {
                emit(err, &format!("circuit differs from matrix by more than {:e}\n", tol.eps()))?;
                Ok(EXIT_MALFORMED)
            }
        }
        Command::Eval { circuit } => {
            let c = parse_circuit(&read(&circuit)?).map_err(|e| Failure::malformed(format!("{}: {e}", circuit.display())))?;
            emit(out, &format_matrix(&c.eval()))?;
            Ok(0)
        }
        Command::Examples { dir } => {
            fs::create_dir_all(&dir).map_err(|e| Failure::malformed(format!("{}: {e}", dir.display())))?;
            for (name, m) in samples::named_examples() {
                let path = dir.join(name);
                write_file(&path, &format_matrix(&m))?;
                emit(out, &format!("{}\n", path.display()))?;
            }
            Ok(0)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            let _ = if informational { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return if informational { 0 } else { EXIT_MALFORMED };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

//! `oscal` — verification suites, algebra classification, and spectra for
//! noncanonical oscillator constructions.
//!
//! Exit codes: 0 all checks passed; 1 any verification or solver failure
//! (an envelope with the error is still written); 2 usage errors. No other
//! codes are produced.

pub mod commands;
pub mod config;
pub mod envelope;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;
use crate::envelope::ReportEnvelope;

/// How a run can fail before producing a successful outcome.
#[derive(Debug)]
pub enum Failure {
    /// Caller error: message goes to stderr, exit code 2, no envelope.
    Usage(String),
    /// Solver/verification error: the envelope (with `error` set) is still
    /// written to the normal output stream, exit code 1.
    Solver(Box<ReportEnvelope>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

/// Options accepted by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat key=value config file ('#' comments); flags override its values.
    #[arg(long, global = false)]
    pub config: Option<PathBuf>,
    /// RNG seed for stochastic probe sets. Default 42; the OSCAL_SEED
    /// environment variable overrides the default, an explicit flag wins.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format (default json). CSV is defined for spectrum and algebra.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    pub output: Option<String>,
    /// Append annotations about displayed-value discrepancies to the notes.
    #[arg(long = "paper-notes")]
    pub paper_notes: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "oscal",
    version,
    about = "Verify operator identities of noncanonical oscillator constructions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an identity-verification suite and emit a report envelope.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Classify the deformed oscillator algebra for one or more chi values.
    Algebra(AlgebraArgs),
    /// Compute spectra: the radial Cornell problem or oscillator clusters.
    Spectrum {
        #[command(subcommand)]
        kind: SpectrumKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifySuite {
    /// Seven-identity suite of the (1+1)D supersymmetric construction.
    Susy1d(VerifySusy1dArgs),
    /// Identity suite and pairing diagnostic of the (3+1)D construction.
    Susy3d(VerifySusy3dArgs),
    /// Deformed brackets of the involution ("eta") representations.
    Eta(VerifyEtaArgs),
    /// Symbolic gauge-field commutators and the quadratic-equation reduction.
    Gauge(VerifyGaugeArgs),
}

#[derive(Debug, Args)]
pub struct VerifySusy1dArgs {
    /// Fock-space cutoff N (matrix dimension is 2N). Default 32.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Interior buffer: top occupation numbers excluded from checks. Default 2.
    #[arg(long)]
    pub buffer: Option<usize>,
    /// Residual tolerance for every identity. Default 1e-10.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct VerifySusy3dArgs {
    /// Shell cutoff Nmax (states with n1+n2+n3 <= Nmax). Default 10.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Interior buffer in shell number. Default 2.
    #[arg(long)]
    pub buffer: Option<usize>,
    /// Residual tolerance for every identity. Default 1e-10.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Eigenvalue gap below which levels merge into one cluster. Default 1e-8.
    #[arg(long)]
    pub gap: Option<f64>,
    /// |E| below this counts as a zero mode. Default 1e-10.
    #[arg(long = "zero-tol")]
    pub zero_tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct VerifyEtaArgs {
    /// Per-axis Fock cutoff of the cubic triple-mode basis. Default 4.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Interior buffer per axis. Default 2.
    #[arg(long)]
    pub buffer: Option<usize>,
    /// Residual tolerance. Default 1e-12.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct VerifyGaugeArgs {
    /// Coulomb-like coupling of the scalar potential. Default 1.
    #[arg(long, allow_negative_numbers = true)]
    pub a1: Option<f64>,
    /// Linear coupling of the scalar potential. Default 1.
    #[arg(long, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    /// Spatial coupling strength. Default 0.2.
    #[arg(long, allow_negative_numbers = true)]
    pub a3: Option<f64>,
    /// Stationary energy of the reduction check. Default 1.5.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    /// Deformation constant; repeat for a sweep. Default: a seven-point
    /// sweep over both signs and zero.
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Vec<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumKind {
    /// Coulomb-plus-linear radial problem (direct or via wave-equation
    /// parameters a1/a2/a3).
    Cornell(SpectrumCornellArgs),
    /// Clustered spectrum of the supersymmetric oscillator Hamiltonian.
    Susy(SpectrumSusyArgs),
    /// Clustered spectrum of the sign-symmetric (ZB) Hamiltonian.
    Zb(SpectrumZbArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumCornellArgs {
    /// Coulomb strength (attractive when positive). Default 0.
    #[arg(long, conflicts_with_all = ["a1", "a2", "a3"], allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Linear slope (must be nonnegative). Default 0.
    #[arg(long, conflicts_with_all = ["a1", "a2", "a3"], allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Orbital quantum number. Default 0.
    #[arg(long)]
    pub l: Option<u32>,
    /// Number of levels to compute. Default 4.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Interior points of the coarse grid (auto-sized box when omitted).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Box radius (auto-sized when omitted).
    #[arg(long)]
    pub rmax: Option<f64>,
    /// sigma3 branch selecting the Coulomb strength in mapped mode.
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// Wave-equation Coulomb-like coupling (enables mapped mode).
    #[arg(long, allow_negative_numbers = true)]
    pub a1: Option<f64>,
    /// Wave-equation linear coupling (enables mapped mode).
    #[arg(long, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    /// Wave-equation spatial coupling (enables mapped mode).
    #[arg(long, allow_negative_numbers = true)]
    pub a3: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumSusyArgs {
    /// Spatial dimension of the construction: 1 or 3. Default 1.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Fock cutoff (1D) or shell cutoff Nmax (3D). Defaults 32 / 10.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Interior buffer. Default 2.
    #[arg(long)]
    pub buffer: Option<usize>,
    /// Cluster gap. Default 1e-8.
    #[arg(long)]
    pub gap: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumZbArgs {
    /// Fock cutoff N. Default 32.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Interior buffer. Default 2.
    #[arg(long)]
    pub buffer: Option<usize>,
    /// Cluster gap. Default 1e-8.
    #[arg(long)]
    pub gap: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Writes rendered output to the requested destination.
fn write_out(rendered: &str, output: Option<&str>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Failure::Usage(format!("cannot write output file {path}: {e}"))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn render_and_exit(outcome: Outcome) -> i32 {
    let rendered = match outcome.format {
        OutputFormat::Json => outcome.envelope.to_json(),
        OutputFormat::Text => outcome.envelope.to_text(),
        OutputFormat::Csv => match outcome.csv {
            Some(csv) => csv,
            None => {
                eprintln!(
                    "error: csv output is not defined for {}; use --format json or text",
                    outcome.envelope.command
                );
                return 2;
            }
        },
    };
    if let Err(Failure::Usage(msg)) = write_out(&rendered, outcome.output.as_deref()) {
        eprintln!("error: {msg}");
        return 2;
    }
    if outcome.envelope.overall_pass {
        0
    } else {
        1
    }
}

/// Dispatches a parsed command line and returns the process exit code
/// (0 all-pass, 1 verification/solver failure, 2 usage error).
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Verify { suite } => match suite {
            VerifySuite::Susy1d(a) => commands::run_verify_susy1d(a),
            VerifySuite::Susy3d(a) => commands::run_verify_susy3d(a),
            VerifySuite::Eta(a) => commands::run_verify_eta(a),
            VerifySuite::Gauge(a) => commands::run_verify_gauge(a),
        },
        Command::Algebra(a) => commands::run_algebra(a),
        Command::Spectrum { kind } => match kind {
            SpectrumKind::Cornell(a) => commands::run_spectrum_cornell(a),
            SpectrumKind::Susy(a) => commands::run_spectrum_susy(a),
            SpectrumKind::Zb(a) => commands::run_spectrum_zb(a),
        },
    };
    match result {
        Ok(outcome) => render_and_exit(outcome),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Solver(envelope)) => {
            // The envelope still reaches the normal output stream so callers
            // can parse the error; format/output resolution may itself have
            // failed, so fall back to stdout JSON.
            print!("{}", envelope.to_json());
            1
        }
    }
}

//! `tropos` — tropical descent toolkit. Subcommands expose valuation
//! polygons, circle-mean profiles, digit-reversal sequences, signed
//! divisor lifts, vertical zero densities, the two-sided explicit
//! identity over zero tables, and symbolic scaling-flow residuals.
//!
//! Exit codes: 0 success, 2 precondition/argument failure, 3 numerical
//! resolution exhausted, 64 usage error.

mod cmd;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cmd::{Ctx, Format};
use tropos_core::Error;

#[derive(Parser)]
#[command(
    name = "tropos",
    version,
    about = "Tropical descent toolkit: polygons, lifts, zero densities, explicit identities",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the artifact to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Artifact format; every subcommand documents its native one
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Seed for jitter policies (boundary nudges in zero counting)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Advisory worker count; accepted for interface stability, all
    /// reductions are deterministic and currently single-threaded
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Valuation polygon of a p-adic polynomial/series (JSON in, JSON out)
    Newton(NewtonArgs),
    /// Circle-averaged log-modulus profile of a complex polynomial (JSON)
    Jensen(JensenArgs),
    /// Digit-reversal sequence values over an index range (CSV)
    Apseq(ApseqArgs),
    /// Signed point lift of a density pair (CSV), or its pairing (--pair, JSON)
    Lift(LiftArgs),
    /// Vertical-strip zero density of an exponential sum, two routes (JSON)
    Jessen(JessenArgs),
    /// Two-sided explicit identity over a zero table (JSON)
    Weil(WeilArgs),
    /// Scaling-flow holomorphy residual table on symbolic grids (CSV)
    Witt(WittArgs),
    /// Piecewise-affine operations: laplacian, add, rr (JSON)
    Pwa(PwaArgs),
}

#[derive(Args)]
pub struct NewtonArgs {
    /// Input series description (JSON with "p", "poly" or "coeffs", "annulus")
    #[arg(long = "in", value_name = "FILE", required_unless_present = "selftest")]
    pub input: Option<PathBuf>,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args)]
pub struct JensenArgs {
    /// Root list (JSON with "roots" [[re,im,mult],...], "annulus" [r_lo,r_hi])
    #[arg(long, value_name = "FILE", required_unless_present = "selftest")]
    pub roots: Option<PathBuf>,
    /// Left end of the profile window (x = -log r)
    #[arg(long, required_unless_present = "selftest", allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    /// Right end of the profile window
    #[arg(long, required_unless_present = "selftest", allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    /// Number of window subdivisions scanned for slope changes
    #[arg(long, default_value_t = 48)]
    pub grid: usize,
    /// Quadrature nodes per circle mean
    #[arg(long, default_value_t = 96)]
    pub nodes: usize,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args)]
pub struct ApseqArgs {
    /// Digit base (a prime)
    #[arg(long, required_unless_present = "selftest")]
    pub p: Option<u32>,
    /// Inclusive index range lo:hi
    #[arg(long, value_name = "LO:HI", required_unless_present = "selftest", allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args)]
pub struct LiftArgs {
    /// Density preset for the (zeros, poles) profile pair
    #[arg(long, required_unless_present = "selftest")]
    pub density: Option<String>,
    /// Height bound: one zero and one pole per height |k| <= K
    #[arg(long = "K", required_unless_present = "selftest")]
    pub k: Option<i64>,
    /// Pair the cloud against a test function ([psi=]poly:c0,c1,...)
    /// and report JSON instead of the point CSV
    #[arg(long, value_name = "PSI")]
    pub pair: Option<String>,
    /// Height truncation for the pairing (defaults to K)
    #[arg(long = "T", requires = "pair")]
    pub t: Option<i64>,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args)]
pub struct JessenArgs {
    /// Exponential sum, e.g. "1,-1@log2" for 1 - 2^(-s)
    #[arg(long, required_unless_present = "selftest", allow_hyphen_values = true)]
    pub sum: Option<String>,
    /// Vertical strip sigma_lo:sigma_hi
    #[arg(long, value_name = "LO:HI", required_unless_present = "selftest", allow_hyphen_values = true)]
    pub strip: Option<String>,
    /// Height bound of the counting box
    #[arg(long = "T", required_unless_present = "selftest")]
    pub t: Option<f64>,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    /// Compare the prime/archimedean side with the zero side
    Explicit,
}

#[derive(Args)]
pub struct WeilArgs {
    /// Zero-ordinate table (one ascending ordinate per line); relative
    /// paths also resolve under TROPOS_DATA_DIR
    #[arg(long, value_name = "FILE", required_unless_present = "selftest")]
    pub zeros: Option<PathBuf>,
    /// Test function, e.g. bump:2.1,2.9 (smooth bump supported there)
    #[arg(long, required_unless_present = "selftest")]
    pub f: Option<String>,
    /// Which identity to evaluate
    #[arg(long, value_enum, required_unless_present = "selftest")]
    pub check: Option<CheckKind>,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
pub enum WittCheck {
    /// Residuals before/after the multiplicative scaling flow
    Frobenius,
}

#[derive(Args)]
pub struct WittArgs {
    /// Which invariance to tabulate
    #[arg(long, value_enum, required_unless_present = "selftest")]
    pub check: Option<WittCheck>,
    /// Flow parameter (rational, e.g. 2 or 1/2)
    #[arg(long, required_unless_present = "selftest")]
    pub mu: Option<String>,
    /// Grid extent NxM
    #[arg(long, value_name = "NxM", required_unless_present = "selftest")]
    pub grid: Option<String>,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
pub enum PwaOp {
    /// Breakpoint divisor of a function
    Laplacian,
    /// Exact sum of two functions
    Add,
    /// Solve for a function clearing the poles of a divisor
    Rr,
}

#[derive(Args)]
pub struct PwaArgs {
    /// Operation to apply
    #[arg(long, value_enum, required_unless_present = "selftest")]
    pub op: Option<PwaOp>,
    /// Primary input (function JSON; divisor JSON for --op rr)
    #[arg(long = "in", value_name = "FILE", required_unless_present = "selftest")]
    pub input: Option<PathBuf>,
    /// Second function for --op add
    #[arg(long, value_name = "FILE")]
    pub with: Option<PathBuf>,
    /// Domain for --op rr (rational lo:hi, -inf/inf allowed)
    #[arg(long, default_value = "-inf:inf", allow_hyphen_values = true)]
    pub domain: String,
    /// Run the module's built-in examples instead
    #[arg(long)]
    pub selftest: bool,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Resolution(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> tropos_core::Result<()> {
    let ctx = Ctx {
        out: cli.out,
        format: cli.format,
        seed: cli.seed,
    };
    match cli.command {
        Command::Newton(a) => cmd::newton::run(&ctx, a),
        Command::Jensen(a) => cmd::jensen::run(&ctx, a),
        Command::Apseq(a) => cmd::apseq::run(&ctx, a),
        Command::Lift(a) => cmd::lift::run(&ctx, a),
        Command::Jessen(a) => cmd::jessen::run(&ctx, a),
        Command::Weil(a) => cmd::weil::run(&ctx, a),
        Command::Witt(a) => cmd::witt::run(&ctx, a),
        Command::Pwa(a) => cmd::pwa::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // an explicitly requested help/version page is a success;
            // anything else (including a bare invocation) is usage
            let benign = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(64)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a consumer closing the pipe (`tropos ... | head`) is not an error
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tropos: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

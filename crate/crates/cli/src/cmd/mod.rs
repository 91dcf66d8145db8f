//! Subcommand implementations. Each `run` either performs the module's
//! self-checks (`--selftest`) or computes one artifact and writes it
//! through [`crate::output`].

pub mod apseq;
pub mod jensen;
pub mod jessen;
pub mod lift;
pub mod newton;
pub mod pwa;
pub mod weil;
pub mod witt;

use std::path::PathBuf;

use tropos_core::{Error, Result};

/// Output format of an artifact.
#[derive(Copy, Clone, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Global options shared by every subcommand.
pub struct Ctx {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
}

impl Ctx {
    /// Each artifact has one faithful representation; asking for the
    /// other format is an argument error rather than a lossy export.
    pub fn require_format(&self, native: Format, what: &str) -> Result<()> {
        match self.format {
            Some(f) if f != native => Err(Error::argument(format!(
                "{what} is emitted as {}; --format {} is not available here",
                native.name(),
                f.name()
            ))),
            _ => Ok(()),
        }
    }
}

/// One self-check: prints a pass line or fails the whole selftest with
/// a description of what went wrong.
pub fn check(name: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        println!("selftest {name}: ok");
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "selftest {name} failed: {}",
            detail()
        )))
    }
}

/// Unwraps an argument that clap marks required unless `--selftest` is
/// given; reaching this with `None` outside selftest is a programming
/// error, so the message names the flag for safety.
pub fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::argument(format!("missing required --{flag}")))
}

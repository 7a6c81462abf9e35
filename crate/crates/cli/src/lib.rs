//! `privex`: command-line front end for `privex-core`.
//!
//! Reads joint distributions and channels as JSON, runs the analyses and
//! writes plot-ready CSV or JSON, with a manifest next to every output file.

pub mod cli;
pub mod commands;
pub mod format;
pub mod grid;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod verify;

use std::time::Instant;

use anyhow::{Context, Result};

use crate::cli::Cli;
use crate::manifest::{digest, digest_file, RunManifest, TOOL_VERSION};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

/// At least one verification check failed.
#[derive(Debug)]
pub struct VerificationFailed {
    pub failed: usize,
}

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.failed)
    }
}

impl std::error::Error for VerificationFailed {}

fn core_exit_code(e: &privex_core::Error) -> u8 {
    use privex_core::Error::*;
    match e {
        NegativeEntry { .. }
        | NonFiniteEntry { .. }
        | ZeroTotalMass
        | NotNormalized { .. }
        | ShapeMismatch(_)
        | AlphabetMismatch(_)
        | UnknownSymbol(_)
        | NotBinaryInput(_)
        | InvalidGaussianPair(_)
        | InvalidConfig(_)
        | ConstantFunction => EXIT_INPUT,
        OutOfRange { .. }
        | EpsilonOutOfRange { .. }
        | DeltaOutOfRange(_)
        | IndependentSources
        | WeaklyIndependent
        | RateUnachievable { .. }
        | EpsilonAtOrAboveMI { .. }
        | EpsilonAtOrAboveRho2 { .. }
        | TruncationInsufficient { .. }
        | QuadratureNotConverged { .. }
        | NoFeasibleGamma => EXIT_INFEASIBLE,
    }
}

/// Process exit status for a failed run.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<privex_core::Error>() {
            return core_exit_code(e);
        }
        if cause.is::<VerificationFailed>() {
            return EXIT_VERIFICATION;
        }
    }
    EXIT_INPUT
}

/// Result of one command before it is written out.
#[derive(Debug, Clone)]
pub struct Output {
    pub body: String,
    pub input: Option<std::path::PathBuf>,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    /// Checks that failed; the body is still written.
    pub failed_checks: usize,
}

/// Run a parsed command line, writing to `--out` (plus manifest) or stdout.
pub fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    let (name, out_path) = (cli.command.name(), cli.command.out().map(|p| p.to_path_buf()));
    let output = commands::execute(&cli.command)?;
    match out_path {
        Some(path) => {
            std::fs::write(&path, &output.body).with_context(|| format!("cannot write {}", path.display()))?;
            let input_digest = output.input.as_deref().map(digest_file).transpose()?;
            RunManifest {
                command: name.to_string(),
                input_digest,
                config: output.config,
                tool_version: TOOL_VERSION.to_string(),
                output_digest: digest(output.body.as_bytes()),
                results: output.results,
                wall_clock_seconds: start.elapsed().as_secs_f64(),
            }
            .write(&path)?;
        }
        None => print!("{}", output.body),
    }
    if output.failed_checks > 0 {
        return Err(VerificationFailed { failed: output.failed_checks }.into());
    }
    Ok(())
}

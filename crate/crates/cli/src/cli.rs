//! Command-line syntax.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "privex", version, about = "Rate-privacy analysis of discrete and Gaussian sources")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    /// Mutual information `I(X;Z) <= eps`.
    Mi,
    /// Squared maximal correlation `rho_m^2(X;Z) <= eps`.
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Prob,
    Dependence,
    Filters,
    RatePrivacy,
    Gaussian,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Optimizer starts per solve.
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, env = "PRIVEX_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GaussianArgs {
    /// Squared correlation of the pair, in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub rho2: f64,
    #[arg(long = "var-y", default_value_t = 1.0, allow_negative_numbers = true)]
    pub var_y: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, dependence measures and structural tests of a joint distribution.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve g_eps along a grid: `epsilon,lower,value,upper,leakage`.
    Curve {
        #[arg(long)]
        input: PathBuf,
        /// `a:b:n` or a comma list; `I` stands for I(X;Y).
        #[arg(long, default_value = "0:I:9")]
        grid: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed forms for a jointly Gaussian pair, optionally with the M-bit quantized value.
    Gaussian {
        #[command(flatten)]
        pair: GaussianArgs,
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid", allow_negative_numbers = true)]
        eps: Option<f64>,
        #[arg(long)]
        grid: Option<String>,
        /// Quantizer resolution in bits for the `g_eps_M` column.
        #[arg(long = "M")]
        m: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Quantized additive-Gaussian filters: `M,gamma,i_xz,i_yz` per resolution.
    Quantized {
        #[command(flatten)]
        pair: GaussianArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Ascending resolutions in bits.
        #[arg(long = "M", value_delimiter = ',', default_value = "2,4,6,8")]
        m: Vec<u32>,
        /// Emit the whole noise-level sweep instead of the optimum per M.
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Emit an optimal filter as a channel JSON file.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Measure::Mi)]
        measure: Measure,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write here (plus `<out>.manifest.json`) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Privacy funnel: least leakage that releases `rate` bits about Y.
    Funnel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        rate: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Privacy corner of the dependence-dilution outer bound.
    Dilution {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "delta-a", allow_negative_numbers = true)]
        delta_a: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the randomized invariant checks; exits 4 if any fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Random instances per check.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, env = "PRIVEX_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Curve { .. } => "curve",
            Command::Gaussian { .. } => "gaussian",
            Command::Quantized { .. } => "quantized",
            Command::Filter { .. } => "filter",
            Command::Funnel { .. } => "funnel",
            Command::Dilution { .. } => "dilution",
            Command::Verify { .. } => "verify",
        }
    }

    pub fn out(&self) -> Option<&Path> {
        match self {
            Command::Filter { out, .. } => out.as_deref(),
            Command::Analyze { output, .. }
            | Command::Curve { output, .. }
            | Command::Gaussian { output, .. }
            | Command::Quantized { output, .. }
            | Command::Funnel { output, .. }
            | Command::Dilution { output, .. }
            | Command::Verify { output, .. } => output.out.as_deref(),
        }
    }
}

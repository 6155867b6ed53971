//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "greatroot", version, about = "Global tests over batches of greatest-root statistics")]
pub struct Cli {
    /// Directory for cached Tracy–Widom tables.
    #[arg(long, global = true, env = "GREATROOT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads for simulations (0 = all cores); never affects results.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tracy–Widom distribution values.
    Tw {
        #[command(subcommand)]
        cmd: TwCommand,
    },
    /// Critical value of the global test.
    Critval(CritvalArgs),
    /// Run the global test on data files.
    Test {
        #[command(subcommand)]
        cmd: TestCommand,
    },
    /// Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        cmd: SimulateCommand,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub x_left: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub x_right: f64,
    /// Relative tolerance of the Painlevé integration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Grid points over [x_left, x_right].
    #[arg(long, default_value_t = 1801)]
    pub n_points: usize,
}

#[derive(Debug, Subcommand)]
pub enum TwCommand {
    /// F1(x), or F2(x) with --beta 2.
    Cdf {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        beta: u8,
        #[command(flatten)]
        table: TableArgs,
    },
    /// TW1 density.
    Pdf {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[command(flatten)]
        table: TableArgs,
    },
    /// TW1 quantile.
    Quantile {
        #[arg(long)]
        u: f64,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Build the table and write it to the cache, or to --out.
    Table {
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Von Mises ratio (1 − F1) F1'' / F1'^2.
    Vonmises {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[command(flatten)]
        table: TableArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsArg {
    Exact,
    Asymptotic,
}

#[derive(Debug, Args)]
pub struct CritvalArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Dimension.
    #[arg(long)]
    pub p: u64,
    /// Degrees of freedom of A (the first/within sample).
    #[arg(long)]
    pub n1: u64,
    /// Degrees of freedom of B (the second/between sample).
    #[arg(long)]
    pub n2: u64,
    /// Number of sub-hypotheses.
    #[arg(long)]
    pub m: u64,
    #[arg(long, value_enum, default_value_t = ConstantsArg::Exact)]
    pub constants: ConstantsArg,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TestCommon {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Data files start with a header row.
    #[arg(long)]
    pub has_header: bool,
    /// Write the JSON result here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON result instead of the text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// Equality of covariances over m pairs of samples.
    Cov {
        /// CSV listing `sample1,sample2` file pairs.
        #[arg(long, conflicts_with = "pair")]
        manifest: Option<PathBuf>,
        /// A pair of sample files; repeat for each pair.
        #[arg(long, num_args = 2, value_names = ["SAMPLE1", "SAMPLE2"], action = clap::ArgAction::Append)]
        pair: Vec<PathBuf>,
        /// Subtract column means (df = rows − 1) instead of using raw cross-products.
        #[arg(long)]
        center: bool,
        #[command(flatten)]
        common: TestCommon,
    },
    /// MANOVA over m batches; one file per batch, first column = group label.
    Manova {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        common: TestCommon,
    },
}

#[derive(Debug, Args)]
pub struct SimCommon {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV; a JSON manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Normalized maxima of m TW1 variates vs Gumbel.
    Maxtw {
        #[arg(long, default_value_t = 500)]
        m: u64,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[command(flatten)]
        common: SimCommon,
    },
    /// Covariance power curve, Σ2 = γ Σ1.
    CovPower {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        /// Per-sample size (default p/2).
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// `start:stop:step` (inclusive) or a comma-separated list.
        #[arg(long, default_value = "1:2.5:0.25")]
        gamma: String,
        /// Use p = 100, m = 500, reps = 8000 unless given explicitly.
        #[arg(long)]
        full_scale: bool,
        #[command(flatten)]
        common: SimCommon,
    },
    /// MANOVA power curve, group means l^γ.
    ManovaPower {
        #[arg(long)]
        p: Option<u64>,
        /// Groups (default 2p).
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "0:1:0.1")]
        gamma: String,
        /// Use m = 500, reps = 8000 unless given explicitly.
        #[arg(long)]
        full_scale: bool,
        #[command(flatten)]
        common: SimCommon,
    },
}

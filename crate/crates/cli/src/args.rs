use clap::{Args, Parser, Subcommand, ValueEnum};
use lorentz_volume::{ExtendedReal, Method};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "lorentzvol",
    version,
    about = "Volumes of Lorentz sequence space unit balls, volume sequences and entropy bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Mantissa bits for the exact engines.
    #[arg(long, env = "LORENTZVOL_BITS", default_value_t = 256, global = true)]
    pub bits: usize,

    /// Exit with status 3 if any result is precision-flagged.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Volume of B^n_{p,q} for every listed (n, p, q).
    Volume(VolumeArgs),
    /// Volumes for n = 1..n-max (rows) and several p (columns).
    Table(TableArgs),
    /// vol^{1/n} with its predicted growth factor.
    Asymptotics(AsymptoticsArgs),
    /// Weak-to-strong volume ratio R_{p,n} and its growth.
    Ratio(RatioArgs),
    /// Entropy-number bounds for l^n_{1,inf} -> l^n_1, coding sets and packings.
    Entropy(EntropyArgs),
}

fn index(s: &str) -> Result<f64, String> {
    s.parse::<ExtendedReal>().map(|e| e.0)
}

fn method(s: &str) -> Result<Method, String> {
    Method::parse(s).ok_or_else(|| {
        format!(
            "unknown method `{s}` (auto, recursion, explicit, integral, product-q1, dirichlet, mc)"
        )
    })
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Confidence level of Monte Carlo intervals.
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    /// Dimensions (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,

    /// Values of p (comma separated; `inf` allowed).
    #[arg(long, value_delimiter = ',', value_parser = index, required = true)]
    pub p: Vec<f64>,

    /// Values of q (comma separated; `inf` allowed).
    #[arg(long, value_delimiter = ',', value_parser = index, required = true)]
    pub q: Vec<f64>,

    #[arg(long, value_parser = method, default_value = "auto")]
    pub method: Method,

    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, value_delimiter = ',', value_parser = index, default_value = "0.5,1,2,100")]
    pub p_list: Vec<f64>,

    #[arg(long, default_value_t = 15)]
    pub n_max: usize,

    #[arg(long, value_parser = index, default_value = "inf")]
    pub q: f64,

    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, value_parser = index)]
    pub p: f64,

    #[arg(long, value_parser = index, default_value = "inf")]
    pub q: f64,

    #[arg(long, default_value_t = 30)]
    pub n_max: usize,

    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RatioArgs {
    #[arg(long, value_parser = index)]
    pub p: f64,

    #[arg(long, default_value_t = 15)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub n: usize,

    /// Last k of the bound curve (default 4n).
    #[arg(long)]
    pub k_max: Option<u64>,

    /// Build a coding-set family (with --k) or a layered packing (with --mu).
    #[arg(long)]
    pub construct: bool,

    /// Set size of the coding-set family.
    #[arg(long, requires = "construct", conflicts_with = "mu")]
    pub k: Option<usize>,

    /// Lowest packing level.
    #[arg(long, requires = "construct")]
    pub mu: Option<u32>,

    /// Highest packing level (default: the largest with 12 * 4^nu <= n).
    #[arg(long, requires = "mu")]
    pub nu: Option<u32>,

    /// Rejected draws allowed before a coding-set construction gives up.
    #[arg(long, requires = "k")]
    pub budget: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

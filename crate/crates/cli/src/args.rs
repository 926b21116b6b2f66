use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bgn", version, about = "Bistable gradient network experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn weights from a set of patterns and write a weight file.
    Train(TrainArgs),
    /// Corrupt patterns with flip noise and relax them under stored weights.
    Denoise(DenoiseArgs),
    /// Train Hebb and CD on the same pattern family and compare recall.
    Compare(CompareArgs),
    /// Sweep network size and pattern count, writing recall error as CSV.
    Capacity(CapacityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Hebb,
    #[value(alias = "cd1")]
    Cd,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Hebb => "hebb",
            Rule::Cd => "cd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// Shared active block plus one small distinguishing block per pattern.
    Overlap,
    /// Independent uniform ±1 patterns.
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Built-in pattern family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long, default_value_t = 64)]
    pub n_total: usize,
    #[arg(long, default_value_t = 40)]
    pub n_shared: usize,
    #[arg(long, default_value_t = 4)]
    pub n_distinct: usize,
    /// Number of patterns in the family.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Seed for the random family.
    #[arg(long, default_value_t = 0)]
    pub pattern_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Uncompressed IDX image file.
    #[arg(long, conflicts_with = "family")]
    pub images: Option<PathBuf>,
    /// Uncompressed IDX label file matching --images.
    #[arg(long, requires = "images")]
    pub labels: Option<PathBuf>,
    /// Comma-separated image indices.
    #[arg(long, value_delimiter = ',', requires = "images")]
    pub indices: Vec<usize>,
    /// Use the first image of every digit class (needs --labels).
    #[arg(long, requires = "labels", conflicts_with = "indices")]
    pub one_per_class: bool,
    /// Pixels strictly above this intensity become active.
    #[arg(long, default_value_t = bgn::mnist::DEFAULT_THRESHOLD)]
    pub threshold: u8,
    #[command(flatten)]
    pub family: FamilyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "cd")]
    pub rule: Rule,
    /// CD order n [default: 1]
    #[arg(long)]
    pub cd_order: Option<usize>,
    /// Learning rate [default: 0.01]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Hebbian scale [default: patterns/neurons]
    #[arg(long)]
    pub beta: Option<f64>,
    /// CD epochs [default: 50]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Bound on initial |w_ij| [default: 0.01]
    #[arg(long)]
    pub init_scale: Option<f64>,
    /// Weight initialization seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Euler step used inside each CD update [default: 0.1]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Stop once an epoch's largest weight change falls below this.
    #[arg(long)]
    pub stop_threshold: Option<f64>,
    /// Output directory for weights.bgn and train_report.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Record wall-clock duration in the report (breaks byte-identical reruns).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DenoiseArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Weight file written by `train`.
    #[arg(long)]
    pub weights: PathBuf,
    /// Number of distinct entries to invert.
    #[arg(long, default_value_t = 100)]
    pub flip: usize,
    /// Base seed for the noise; each pattern and trial derives its own.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noise draws per pattern.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 25)]
    pub max_steps: usize,
    /// Drift max-norm at which relaxation stops early; 0 disables.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Snapshot every this many steps.
    #[arg(long, default_value_t = 5)]
    pub stride: usize,
    /// Snapshot image size as WIDTHxHEIGHT, for sources without one.
    #[arg(long)]
    pub shape: Option<String>,
    #[arg(long)]
    pub no_snapshots: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Exit with status 3 if the mean error rate exceeds this.
    #[arg(long = "assert", value_name = "MAX_MEAN_ERROR")]
    pub assert_max_error: Option<f64>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub stop_threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub cd_order: usize,
    #[arg(long, default_value_t = 0.01)]
    pub init_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hebbian scale [default: patterns/neurons]
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Directory for compare_report.json; printed to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 unless Hebb fails and CD recalls every pattern.
    #[arg(long)]
    pub assert: bool,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    /// Network sizes, comma-separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "100")]
    pub sizes: Vec<usize>,
    /// Pattern counts, comma-separated.
    #[arg(long = "p", value_delimiter = ',', default_value = "5,10,15,20,30")]
    pub counts: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "hebb,cd")]
    pub rules: Vec<Rule>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1)]
    pub cd_order: usize,
    #[arg(long, default_value_t = 0.01)]
    pub init_scale: f64,
    /// Hebbian scale [default: patterns/neurons]
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Directory for capacity.csv; printed to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

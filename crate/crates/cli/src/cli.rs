use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cotypelab::GeneratorSpec;

#[derive(Debug, Parser)]
#[command(
    name = "cotypelab",
    version,
    about = "Finite metric spaces, separated trees and metric cotype"
)]
pub struct Cli {
    /// Worker threads for enumeration and search (results do not depend on it).
    #[arg(long, global = true, env = "COTYPELAB_THREADS")]
    pub threads: Option<usize>,

    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric, ultrametric and separation diagnostics for a space.
    Analyze(AnalyzeArgs),
    /// Build a C-separated tree structure and emit it as DOT or JSON.
    Tree(TreeArgs),
    /// Minimum edge boundaries on Z_m^n against the isoperimetric bounds (CSV).
    Isoperimetry(IsoperimetryArgs),
    /// Search for functions Z_m^n -> X with large implied cotype constant.
    Cotype(CotypeArgs),
    /// Check a map against an embedding class and verify cotype transfer along it.
    Transfer(TransferArgs),
    /// Find an epsilon-chain between two points.
    Chain(ChainArgs),
    /// Write a generated space to a file or stdout.
    Gen(GenArgs),
}

/// Exactly one of `--gen` and `--input`.
#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct SpaceSource {
    /// Generator, e.g. `cantor-level=2` or `random-ultrametric=8,seed=7`.
    #[arg(long = "gen", value_name = "SPEC")]
    pub generator: Option<GeneratorSpec>,
    /// Space file: JSON {"labels","matrix"} or CSV (by extension).
    #[arg(long, short = 'i', value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    /// Exact up to 15 points, dendrogram beyond.
    Auto,
    Exact,
    Dendrogram,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub space: SpaceSource,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TreeFormat {
    Dot,
    Json,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[command(flatten)]
    pub space: SpaceSource,
    /// Separation constant; defaults to the space's own constant.
    #[arg(long, short = 'c')]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value = "dot")]
    pub format: TreeFormat,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IsoperimetryArgs {
    #[arg(short = 'n', long)]
    pub n: usize,
    #[arg(short = 'm', long, value_parser = parse_even)]
    pub m: usize,
    /// Enumerate every subset (needs m^n <= 16).
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Random subsets per size, instead of enumeration.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum StrategyArg {
    Exhaustive,
    Random,
    Local,
}

#[derive(Debug, Args)]
pub struct CotypeArgs {
    #[command(flatten)]
    pub space: SpaceSource,
    /// First exponent (defaults to q).
    #[arg(short = 'p', long)]
    pub p: Option<f64>,
    #[arg(short = 'q', long)]
    pub q: f64,
    #[arg(short = 'n', long)]
    pub n: usize,
    /// Torus side; defaults to the scaling function when p = q.
    #[arg(short = 'm', long, value_parser = parse_even)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "local")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 1000)]
    pub budget: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Declared constant; a larger implied constant is reported as a failure.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Evaluate this function file instead of searching.
    #[arg(long, value_name = "PATH")]
    pub function: Option<PathBuf>,
    /// Write the best function found.
    #[arg(long, value_name = "PATH")]
    pub save_function: Option<PathBuf>,
    /// Replay the separated-tree bound level by level for the best function.
    #[arg(long)]
    pub certify: bool,
    /// Write the certificate rows as CSV.
    #[arg(long, value_name = "PATH", requires = "certify")]
    pub certificate_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Bilip,
    Snowflake,
    LinearQs,
    RoughIsometry,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HarnessArg {
    /// X -> (X, d^alpha) by index.
    Snowflake,
    /// X -> a copy with distances raised by seeded amounts in [c/2, c].
    Rough,
    /// X -> its subdominant ultrametric.
    Bilip,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Map file {"source","target","assignment"}.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["generator", "input", "harness"])]
    pub map: Option<PathBuf>,
    /// Build the map from a space instead of reading it.
    #[arg(long, value_enum)]
    pub harness: Option<HarnessArg>,
    /// Space for `--harness`.
    #[arg(
        long = "gen",
        value_name = "SPEC",
        requires = "harness",
        conflicts_with = "input"
    )]
    pub generator: Option<GeneratorSpec>,
    #[arg(long, short = 'i', value_name = "PATH", requires = "harness")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Declared L.
    #[arg(long)]
    pub distortion: Option<f64>,
    /// Declared scale factor c of the scaled classes.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Declared slope K of eta(t) = K t.
    #[arg(long)]
    pub k: Option<f64>,
    /// Declared additive constant of a rough isometry.
    #[arg(long)]
    pub additive: Option<f64>,
    /// Sample functions and check the transferred inequality.
    #[arg(long)]
    pub verify: bool,
    #[arg(short = 'p', long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(short = 'q', long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(short = 'n', long, default_value_t = 2)]
    pub n: usize,
    #[arg(short = 'm', long, default_value_t = 4, value_parser = parse_even)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Constant assumed on the known side; fitted from the samples when omitted.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Write the map that was checked.
    #[arg(long, value_name = "PATH")]
    pub save_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub space: SpaceSource,
    /// Start point (label or index).
    #[arg(long)]
    pub from: String,
    /// End point (label or index).
    #[arg(long)]
    pub to: String,
    #[arg(long, short = 'e')]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator, e.g. `cycle=6` or `random-euclidean=10,seed=3,dim=2`.
    #[arg(long = "gen", value_name = "SPEC")]
    pub generator: GeneratorSpec,
    /// Output path; `.csv` selects CSV, anything else JSON. Stdout when omitted.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

fn parse_even(s: &str) -> Result<usize, String> {
    let m: usize = s
        .parse()
        .map_err(|_| format!("'{s}' is not a positive integer"))?;
    if m == 0 || m % 2 == 1 {
        return Err(format!("m must be a positive even integer, got {m}"));
    }
    Ok(m)
}

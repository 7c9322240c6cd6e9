use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdistill_core::search::CompressSide;
use qdistill_core::{NamedMap, SearchParams};

/// Distillability witnesses and Schmidt-rank-2 searches for bipartite states.
///
/// Exit codes: 0 = violation found, 1 = none found, 2 = invalid input, 3 = I/O failure.
#[derive(Debug, Parser)]
#[command(name = "qdistill", version, about, long_about = None)]
pub struct Cli {
    /// Also write the JSON run report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Print the JSON run report instead of the human summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state from a standard family.
    Gen(GenArgs),
    /// Search for a Schmidt rank-2 vector with negative expectation on (ρ^{⊗n})^{T_B}.
    Distill(DistillArgs),
    /// Search for a violation of k-positivity of a map.
    Kpos(KposArgs),
    /// Tabulate a one-parameter family as CSV.
    Sweep(SweepArgs),
    /// Validate a state file and print its witness values.
    Check(CheckArgs),
    /// Write the Jamiołkowski operator of a named map.
    ExportMap(ExportMapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Werner,
    Isotropic,
    Maxent,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    Werner,
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    A,
    Smaller,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: Family,
    /// Local dimension (of A for `random`).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Dimension of B for `random` (defaults to --d).
    #[arg(long)]
    pub db: Option<usize>,
    /// Werner parameter in [-1, 1]: ρ = (1 + αV)/(d² + αd).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Isotropic fidelity F = Tr(ρP₊) in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub fidelity: Option<f64>,
    /// Rank of a random state (defaults to full rank).
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; the state is printed when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Independent random restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Alternating iterations per restart.
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Values below -tol count as violations.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Factor compressed in the first half-step.
    #[arg(long, value_enum, default_value_t = SideArg::A)]
    pub side: SideArg,
}

impl SearchArgs {
    pub fn params(&self) -> SearchParams {
        SearchParams {
            restarts: self.restarts,
            max_iters: self.max_iters,
            neg_tol: self.tol,
            seed: self.seed,
            side: match self.side {
                SideArg::A => CompressSide::A,
                SideArg::Smaller => CompressSide::Smaller,
            },
            ..SearchParams::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    pub input: PathBuf,
    /// Number of copies n; the search runs on A^{⊗n} ⊗ B^{⊗n}.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Skip the Λ₁–Λ₅ screen that runs before the search.
    #[arg(long)]
    pub no_prepass: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["map", "operator", "from_state"]))]
pub struct KposArgs {
    /// Named map: lambda1 .. lambda5.
    #[arg(long)]
    pub map: Option<NamedMap>,
    /// Dimension for a named map.
    #[arg(long, requires = "map")]
    pub d: Option<usize>,
    /// Compose the named map with the transpose.
    #[arg(long, requires = "map")]
    pub transpose: bool,
    /// Jamiołkowski operator file (uses its `jamiolkowski_scale` tag).
    #[arg(long)]
    pub operator: Option<PathBuf>,
    /// Test T∘S for the map S with ρ = (1⊗S)P₊.
    #[arg(long)]
    pub from_state: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub family: SweepFamily,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// CSV output path; printed when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    /// Witness values below -tol count as violations.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ExportMapArgs {
    #[arg(long)]
    pub map: NamedMap,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub transpose: bool,
    #[arg(long, short)]
    pub out: PathBuf,
}

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "spf", version, about = "Stabilizer pathfinding: teleportation patterns and loss simulation")]
pub struct Cli {
    /// Worker threads (defaults to all cores); outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a channel graph state.
    Build(BuildArgs),
    /// Find stabilizer measurement patterns.
    Patterns(PatternsArgs),
    /// Graph-path baseline patterns.
    Gpf(GpfArgs),
    /// Monte Carlo teleportation rates under loss.
    Simulate(SimulateArgs),
    /// Threshold scan over lattice sizes.
    Sweep(SweepArgs),
    /// Certify patterns against the dense-state oracle.
    Verify(VerifyArgs),
    /// Count tolerable loss configurations.
    Tolerance(ToleranceArgs),
    /// Time state building and pattern finding on random graphs.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// square, triangular, hexagonal, crazy, tree_to_tree, linear, star, chains, random_gnm
    #[arg(long)]
    pub kind: String,
    /// Dimensions such as `4x4`, `4,4` or `2`.
    #[arg(long, default_value = "")]
    pub dims: String,
    /// Seed for random graphs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest generator combination tracked: `auto` (half the qubits), `off` or a number.
    #[arg(long, default_value = "off")]
    pub max_combo_size: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PatternsArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "O")]
    pub output_qubit: String,
    /// Weight budget above the minimum pattern weight.
    #[arg(long, default_value_t = 3)]
    pub extra_weight: usize,
    /// Absolute weight budget; overrides `--extra-weight`.
    #[arg(long)]
    pub max_weight: Option<usize>,
    /// Rebuild the state with this combination cap: `auto`, `off` or a number.
    #[arg(long)]
    pub max_combo_size: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GpfArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "O")]
    pub output_qubit: String,
    /// Paths up to this many edges longer than the shortest.
    #[arg(long, default_value_t = 2)]
    pub extra_length: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_paths: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Heralded,
    Unheralded,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    MaxTolerance,
    MostCommon,
}

#[derive(Args, Debug)]
pub struct LossArgs {
    #[arg(long, value_enum, default_value = "heralded")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "max-tolerance")]
    pub strategy: StrategyArg,
    /// Keep patterns that do not touch a successfully measured qubit.
    #[arg(long)]
    pub keep_omitting: bool,
    /// `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "0.0:0.5:0.025")]
    pub loss: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub patterns: PathBuf,
    #[command(flatten)]
    pub loss: LossArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value = "2,3,4")]
    pub sizes: String,
    #[arg(long, default_value_t = 3)]
    pub extra_weight: usize,
    #[command(flatten)]
    pub loss: LossArgs,
    /// Rate curves as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Crossing report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub patterns: PathBuf,
    /// Seed for the random input states.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ToleranceArgs {
    #[arg(long)]
    pub patterns: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Node counts, `n=6..12` or `6..12` (inclusive).
    #[arg(long, default_value = "n=6..12")]
    pub random_graphs: String,
    /// `auto` (n-1, 3n/2 and 2n) or a comma-separated list.
    #[arg(long, default_value = "auto")]
    pub edges: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub extra_weight: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}

//! `shearsub`: masks, refinement, convergence checks, direction planning and
//! shearlet decomposition from the command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 failed validation,
//! 4 data or period mismatch.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "shearsub", version, about = "Adaptive directional subdivision and shearlet decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Which mask pair to use.
#[derive(Args, Debug, Clone)]
struct PairArgs {
    /// `dd`, `bspline:<m>`, `indicator`, or `tensor:<b1>,<b2>` with 1-D
    /// rules `dd` or `bspline:<m>`.
    #[arg(long, default_value = "dd")]
    pair: String,
    /// Mask JSON for `a0`; overrides --pair.
    #[arg(long, requires = "a1")]
    a0: Option<PathBuf>,
    /// Mask JSON for `a1`; overrides --pair.
    #[arg(long, requires = "a0")]
    a1: Option<PathBuf>,
    /// Multiply both masks by this dyadic number.
    #[arg(long)]
    scale: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build or check masks.
    Mask {
        #[command(subcommand)]
        action: MaskAction,
    },
    /// Apply the subdivision word to a field.
    Refine(RefineArgs),
    /// Sum-rule screening and joint spectral radius bracket as JSON.
    Converge(ConvergeArgs),
    /// Find a word turning the source slope to within delta of the target.
    Plan(PlanArgs),
    /// Shearlet decomposition into a tree directory.
    Decompose(DecomposeArgs),
    /// Synthesize a field from a tree directory.
    Reconstruct(ReconstructArgs),
    /// Decompose and reconstruct every leaf path, reporting the max error.
    Roundtrip(RoundtripArgs),
}

#[derive(Subcommand, Debug)]
enum MaskAction {
    /// Write `a0.json` and `a1.json`.
    Build {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Report the interpolatory flag, sum rules and reduction cofactors.
    Check {
        mask: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Pgm,
    Both,
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Word of steps, first step first, e.g. `01111`.
    #[arg(long, default_value = "")]
    eps: String,
    /// Field CSV input.
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Built-in input: `c1`, `c2` or `delta`.
    #[arg(long)]
    fixture: Option<String>,
    /// Reinterpret the input boundary: `zero` or `periodic:P1,P2`.
    #[arg(long)]
    boundary: Option<String>,
    /// Output path; the extension is replaced per format.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Compute in floating point instead of exact dyadics.
    #[arg(long)]
    float: bool,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    /// As for other commands, plus `zero` for the pair of zero difference masks.
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    /// Largest dense box an iterated difference mask may occupy.
    #[arg(long, default_value_t = 1_000_000)]
    max_positions: usize,
    #[arg(long, default_value_t = 5)]
    probes: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Positive rational, decimal, or `inf`.
    #[arg(long, default_value = "inf")]
    source_slope: String,
    /// Target slope in `[1/2, inf]`.
    #[arg(long)]
    target: String,
    #[arg(long, default_value = "1e-3")]
    delta: String,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    depth: usize,
    /// Analyze one path instead of the full tree.
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    tree_dir: PathBuf,
    /// Also store interior scaling arrays.
    #[arg(long)]
    keep_interior: bool,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    tree_dir: PathBuf,
    /// A leaf word reconstructs the input; a shorter word gives that node.
    #[arg(long)]
    path: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RoundtripArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Number of random periodic fields to test.
    #[arg(long)]
    random: Option<usize>,
    /// Side length of the random fields.
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Mask { action: MaskAction::Build { pair, out_dir } } => commands::mask_build(&pair, &out_dir),
        Command::Mask { action: MaskAction::Check { mask } } => commands::mask_check(&mask),
        Command::Refine(args) => commands::refine(&args),
        Command::Converge(args) => commands::converge(&args),
        Command::Plan(args) => commands::plan(&args),
        Command::Decompose(args) => commands::decompose(&args),
        Command::Reconstruct(args) => commands::reconstruct(&args),
        Command::Roundtrip(args) => commands::roundtrip(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Output;

#[derive(Debug, Parser)]
#[command(name = "hdx", version, about = "Spectral, mixing and overlap checks on weighted simplicial complexes")]
struct Cli {
    /// Print only KEY=VALUE lines, sorted by key.
    #[arg(long, global = true)]
    machine: bool,
    /// Override every tolerance with this value.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a complex file for a generator family.
    Generate(GenerateArgs),
    /// Link spectra of every link of dimension at least one.
    Spectra(SpectraArgs),
    /// Identity suites.
    Verify(VerifyArgs),
    /// Check the mixing inequality on one or more set families.
    Mixing(MixingArgs),
    /// Check the spectral descent inequalities.
    Descent(DescentArgs),
    /// Geometric overlap of a vertex map into ℝ^n.
    Overlap(OverlapArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Complete,
    CompletePartite,
    SingleSimplex,
    SimplexBoundary,
    RandomPure,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Number of vertices.
    #[arg(long = "N")]
    vertices: Option<usize>,
    /// Dimension.
    #[arg(long = "n")]
    dim: Option<usize>,
    /// Side sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sides: Vec<usize>,
    /// Density for random-pure.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = hdx_core::generators::DEFAULT_MAX_RETRIES)]
    max_retries: usize,
    /// Write the file here and print a summary instead.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectraArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Skip partite detection.
    #[arg(long)]
    no_partite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Weights,
    Operators,
    Garland,
    Exchange,
    All,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long)]
    complex: PathBuf,
    /// Restrict operator and Garland checks to one level.
    #[arg(long)]
    level: Option<isize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Set family for the exchange suite; random families are drawn otherwise.
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Number of random families for the exchange suite.
    #[arg(long, default_value_t = 5)]
    families: usize,
    /// Write d*d, (k+2)M+, dd* and (k+1)M- as plain text arrays.
    #[arg(long)]
    export_matrices: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MixingArgs {
    #[arg(long)]
    complex: PathBuf,
    /// n+1 lines of vertex ids.
    #[arg(long, conflicts_with = "seeds")]
    sets: Option<PathBuf>,
    /// Use this λ instead of the measured one.
    #[arg(long)]
    lambda: Option<f64>,
    /// Partite form: U_i inside side S_i, one-sided λ.
    #[arg(long)]
    partite: bool,
    /// Number of random families.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vertex inclusion probability for random families.
    #[arg(long, default_value_t = 0.6)]
    density: f64,
}

#[derive(Debug, Args)]
struct DescentArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Also report the top-level threshold that guarantees this λ.
    #[arg(long)]
    target: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact2d,
    Sample,
}

#[derive(Debug, Args)]
struct OverlapArgs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long)]
    points: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Exact2d)]
    method: Method,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Selection constant P_n in (0, 1].
    #[arg(long)]
    pach: f64,
    /// Use this λ instead of the measured one.
    #[arg(long)]
    lambda: Option<f64>,
    /// Use the partite bound with the one-sided λ.
    #[arg(long)]
    partite: bool,
    /// Fail when a positive bound exceeds the computed overlap.
    #[arg(long)]
    assert_bound: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output::new(cli.machine);
    let tol = match cli.tolerance {
        Some(t) if !(t > 0.0) => {
            eprintln!("error: --tolerance must be positive");
            return ExitCode::from(2);
        }
        Some(t) => hdx_core::scalar::Tolerance::uniform(t),
        None => hdx_core::scalar::Tolerance::default(),
    };
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a, &mut out),
        Command::Spectra(a) => commands::spectra(a, &mut out),
        Command::Verify(a) => commands::verify(a, tol, cli.tolerance, &mut out),
        Command::Mixing(a) => commands::mixing(a, tol, &mut out),
        Command::Descent(a) => commands::descent(a, &mut out),
        Command::Overlap(a) => commands::overlap(a, &mut out),
    };
    match result {
        Ok(passed) => {
            print!("{}", out.render());
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

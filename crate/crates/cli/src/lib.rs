//! `grdpg`: command-line front end for network simulation, spectral
//! embedding, alignment, packing certification, Monte Carlo rate
//! experiments and the hyperbolic counterexample.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on runtime
//! errors. Every run prints a reproducibility line
//! (`grdpg <version> seed=<seed> config_hash=<hash>`) on stderr, and every
//! output file embeds the same hash (see [`output`]).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod error;
pub mod output;

pub use error::{CliError, Result, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION};

/// Seed used when neither `--seed`, a configuration file nor `GRDPG_SEED`
/// provides one.
pub const DEFAULT_SEED: u64 = 0;
/// Environment variable consulted when no seed is given explicitly.
pub const SEED_ENV: &str = "GRDPG_SEED";

#[derive(Debug, Parser)]
#[command(name = "grdpg", version, about = "GRDPG simulation, spectral embedding and minimax packing toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOptions,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct GlobalOptions {
    /// Master seed (falls back to a configuration file, then $GRDPG_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output format for tabular results (default: from the output file extension).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Increase diagnostic output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiagonalArg {
    Hollow,
    Bernoulli,
}

impl From<DiagonalArg> for netmodel::DiagonalMode {
    fn from(d: DiagonalArg) -> Self {
        match d {
            DiagonalArg::Hollow => netmodel::DiagonalMode::Hollow,
            DiagonalArg::Bernoulli => netmodel::DiagonalMode::Bernoulli,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Sylvester Hadamard matrix of order 2^k.
    Hadamard {
        #[arg(long)]
        k: u32,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample an adjacency matrix from a GRDPG model.
    Sample(SampleArgs),
    /// Adjacency spectral embedding of an adjacency matrix.
    Embed(EmbedArgs),
    /// Block Procrustes alignment of two latent-position matrices.
    Align(AlignArgs),
    /// Build or certify a Hadamard packing family.
    Pack {
        #[command(subcommand)]
        action: PackAction,
    },
    /// Monte Carlo rate experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Triangle-inequality counterexample for the hyperbolic pseudo-distance.
    Counterexample {
        #[command(subcommand)]
        action: CounterexampleAction,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Latent positions X (CSV or GMX1); P = ρ X I_{p,q} Xᵀ. Without it the
    /// simulation model with the given n, ρ, κ is used.
    #[arg(long)]
    pub latent: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 0.2)]
    pub rho: f64,
    #[arg(long, default_value_t = 6.0)]
    pub kappa: f64,
    /// Trial index: selects an independent stream under the same seed.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[arg(long, value_enum, default_value_t = DiagonalArg::Hollow)]
    pub diagonal: DiagonalArg,
    /// Adjacency matrix output (0/1 CSV, or GMX1 for .bin/.gmx).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional edge list (`i,j` per line, 0-indexed, i ≤ j).
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Optional output of the true latent positions.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedDiagonal {
    /// Bernoulli if any diagonal entry is 1, hollow otherwise.
    Auto,
    Hollow,
    Bernoulli,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Adjacency matrix (CSV or GMX1).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = EmbedDiagonal::Auto)]
    pub diagonal: EmbedDiagonal,
    /// Directory receiving frame.csv, eigenvalues.csv, latent.csv and embed.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    /// Estimate X̂ (rotated onto X).
    #[arg(long)]
    pub xhat: PathBuf,
    /// Target X.
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// JSON output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Constant,
    Growing,
}

#[derive(Debug, Args, Clone)]
pub struct PackParamArgs {
    /// Packing parameters as JSON; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Largest eigenvalue (default κ⌊n/(3κ)⌋ for constant κ, n/3 for growing κ).
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum PackAction {
    /// Construct the family and write its summary.
    Build {
        #[command(flatten)]
        params: PackParamArgs,
        /// JSON summary (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional directory receiving base.csv and member_<k>.csv frames.
        #[arg(long)]
        frames_dir: Option<PathBuf>,
    },
    /// Construct the family and certify it numerically.
    Verify {
        #[command(flatten)]
        params: PackParamArgs,
        /// Pairs sampled for the separation check in large families.
        #[arg(long, default_value_t = 50)]
        sample_pairs: usize,
        /// Angle-grid spacing of the separation oracle (radians).
        #[arg(long, default_value_t = 1e-4)]
        grid_step: f64,
        #[arg(long, value_enum, default_value_t = DiagonalArg::Hollow)]
        diagonal: DiagonalArg,
        /// JSON certification report (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Table1,
    Table2,
    /// The single constant-κ, constant-sparsity anchor line.
    Anchor,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentAction {
    /// Run an experiment and write per-(setting, n) result rows.
    Run {
        /// Experiment configuration (JSON).
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
        /// Use the full-scale grid and trial counts with a preset.
        #[arg(long, requires = "preset")]
        full: bool,
        /// Override the number of trials per cell.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum)]
        diagonal: Option<DiagonalArg>,
        /// Results output (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-trial error records (CSV).
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Fit log-log rates to a results file.
    Rates {
        /// Results file written by `experiment run` (CSV or JSON).
        #[arg(long = "in")]
        input: PathBuf,
        /// JSON output (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the configuration of a preset as JSON.
    Config {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct TripleArgs {
    /// X as "a,b;c,d" (rows separated by ';').
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub z: Option<String>,
    /// Half-width of the search box.
    #[arg(long = "box", default_value_t = hyperbolic::DEFAULT_BOX)]
    pub half_width: f64,
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleAction {
    /// Evaluate f on the three pairs and test the triangle inequality.
    Run {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long, default_value_t = hyperbolic::DEFAULT_RESOLUTION)]
        resolution: usize,
        /// JSON output (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the objective on the grid, one CSV per (pair, Γ).
    Contour {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Seed precedence: `--seed`, then the configuration file, then
/// `$GRDPG_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::validation(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => Err(CliError::validation(format!("{SEED_ENV}: {e}"))),
    }
}

/// Parse `argv` (including the program name), run the command and return
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    match pool.install(|| commands::dispatch(&cli)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn display(p: &Path) -> String {
    p.display().to_string()
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use clifford_povm::distinguish::MIN_MC_SAMPLES;
use clifford_povm::entropic::{DesignLevel, GridPolicy, DEFAULT_GRID_SIZE, DEFAULT_RENYI_EPSILON};
use clifford_povm::Error;

use clifford_povm_cli::commands::{self, Context, FiducialArg, FiducialChoice, ModeArg};
use clifford_povm_cli::report::Report;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "clifford-povm", version, about = "Clifford-orbit POVM bounds and checks")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for enumerated stabilizer orbits.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct FiducialOpts {
    #[arg(long, value_enum, default_value = "stabilizer")]
    fiducial: FiducialArg,
    /// JSON array of [re, im] amplitudes, for `--fiducial explicit`.
    #[arg(long)]
    fiducial_file: Option<PathBuf>,
}

impl FiducialOpts {
    fn choice(&self) -> FiducialChoice {
        FiducialChoice {
            kind: self.fiducial,
            file: self.fiducial_file.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fiducial parameter alpha and related constants.
    Alpha {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        fid: FiducialOpts,
    },
    /// l1 norm of the POVM image of an operator.
    OrbitNorm {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        fid: FiducialOpts,
        /// identity, random-hermitian, random-pure-pair or pauli:LABEL.
        #[arg(long, default_value = "random-hermitian")]
        operator: String,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Monte Carlo Clifford samples.
        #[arg(long, default_value_t = 100 * MIN_MC_SAMPLES)]
        samples: usize,
    },
    /// Tabulated norm-constant bounds.
    Bounds {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        fid: FiducialOpts,
    },
    /// Compare exact orbit moments with the closed forms on random operators.
    VerifyMoments {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        fid: FiducialOpts,
        /// Number of random test operators.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Moment LP lower bound on the average Renyi entropy.
    UncertaintyLp {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "stabilizer")]
        level: DesignLevel,
        #[arg(long, default_value_t = DEFAULT_RENYI_EPSILON)]
        renyi_epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        #[arg(long, default_value = "auto")]
        grid: GridPolicy,
        /// Re-solve on successively finer grids.
        #[arg(long)]
        refine: bool,
    },
    /// Certainty constants, optionally checked on random pure states.
    Certainty {
        #[arg(long)]
        n: usize,
        /// Random states to check (needs n <= 3).
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Entropic bound curves for every design level.
    Fig1 {
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_RENYI_EPSILON)]
        renyi_epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        #[arg(long, default_value = "auto")]
        grid: GridPolicy,
    },
    /// Bias of the orbit POVM on random pure-state pairs.
    Distinguish {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        fid: FiducialOpts,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = 100 * MIN_MC_SAMPLES)]
        samples: usize,
    },
}

fn run(cli: &Cli) -> clifford_povm::Result<Report> {
    let ctx = Context {
        seed: cli.seed,
        cache_dir: cli.cache_dir.clone(),
    };
    match &cli.command {
        Command::Alpha { n, fid } => commands::alpha_cmd(&ctx, *n, &fid.choice()),
        Command::OrbitNorm {
            n,
            fid,
            operator,
            mode,
            samples,
        } => commands::orbit_norm_cmd(&ctx, *n, &fid.choice(), operator, *mode, *samples),
        Command::Bounds { n, fid } => commands::bounds_cmd(&ctx, *n, &fid.choice()),
        Command::VerifyMoments { n, fid, samples } => commands::verify_moments_cmd(&ctx, *n, &fid.choice(), *samples),
        Command::UncertaintyLp {
            n,
            level,
            renyi_epsilon,
            grid_size,
            grid,
            refine,
        } => commands::uncertainty_lp_cmd(*n, *level, *renyi_epsilon, *grid_size, *grid, *refine),
        Command::Certainty { n, samples } => commands::certainty_cmd(&ctx, *n, *samples),
        Command::Fig1 {
            n_max,
            renyi_epsilon,
            grid_size,
            grid,
        } => commands::fig1_cmd(*n_max, *renyi_epsilon, *grid_size, *grid),
        Command::Distinguish {
            n,
            fid,
            pairs,
            mode,
            samples,
        } => commands::distinguish_cmd(&ctx, *n, &fid.choice(), *pairs, *mode, *samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidArgument(_) | Error::MissingSeed(_) => 2,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

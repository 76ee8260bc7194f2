use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use confocal_billiards_cli::commands::{self, parse_sweep, parse_value, parse_values, RunConfig};
use confocal_billiards_cli::error::{CliError, Result};
use confocal_billiards_cli::render::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "confocal-billiards", version, about = "Periodic billiard trajectories in ellipsoids")]
struct Cli {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, default_value_t = 256)]
    precision: usize,
    /// Rank and vanishing threshold 10^-EXP (default: 20).
    #[arg(long, global = true)]
    threshold_exp: Option<i32>,
    /// Largest quadrature node count.
    #[arg(long, global = true, default_value_t = 65536)]
    max_nodes: usize,
    /// Closure tolerance for traced trajectories.
    #[arg(long, global = true, default_value_t = 1e-30)]
    closure_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized launches (centered launch when absent).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide n-periodicity for a family and caustics.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        n: usize,
        /// Also trace a trajectory and count its winding numbers.
        #[arg(long)]
        simulate: bool,
    },
    /// Reproduce the low-period catalog in dimension three.
    Catalog {
        /// Directory for the polynomial-graph and trajectory CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form caustic constructions.
    Find {
        #[command(subcommand)]
        which: Find,
    },
    /// Trace a billiard trajectory tangent to the given caustics.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 20)]
        bounces: usize,
        /// Launch position fractions inside each Jacobi interval.
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
    },
    /// Solve the Pell equation of degree n on the interval system.
    Pell {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        n: usize,
        /// Take the best null direction even when the rank test fails.
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = 601)]
        samples: usize,
    },
    /// Frequency vector, or a rotation-number sweep for d = 2.
    Freq {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// lo:hi:count
        #[arg(long)]
        sweep_lambda: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Find {
    /// Caustics of the (d+1)-periodic trajectories.
    Dplus1 {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// a1 and the caustic of the 4-periodic generatrix trajectory.
    Hyperboloid4 {
        #[arg(long, allow_hyphen_values = true)]
        a2: String,
        #[arg(long, allow_hyphen_values = true)]
        a3: String,
    },
    /// Ellipsoid and hyperboloid pair inside a three-dimensional family.
    UniquePair {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
}

fn run(cli: Cli) -> Result<String> {
    let cfg = RunConfig {
        precision: cli.precision,
        threshold_exp: cli.threshold_exp,
        max_nodes: cli.max_nodes,
        closure_tol: cli.closure_tol,
        jobs: cli.jobs,
        seed: cli.seed,
    };
    cfg.validate()?;
    let fmt = cli.format;
    match cli.command {
        Command::Check { a, alpha, n, simulate } => {
            let r = commands::check(&cfg, &parse_values(&a)?, &parse_values(&alpha)?, n, simulate)?;
            emit("check", &r, fmt)
        }
        Command::Catalog { out } => emit("catalog", &commands::catalog(&cfg, out.as_deref())?, fmt),
        Command::Find { which } => match which {
            Find::Dplus1 { a } => emit("find", &commands::find_dplus1(&cfg, &parse_values(&a)?)?, fmt),
            Find::Hyperboloid4 { a2, a3 } => {
                emit("find", &commands::find_hyperboloid4(&cfg, &parse_value(&a2)?, &parse_value(&a3)?)?, fmt)
            }
            Find::UniquePair { a } => emit("find", &commands::find_unique_pair(&cfg, &parse_values(&a)?)?, fmt),
        },
        Command::Simulate { a, alpha, bounces, fractions } => {
            let r = commands::simulate(&cfg, &parse_values(&a)?, &parse_values(&alpha)?, bounces, fractions)?;
            emit("simulate", &r, fmt)
        }
        Command::Pell { a, alpha, n, force, samples } => {
            let r = commands::pell(&cfg, &parse_values(&a)?, &parse_values(&alpha)?, n, force, samples)?;
            emit("pell", &r, fmt)
        }
        Command::Freq { a, alpha, sweep_lambda } => {
            let a = parse_values(&a)?;
            match (alpha, sweep_lambda) {
                (None, Some(spec)) => {
                    let (lo, hi, count) = parse_sweep(&spec)?;
                    emit("freq", &commands::rotation_sweep(&cfg, &a, lo, hi, count)?, fmt)
                }
                (Some(alpha), None) => emit("freq", &commands::freq(&cfg, &a, &parse_values(&alpha)?)?, fmt),
                _ => Err(CliError::Usage("freq needs exactly one of --alpha and --sweep-lambda".into())),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

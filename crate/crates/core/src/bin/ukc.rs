//! `ukc`: solve, generate and verify uncertain k-center instances.
//!
//! Exit codes: 0 success, 1 a verified property failed, 2 bad input,
//! 3 unsupported strategy/space combination.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use ukcenter::verify::{run_suite, RunReport, Suite, VerifyConfig};
use ukcenter::{
    generate_instance, parse_instance, solve_kcenter, solve_one_center, DetSolver, Error, GenSpace,
    Strategy, Version,
};

#[derive(Parser)]
#[command(name = "ukc", version, about = "k-center clustering for uncertain points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the solution as JSON.
    Solve {
        /// Instance JSON file, or `-` for standard input.
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Ed)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = DetArg::Gonzalez)]
        det: DetArg,
        #[arg(long, value_enum, default_value_t = VersionArg::Restricted)]
        version: VersionArg,
    },
    /// Run a property suite over seeded random instances and print a report.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_z: usize,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        /// Largest finite metric drawn.
        #[arg(long, default_value_t = 8)]
        max_m: usize,
        /// Grid points per axis for the 1-center oracle.
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Report `wall_time_ms` as 0 so reports are byte-reproducible.
        #[arg(long)]
        omit_timing: bool,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        z: usize,
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// Dimension for Euclidean instances.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of points of a finite metric.
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Ed,
    Ep,
    Oc,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetArg {
    Gonzalez,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum VersionArg {
    Restricted,
    Unrestricted,
    OneCenter,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Evaluators,
    Lemmas,
    Bounds,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Euclidean,
    Finite,
}

enum Failure {
    Error(Error),
    Io(std::io::Error),
    Violations,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_unsupported() { 3 } else { 2 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            input,
            k,
            strategy,
            det,
            version,
        } => {
            let instance = parse_instance(&read_input(&input)?)?;
            let strategy = match strategy {
                StrategyArg::Ed => Strategy::ExpectedDistance,
                StrategyArg::Ep => Strategy::ExpectedPoint,
                StrategyArg::Oc => Strategy::OneCenter,
            };
            let det = match det {
                DetArg::Gonzalez => DetSolver::Gonzalez,
                DetArg::Exact => DetSolver::ExactDiscrete,
            };
            let solution = match version {
                VersionArg::OneCenter => solve_one_center(&instance)?,
                VersionArg::Restricted => solve_kcenter(&instance, k, strategy, det, Version::Restricted)?,
                VersionArg::Unrestricted => solve_kcenter(&instance, k, strategy, det, Version::Unrestricted)?,
            };
            emit(&to_json(&solution))?;
            Ok(())
        }
        Command::Verify {
            suite,
            trials,
            seed,
            max_n,
            max_z,
            max_k,
            max_m,
            grid,
            omit_timing,
        } => {
            let started = Instant::now();
            let suite = match suite {
                SuiteArg::Evaluators => Suite::Evaluators,
                SuiteArg::Lemmas => Suite::Lemmas,
                SuiteArg::Bounds => Suite::Bounds,
                SuiteArg::All => Suite::All,
            };
            let cfg = VerifyConfig {
                suite,
                trials,
                seed,
                max_n,
                max_z,
                max_k,
                max_m,
                grid_resolution: grid,
                ..VerifyConfig::default()
            };
            let (ratios, instance_digest) = run_suite(&cfg)?;
            let failed: Vec<_> = ratios.iter().filter(|r| !r.pass).collect();
            let report = RunReport {
                command: format!("verify --suite {suite}"),
                instance_digest,
                solution: None,
                ratios: ratios.clone(),
                wall_time_ms: if omit_timing { 0 } else { started.elapsed().as_millis() as u64 },
            };
            emit(&to_json(&report))?;
            eprintln!(
                "suite {suite}: {} rows, {} passed, {} failed",
                ratios.len(),
                ratios.len() - failed.len(),
                failed.len()
            );
            for r in &failed {
                eprintln!(
                    "FAIL {} seed {}: ratio {} > bound {} (replay with --seed {} --trials 1)",
                    r.label, r.instance_seed, r.ratio, r.bound, r.instance_seed
                );
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violations)
            }
        }
        Command::Gen {
            n,
            z,
            space,
            dim,
            m,
            seed,
        } => {
            let space = match space {
                SpaceArg::Euclidean => GenSpace::Euclidean { dim },
                SpaceArg::Finite => GenSpace::Finite { m },
            };
            let instance = generate_instance(n, z, space, seed)?;
            emit(&instance.to_json())?;
            Ok(())
        }
    }
}

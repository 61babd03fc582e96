use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use armplan::bench::{self, Family, RunParams};
use armplan::guidance::Strategy;
use armplan::motion::MotionModel;
use armplan::plan_check;
use armplan::scenario::Scenario;
use armplan::solver::solve_mapf;

/// Multi-arm rearrangement planning benchmark.
#[derive(Parser)]
#[command(name = "armplan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated scenario file.
    Generate(GenerateArgs),
    /// Run planner trials on a scenario and report per-trial results.
    Run(RunArgs),
    /// Compute an optimal synchronized schedule and write it as a trace.
    SolveMapf(SolveMapfArgs),
    /// Check a schedule trace against a scenario.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// switch, side_to_side, random, or swap_buffer.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    arms: usize,
    #[arg(long)]
    objects: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// smart, sequential, or greedy.
    #[arg(long)]
    strategy: Strategy,
    /// Iteration budget per trial; one iteration counts one virtual ms.
    #[arg(long, default_value_t = 2000)]
    budget_ms: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write per-trial rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MotionKind::Free)]
    motion: MotionKind,
    /// Minimum allowed tool separation under the interference model.
    #[arg(long, default_value_t = 0.1)]
    dmin: f64,
    /// Ground guidance on every iteration instead of mixing in random moves.
    #[arg(long)]
    pure_guidance: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MotionKind {
    Free,
    Interference,
}

#[derive(Args)]
struct SolveMapfArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Generate(args) => {
            let scenario = bench::generate(args.family, args.arms, args.objects, args.seed)
                .map_err(|e| e.to_string())?;
            scenario.save(&args.out).map_err(|e| e.to_string())?;
            println!("wrote {} ({})", args.out.display(), scenario.id());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let scenario = Scenario::load(&args.scenario).map_err(|e| e.to_string())?;
            let motion = match args.motion {
                MotionKind::Free => MotionModel::FreeSpace,
                MotionKind::Interference => MotionModel::Interference { d_min: args.dmin },
            };
            let params = RunParams {
                strategy: args.strategy,
                budget_ms: args.budget_ms,
                trials: args.trials,
                seed: args.seed,
                motion,
                pure_guidance: args.pure_guidance,
            };
            let report = bench::run(&scenario, &params).map_err(|e| e.to_string())?;
            print!("{}", bench::summarize(&report.rows));
            if let Some(path) = &args.csv {
                bench::write_csv(&report.rows, path).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            if report.violations > 0 {
                eprintln!("error: {} trial(s) produced plans that failed re-execution", report.violations);
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SolveMapf(args) => {
            let scenario = Scenario::load(&args.scenario).map_err(|e| e.to_string())?;
            let g = scenario.validate().map_err(|e| e.to_string())?;
            let q_init = scenario.initial_projection(&g);
            let q_goal = scenario.goal_projection(&g);
            let plan = solve_mapf(&g, &q_init, &q_goal).map_err(|e| e.to_string())?;
            match plan {
                Some(plan) => {
                    std::fs::write(&args.out, plan_check::format_plan(&g, &plan.paths))
                        .map_err(|e| e.to_string())?;
                    println!(
                        "wrote {}: {} steps, objective {:.3}, max {} actions per object",
                        args.out.display(),
                        plan.n_steps,
                        plan.objective,
                        plan.per_object_actions.iter().copied().max().unwrap_or(0),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no schedule found within the tried horizons");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Validate(args) => {
            let scenario = Scenario::load(&args.scenario).map_err(|e| e.to_string())?;
            let g = scenario.validate().map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(&args.trace).map_err(|e| e.to_string())?;
            let paths = match plan_check::parse_plan(&g, &text) {
                Ok(paths) => paths,
                Err(e) => {
                    eprintln!("invalid trace: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            let q_init = scenario.initial_projection(&g);
            let q_goal = scenario.goal_projection(&g);
            match plan_check::check_plan(&g, &q_init, &q_goal, &paths) {
                Ok(stats) => {
                    println!(
                        "valid: {} steps, max {} actions per object",
                        stats.n_steps, stats.max_actions
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("invalid schedule: {e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}

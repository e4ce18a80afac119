//! `ratebound`: solve, sweep, sample, and generate bounded-rational
//! multi-task decision problems from the command line.
//!
//! Exit codes: 0 on success, 1 on input or usage errors, 2 when a solve did
//! not converge within its iteration budget.

mod manifest;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use manifest::RunManifest;
use ratebound::solver::{solve, SolverOptions};
use ratebound::sweep::{
    detect_transition, rate_utility_curve, sweep, sweep_parallel, Spacing, SweepSchedule,
};
use ratebound::tasks;
use ratebound::types::{InverseTemperature, TaskSpec};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "ratebound",
    version,
    about = "Bounded-rational decision policies from rate-distortion trade-offs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one task at one inverse temperature and write the policy,
    /// prior, and diagnostics as a JSON document.
    Solve(SolveArgs),
    /// Trace diagnostics across a β schedule and write them as CSV.
    Sweep(SweepArgs),
    /// Solve, then draw seeded samples from a conditional or the prior.
    Sample(SampleArgs),
    /// Write a built-in or generated task file.
    MakeTask(MakeTaskArgs),
}

#[derive(Args, Clone)]
struct TaskSource {
    /// Path to a task file (JSON).
    #[arg(long, conflicts_with = "builtin")]
    task: Option<PathBuf>,
    /// Built-in task name: `two-task` or `grid3`.
    #[arg(long, conflicts_with = "task")]
    builtin: Option<String>,
}

impl TaskSource {
    fn load(&self) -> Result<(TaskSpec, String), CliError> {
        match (&self.task, &self.builtin) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).map_err(|err| {
                    CliError::input(format!("cannot read task file `{}`: {err}", path.display()))
                })?;
                let task = tasks::load_task(&text)
                    .map_err(|err| CliError::input(format!("`{}`: {err}", path.display())))?;
                Ok((task, format!("file:{}", path.display())))
            }
            (None, Some(name)) => {
                let task = builtin_task(name)?;
                Ok((task, format!("builtin:{name}")))
            }
            _ => Err(CliError::input(
                "exactly one of --task or --builtin is required".into(),
            )),
        }
    }
}

fn builtin_task(name: &str) -> Result<TaskSpec, CliError> {
    match name {
        "two-task" => Ok(tasks::two_task_problem()),
        "grid3" => tasks::grid_task(3).map_err(|err| CliError::input(err.to_string())),
        other => Err(CliError::input(format!(
            "unknown builtin `{other}`; available: two-task, grid3"
        ))),
    }
}

#[derive(Args, Clone)]
struct BetaArg {
    /// Inverse temperature β (nats per utility unit).
    #[arg(long, conflicts_with = "inv_beta")]
    beta: Option<f64>,
    /// Temperature 1/β; alternative axis for the same quantity.
    #[arg(long, conflicts_with = "beta")]
    inv_beta: Option<f64>,
}

impl BetaArg {
    fn resolve(&self) -> Result<InverseTemperature, CliError> {
        let value = match (self.beta, self.inv_beta) {
            (Some(b), None) => b,
            (None, Some(t)) => {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::input(format!(
                        "--inv-beta must be positive and finite, got {t}"
                    )));
                }
                1.0 / t
            }
            _ => {
                return Err(CliError::input(
                    "exactly one of --beta or --inv-beta is required".into(),
                ))
            }
        };
        InverseTemperature::new(value).map_err(|err| CliError::input(err.to_string()))
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Sup-norm threshold on the prior change per iteration.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Iteration budget per solve. Defaults to 100000, or 150 per point in
    /// annealed sweeps (bounded relaxation per β step).
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl SolverArgs {
    fn options(&self, annealed_sweep: bool) -> SolverOptions {
        let base = if annealed_sweep {
            SolverOptions::for_annealing()
        } else {
            SolverOptions::default()
        };
        SolverOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations.unwrap_or(base.max_iterations),
            ..base
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: TaskSource,
    #[command(flatten)]
    beta: BetaArg,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output path for the result document (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpacingArg {
    Log,
    Linear,
    InverseLinear,
}

impl From<SpacingArg> for Spacing {
    fn from(value: SpacingArg) -> Self {
        match value {
            SpacingArg::Log => Spacing::Logarithmic,
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::InverseLinear => Spacing::InverseLinear,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: TaskSource,
    /// Smallest β of the schedule.
    #[arg(long, requires = "beta_max", conflicts_with_all = ["inv_beta_min", "inv_beta_max"])]
    beta_min: Option<f64>,
    /// Largest β of the schedule.
    #[arg(long, requires = "beta_min")]
    beta_max: Option<f64>,
    /// Smallest 1/β of the schedule (alternative axis).
    #[arg(long, requires = "inv_beta_max")]
    inv_beta_min: Option<f64>,
    /// Largest 1/β of the schedule.
    #[arg(long, requires = "inv_beta_min")]
    inv_beta_max: Option<f64>,
    /// Number of β points.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Grid spacing; defaults to logarithmic for a β range and
    /// inverse-linear for a 1/β range.
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    /// Sweep from beta_max downward, warm-starting each solve from the
    /// previous point's prior (the default).
    #[arg(long, overrides_with = "no_annealed")]
    annealed: bool,
    /// Solve every β point independently from the base initialization.
    #[arg(long)]
    no_annealed: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output path for the sweep CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write the sorted (expected_utility, rate) pairs to this CSV.
    #[arg(long)]
    rate_utility: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: TaskSource,
    #[command(flatten)]
    beta: BetaArg,
    /// Observation label to sample the conditional of, or `prior`.
    #[arg(long)]
    obs: String,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    /// Generator seed.
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output path for the sample document (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MakeTaskArgs {
    /// Built-in task name: `two-task` or `grid3`.
    #[arg(long, conflicts_with = "grid_n")]
    builtin: Option<String>,
    /// Generate the N×N binary-grid task (2 ≤ N ≤ 4).
    #[arg(long, conflicts_with = "builtin")]
    grid_n: Option<usize>,
    /// Output path for the task file (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn input(message: String) -> Self {
        Self {
            message,
            code: EXIT_INPUT_ERROR,
        }
    }
    fn io(err: std::io::Error, what: &str) -> Self {
        Self {
            message: format!("{what}: {err}"),
            code: EXIT_INPUT_ERROR,
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit 1 per the exit-code contract; help and version exit 0
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    let command_line: Vec<String> = std::env::args().collect();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args, command_line),
        Command::Sweep(args) => cmd_sweep(args, command_line),
        Command::Sample(args) => cmd_sample(args, command_line),
        Command::MakeTask(args) => cmd_make_task(args, command_line),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn cmd_solve(args: SolveArgs, command_line: Vec<String>) -> Result<u8, CliError> {
    let started = Instant::now();
    let (task, task_source) = args.source.load()?;
    let beta = args.beta.resolve()?;
    let options = args.solver.options(false);
    let result = solve(&task, beta, &options).map_err(|err| CliError::input(err.to_string()))?;

    let manifest = RunManifest::new(command_line, task_source)
        .with_beta(beta.value())
        .with_solver_options(&options)
        .finish(started);
    let document = output::solve_document(&task, beta.value(), &result, manifest);
    output::write_json(&args.out, &document)?;

    eprintln!(
        "solved at beta={} in {} iterations ({})",
        beta.value(),
        result.iterations,
        if result.converged {
            "converged"
        } else {
            "NOT converged"
        }
    );
    Ok(if result.converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn sweep_threads() -> usize {
    match std::env::var("RATEBOUND_THREADS") {
        Ok(value) => value.parse().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

fn cmd_sweep(args: SweepArgs, command_line: Vec<String>) -> Result<u8, CliError> {
    let started = Instant::now();
    let (task, task_source) = args.source.load()?;
    let annealed = args.annealed || !args.no_annealed;

    let schedule = match (
        args.beta_min,
        args.beta_max,
        args.inv_beta_min,
        args.inv_beta_max,
    ) {
        (Some(beta_min), Some(beta_max), None, None) => SweepSchedule::new(
            beta_min,
            beta_max,
            args.points,
            args.spacing.map_or(Spacing::Logarithmic, Into::into),
            annealed,
        ),
        (None, None, Some(inv_min), Some(inv_max)) => {
            SweepSchedule::from_inv_beta_range(inv_min, inv_max, args.points, annealed).map(
                |mut schedule| {
                    if let Some(spacing) = args.spacing {
                        schedule.spacing = spacing.into();
                    }
                    schedule
                },
            )
        }
        _ => Err(ratebound::sweep::SweepError::InvalidSchedule(
            "give either --beta-min/--beta-max or --inv-beta-min/--inv-beta-max".into(),
        )),
    }
    .map_err(|err| CliError::input(err.to_string()))?;

    let options = args.solver.options(schedule.annealed);
    let records = if schedule.annealed {
        sweep(&task, &schedule, &options)
    } else {
        sweep_parallel(&task, &schedule, &options, sweep_threads())
    }
    .map_err(|err| CliError::input(err.to_string()))?;

    output::write_sweep_csv(&args.out, &records)?;
    if let Some(path) = &args.rate_utility {
        let curve = rate_utility_curve(&records).map_err(|err| CliError::input(err.to_string()))?;
        output::write_rate_utility_csv(path, &curve)?;
    }

    let manifest = RunManifest::new(command_line, task_source)
        .with_schedule(&schedule)
        .with_solver_options(&options)
        .finish(started);
    output::write_manifest_sidecar(&args.out, &manifest)?;

    match detect_transition(&records) {
        Ok(Some(t)) => eprintln!(
            "transition: H(x) peaks at {:.4} bits at 1/beta = {:.4}",
            t.h_marginal_bits, records[t.index].inv_beta
        ),
        Ok(None) => eprintln!("no interior H(x) peak detected"),
        Err(_) => {}
    }

    let unconverged = records.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!(
            "{unconverged} of {} points did not converge within the budget",
            records.len()
        );
        Ok(EXIT_NOT_CONVERGED)
    } else {
        Ok(0)
    }
}

fn cmd_sample(args: SampleArgs, command_line: Vec<String>) -> Result<u8, CliError> {
    let started = Instant::now();
    let (task, task_source) = args.source.load()?;
    let beta = args.beta.resolve()?;
    let options = args.solver.options(false);
    let result = solve(&task, beta, &options).map_err(|err| CliError::input(err.to_string()))?;

    let distribution = if args.obs == "prior" {
        result.prior.clone()
    } else {
        match task.observations().index_of(&args.obs) {
            Some(index) => result.policy.row(index).clone(),
            None => {
                return Err(CliError::input(format!(
                    "unknown observation `{}`; labels: {}, or `prior`",
                    args.obs,
                    task.observations().labels().join(", ")
                )))
            }
        }
    };
    let report =
        ratebound::sampler::sample(&distribution, task.actions().labels(), args.n, args.seed)
            .map_err(|err| CliError::input(err.to_string()))?;

    let manifest = RunManifest::new(command_line, task_source)
        .with_beta(beta.value())
        .with_solver_options(&options)
        .with_seed(args.seed)
        .finish(started);
    let document = output::sample_document(beta.value(), &args.obs, &report, manifest);
    output::write_json(&args.out, &document)?;

    Ok(if result.converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_make_task(args: MakeTaskArgs, command_line: Vec<String>) -> Result<u8, CliError> {
    let started = Instant::now();
    let (task, source) = match (&args.builtin, args.grid_n) {
        (Some(name), None) => (builtin_task(name)?, format!("builtin:{name}")),
        (None, Some(n)) => (
            tasks::grid_task(n).map_err(|err| CliError::input(err.to_string()))?,
            format!("grid-n:{n}"),
        ),
        _ => {
            return Err(CliError::input(
                "exactly one of --builtin or --grid-n is required".into(),
            ))
        }
    };
    let text = tasks::save_task(&task);
    std::fs::write(&args.out, text.as_bytes())
        .map_err(|err| CliError::io(err, "writing task file"))?;

    let manifest = RunManifest::new(command_line, source).finish(started);
    output::write_manifest_sidecar(&args.out, &manifest)?;
    Ok(0)
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fuzzy_vrptw::acs::{AcsParams, PheromoneInit, UrgencyTerm};
use fuzzy_vrptw::generate::{generate, GeneratorConfig};
use fuzzy_vrptw::instance_io::{load_instance, write_instance};
use fuzzy_vrptw::report::{csv_table, stop_rows, to_json, write_summary, ReportError, ReportFormat};
use fuzzy_vrptw::runner::{evaluate_plan, run_solve, run_sweep, RunConfig, RunError, SweepSpec};
use fuzzy_vrptw::simulate::DEFAULT_REPLICATIONS;

#[derive(Parser)]
#[command(name = "fvrptw", version, about = "Chance-constrained VRPTW with fuzzy travel times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance at one preference index and simulate the result.
    Solve(SolveArgs),
    /// Solve over a grid of preference indices with several seeds per point.
    Sweep(SweepArgs),
    /// Check and simulate an externally supplied plan.
    Simulate(SimulateArgs),
    /// Parse and validate an instance file.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Write a synthetic instance.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Reciprocal,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
enum UrgencyArg {
    Width,
    Slack,
}

#[derive(Args)]
struct ColonyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Preference index every service start must meet.
    #[arg(long, default_value_t = 0.8)]
    cr: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 11)]
    ants: usize,
    #[arg(long, default_value_t = 2.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.7)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.2)]
    rho: f64,
    #[arg(long, default_value_t = 0.5)]
    q0: f64,
    #[arg(long = "deposit-q", default_value_t = 1.0)]
    deposit_q: f64,
    #[arg(long = "init-pheromone", value_enum, default_value = "reciprocal")]
    init_pheromone: InitArg,
    /// Value used by `--init-pheromone constant`.
    #[arg(long = "tau0", default_value_t = 1.0)]
    tau0: f64,
    #[arg(long, value_enum, default_value = "width")]
    urgency: UrgencyArg,
    /// Simulation replications.
    #[arg(long = "sim-n", default_value_t = DEFAULT_REPLICATIONS)]
    sim_n: usize,
    /// Worker threads; omit to run on one thread.
    #[arg(long)]
    threads: Option<usize>,
    /// Include wall time in the report (the report is then no longer reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
}

impl ColonyArgs {
    fn run_config(&self) -> RunConfig {
        let params = AcsParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            rho: self.rho,
            q0: self.q0,
            n_ants: self.ants,
            n_iterations: self.iterations,
            deposit_q: self.deposit_q,
            cr_star: self.cr,
            rng_seed: self.seed,
            pheromone_init: match self.init_pheromone {
                InitArg::Reciprocal => PheromoneInit::Reciprocal,
                InitArg::Constant => PheromoneInit::Constant(self.tau0),
            },
            urgency: match self.urgency {
                UrgencyArg::Width => UrgencyTerm::WindowWidth,
                UrgencyArg::Slack => UrgencyTerm::Slack,
            },
        };
        RunConfig {
            simulate_n: self.sim_n,
            threads: self.threads,
            record_timing: self.timing,
            ..RunConfig::new(&self.instance, params)
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    colony: ColonyArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    colony: ColonyArgs,
    /// Preference index grid as `from:to:step`.
    #[arg(long, default_value = "0:1:0.1", value_parser = parse_sweep)]
    sweep: (f64, f64, f64),
    /// Seeds per grid point.
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// With `--format csv`, where to write the per-point aggregate table.
    #[arg(long = "aggregate-out")]
    aggregate_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Route file: one route per line, or a solve report.
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    cr: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "sim-n", default_value_t = DEFAULT_REPLICATIONS)]
    sim_n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Long,
    Short,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    shape: Shape,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 18)]
    customers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_sweep(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [from, to, step] = parts.as_slice() else {
        return Err("expected from:to:step".into());
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(from)?, num(to)?, num(step)?))
}

enum Failure {
    Run(RunError),
    Output(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Run(e)
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        Failure::Output(e.to_string())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Output(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(args) => {
            let config = args.colony.run_config();
            let started = std::time::Instant::now();
            let report = run_solve(&config)?;
            let text = match args.colony.format {
                ReportFormat::Json => to_json(&report)?,
                ReportFormat::Csv => csv_table(&stop_rows(&report.solution, &report.simulation))?,
            };
            emit(args.colony.out.as_deref(), &text)?;
            let mut err = std::io::stderr().lock();
            let _ = write_summary(&mut err, &report);
            if report.wall_time_ms.is_none() {
                let _ = writeln!(err, "wall time       {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
            }
        }
        Command::Sweep(args) => {
            let (cr_from, cr_to, cr_step) = args.sweep;
            let config = RunConfig {
                sweep: Some(SweepSpec {
                    cr_from,
                    cr_to,
                    cr_step,
                    repeats_per_point: args.repeats,
                }),
                ..args.colony.run_config()
            };
            let report = run_sweep(&config)?;
            match args.colony.format {
                ReportFormat::Json => emit(args.colony.out.as_deref(), &to_json(&report)?)?,
                ReportFormat::Csv => {
                    emit(args.colony.out.as_deref(), &csv_table(&report.runs)?)?;
                    if let Some(path) = &args.aggregate_out {
                        emit(Some(path), &csv_table(&report.aggregate)?)?;
                    }
                }
            }
            let mut err = std::io::stderr().lock();
            for a in &report.aggregate {
                let _ = writeln!(
                    err,
                    "cr {:<4} feasible {}/{}  mean distance {}  mean misses {}",
                    a.cr_star,
                    a.feasible_runs,
                    a.runs,
                    a.mean_distance.map_or("-".into(), |d| format!("{d:.3}")),
                    a.mean_missed_windows.map_or("-".into(), |m| format!("{m:.3}")),
                );
            }
        }
        Command::Simulate(args) => {
            let report = evaluate_plan(&args.instance, &args.plan, args.cr, args.sim_n, args.seed)?;
            emit(args.out.as_deref(), &to_json(&report)?)?;
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            eprintln!(
                "missed windows  {} over {} replications",
                report.simulation.missed_window_total, report.simulation.replications
            );
            if !report.violations.is_empty() {
                return Err(Failure::Run(RunError::Plan {
                    path: args.plan,
                    message: format!("{} violation(s) at cr* = {}", report.violations.len(), args.cr),
                }));
            }
        }
        Command::Validate { instance } => {
            let inst = load_instance(&instance).map_err(RunError::from)?;
            println!(
                "{}: {} customers, capacity {}, depot close {}",
                inst.name(),
                inst.customer_count(),
                inst.vehicle_capacity(),
                inst.depot_close()
            );
        }
        Command::Generate(args) => {
            let mut config = match args.shape {
                Shape::Long => GeneratorConfig::long_horizon(args.seed),
                Shape::Short => GeneratorConfig::short_horizon(args.seed),
            };
            config.customers = args.customers;
            let instance = generate(&config).map_err(|e| Failure::Run(RunError::Config(e.to_string())))?;
            emit(args.out.as_deref(), &write_instance(&instance))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Output(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

//! Run configurations and the solve, sweep and evaluate commands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::acs::{solve_with, AcsParams, Execution, SolveError};
use crate::instance_io::{load_instance, InstanceError};
use crate::model::{validate_solution, Instance, ModelError, Solution};
use crate::report::{
    aggregate_rows, customer_misses_field, EvaluationReport, InstanceSummary, RunEcho, SolveReport, SolutionSummary,
    SweepReport, SweepRow, REPORT_FORMAT,
};
use crate::seed::derive_seed;
use crate::simulate::{simulate_plan_with, SimulateError};

/// Substream coordinate reserved for the post-solve simulation.
const SIMULATION_STREAM: u64 = 0x5349_4d55;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("plan {path}: {message}")]
    Plan { path: PathBuf, message: String },
    #[error("infeasible: {0}")]
    Infeasible(SolveError),
    #[error(transparent)]
    Solve(SolveError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
}

impl RunError {
    /// 1 for infeasibility, 2 for anything wrong with the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Infeasible(_) => 1,
            _ => 2,
        }
    }
}

impl From<SolveError> for RunError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Unroutable { .. } => RunError::Infeasible(e),
            other => RunError::Solve(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub cr_from: f64,
    pub cr_to: f64,
    pub cr_step: f64,
    pub repeats_per_point: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), RunError> {
        let ok = self.cr_from.is_finite()
            && self.cr_to.is_finite()
            && self.cr_step.is_finite()
            && self.cr_from <= self.cr_to
            && self.cr_step > 0.0
            && self.repeats_per_point >= 1
            && (0.0..=1.0).contains(&self.cr_from)
            && (0.0..=1.0).contains(&self.cr_to);
        if ok {
            Ok(())
        } else {
            Err(RunError::Config(format!(
                "sweep {}:{}:{} x{} needs 0 <= from <= to <= 1, step > 0, repeats >= 1",
                self.cr_from, self.cr_to, self.cr_step, self.repeats_per_point
            )))
        }
    }

    /// `from + k * step` for every `k` that stays within `to`, rounded to
    /// nine decimals so that 0.1 steps land on 0.3 rather than 0.30000000000000004.
    pub fn grid(&self) -> Vec<f64> {
        let round = |x: f64| (x * 1e9).round() / 1e9;
        let mut points = Vec::new();
        for k in 0.. {
            let cr = round(self.cr_from + k as f64 * self.cr_step);
            if cr > self.cr_to + 1e-9 {
                break;
            }
            points.push(cr.min(self.cr_to));
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub instance_path: PathBuf,
    pub params: AcsParams,
    pub simulate_n: usize,
    pub sweep: Option<SweepSpec>,
    /// Worker count; `None` runs everything on the calling thread.
    pub threads: Option<usize>,
    /// Adds the elapsed wall time to reports, which makes them run-dependent.
    pub record_timing: bool,
}

impl RunConfig {
    pub fn new(instance_path: impl Into<PathBuf>, params: AcsParams) -> Self {
        Self {
            instance_path: instance_path.into(),
            params,
            simulate_n: crate::simulate::DEFAULT_REPLICATIONS,
            sweep: None,
            threads: None,
            record_timing: false,
        }
    }

    fn echo(&self) -> RunEcho {
        RunEcho {
            params: self.params.clone(),
            simulate_n: self.simulate_n,
        }
    }

    fn pool(&self) -> Result<Option<rayon::ThreadPool>, RunError> {
        self.threads
            .map(|n| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| RunError::Config(format!("worker pool: {e}")))
            })
            .transpose()
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn simulation_seed(rng_seed: u64) -> u64 {
    derive_seed(rng_seed, &[SIMULATION_STREAM])
}

/// Solves once at the configured preference index and simulates the winner.
pub fn run_solve(config: &RunConfig) -> Result<SolveReport, RunError> {
    let start = Instant::now();
    let instance = load_instance(&config.instance_path)?;
    let mut report = solve_instance(&instance, config)?;
    if config.record_timing {
        report.wall_time_ms = Some(elapsed_ms(start));
    }
    Ok(report)
}

pub fn solve_instance(instance: &Instance, config: &RunConfig) -> Result<SolveReport, RunError> {
    let pool = config.pool()?;
    let execution = match config.threads {
        None => Execution::Serial,
        Some(threads) => Execution::Parallel { threads },
    };
    let outcome = solve_with(instance, &config.params, execution)?;
    let simulation = simulate_plan_with(
        &outcome.best,
        instance,
        config.simulate_n,
        simulation_seed(config.params.rng_seed),
        pool.as_ref(),
    )?;
    Ok(SolveReport {
        format: REPORT_FORMAT.into(),
        instance: InstanceSummary::from(instance),
        config: config.echo(),
        solution: SolutionSummary::from(&outcome.best),
        simulation,
        trace: outcome.trace,
        wall_time_ms: None,
    })
}

fn sweep_point(instance: &Instance, config: &RunConfig, cr_star: f64, seed: u64) -> Result<SweepRow, RunError> {
    let params = AcsParams {
        cr_star,
        rng_seed: seed,
        ..config.params.clone()
    };
    let mut row = SweepRow {
        cr_star,
        seed,
        feasible: false,
        unroutable_customer: None,
        total_distance: None,
        vehicles: None,
        missed_windows: None,
        mean_misses_per_replication: None,
        customer_misses: None,
    };
    let outcome = match solve_with(instance, &params, Execution::Serial) {
        Ok(outcome) => outcome,
        Err(SolveError::Unroutable { customer, .. }) => {
            row.unroutable_customer = Some(customer);
            return Ok(row);
        }
        Err(e) => return Err(e.into()),
    };
    let sim = simulate_plan_with(&outcome.best, instance, config.simulate_n, simulation_seed(seed), None)?;
    row.feasible = true;
    row.total_distance = Some(outcome.best.total_distance);
    row.vehicles = Some(outcome.best.vehicle_count());
    row.missed_windows = Some(sim.missed_window_total);
    row.mean_misses_per_replication = Some(sim.mean_misses_per_replication());
    row.customer_misses = Some(customer_misses_field(&sim));
    Ok(row)
}

/// Runs every `(cr*, repeat)` point of the sweep. Repeat `r` uses seed
/// `rng_seed + r`. Points run as independent jobs on the worker pool; rows
/// come back in grid order whatever the worker count.
pub fn run_sweep(config: &RunConfig) -> Result<SweepReport, RunError> {
    let start = Instant::now();
    let spec = config
        .sweep
        .as_ref()
        .ok_or_else(|| RunError::Config("sweep requires a cr range".into()))?;
    spec.validate()?;
    config.params.validate()?;
    let instance = load_instance(&config.instance_path)?;

    let jobs: Vec<(f64, u64)> = spec
        .grid()
        .into_iter()
        .flat_map(|cr| (0..spec.repeats_per_point as u64).map(move |r| (cr, config.params.rng_seed.wrapping_add(r))))
        .collect();
    let run = |&(cr, seed): &(f64, u64)| sweep_point(&instance, config, cr, seed);
    let rows: Vec<SweepRow> = match config.pool()? {
        None => jobs.iter().map(run).collect::<Result<_, _>>()?,
        Some(pool) => pool.install(|| jobs.par_iter().map(run).collect::<Result<_, _>>())?,
    };

    Ok(SweepReport {
        format: REPORT_FORMAT.into(),
        instance: InstanceSummary::from(&instance),
        config: config.echo(),
        aggregate: aggregate_rows(&rows),
        runs: rows,
        wall_time_ms: config.record_timing.then(|| elapsed_ms(start)),
    })
}

/// Reads route sequences from a plan file. Accepted forms: a report document
/// (its `solution.routes[].stops`), or one route per line as ids separated by
/// whitespace, commas or dashes, with optional depot zeros at either end.
pub fn parse_plan(text: &str) -> Result<Vec<Vec<usize>>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let routes = doc
            .pointer("/solution/routes")
            .and_then(|r| r.as_array())
            .ok_or("document has no solution.routes array")?;
        return routes
            .iter()
            .map(|r| {
                r.get("stops")
                    .and_then(|s| s.as_array())
                    .ok_or("route has no stops array")?
                    .iter()
                    .map(|v| v.as_u64().map(|id| id as usize).ok_or("stop id is not an integer"))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()
            .map_err(String::from);
    }

    let mut routes = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut ids = line
            .split(|c: char| c.is_whitespace() || c == ',' || c == '-')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| format!("line {}: bad id {t:?}", n + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if ids.first() == Some(&0) {
            ids.remove(0);
        }
        if ids.last() == Some(&0) {
            ids.pop();
        }
        if ids.contains(&0) {
            return Err(format!("line {}: depot in the middle of a route", n + 1));
        }
        routes.push(ids);
    }
    Ok(routes)
}

/// Checks an external plan at `cr_star` and simulates it.
pub fn evaluate_plan(
    instance_path: &Path,
    plan_path: &Path,
    cr_star: f64,
    simulate_n: usize,
    seed: u64,
) -> Result<EvaluationReport, RunError> {
    let instance = load_instance(instance_path)?;
    let plan_error = |message: String| RunError::Plan {
        path: plan_path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(plan_path).map_err(|e| plan_error(e.to_string()))?;
    let sequences = parse_plan(&text).map_err(plan_error)?;
    let solution = Solution::from_sequences(&instance, &sequences, cr_star).map_err(|e: ModelError| plan_error(e.to_string()))?;
    let violations = validate_solution(&solution, &instance, cr_star).err().unwrap_or_default();
    let simulation = simulate_plan_with(&solution, &instance, simulate_n, simulation_seed(seed), None)?;
    Ok(EvaluationReport {
        format: REPORT_FORMAT.into(),
        instance: InstanceSummary::from(&instance),
        cr_star,
        solution: SolutionSummary::from(&solution),
        violations,
        simulation,
    })
}

//! Report documents and their serialized forms.
//!
//! Structured reports are JSON. Sweeps additionally have a flat CSV form:
//! one row per `(cr*, seed)` run and one aggregate row per `cr*`. Every
//! float is written in its shortest round-trip representation, so parsing
//! an emitted document gives back the same values.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acs::AcsParams;
use crate::model::{Instance, Solution, Violation};
use crate::simulate::SimulationReport;

pub const REPORT_FORMAT: &str = "fvrptw-report 1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub name: String,
    pub customers: usize,
    pub vehicle_capacity: f64,
    pub depot_close: f64,
}

impl From<&Instance> for InstanceSummary {
    fn from(instance: &Instance) -> Self {
        Self {
            name: instance.name().to_string(),
            customers: instance.customer_count(),
            vehicle_capacity: instance.vehicle_capacity(),
            depot_close: instance.depot_close(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSummary {
    /// Customer ids in visiting order; the depot legs are implicit.
    pub stops: Vec<usize>,
    pub load: f64,
    pub distance: f64,
    /// `Cr{service start <= window close}` per stop.
    pub credibilities: Vec<f64>,
    /// Fuzzy arrival per stop.
    pub arrivals: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub vehicles: usize,
    pub total_distance: f64,
    pub cr_star: f64,
    pub routes: Vec<RouteSummary>,
}

impl From<&Solution> for SolutionSummary {
    fn from(solution: &Solution) -> Self {
        Self {
            vehicles: solution.vehicle_count(),
            total_distance: solution.total_distance,
            cr_star: solution.cr_star,
            routes: solution
                .routes
                .iter()
                .map(|r| RouteSummary {
                    stops: r.customer_ids(),
                    load: r.total_load,
                    distance: r.total_distance,
                    credibilities: r.stops.iter().map(|s| s.window_credibility).collect(),
                    arrivals: r.stops.iter().map(|s| s.arrival.as_array()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEcho {
    pub params: AcsParams,
    pub simulate_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub format: String,
    pub instance: InstanceSummary,
    pub config: RunEcho,
    pub solution: SolutionSummary,
    pub simulation: SimulationReport,
    /// Best-so-far distance after each iteration.
    pub trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub format: String,
    pub instance: InstanceSummary,
    pub cr_star: f64,
    pub solution: SolutionSummary,
    pub violations: Vec<Violation>,
    pub simulation: SimulationReport,
}

/// One solve in a sweep. Result columns are empty when the point was infeasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cr_star: f64,
    pub seed: u64,
    pub feasible: bool,
    pub unroutable_customer: Option<usize>,
    pub total_distance: Option<f64>,
    pub vehicles: Option<usize>,
    /// Misses summed over every replication.
    pub missed_windows: Option<usize>,
    pub mean_misses_per_replication: Option<f64>,
    /// `customer:misses` pairs joined by `;`.
    pub customer_misses: Option<String>,
}

/// Per-`cr*` statistics over the feasible runs of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAggregate {
    pub cr_star: f64,
    pub runs: usize,
    pub feasible_runs: usize,
    pub mean_distance: Option<f64>,
    pub min_distance: Option<f64>,
    pub max_distance: Option<f64>,
    /// Mean over runs of the per-replication miss average.
    pub mean_missed_windows: Option<f64>,
    pub mean_vehicles: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub format: String,
    pub instance: InstanceSummary,
    pub config: RunEcho,
    pub runs: Vec<SweepRow>,
    pub aggregate: Vec<SweepAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

pub fn customer_misses_field(report: &SimulationReport) -> String {
    report
        .per_customer
        .iter()
        .map(|c| format!("{}:{}", c.customer_id, c.miss_count))
        .collect::<Vec<_>>()
        .join(";")
}

/// Groups consecutive rows sharing a `cr*` and summarizes each group.
pub fn aggregate_rows(rows: &[SweepRow]) -> Vec<SweepAggregate> {
    rows.chunk_by(|a, b| a.cr_star == b.cr_star)
        .map(|group| {
            let feasible: Vec<&SweepRow> = group.iter().filter(|r| r.feasible).collect();
            let mean = |f: &dyn Fn(&SweepRow) -> f64| {
                (!feasible.is_empty()).then(|| feasible.iter().map(|r| f(r)).sum::<f64>() / feasible.len() as f64)
            };
            let distances = feasible.iter().filter_map(|r| r.total_distance);
            SweepAggregate {
                cr_star: group[0].cr_star,
                runs: group.len(),
                feasible_runs: feasible.len(),
                mean_distance: mean(&|r| r.total_distance.unwrap_or(f64::NAN)),
                min_distance: distances.clone().reduce(f64::min),
                max_distance: distances.reduce(f64::max),
                mean_missed_windows: mean(&|r| r.mean_misses_per_replication.unwrap_or(f64::NAN)),
                mean_vehicles: mean(&|r| r.vehicles.map_or(f64::NAN, |v| v as f64)),
            }
        })
        .collect()
}

pub fn to_json<T: Serialize>(document: &T) -> Result<String, ReportError> {
    let mut s = serde_json::to_string_pretty(document)?;
    s.push('\n');
    Ok(s)
}

pub fn csv_table<T: Serialize>(rows: &[T]) -> Result<String, ReportError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv_table<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader.deserialize().map(|r| r.map_err(ReportError::from)).collect()
}

/// One CSV row per visit of a solve report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopRow {
    pub route: usize,
    pub position: usize,
    pub customer: usize,
    pub modal_arrival: f64,
    pub credibility: f64,
    pub miss_count: usize,
    pub mean_actual_arrival: f64,
    pub window_close: f64,
}

pub fn stop_rows(solution: &SolutionSummary, simulation: &SimulationReport) -> Vec<StopRow> {
    let mut rows = Vec::new();
    for (r, route) in solution.routes.iter().enumerate() {
        for (position, (&customer, &credibility)) in route.stops.iter().zip(&route.credibilities).enumerate() {
            let sim = simulation.per_customer.iter().find(|c| c.customer_id == customer);
            rows.push(StopRow {
                route: r,
                position,
                customer,
                modal_arrival: route.arrivals[position][1],
                credibility,
                miss_count: sim.map_or(0, |c| c.miss_count),
                mean_actual_arrival: sim.map_or(f64::NAN, |c| c.mean_actual_arrival),
                window_close: sim.map_or(f64::NAN, |c| c.window_close),
            });
        }
    }
    rows
}

/// Human-readable summary in the shape of a results table.
pub fn write_summary(out: &mut impl Write, report: &SolveReport) -> std::io::Result<()> {
    let s = &report.solution;
    writeln!(out, "instance        {} ({} customers)", report.instance.name, report.instance.customers)?;
    writeln!(out, "cr*             {}", s.cr_star)?;
    writeln!(out, "vehicles used   {}", s.vehicles)?;
    writeln!(out, "total distance  {:.3}", s.total_distance)?;
    for (k, r) in s.routes.iter().enumerate() {
        let path: Vec<String> = std::iter::once(0)
            .chain(r.stops.iter().copied())
            .chain(std::iter::once(0))
            .map(|id| id.to_string())
            .collect();
        writeln!(
            out,
            "R{}: {}  load {}  distance {:.3}",
            k + 1,
            path.join("-"),
            r.load,
            r.distance
        )?;
    }
    writeln!(
        out,
        "missed windows  {} over {} replications",
        report.simulation.missed_window_total, report.simulation.replications
    )?;
    if let Some(ms) = report.wall_time_ms {
        writeln!(out, "wall time       {:.1} ms", ms)?;
    }
    Ok(())
}

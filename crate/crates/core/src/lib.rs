//! Vehicle routing with time windows under triangular fuzzy travel times.
//!
//! Time-window feasibility is a chance constraint on credibility: a plan is
//! accepted at preference index `cr*` when every service start meets its
//! window close with credibility at least `cr*`. Plans are built by an ant
//! colony system and stress-tested by replaying them under sampled travel
//! times.

pub mod acs;
pub mod fuzzy;
pub mod generate;
pub mod instance_io;
pub mod model;
pub mod report;
pub mod runner;
pub mod seed;
pub mod simulate;

pub use acs::{solve, solve_with, AcsParams, Execution, SolveError, SolveOutcome};
pub use fuzzy::TriangularFuzzyNumber;
pub use model::{validate_solution, Customer, Instance, Route, Solution, StopSchedule, Violation};
pub use simulate::{simulate_plan, SimulationReport};

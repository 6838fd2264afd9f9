//! Ant colony system for the fuzzy VRPTW.
//!
//! Each ant builds a full plan one vehicle at a time. From the current node
//! it picks the next customer among those it can still serve (capacity,
//! modal deadline, window credibility at `cr*`, modal return to the depot)
//! with the pseudo-random proportional rule: with probability `q0` take the
//! best-scoring customer, otherwise sample proportionally to
//! `tau^alpha * eta^beta`. A vehicle returns to the depot when nothing is
//! left that it can serve.
//!
//! After every iteration the best ant's plan is improved with intra-route
//! 2-opt, the best-so-far plan is updated and drives the global pheromone
//! update `tau <- (1 - rho) tau + Q / L` on its arcs.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::TriangularFuzzyNumber;
use crate::model::{schedule_stop, Instance, NodeMatrix, Route, Solution, StopSchedule, DEPOT};
use crate::seed;

/// Upper bound on visibility, used when the denominator vanishes.
pub const VISIBILITY_CAP: f64 = 1e6;

const IMPROVEMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParams { name: &'static str, reason: String },
    #[error("customer {customer} cannot be served even by a dedicated vehicle at cr* = {cr_star}")]
    Unroutable { customer: usize, cr_star: f64 },
    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),
}

/// How the pheromone matrix is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PheromoneInit {
    /// `tau_ij = 1 / c_ij`.
    Reciprocal,
    /// The same value on every arc.
    Constant(f64),
}

/// Second term of the visibility denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UrgencyTerm {
    /// `(l_j - e_j)^delta`, the width of the window.
    WindowWidth,
    /// `(l_j - a_j)^delta`, the slack left after the modal arrival.
    Slack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsParams {
    /// Pheromone exponent.
    pub alpha: f64,
    /// Visibility exponent.
    pub beta: f64,
    /// Exponent on the cost plus waiting term of the visibility.
    pub gamma: f64,
    /// Exponent on the urgency term of the visibility.
    pub delta: f64,
    /// Evaporation rate, in (0, 1).
    pub rho: f64,
    /// Exploitation threshold of the pseudo-random proportional rule.
    pub q0: f64,
    pub n_ants: usize,
    pub n_iterations: usize,
    /// Numerator of the deposit `Q / L`.
    pub deposit_q: f64,
    /// Preference index every service start must meet.
    pub cr_star: f64,
    pub rng_seed: u64,
    pub pheromone_init: PheromoneInit,
    pub urgency: UrgencyTerm,
}

impl Default for AcsParams {
    fn default() -> Self {
        Self {
            alpha: 2.5,
            beta: 0.7,
            gamma: 0.5,
            delta: 1.0,
            rho: 0.2,
            q0: 0.5,
            n_ants: 11,
            n_iterations: 1000,
            deposit_q: 1.0,
            cr_star: 0.8,
            rng_seed: 42,
            pheromone_init: PheromoneInit::Reciprocal,
            urgency: UrgencyTerm::WindowWidth,
        }
    }
}

impl AcsParams {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |name, reason: &str| {
            Err(SolveError::InvalidParams {
                name,
                reason: reason.to_string(),
            })
        };
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("deposit_q", self.deposit_q),
        ] {
            if !v.is_finite() {
                return bad(name, "must be finite");
            }
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho", "must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.q0) {
            return bad("q0", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.cr_star) {
            return bad("cr_star", "must lie in [0, 1]");
        }
        if self.n_ants == 0 {
            return bad("n_ants", "must be at least 1");
        }
        if self.n_iterations == 0 {
            return bad("n_iterations", "must be at least 1");
        }
        if self.deposit_q < 0.0 {
            return bad("deposit_q", "must be non-negative");
        }
        if let PheromoneInit::Constant(v) = self.pheromone_init {
            if !(v.is_finite() && v > 0.0) {
                return bad("pheromone_init", "constant must be positive and finite");
            }
        }
        Ok(())
    }
}

/// Learned arc desirability. Every entry stays strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    tau: NodeMatrix<f64>,
}

impl PheromoneMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau.get(i, j)
    }

    pub fn size(&self) -> usize {
        self.tau.size()
    }

    pub fn min_value(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn init_pheromone(instance: &Instance, init: PheromoneInit) -> PheromoneMatrix {
    let size = instance.node_count();
    let tau = match init {
        PheromoneInit::Constant(v) => NodeMatrix::from_fn(size, |_, _| v),
        PheromoneInit::Reciprocal => {
            // zero-length arcs borrow the shortest positive distance
            let epsilon = instance
                .distance_matrix()
                .iter()
                .copied()
                .filter(|&d| d > 0.0)
                .fold(f64::INFINITY, f64::min);
            let epsilon = if epsilon.is_finite() { epsilon } else { 1.0 };
            NodeMatrix::from_fn(size, |i, j| {
                if i == j {
                    1.0
                } else {
                    let d = instance.distance(i, j);
                    1.0 / if d > 0.0 { d } else { epsilon }
                }
            })
        }
    };
    PheromoneMatrix { tau }
}

/// Evaporates every arc, then deposits `deposit_q / L` on each arc of `best`.
pub fn global_pheromone_update(pheromone: &mut PheromoneMatrix, best: &Solution, params: &AcsParams) {
    let keep = 1.0 - params.rho;
    for t in pheromone.tau.iter_mut() {
        *t = (*t * keep).max(f64::MIN_POSITIVE);
    }
    let length = best.total_distance;
    if !(length > 0.0) {
        return;
    }
    let deposit = params.deposit_q / length;
    for route in &best.routes {
        let mut prev = DEPOT;
        for stop in route.stops.iter().map(|s| s.customer_id).chain(std::iter::once(DEPOT)) {
            let t = pheromone.tau.get(prev, stop);
            pheromone.tau.set(prev, stop, t + deposit);
            prev = stop;
        }
    }
}

/// `eta_ij = 1 / ((c_ij + wt_j)^gamma + u_j^delta)` where `wt_j` is the wait
/// implied by the modal arrival at `to` after leaving `from` at modal time
/// `departure_modal`, and `u_j` is the urgency term.
pub fn visibility(instance: &Instance, from: usize, to: usize, params: &AcsParams, departure_modal: f64) -> f64 {
    let node = instance.node(to);
    let arrival = departure_modal + instance.travel(from, to).b();
    let wait = (node.window_open - arrival).max(0.0);
    let urgency = match params.urgency {
        UrgencyTerm::WindowWidth => node.window_close - node.window_open,
        UrgencyTerm::Slack => (node.window_close - arrival).max(0.0),
    };
    let denominator = (instance.distance(from, to) + wait).powf(params.gamma) + urgency.powf(params.delta);
    if denominator > 0.0 {
        (1.0 / denominator).min(VISIBILITY_CAP)
    } else {
        VISIBILITY_CAP
    }
}

/// A vehicle under construction.
#[derive(Debug, Clone)]
pub struct AntState {
    pub current: usize,
    pub departure: TriangularFuzzyNumber,
    pub load: f64,
    pub visited: Vec<bool>,
    pub remaining: usize,
}

impl AntState {
    /// Nothing visited yet, parked at the depot.
    pub fn new(instance: &Instance) -> Self {
        let mut visited = vec![false; instance.node_count()];
        visited[DEPOT] = true;
        Self {
            current: DEPOT,
            departure: TriangularFuzzyNumber::ZERO,
            load: 0.0,
            visited,
            remaining: instance.customer_count(),
        }
    }

    /// Sends the vehicle back to the depot and starts a fresh one.
    pub fn open_vehicle(&mut self) {
        self.current = DEPOT;
        self.departure = TriangularFuzzyNumber::ZERO;
        self.load = 0.0;
    }

    pub fn visit(&mut self, instance: &Instance, stop: &StopSchedule) {
        let id = stop.customer_id;
        debug_assert!(!self.visited[id]);
        self.visited[id] = true;
        self.remaining -= 1;
        self.current = id;
        self.departure = stop.departure;
        self.load += instance.node(id).demand;
    }

    pub fn first_unvisited(&self) -> Option<usize> {
        self.visited.iter().position(|v| !v)
    }
}

/// A customer the vehicle can serve next, with its tentative schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub customer: usize,
    pub stop: StopSchedule,
}

/// Whether a vehicle carrying `load` can serve the visit described by `stop`
/// and still get home before the depot closes.
pub fn admits(instance: &Instance, stop: &StopSchedule, load: f64, cr_star: f64) -> bool {
    let node = instance.node(stop.customer_id);
    load + node.demand <= instance.vehicle_capacity()
        && stop.arrival.b() <= node.window_close
        && stop.window_credibility >= cr_star
        && stop.departure.b() + instance.travel(stop.customer_id, DEPOT).b() <= instance.depot_close()
}

/// Customers reachable next from `state`, in ascending id order.
pub fn candidate_set(instance: &Instance, state: &AntState, params: &AcsParams) -> Vec<Candidate> {
    instance
        .customer_ids()
        .filter(|&j| !state.visited[j])
        .filter_map(|j| {
            let stop = schedule_stop(instance, state.current, state.departure, j);
            admits(instance, &stop, state.load, params.cr_star).then_some(Candidate { customer: j, stop })
        })
        .collect()
}

/// Pseudo-random proportional choice over `scores`: with probability `q0`
/// the first maximum, otherwise an index drawn with probability
/// proportional to its score.
pub fn pseudo_random_proportional<R: Rng + ?Sized>(scores: &[f64], q0: f64, rng: &mut R) -> Option<usize> {
    match scores.len() {
        0 => return None,
        1 => return Some(0),
        _ => {}
    }
    let argmax = || {
        scores
            .iter()
            .enumerate()
            .fold(0, |best, (k, &s)| if s > scores[best] { k } else { best })
    };
    let r: f64 = rng.gen();
    if r <= q0 {
        return Some(argmax());
    }
    let total: f64 = scores.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Some(argmax());
    }
    let target = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    for (k, &s) in scores.iter().enumerate() {
        cumulative += s;
        if target < cumulative {
            return Some(k);
        }
    }
    scores.iter().rposition(|&s| s > 0.0)
}

pub fn select_next<R: Rng + ?Sized>(
    pheromone: &PheromoneMatrix,
    instance: &Instance,
    state: &AntState,
    params: &AcsParams,
    rng: &mut R,
) -> Option<Candidate> {
    let candidates = candidate_set(instance, state, params);
    let scores: Vec<f64> = candidates
        .iter()
        .map(|c| {
            let eta = visibility(instance, state.current, c.customer, params, state.departure.b());
            pheromone.get(state.current, c.customer).powf(params.alpha) * eta.powf(params.beta)
        })
        .collect();
    pseudo_random_proportional(&scores, params.q0, rng).map(|k| candidates[k])
}

/// Customers that no vehicle can serve on its own at `cr_star`.
pub fn unroutable_customers(instance: &Instance, cr_star: f64) -> Vec<usize> {
    instance
        .customer_ids()
        .filter(|&j| {
            let stop = schedule_stop(instance, DEPOT, TriangularFuzzyNumber::ZERO, j);
            !admits(instance, &stop, 0.0, cr_star)
        })
        .collect()
}

/// One ant's complete plan.
pub fn construct_solution<R: Rng + ?Sized>(
    instance: &Instance,
    pheromone: &PheromoneMatrix,
    params: &AcsParams,
    rng: &mut R,
) -> Result<Solution, SolveError> {
    let mut state = AntState::new(instance);
    let mut routes = Vec::new();
    while state.remaining > 0 {
        state.open_vehicle();
        let mut sequence = Vec::new();
        while let Some(next) = select_next(pheromone, instance, &state, params, rng) {
            state.visit(instance, &next.stop);
            sequence.push(next.customer);
        }
        if sequence.is_empty() {
            let customer = state.first_unvisited().expect("remaining > 0");
            return Err(SolveError::Unroutable {
                customer,
                cr_star: params.cr_star,
            });
        }
        routes.push(Route::build(instance, &sequence).expect("constructed sequences are valid"));
    }
    Ok(Solution::new(routes, params.cr_star))
}

/// Intra-route 2-opt, first improvement, until no segment reversal both
/// shortens a route and keeps it feasible at `cr_star`.
pub fn local_search(solution: &Solution, instance: &Instance, params: &AcsParams) -> Solution {
    let routes = solution
        .routes
        .iter()
        .map(|route| two_opt_route(route, instance, params.cr_star))
        .collect();
    Solution::new(routes, solution.cr_star)
}

fn two_opt_route(route: &Route, instance: &Instance, cr_star: f64) -> Route {
    let mut current = route.clone();
    let mut sequence = route.customer_ids();
    'improve: loop {
        let length = current.total_distance;
        for i in 0..sequence.len().saturating_sub(1) {
            for j in i + 1..sequence.len() {
                let mut trial = sequence.clone();
                trial[i..=j].reverse();
                let trial_length = instance.route_distance(&trial);
                if trial_length < length - IMPROVEMENT_EPS * length.max(1.0) {
                    let rebuilt = Route::build(instance, &trial).expect("permutation of a valid route");
                    if rebuilt.is_time_feasible(instance, cr_star) {
                        sequence = trial;
                        current = rebuilt;
                        continue 'improve;
                    }
                }
            }
        }
        return current;
    }
}

/// How ants of one iteration are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Worker pool of the given size; `0` lets the pool pick.
    Parallel { threads: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub best: Solution,
    /// Best-so-far distance after each iteration.
    pub trace: Vec<f64>,
}

pub fn solve(instance: &Instance, params: &AcsParams) -> Result<SolveOutcome, SolveError> {
    solve_with(instance, params, Execution::Serial)
}

/// Runs the colony. Ant `k` of iteration `t` draws from its own substream
/// seeded by `(rng_seed, t, k)`, so serial and parallel runs agree bit for bit.
pub fn solve_with(instance: &Instance, params: &AcsParams, execution: Execution) -> Result<SolveOutcome, SolveError> {
    params.validate()?;
    if instance.customer_count() == 0 {
        return Ok(SolveOutcome {
            best: Solution::empty(params.cr_star),
            trace: vec![0.0; params.n_iterations],
        });
    }
    if let Some(&customer) = unroutable_customers(instance, params.cr_star).first() {
        return Err(SolveError::Unroutable {
            customer,
            cr_star: params.cr_star,
        });
    }
    let pool = match execution {
        Execution::Serial => None,
        Execution::Parallel { threads } => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| SolveError::ThreadPool(e.to_string()))?,
        ),
    };
    run_colony(instance, params, pool.as_ref())
}

fn run_colony(
    instance: &Instance,
    params: &AcsParams,
    pool: Option<&rayon::ThreadPool>,
) -> Result<SolveOutcome, SolveError> {
    let mut pheromone = init_pheromone(instance, params.pheromone_init);
    let mut best: Option<Solution> = None;
    let mut trace = Vec::with_capacity(params.n_iterations);

    for iteration in 0..params.n_iterations {
        let snapshot = &pheromone;
        let ant = |k: usize| {
            let mut rng = seed::substream(params.rng_seed, &[iteration as u64, k as u64]);
            construct_solution(instance, snapshot, params, &mut rng)
        };
        let ants: Vec<Solution> = match pool {
            None => (0..params.n_ants).map(ant).collect::<Result<_, _>>()?,
            Some(pool) => pool.install(|| (0..params.n_ants).into_par_iter().map(ant).collect::<Result<_, _>>())?,
        };

        // first ant wins ties
        let iteration_best = ants
            .iter()
            .reduce(|a, b| if b.total_distance < a.total_distance { b } else { a })
            .expect("n_ants >= 1");
        let improved = local_search(iteration_best, instance, params);
        debug_assert!(crate::model::validate_solution(&improved, instance, params.cr_star).is_ok());

        if best.as_ref().is_none_or(|b| improved.total_distance < b.total_distance) {
            best = Some(improved);
        }
        let best_ref = best.as_ref().expect("set above");
        global_pheromone_update(&mut pheromone, best_ref, params);
        trace.push(best_ref.total_distance);
    }

    Ok(SolveOutcome {
        best: best.expect("n_iterations >= 1"),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{line_instance, node};
    use crate::model::{validate_solution, TravelFactors};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> Instance {
        let customers = vec![
            node(0, 0.0, 0.0, 5000.0, 0.0),
            node(1, 1.0, 0.0, 5000.0, 0.0),
            node(2, 1.0, 0.0, 5000.0, 0.0),
        ];
        // 3-4-5 right triangle
        Instance::from_coordinates(
            "tri",
            customers,
            10.0,
            5000.0,
            vec![(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)],
            TravelFactors::DEFAULT,
        )
        .unwrap()
    }

    #[test]
    fn pheromone_is_reciprocal_distance() {
        let inst = triangle();
        let tau = init_pheromone(&inst, PheromoneInit::Reciprocal);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(tau.get(i, j), 1.0 / inst.distance(i, j));
                }
            }
        }
        assert_eq!(tau.get(0, 1), 0.25);
        let constant = init_pheromone(&inst, PheromoneInit::Constant(1.0));
        assert_eq!(constant.get(1, 2), 1.0);
    }

    #[test]
    fn pheromone_zero_distance_uses_smallest_positive() {
        let customers = vec![
            node(0, 0.0, 0.0, 5000.0, 0.0),
            node(1, 1.0, 0.0, 5000.0, 0.0),
            node(2, 1.0, 0.0, 5000.0, 0.0),
        ];
        let inst = Instance::from_coordinates(
            "dup",
            customers,
            10.0,
            5000.0,
            vec![(0.0, 0.0), (2.0, 0.0), (2.0, 0.0)],
            TravelFactors::DEFAULT,
        )
        .unwrap();
        let tau = init_pheromone(&inst, PheromoneInit::Reciprocal);
        assert_eq!(tau.get(1, 2), 0.5);
        assert!(tau.min_value() > 0.0);
    }

    #[test]
    fn visibility_examples() {
        // c = 10, modal arrival 5 before opening, window width 100
        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 15.0, 115.0, 0.0)];
        let inst = line_instance(&[0.0, 10.0], customers, 10.0);
        let params = AcsParams {
            gamma: 0.5,
            delta: 1.0,
            ..AcsParams::default()
        };
        let eta = visibility(&inst, 0, 1, &params, 0.0);
        let expected = 1.0 / (15f64.powf(0.5) + 100.0);
        assert!((eta - expected).abs() < 1e-15);
        assert!((eta - 0.009627).abs() < 1e-6);

        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 0.0, 0.0)];
        let inst = line_instance(&[0.0, 1.0], customers, 10.0);
        let unit = AcsParams {
            gamma: 1.0,
            delta: 1.0,
            ..AcsParams::default()
        };
        // leaving at -1 puts the modal arrival on the zero-width window
        assert_eq!(visibility(&inst, 0, 1, &unit, -1.0), 1.0);
    }

    #[test]
    fn wider_window_lowers_visibility() {
        let narrow = line_instance(
            &[0.0, 10.0],
            vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 50.0, 0.0)],
            10.0,
        );
        let wide = line_instance(
            &[0.0, 10.0],
            vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 500.0, 0.0)],
            10.0,
        );
        let p = AcsParams::default();
        assert!(visibility(&wide, 0, 1, &p, 0.0) < visibility(&narrow, 0, 1, &p, 0.0));
    }

    #[test]
    fn visibility_caps_zero_denominator() {
        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 0.0, 0.0)];
        let inst = line_instance(&[0.0, 0.0], customers, 10.0);
        assert_eq!(visibility(&inst, 0, 1, &AcsParams::default(), 0.0), VISIBILITY_CAP);
    }

    #[test]
    fn slack_urgency_uses_modal_arrival() {
        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 100.0, 0.0)];
        let inst = line_instance(&[0.0, 10.0], customers, 10.0);
        let p = AcsParams {
            urgency: UrgencyTerm::Slack,
            gamma: 1.0,
            delta: 1.0,
            ..AcsParams::default()
        };
        assert_eq!(visibility(&inst, 0, 1, &p, 30.0), 1.0 / (10.0 + 60.0));
    }

    fn fuzzy_star() -> Instance {
        // customer 1: fine; 2: too heavy after 1; 3: tight window failing cr 0.8
        let customers = vec![
            node(0, 0.0, 0.0, 5000.0, 0.0),
            node(1, 500.0, 0.0, 1000.0, 0.0),
            node(2, 600.0, 0.0, 1000.0, 0.0),
            node(3, 100.0, 0.0, 25.0, 0.0),
        ];
        Instance::from_coordinates(
            "star",
            customers,
            1000.0,
            5000.0,
            vec![(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (-20.0, 0.0)],
            TravelFactors::new(0.8, 1.0, 1.3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn candidate_set_filters() {
        let inst = fuzzy_star();
        let params = AcsParams::default();
        let mut state = AntState::new(&inst);
        let stop1 = schedule_stop(&inst, 0, TriangularFuzzyNumber::ZERO, 1);
        state.visit(&inst, &stop1);
        // from 1, travel to 3 is (24, 30, 39) after departing at (8, 10, 13): TS (32, 40, 52) vs close 25
        let ids: Vec<usize> = candidate_set(&inst, &state, &params).iter().map(|c| c.customer).collect();
        assert!(ids.is_empty());

        // oracle at the depot: 2 and 3 pass capacity; 3's solo credibility is Cr{(16,20,26) <= 25}
        let fresh = AntState::new(&inst);
        let cr3 = (25.0 - 2.0 * 20.0 + 26.0) / (2.0 * (26.0 - 20.0));
        assert!(cr3 > 0.8);
        let ids: Vec<usize> = candidate_set(&inst, &fresh, &params).iter().map(|c| c.customer).collect();
        assert_eq!(ids, vec![1, 2, 3]);
    }

    #[test]
    fn candidate_set_singleton_case() {
        // three unvisited: 1 fails credibility at 0.8, 2 fails capacity, 3 is fine
        let customers = vec![
            node(0, 0.0, 0.0, 5000.0, 0.0),
            node(1, 10.0, 0.0, 21.0, 0.0),
            node(2, 900.0, 0.0, 1000.0, 0.0),
            node(3, 10.0, 0.0, 1000.0, 0.0),
        ];
        let inst = Instance::from_coordinates(
            "single",
            customers,
            1000.0,
            5000.0,
            vec![(0.0, 0.0), (20.0, 0.0), (0.0, 20.0), (-20.0, 0.0)],
            TravelFactors::new(0.8, 1.0, 1.3).unwrap(),
        )
        .unwrap();
        let mut state = AntState::new(&inst);
        state.load = 200.0;
        // Cr{(16,20,26) <= 21} = (21 - 40 + 26) / 12
        let cr1 = (21.0 - 40.0 + 26.0) / 12.0;
        assert!(cr1 < 0.8);
        let ids: Vec<usize> = candidate_set(&inst, &state, &AcsParams::default())
            .iter()
            .map(|c| c.customer)
            .collect();
        assert_eq!(ids, vec![3]);
    }

    #[test]
    fn candidate_set_empty_when_all_visited_or_too_heavy() {
        let inst = fuzzy_star();
        let mut state = AntState::new(&inst);
        state.visited.iter_mut().for_each(|v| *v = true);
        assert!(candidate_set(&inst, &state, &AcsParams::default()).is_empty());

        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 600.0, 0.0, 1000.0, 0.0)];
        let inst = line_instance(&[0.0, 5.0], customers, 1000.0);
        let mut state = AntState::new(&inst);
        state.load = 500.0;
        assert!(candidate_set(&inst, &state, &AcsParams::default()).is_empty());
    }

    #[test]
    fn candidate_set_respects_depot_close() {
        let customers = vec![node(0, 0.0, 0.0, 30.0, 0.0), node(1, 1.0, 0.0, 100.0, 5.0)];
        let inst = Instance::from_coordinates(
            "late",
            customers,
            10.0,
            30.0,
            vec![(0.0, 0.0), (15.0, 0.0)],
            TravelFactors::new(1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(candidate_set(&inst, &AntState::new(&inst), &AcsParams::default()).is_empty());
        assert_eq!(unroutable_customers(&inst, 0.0), vec![1]);
    }

    #[test]
    fn prp_single_candidate_and_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(pseudo_random_proportional(&[], 0.5, &mut rng), None);
        assert_eq!(pseudo_random_proportional(&[0.3], 0.0, &mut rng), Some(0));
        for _ in 0..100 {
            assert_eq!(pseudo_random_proportional(&[1.0, 2.0], 1.0, &mut rng), Some(1));
        }
        // ties go to the first
        assert_eq!(pseudo_random_proportional(&[2.0, 2.0], 1.0, &mut rng), Some(0));
    }

    #[test]
    fn prp_proportional_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| pseudo_random_proportional(&[3.0, 1.0], 0.0, &mut rng) == Some(0))
            .count();
        let freq = hits as f64 / draws as f64;
        assert!((freq - 0.75).abs() <= 0.01, "freq {freq}");
    }

    #[test]
    fn pheromone_update_examples() {
        let inst = line_instance(
            &[0.0, 50.0],
            vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 5000.0, 0.0)],
            10.0,
        );
        let params = AcsParams {
            rho: 0.2,
            deposit_q: 1.0,
            ..AcsParams::default()
        };
        let best = Solution::from_sequences(&inst, &[vec![1]], 0.8).unwrap();
        assert_eq!(best.total_distance, 100.0);
        let mut tau = init_pheromone(&inst, PheromoneInit::Constant(1.0));
        global_pheromone_update(&mut tau, &best, &params);
        assert_eq!(tau.get(1, 1), 0.8);
        assert!((tau.get(0, 1) - 0.81).abs() < 1e-15);
        assert!((tau.get(1, 0) - 0.81).abs() < 1e-15);

        let mut tau = init_pheromone(&inst, PheromoneInit::Constant(1.0));
        let nothing = Solution::empty(0.8);
        global_pheromone_update(&mut tau, &nothing, &params);
        global_pheromone_update(&mut tau, &nothing, &params);
        assert!((tau.get(0, 1) - 0.64).abs() < 1e-15);
    }

    #[test]
    fn pheromone_never_reaches_zero() {
        let inst = triangle();
        let mut tau = init_pheromone(&inst, PheromoneInit::Reciprocal);
        let params = AcsParams {
            rho: 0.99,
            ..AcsParams::default()
        };
        for _ in 0..500 {
            global_pheromone_update(&mut tau, &Solution::empty(0.8), &params);
        }
        assert!(tau.min_value() > 0.0);
    }

    #[test]
    fn construct_single_customer() {
        let inst = line_instance(
            &[0.0, 5.0],
            vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 100.0, 0.0)],
            10.0,
        );
        let params = AcsParams::default();
        let tau = init_pheromone(&inst, params.pheromone_init);
        let sol = construct_solution(&inst, &tau, &params, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(sol.sequences(), vec![vec![1]]);
        assert_eq!(sol.total_distance, 10.0);
    }

    #[test]
    fn construct_reports_unroutable_customer() {
        // solo credibility Cr{(8,10,13) <= 10} = 0.5 < 0.8
        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 10.0, 0.0)];
        let inst = Instance::from_coordinates(
            "tight",
            customers,
            10.0,
            5000.0,
            vec![(0.0, 0.0), (10.0, 0.0)],
            TravelFactors::DEFAULT,
        )
        .unwrap();
        let params = AcsParams::default();
        let tau = init_pheromone(&inst, params.pheromone_init);
        let err = construct_solution(&inst, &tau, &params, &mut ChaCha8Rng::seed_from_u64(3)).unwrap_err();
        assert_eq!(err, SolveError::Unroutable { customer: 1, cr_star: 0.8 });
        assert!(matches!(solve(&inst, &params), Err(SolveError::Unroutable { customer: 1, .. })));
        let relaxed = AcsParams { cr_star: 0.5, ..params };
        assert!(solve(&inst, &relaxed).is_ok());
    }

    #[test]
    fn local_search_fixes_crossing() {
        let customers = (0..5).map(|i| node(i, if i == 0 { 0.0 } else { 1.0 }, 0.0, 5000.0, 0.0)).collect();
        let inst = line_instance(&[0.0, 1.0, 2.0, 3.0, 4.0], customers, 10.0);
        let params = AcsParams::default();
        let sol = Solution::from_sequences(&inst, &[vec![1, 3, 2, 4]], params.cr_star).unwrap();
        let improved = local_search(&sol, &inst, &params);
        assert!(improved.sequences() == vec![vec![1, 2, 3, 4]] || improved.sequences() == vec![vec![4, 3, 2, 1]]);
        assert_eq!(improved.total_distance, 8.0);
        // brute force over every single reversal of the input
        let seq = [1, 3, 2, 4];
        let best_neighbour = (0..3)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut t = seq.to_vec();
                t[i..=j].reverse();
                inst.route_distance(&t)
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best_neighbour, 8.0);
        assert_eq!(local_search(&improved, &inst, &params), improved);
    }

    #[test]
    fn local_search_respects_credibility() {
        // customer 1 only meets its window when visited first
        let customers = vec![
            node(0, 0.0, 0.0, 5000.0, 0.0),
            node(1, 1.0, 0.0, 6.42, 0.0),
            node(2, 1.0, 0.0, 5000.0, 0.0),
            node(3, 1.0, 0.0, 5000.0, 0.0),
        ];
        let inst = Instance::from_coordinates(
            "tight",
            customers,
            10.0,
            5000.0,
            vec![(0.0, 0.0), (0.0, 6.0), (3.0, 6.0), (-4.0, -1.0)],
            TravelFactors::new(0.9, 1.0, 1.1).unwrap(),
        )
        .unwrap();
        let params = AcsParams {
            cr_star: 0.8,
            ..AcsParams::default()
        };
        let plan = Solution::from_sequences(&inst, &[vec![1, 2, 3]], params.cr_star).unwrap();
        assert_eq!(validate_solution(&plan, &inst, params.cr_star), Ok(()));
        // enumerate every reversal: the only shorter one is infeasible
        let seq = [1, 2, 3];
        let shorter: Vec<Vec<usize>> = (0..2)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut t = seq.to_vec();
                t[i..=j].reverse();
                t
            })
            .filter(|t| inst.route_distance(t) < plan.total_distance - 1e-9)
            .collect();
        assert_eq!(shorter, vec![vec![2, 1, 3]]);
        assert!(!Route::build(&inst, &shorter[0]).unwrap().is_time_feasible(&inst, params.cr_star));
        assert_eq!(local_search(&plan, &inst, &params), plan);
    }

    #[test]
    fn solve_one_customer_is_out_and_back() {
        let inst = line_instance(
            &[0.0, 7.0],
            vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 100.0, 0.0)],
            10.0,
        );
        let params = AcsParams {
            n_iterations: 5,
            ..AcsParams::default()
        };
        let out = solve(&inst, &params).unwrap();
        assert_eq!(out.best.total_distance, 14.0);
        assert_eq!(out.trace, vec![14.0; 5]);
    }

    #[test]
    fn rejects_bad_params() {
        let inst = triangle();
        for p in [
            AcsParams { rho: 0.0, ..AcsParams::default() },
            AcsParams { rho: 1.0, ..AcsParams::default() },
            AcsParams { q0: 1.1, ..AcsParams::default() },
            AcsParams { n_ants: 0, ..AcsParams::default() },
            AcsParams { n_iterations: 0, ..AcsParams::default() },
            AcsParams { cr_star: -0.1, ..AcsParams::default() },
            AcsParams { alpha: f64::NAN, ..AcsParams::default() },
            AcsParams { pheromone_init: PheromoneInit::Constant(0.0), ..AcsParams::default() },
        ] {
            assert!(matches!(solve(&inst, &p), Err(SolveError::InvalidParams { .. })), "{p:?}");
        }
    }
}

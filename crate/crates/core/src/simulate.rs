//! Monte-Carlo evaluation of a plan under realized travel times.
//!
//! Each replication draws a crisp travel time for every leg of every route
//! from the leg's triangular fuzzy number and replays the routes: the
//! vehicle waits when it arrives before a window opens, and when it arrives
//! after the window closes the customer is still served and a miss is
//! recorded. Distances come from the crisp matrix, so the mean total
//! distance always equals the plan's objective.

use rand::distributions::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::TriangularFuzzyNumber;
use crate::model::{Instance, Solution, DEPOT};
use crate::seed;

/// Attempts allowed before the rejection sampler gives up.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1_000_000;

pub const DEFAULT_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error("rejection sampling of {tfn} accepted nothing in {attempts} attempts")]
    SamplerExhausted { tfn: TriangularFuzzyNumber, attempts: usize },
    #[error("replication count must be at least 1")]
    NoReplications,
    #[error("plan visits unknown node {0}")]
    UnknownCustomer(usize),
    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),
}

/// Draws a crisp value from `tfn` by rejection: `x` uniform on `[a, c]` is
/// accepted when an independent `r` uniform on `(0, 1)` falls below the
/// membership of `x`. Accepted values follow the triangular density.
pub fn sample_travel_time<R: Rng + ?Sized>(tfn: &TriangularFuzzyNumber, rng: &mut R) -> Result<f64, SimulateError> {
    if tfn.is_crisp() {
        return Ok(tfn.b());
    }
    let (a, c) = (tfn.a(), tfn.c());
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let u: f64 = rng.gen();
        let x = a + u * (c - a);
        let r: f64 = rng.sample(Open01);
        if r < tfn.membership(x) {
            return Ok(x);
        }
    }
    Err(SimulateError::SamplerExhausted {
        tfn: *tfn,
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomerMisses {
    pub customer_id: usize,
    /// Replications in which the realized arrival was after the window close.
    pub miss_count: usize,
    pub mean_actual_arrival: f64,
    pub window_close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub replications: usize,
    pub mean_total_distance: f64,
    /// One entry per customer visited by the plan, in ascending id order.
    pub per_customer: Vec<CustomerMisses>,
    pub missed_window_total: usize,
}

impl SimulationReport {
    /// Average number of missed windows per replication.
    pub fn mean_misses_per_replication(&self) -> f64 {
        self.missed_window_total as f64 / self.replications as f64
    }
}

struct Replication {
    distance: f64,
    /// (customer, arrival, missed) per visit, plan order.
    visits: Vec<(usize, f64, bool)>,
}

fn replicate<R: Rng + ?Sized>(solution: &Solution, instance: &Instance, rng: &mut R) -> Result<Replication, SimulateError> {
    let mut visits = Vec::new();
    let mut route_lengths = Vec::with_capacity(solution.routes.len());
    for route in &solution.routes {
        let mut prev = DEPOT;
        let mut departure = 0.0;
        let mut ids = Vec::with_capacity(route.stops.len());
        for stop in &route.stops {
            let j = stop.customer_id;
            let node = instance.node(j);
            let arrival = departure + sample_travel_time(&instance.travel(prev, j), rng)?;
            visits.push((j, arrival, arrival > node.window_close));
            departure = arrival.max(node.window_open) + node.service_time;
            ids.push(j);
            prev = j;
        }
        route_lengths.push(instance.route_distance(&ids));
    }
    // summed route by route, like the objective, so the two agree exactly
    let distance = route_lengths.iter().sum();
    Ok(Replication { distance, visits })
}

/// Replays `solution` `n_replications` times. One seed is drawn from `rng`;
/// replication `k` then runs on its own substream, so the report does not
/// depend on how replications are scheduled.
pub fn simulate_plan<R: Rng + ?Sized>(
    solution: &Solution,
    instance: &Instance,
    n_replications: usize,
    rng: &mut R,
) -> Result<SimulationReport, SimulateError> {
    simulate_plan_with(solution, instance, n_replications, rng.gen(), None)
}

/// As [`simulate_plan`], from an explicit base seed, optionally on a pool.
pub fn simulate_plan_with(
    solution: &Solution,
    instance: &Instance,
    n_replications: usize,
    base_seed: u64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<SimulationReport, SimulateError> {
    if n_replications == 0 {
        return Err(SimulateError::NoReplications);
    }
    for route in &solution.routes {
        for stop in &route.stops {
            if !instance.is_customer(stop.customer_id) {
                return Err(SimulateError::UnknownCustomer(stop.customer_id));
            }
        }
    }
    let run = |k: usize| replicate(solution, instance, &mut seed::substream(base_seed, &[k as u64]));
    let replications: Vec<Replication> = match pool {
        None => (0..n_replications).map(run).collect::<Result<_, _>>()?,
        Some(pool) => pool.install(|| (0..n_replications).into_par_iter().map(run).collect::<Result<_, _>>())?,
    };

    // incremental means keep a constant series exactly constant
    let mut mean_distance = 0.0;
    let mut slots: Vec<Option<(usize, f64)>> = vec![None; instance.node_count()];
    for (k, rep) in replications.iter().enumerate() {
        mean_distance += (rep.distance - mean_distance) / (k + 1) as f64;
        for &(j, arrival, missed) in &rep.visits {
            let (count, mean) = slots[j].get_or_insert((0, 0.0));
            *mean += (arrival - *mean) / (k + 1) as f64;
            *count += usize::from(missed);
        }
    }
    let per_customer: Vec<CustomerMisses> = slots
        .iter()
        .enumerate()
        .filter_map(|(j, s)| {
            s.map(|(miss_count, mean_actual_arrival)| CustomerMisses {
                customer_id: j,
                miss_count,
                mean_actual_arrival,
                window_close: instance.node(j).window_close,
            })
        })
        .collect();
    Ok(SimulationReport {
        replications: n_replications,
        mean_total_distance: mean_distance,
        missed_window_total: per_customer.iter().map(|c| c.miss_count).sum(),
        per_customer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{line_instance, node};
    use crate::model::{Solution, TravelFactors};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tfn(a: f64, b: f64, c: f64) -> TriangularFuzzyNumber {
        TriangularFuzzyNumber::new(a, b, c).unwrap()
    }

    #[test]
    fn degenerate_sample_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(sample_travel_time(&tfn(5.0, 5.0, 5.0), &mut rng).unwrap(), 5.0);
        }
    }

    #[test]
    fn samples_stay_in_support_with_triangular_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = tfn(0.0, 1.0, 2.0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = sample_travel_time(&t, &mut rng).unwrap();
            assert!((0.0..=2.0).contains(&x));
            sum += x;
        }
        let mean = sum / n as f64;
        // (a + b + c) / 3
        assert!((mean - 1.0).abs() <= 0.02, "mean {mean}");
    }

    #[test]
    fn one_sided_triangle_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = tfn(2.0, 2.0, 5.0);
        let n = 50_000;
        let mean = (0..n).map(|_| sample_travel_time(&t, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 3.0).abs() < 0.03, "mean {mean}");
    }

    fn crisp_pair() -> Instance {
        line_instance(
            &[0.0, 10.0, 20.0],
            vec![
                node(0, 0.0, 0.0, 5000.0, 0.0),
                node(1, 1.0, 0.0, 100.0, 15.0),
                node(2, 1.0, 0.0, 100.0, 15.0),
            ],
            10.0,
        )
    }

    #[test]
    fn crisp_feasible_plan_never_misses() {
        let inst = crisp_pair();
        let sol = Solution::from_sequences(&inst, &[vec![1, 2]], 1.0).unwrap();
        let report = simulate_plan(&sol, &inst, 200, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(report.missed_window_total, 0);
        assert_eq!(report.mean_total_distance, sol.total_distance);
        assert_eq!(report.per_customer[1].mean_actual_arrival, 35.0);
    }

    #[test]
    fn certain_miss_counts_every_replication() {
        let customers = vec![node(0, 0.0, 0.0, 5000.0, 0.0), node(1, 1.0, 0.0, 7.0, 0.0)];
        let inst = Instance::from_coordinates(
            "late",
            customers,
            10.0,
            5000.0,
            vec![(0.0, 0.0), (10.0, 0.0)],
            TravelFactors::DEFAULT,
        )
        .unwrap();
        // earliest possible arrival is 8 > 7
        let sol = Solution::from_sequences(&inst, &[vec![1]], 0.0).unwrap();
        let report = simulate_plan(&sol, &inst, 300, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(report.per_customer[0].miss_count, 300);
        assert_eq!(report.missed_window_total, 300);
    }

    #[test]
    fn deterministic_and_pool_independent() {
        let customers = vec![
            node(0, 0.0, 0.0, 5000.0, 0.0),
            node(1, 1.0, 0.0, 11.0, 3.0),
            node(2, 1.0, 20.0, 30.0, 3.0),
        ];
        let inst = Instance::from_coordinates(
            "mix",
            customers,
            10.0,
            5000.0,
            vec![(0.0, 0.0), (10.0, 0.0), (10.0, 8.0)],
            TravelFactors::DEFAULT,
        )
        .unwrap();
        let sol = Solution::from_sequences(&inst, &[vec![1, 2]], 0.0).unwrap();
        let serial = simulate_plan_with(&sol, &inst, 500, 77, None).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let parallel = simulate_plan_with(&sol, &inst, 500, 77, Some(&pool)).unwrap();
        assert_eq!(serial, parallel);
        assert!(serial.missed_window_total > 0);
        for c in &serial.per_customer {
            assert!(c.miss_count <= serial.replications);
        }
    }

    #[test]
    fn zero_replications_rejected() {
        let inst = crisp_pair();
        let sol = Solution::from_sequences(&inst, &[vec![1, 2]], 1.0).unwrap();
        assert_eq!(
            simulate_plan(&sol, &inst, 0, &mut ChaCha8Rng::seed_from_u64(1)),
            Err(SimulateError::NoReplications)
        );
    }
}

//! Seeded synthetic instances.
//!
//! Customers are scattered uniformly on an integer grid around a central
//! depot. Two time-window regimes are offered:
//!
//! * `Long`: every customer shares the same window.
//! * `Short`: every window has the same width. Windows are anchored on a
//!   reference plan (customers swept by polar angle around the depot and cut
//!   into vehicles by capacity): each customer's window closes a random
//!   margin after its pessimistic (right-bound) arrival on that plan. That
//!   arrival is never earlier than a direct trip from the depot, so every
//!   customer can be served by a dedicated vehicle at any preference index.
//!
//! [`crisp_instance`] builds small instances with degenerate travel times and
//! non-binding windows, for checks against exact enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fuzzy::TriangularFuzzyNumber;
use crate::model::{Customer, Instance, ModelError, TravelFactors, DEPOT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Horizon {
    Long { open: f64, close: f64 },
    Short { width: f64, min_margin: f64, max_margin: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub name: String,
    pub customers: usize,
    pub seed: u64,
    /// Side of the square the customers are drawn from.
    pub area: f64,
    pub capacity: f64,
    pub demand_min: u32,
    pub demand_max: u32,
    pub service_time: f64,
    pub depot_close: f64,
    pub horizon: Horizon,
    pub factors: TravelFactors,
}

impl GeneratorConfig {
    /// 18 customers, capacity 1000, service time 15, depot close 5000.
    pub fn long_horizon(seed: u64) -> Self {
        Self {
            name: "long-horizon".into(),
            customers: 18,
            seed,
            area: 100.0,
            capacity: 1000.0,
            demand_min: 60,
            demand_max: 200,
            service_time: 15.0,
            depot_close: 5000.0,
            horizon: Horizon::Long { open: 0.0, close: 1000.0 },
            factors: TravelFactors::DEFAULT,
        }
    }

    /// As [`GeneratorConfig::long_horizon`] with windows 100 wide, closing
    /// 30 to 90 time units after the reference pessimistic arrival.
    pub fn short_horizon(seed: u64) -> Self {
        Self {
            name: "short-horizon".into(),
            horizon: Horizon::Short {
                width: 100.0,
                min_margin: 30.0,
                max_margin: 90.0,
            },
            ..Self::long_horizon(seed)
        }
    }
}

pub fn generate(config: &GeneratorConfig) -> Result<Instance, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let half = (config.area / 2.0).round();
    let mut coordinates = vec![(half, half)];
    let side = config.area.round() as i64;
    for _ in 0..config.customers {
        let x = rng.gen_range(0..=side) as f64;
        let y = rng.gen_range(0..=side) as f64;
        coordinates.push((x, y));
    }
    let demands: Vec<f64> = std::iter::once(0.0)
        .chain((0..config.customers).map(|_| rng.gen_range(config.demand_min..=config.demand_max) as f64))
        .collect();

    let node = |id: usize, open: f64, close: f64| Customer {
        id,
        demand: demands[id],
        window_open: open,
        window_close: close,
        service_time: if id == DEPOT { 0.0 } else { config.service_time },
    };

    let customers = match config.horizon {
        Horizon::Long { open, close } => (0..=config.customers)
            .map(|id| if id == DEPOT { node(id, 0.0, config.depot_close) } else { node(id, open, close) })
            .collect(),
        Horizon::Short {
            width,
            min_margin,
            max_margin,
        } => {
            let latest = reference_arrivals(&coordinates, &demands, config);
            let mut customers = vec![node(DEPOT, 0.0, config.depot_close)];
            for (id, &arrival) in latest.iter().enumerate().skip(1) {
                let margin = rng.gen_range(min_margin..=max_margin);
                let close = (arrival + margin).ceil().max(width);
                customers.push(node(id, close - width, close));
            }
            customers
        }
    };

    Instance::from_coordinates(
        config.name.clone(),
        customers,
        config.capacity,
        config.depot_close,
        coordinates,
        config.factors,
    )
}

/// Right-bound arrival times on the sweep reference plan, no waiting.
fn reference_arrivals(coordinates: &[(f64, f64)], demands: &[f64], config: &GeneratorConfig) -> Vec<f64> {
    let (dx, dy) = coordinates[DEPOT];
    let mut order: Vec<usize> = (1..coordinates.len()).collect();
    let angle = |i: usize| (coordinates[i].1 - dy).atan2(coordinates[i].0 - dx);
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));

    let travel = |i: usize, j: usize| {
        let (xi, yi) = coordinates[i];
        let (xj, yj) = coordinates[j];
        config.factors.apply((xi - xj).hypot(yi - yj))
    };
    let mut latest = vec![0.0; coordinates.len()];
    let mut load = 0.0;
    let mut prev = DEPOT;
    let mut departure = TriangularFuzzyNumber::ZERO;
    for id in order {
        if load + demands[id] > config.capacity {
            load = 0.0;
            prev = DEPOT;
            departure = TriangularFuzzyNumber::ZERO;
        }
        let arrival = departure + travel(prev, id);
        latest[id] = arrival.c();
        departure = arrival.shift(config.service_time);
        load += demands[id];
        prev = id;
    }
    latest
}

/// Small instance with degenerate travel times and non-binding windows.
pub fn crisp_instance(customers: usize, seed: u64, capacity: f64, demand_range: (u32, u32)) -> Result<Instance, ModelError> {
    let config = GeneratorConfig {
        name: format!("crisp-{customers}-{seed}"),
        customers,
        seed,
        area: 100.0,
        capacity,
        demand_min: demand_range.0,
        demand_max: demand_range.1,
        service_time: 10.0,
        depot_close: 100_000.0,
        horizon: Horizon::Long {
            open: 0.0,
            close: 50_000.0,
        },
        factors: TravelFactors::new(1.0, 1.0, 1.0)?,
    };
    generate(&config)
}

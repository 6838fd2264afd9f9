//! Problem instances, routes and solutions, fuzzy schedule propagation and
//! the feasibility rules a plan must satisfy at a preference index `cr*`.
//!
//! Feasibility of a stop `j` reached from `i`:
//!
//! * arrival `A[j] = D[i] + t(i, j)` (fuzzy addition),
//! * service start `TS[j] = max(A[j], e_j)` (componentwise),
//! * departure `D[j] = TS[j] + s_j`,
//! * modal arrival `A[j].b <= l_j`,
//! * `Cr{TS[j] <= l_j} >= cr*`.
//!
//! Every vehicle leaves the depot at crisp time zero and its modal return
//! time must not exceed the depot close time. Route loads are bounded by the
//! common vehicle capacity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{FuzzyError, TriangularFuzzyNumber};

/// Index of the depot node.
pub const DEPOT: usize = 0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("instance has no depot record")]
    NoDepot,
    #[error("node record {index} carries id {id}; ids must equal their position")]
    IdMismatch { index: usize, id: usize },
    #[error("node {id}: {reason}")]
    InvalidNode { id: usize, reason: String },
    #[error("vehicle capacity must be positive and finite, got {0}")]
    InvalidCapacity(f64),
    #[error("depot close time must be finite and non-negative, got {0}")]
    InvalidDepotClose(f64),
    #[error("{matrix} matrix is {rows}x{cols}, expected {expected}x{expected}")]
    MatrixShape {
        matrix: &'static str,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("distance[{i}][{j}] = {value} is invalid: {reason}")]
    InvalidDistance {
        i: usize,
        j: usize,
        value: f64,
        reason: &'static str,
    },
    #[error("fuzzy_travel[{i}][{j}]: {source}")]
    InvalidTravel {
        i: usize,
        j: usize,
        #[source]
        source: FuzzyError,
    },
    #[error("fuzzy_travel[{i}][{j}] = {value} has negative support")]
    NegativeTravel {
        i: usize,
        j: usize,
        value: TriangularFuzzyNumber,
    },
    #[error("planar layout has {got} coordinates, expected {expected}")]
    LayoutSize { got: usize, expected: usize },
    #[error("travel factors ({lo}, {mid}, {hi}) must satisfy 0 <= lo <= mid <= hi")]
    InvalidFactors { lo: f64, mid: f64, hi: f64 },
    #[error("customer {0} is not a valid customer id")]
    UnknownCustomer(usize),
    #[error("customer {0} appears more than once in the sequence")]
    DuplicateCustomer(usize),
}

/// A depot or customer record. The depot is id 0 and has zero demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: usize,
    pub demand: f64,
    pub window_open: f64,
    pub window_close: f64,
    pub service_time: f64,
}

impl Customer {
    pub fn window_width(&self) -> f64 {
        self.window_close - self.window_open
    }
}

/// Square row-major matrix indexed by node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMatrix<T> {
    size: usize,
    cells: Vec<T>,
}

impl<T: Copy> NodeMatrix<T> {
    pub fn from_rows(matrix: &'static str, rows: Vec<Vec<T>>, expected: usize) -> Result<Self, ModelError> {
        if rows.len() != expected {
            return Err(ModelError::MatrixShape {
                matrix,
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
                expected,
            });
        }
        let mut cells = Vec::with_capacity(expected * expected);
        for row in rows {
            if row.len() != expected {
                return Err(ModelError::MatrixShape {
                    matrix,
                    rows: expected,
                    cols: row.len(),
                    expected,
                });
            }
            cells.extend(row);
        }
        Ok(Self { size: expected, cells })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut cells = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                cells.push(f(i, j));
            }
        }
        Self { size, cells }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.cells[i * self.size + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.cells[i * self.size + j] = value;
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.cells[i * self.size..(i + 1) * self.size]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.cells.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.cells.iter_mut()
    }
}

/// Multipliers turning a crisp distance `d` into the fuzzy travel time
/// `(lo·d, mid·d, hi·d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelFactors {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
}

impl TravelFactors {
    pub const DEFAULT: Self = Self { lo: 0.8, mid: 1.0, hi: 1.3 };

    pub fn new(lo: f64, mid: f64, hi: f64) -> Result<Self, ModelError> {
        let ok = [lo, mid, hi].iter().all(|v| v.is_finite()) && 0.0 <= lo && lo <= mid && mid <= hi;
        if ok {
            Ok(Self { lo, mid, hi })
        } else {
            Err(ModelError::InvalidFactors { lo, mid, hi })
        }
    }

    pub fn apply(&self, distance: f64) -> TriangularFuzzyNumber {
        TriangularFuzzyNumber::new(self.lo * distance, self.mid * distance, self.hi * distance)
            .expect("ordered factors on a non-negative distance give an ordered triple")
    }
}

impl Default for TravelFactors {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Planar coordinates an instance was derived from, kept so the instance can
/// be written back in the same compact form.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLayout {
    pub coordinates: Vec<(f64, f64)>,
    pub factors: TravelFactors,
}

/// A validated problem instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    customers: Vec<Customer>,
    vehicle_capacity: f64,
    depot_close: f64,
    distance: NodeMatrix<f64>,
    fuzzy_travel: NodeMatrix<TriangularFuzzyNumber>,
    layout: Option<PlanarLayout>,
}

impl Instance {
    /// Builds an instance from explicit crisp distance and fuzzy travel
    /// matrices, checking every invariant.
    pub fn new(
        name: impl Into<String>,
        customers: Vec<Customer>,
        vehicle_capacity: f64,
        depot_close: f64,
        distance: Vec<Vec<f64>>,
        fuzzy_travel: Vec<Vec<TriangularFuzzyNumber>>,
    ) -> Result<Self, ModelError> {
        let size = customers.len();
        let distance = NodeMatrix::from_rows("distance", distance, size)?;
        let fuzzy_travel = NodeMatrix::from_rows("fuzzy_travel", fuzzy_travel, size)?;
        let instance = Self {
            name: name.into(),
            customers,
            vehicle_capacity,
            depot_close,
            distance,
            fuzzy_travel,
            layout: None,
        };
        instance.check()?;
        Ok(instance)
    }

    /// Builds an instance from planar coordinates: Euclidean distances, and
    /// fuzzy travel times derived from them through `factors`.
    pub fn from_coordinates(
        name: impl Into<String>,
        customers: Vec<Customer>,
        vehicle_capacity: f64,
        depot_close: f64,
        coordinates: Vec<(f64, f64)>,
        factors: TravelFactors,
    ) -> Result<Self, ModelError> {
        let size = customers.len();
        if coordinates.len() != size {
            return Err(ModelError::LayoutSize {
                got: coordinates.len(),
                expected: size,
            });
        }
        let factors = TravelFactors::new(factors.lo, factors.mid, factors.hi)?;
        let distance = NodeMatrix::from_fn(size, |i, j| {
            if i == j {
                0.0
            } else {
                let (xi, yi) = coordinates[i];
                let (xj, yj) = coordinates[j];
                (xi - xj).hypot(yi - yj)
            }
        });
        let fuzzy_travel = NodeMatrix::from_fn(size, |i, j| {
            let d = distance.get(i, j);
            if d.is_finite() && d >= 0.0 {
                factors.apply(d)
            } else {
                TriangularFuzzyNumber::ZERO
            }
        });
        let instance = Self {
            name: name.into(),
            customers,
            vehicle_capacity,
            depot_close,
            distance,
            fuzzy_travel,
            layout: Some(PlanarLayout { coordinates, factors }),
        };
        instance.check()?;
        Ok(instance)
    }

    fn check(&self) -> Result<(), ModelError> {
        if self.customers.is_empty() {
            return Err(ModelError::NoDepot);
        }
        if !(self.vehicle_capacity.is_finite() && self.vehicle_capacity > 0.0) {
            return Err(ModelError::InvalidCapacity(self.vehicle_capacity));
        }
        if !(self.depot_close.is_finite() && self.depot_close >= 0.0) {
            return Err(ModelError::InvalidDepotClose(self.depot_close));
        }
        for (index, c) in self.customers.iter().enumerate() {
            if c.id != index {
                return Err(ModelError::IdMismatch { index, id: c.id });
            }
            let invalid = |reason: String| ModelError::InvalidNode { id: c.id, reason };
            let fields = [c.demand, c.window_open, c.window_close, c.service_time];
            if fields.iter().any(|v| !v.is_finite()) {
                return Err(invalid("non-finite field".into()));
            }
            if c.window_open > c.window_close {
                return Err(invalid(format!(
                    "window open {} is after window close {}",
                    c.window_open, c.window_close
                )));
            }
            if c.demand < 0.0 {
                return Err(invalid(format!("negative demand {}", c.demand)));
            }
            if c.service_time < 0.0 {
                return Err(invalid(format!("negative service time {}", c.service_time)));
            }
            if index == DEPOT && c.demand != 0.0 {
                return Err(invalid(format!("depot demand must be 0, got {}", c.demand)));
            }
            if c.demand > self.vehicle_capacity {
                return Err(invalid(format!(
                    "demand {} exceeds vehicle capacity {}",
                    c.demand, self.vehicle_capacity
                )));
            }
        }
        let size = self.customers.len();
        for i in 0..size {
            for j in 0..size {
                let d = self.distance.get(i, j);
                let bad = |reason| ModelError::InvalidDistance { i, j, value: d, reason };
                if !d.is_finite() {
                    return Err(bad("not finite"));
                }
                if d < 0.0 {
                    return Err(bad("negative"));
                }
                if i == j && d != 0.0 {
                    return Err(bad("diagonal must be zero"));
                }
                let t = self.fuzzy_travel.get(i, j);
                TriangularFuzzyNumber::new(t.a(), t.b(), t.c())
                    .map_err(|source| ModelError::InvalidTravel { i, j, source })?;
                if t.a() < 0.0 {
                    return Err(ModelError::NegativeTravel { i, j, value: t });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// All node records, depot first.
    pub fn nodes(&self) -> &[Customer] {
        &self.customers
    }

    pub fn node(&self, id: usize) -> &Customer {
        &self.customers[id]
    }

    pub fn depot(&self) -> &Customer {
        &self.customers[DEPOT]
    }

    /// Number of customers, excluding the depot.
    pub fn customer_count(&self) -> usize {
        self.customers.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.customers.len()
    }

    pub fn customer_ids(&self) -> std::ops::Range<usize> {
        1..self.customers.len()
    }

    pub fn is_customer(&self, id: usize) -> bool {
        id != DEPOT && id < self.customers.len()
    }

    pub fn vehicle_capacity(&self) -> f64 {
        self.vehicle_capacity
    }

    pub fn depot_close(&self) -> f64 {
        self.depot_close
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance.get(i, j)
    }

    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> TriangularFuzzyNumber {
        self.fuzzy_travel.get(i, j)
    }

    pub fn distance_matrix(&self) -> &NodeMatrix<f64> {
        &self.distance
    }

    pub fn travel_matrix(&self) -> &NodeMatrix<TriangularFuzzyNumber> {
        &self.fuzzy_travel
    }

    pub fn layout(&self) -> Option<&PlanarLayout> {
        self.layout.as_ref()
    }

    /// Crisp length of `0 -> stops... -> 0`.
    pub fn route_distance(&self, stops: &[usize]) -> f64 {
        if stops.is_empty() {
            return 0.0;
        }
        let mut prev = DEPOT;
        let mut total = 0.0;
        for &s in stops {
            total += self.distance(prev, s);
            prev = s;
        }
        total + self.distance(prev, DEPOT)
    }
}

/// Fuzzy timing of one visit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopSchedule {
    pub customer_id: usize,
    pub arrival: TriangularFuzzyNumber,
    pub service_start: TriangularFuzzyNumber,
    pub departure: TriangularFuzzyNumber,
    /// Wait before the window opens, measured on the modal arrival.
    pub waiting_time: f64,
    /// `Cr{service_start <= window_close}`.
    pub window_credibility: f64,
}

impl StopSchedule {
    pub fn modal_arrival(&self) -> f64 {
        self.arrival.b()
    }
}

/// `Cr{TS <= close}`.
pub fn window_credibility(service_start: &TriangularFuzzyNumber, close: f64) -> f64 {
    service_start.credibility_le(close)
}

/// Schedules the visit to `to` for a vehicle leaving `from` at `departure`.
pub fn schedule_stop(
    instance: &Instance,
    from: usize,
    departure: TriangularFuzzyNumber,
    to: usize,
) -> StopSchedule {
    let node = instance.node(to);
    let arrival = departure + instance.travel(from, to);
    let service_start = arrival.max_crisp(node.window_open);
    StopSchedule {
        customer_id: to,
        arrival,
        service_start,
        departure: service_start.shift(node.service_time),
        waiting_time: (node.window_open - arrival.b()).max(0.0),
        window_credibility: window_credibility(&service_start, node.window_close),
    }
}

/// Fuzzy schedule of a vehicle that leaves the depot at time zero and visits
/// `sequence` in order.
pub fn propagate_schedule(instance: &Instance, sequence: &[usize]) -> Result<Vec<StopSchedule>, ModelError> {
    let mut seen = vec![false; instance.node_count()];
    let mut out = Vec::with_capacity(sequence.len());
    let mut prev = DEPOT;
    let mut departure = TriangularFuzzyNumber::ZERO;
    for &id in sequence {
        if !instance.is_customer(id) {
            return Err(ModelError::UnknownCustomer(id));
        }
        if std::mem::replace(&mut seen[id], true) {
            return Err(ModelError::DuplicateCustomer(id));
        }
        let stop = schedule_stop(instance, prev, departure, id);
        departure = stop.departure;
        prev = id;
        out.push(stop);
    }
    Ok(out)
}

/// First stop whose window credibility falls below the preference index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChanceViolation {
    /// Zero-based position in the route.
    pub position: usize,
    pub customer_id: usize,
    pub credibility: f64,
}

pub fn check_chance_constraint(schedules: &[StopSchedule], cr_star: f64) -> Result<(), ChanceViolation> {
    match schedules
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.window_credibility >= cr_star))
    {
        None => Ok(()),
        Some((position, s)) => Err(ChanceViolation {
            position,
            customer_id: s.customer_id,
            credibility: s.window_credibility,
        }),
    }
}

/// Whether the summed demand of `stops` fits in one vehicle.
pub fn check_capacity(stops: &[usize], instance: &Instance) -> bool {
    let load: f64 = stops.iter().map(|&id| instance.node(id).demand).sum();
    load <= instance.vehicle_capacity()
}

/// One vehicle tour `0 -> stops -> 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub stops: Vec<StopSchedule>,
    pub total_load: f64,
    pub total_distance: f64,
    /// Fuzzy arrival back at the depot.
    pub depot_return: TriangularFuzzyNumber,
}

impl Route {
    pub fn build(instance: &Instance, sequence: &[usize]) -> Result<Self, ModelError> {
        let stops = propagate_schedule(instance, sequence)?;
        let depot_return = match stops.last() {
            Some(last) => last.departure + instance.travel(last.customer_id, DEPOT),
            None => TriangularFuzzyNumber::ZERO,
        };
        Ok(Self {
            total_load: sequence.iter().map(|&id| instance.node(id).demand).sum(),
            total_distance: instance.route_distance(sequence),
            depot_return,
            stops,
        })
    }

    pub fn customer_ids(&self) -> Vec<usize> {
        self.stops.iter().map(|s| s.customer_id).collect()
    }

    pub fn len(&self) -> usize {
        self.stops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stops.is_empty()
    }

    /// Whether every stop and the depot return honour the timing rules at `cr_star`.
    pub fn is_time_feasible(&self, instance: &Instance, cr_star: f64) -> bool {
        self.stops.iter().all(|s| {
            s.arrival.b() <= instance.node(s.customer_id).window_close && s.window_credibility >= cr_star
        }) && self.depot_return.b() <= instance.depot_close()
    }
}

/// A full plan: one route per vehicle used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub total_distance: f64,
    pub cr_star: f64,
}

impl Solution {
    pub fn new(routes: Vec<Route>, cr_star: f64) -> Self {
        let total_distance = routes.iter().map(|r| r.total_distance).sum();
        Self {
            routes,
            total_distance,
            cr_star,
        }
    }

    /// Builds routes from plain id sequences.
    pub fn from_sequences(instance: &Instance, sequences: &[Vec<usize>], cr_star: f64) -> Result<Self, ModelError> {
        let routes = sequences
            .iter()
            .map(|seq| Route::build(instance, seq))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(routes, cr_star))
    }

    pub fn empty(cr_star: f64) -> Self {
        Self::new(Vec::new(), cr_star)
    }

    pub fn vehicle_count(&self) -> usize {
        self.routes.len()
    }

    pub fn sequences(&self) -> Vec<Vec<usize>> {
        self.routes.iter().map(Route::customer_ids).collect()
    }
}

/// Total crisp distance over every route, depot legs included.
pub fn objective(solution: &Solution) -> f64 {
    solution.routes.iter().map(|r| r.total_distance).sum()
}

/// One broken rule found by [`validate_solution`]. Route indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    InvalidPreferenceIndex { cr_star: f64 },
    EmptyRoute { route: usize },
    UnknownCustomer { route: usize, customer: usize },
    DuplicateVisit { customer: usize, first_route: usize, second_route: usize },
    MissingCustomer { customer: usize },
    CapacityExceeded { route: usize, load: f64, capacity: f64 },
    LateModalArrival { route: usize, customer: usize, modal_arrival: f64, window_close: f64 },
    LateDepotReturn { route: usize, modal_return: f64, depot_close: f64 },
    ChanceConstraint { route: usize, customer: usize, credibility: f64, cr_star: f64 },
    StaleRoute { route: usize },
    StaleTotal { stored: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            InvalidPreferenceIndex { cr_star } => write!(f, "preference index {cr_star} outside [0, 1]"),
            EmptyRoute { route } => write!(f, "route {route} visits no customer"),
            UnknownCustomer { route, customer } => write!(f, "route {route} visits unknown node {customer}"),
            DuplicateVisit {
                customer,
                first_route,
                second_route,
            } => write!(f, "customer {customer} visited by route {first_route} and again by route {second_route}"),
            MissingCustomer { customer } => write!(f, "customer {customer} is never visited"),
            CapacityExceeded { route, load, capacity } => {
                write!(f, "route {route} carries {load}, capacity is {capacity}")
            }
            LateModalArrival {
                route,
                customer,
                modal_arrival,
                window_close,
            } => write!(
                f,
                "route {route}: modal arrival {modal_arrival} at customer {customer} is after window close {window_close}"
            ),
            LateDepotReturn {
                route,
                modal_return,
                depot_close,
            } => write!(f, "route {route}: modal depot return {modal_return} is after depot close {depot_close}"),
            ChanceConstraint {
                route,
                customer,
                credibility,
                cr_star,
            } => write!(
                f,
                "route {route}: window credibility {credibility} at customer {customer} is below {cr_star}"
            ),
            StaleRoute { route } => write!(f, "route {route} carries schedule or totals that do not match its stops"),
            StaleTotal { stored, recomputed } => {
                write!(f, "solution total distance {stored} differs from recomputed {recomputed}")
            }
        }
    }
}

const TOTAL_TOLERANCE: f64 = 1e-9;

/// Checks a solution against the instance at preference index `cr_star`,
/// recomputing every schedule from the stop ids. Returns all violations.
pub fn validate_solution(solution: &Solution, instance: &Instance, cr_star: f64) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if !(0.0..=1.0).contains(&cr_star) {
        violations.push(Violation::InvalidPreferenceIndex { cr_star });
    }
    let mut visited_by: Vec<Option<usize>> = vec![None; instance.node_count()];
    let mut recomputed_total = 0.0;

    for (r, route) in solution.routes.iter().enumerate() {
        if route.is_empty() {
            violations.push(Violation::EmptyRoute { route: r });
            continue;
        }
        let ids = route.customer_ids();
        let mut structurally_ok = true;
        for &id in &ids {
            if !instance.is_customer(id) {
                violations.push(Violation::UnknownCustomer { route: r, customer: id });
                structurally_ok = false;
                continue;
            }
            match visited_by[id] {
                Some(first) => {
                    violations.push(Violation::DuplicateVisit {
                        customer: id,
                        first_route: first,
                        second_route: r,
                    });
                    if first == r {
                        structurally_ok = false;
                    }
                }
                None => visited_by[id] = Some(r),
            }
        }
        if !structurally_ok {
            continue;
        }
        let rebuilt = Route::build(instance, &ids).expect("ids checked above");
        recomputed_total += rebuilt.total_distance;
        if !route_matches(route, &rebuilt) {
            violations.push(Violation::StaleRoute { route: r });
        }
        if rebuilt.total_load > instance.vehicle_capacity() {
            violations.push(Violation::CapacityExceeded {
                route: r,
                load: rebuilt.total_load,
                capacity: instance.vehicle_capacity(),
            });
        }
        for stop in &rebuilt.stops {
            let close = instance.node(stop.customer_id).window_close;
            if stop.arrival.b() > close {
                violations.push(Violation::LateModalArrival {
                    route: r,
                    customer: stop.customer_id,
                    modal_arrival: stop.arrival.b(),
                    window_close: close,
                });
            }
            if !(stop.window_credibility >= cr_star) {
                violations.push(Violation::ChanceConstraint {
                    route: r,
                    customer: stop.customer_id,
                    credibility: stop.window_credibility,
                    cr_star,
                });
            }
        }
        if rebuilt.depot_return.b() > instance.depot_close() {
            violations.push(Violation::LateDepotReturn {
                route: r,
                modal_return: rebuilt.depot_return.b(),
                depot_close: instance.depot_close(),
            });
        }
    }

    for id in instance.customer_ids() {
        if visited_by[id].is_none() {
            violations.push(Violation::MissingCustomer { customer: id });
        }
    }
    let stored = solution.total_distance;
    if (stored - recomputed_total).abs() > TOTAL_TOLERANCE * recomputed_total.abs().max(1.0) {
        violations.push(Violation::StaleTotal {
            stored,
            recomputed: recomputed_total,
        });
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn route_matches(stored: &Route, rebuilt: &Route) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= TOTAL_TOLERANCE * x.abs().max(1.0);
    close(stored.total_distance, rebuilt.total_distance)
        && close(stored.total_load, rebuilt.total_load)
        && stored.stops == rebuilt.stops
}

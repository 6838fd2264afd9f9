//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's scheduling or credibility code.

#![allow(dead_code)]

use std::path::PathBuf;

use fuzzy_vrptw::{Instance, Solution};

pub fn data_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(file)
}

/// Membership of the triangle `(a, b, c)` at `x`, degenerate triangles included.
pub fn membership(t: [f64; 3], x: f64) -> f64 {
    let [a, b, c] = t;
    if x == b {
        1.0
    } else if x <= a || x >= c {
        0.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (c - x) / (c - b)
    }
}

/// `sup { mu(y) : y in range }` approximated on a dense grid, plus the mode
/// when it falls in the range.
pub fn grid_sup(t: [f64; 3], lo: f64, hi: f64, points: usize, include_hi: bool) -> f64 {
    let mut best: f64 = 0.0;
    for k in 0..=points {
        let y = lo + (hi - lo) * k as f64 / points as f64;
        if y < hi || include_hi {
            best = best.max(membership(t, y));
        }
    }
    let mode_in = t[1] >= lo && (t[1] < hi || (include_hi && t[1] <= hi));
    if mode_in {
        best = 1.0;
    }
    best
}

/// Closed-form credibility of `{X <= x}` built from the possibility and
/// necessity definitions.
pub fn credibility_oracle(t: [f64; 3], x: f64) -> f64 {
    let [a, b, c] = t;
    let pos = if x >= b {
        1.0
    } else if x <= a {
        0.0
    } else {
        (x - a) / (b - a)
    };
    // Nec{X <= x} = 1 - Pos{X > x}
    let pos_greater = if x < b {
        1.0
    } else if x >= c {
        0.0
    } else {
        (c - x) / (c - b)
    };
    (pos + 1.0 - pos_greater) / 2.0
}

fn add(p: [f64; 3], q: [f64; 3]) -> [f64; 3] {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

/// Recomputes every route's fuzzy schedule and checks partition, capacity,
/// modal windows, credibility and depot return from scratch.
pub fn independent_check(solution: &Solution, instance: &Instance, cr_star: f64) -> Result<(), String> {
    let n = instance.customer_count();
    let mut seen = vec![false; n + 1];
    let mut total = 0.0;
    for (r, route) in solution.routes.iter().enumerate() {
        let ids = route.customer_ids();
        if ids.is_empty() {
            return Err(format!("route {r} empty"));
        }
        let mut load = 0.0;
        let mut departure = [0.0; 3];
        let mut prev = 0;
        for &j in &ids {
            if j == 0 || j > n || seen[j] {
                return Err(format!("route {r}: bad or repeated customer {j}"));
            }
            seen[j] = true;
            let node = instance.node(j);
            load += node.demand;
            let t = instance.travel(prev, j);
            let arrival = add(departure, [t.a(), t.b(), t.c()]);
            let start = arrival.map(|v| v.max(node.window_open));
            if arrival[1] > node.window_close {
                return Err(format!("route {r}: modal arrival {} after close at {j}", arrival[1]));
            }
            let cr = credibility_oracle(start, node.window_close);
            if cr < cr_star {
                return Err(format!("route {r}: credibility {cr} < {cr_star} at {j}"));
            }
            departure = start.map(|v| v + node.service_time);
            total += instance.distance(prev, j);
            prev = j;
        }
        total += instance.distance(prev, 0);
        let back = departure[1] + instance.travel(prev, 0).b();
        if back > instance.depot_close() {
            return Err(format!("route {r}: modal return {back} after depot close"));
        }
        if load > instance.vehicle_capacity() {
            return Err(format!("route {r}: load {load} over capacity"));
        }
    }
    if let Some(j) = (1..=n).find(|&j| !seen[j]) {
        return Err(format!("customer {j} never visited"));
    }
    if (total - solution.total_distance).abs() > 1e-9 * total.max(1.0) {
        return Err(format!("stored distance {} vs recomputed {total}", solution.total_distance));
    }
    Ok(())
}

/// Crisp route check for instances whose travel times are degenerate.
fn crisp_route_cost(instance: &Instance, route: &[usize]) -> Option<f64> {
    let mut time: f64 = 0.0;
    let mut load = 0.0;
    let mut dist = 0.0;
    let mut prev = 0;
    for &j in route {
        let node = instance.node(j);
        load += node.demand;
        time += instance.distance(prev, j);
        if time > node.window_close {
            return None;
        }
        time = time.max(node.window_open) + node.service_time;
        dist += instance.distance(prev, j);
        prev = j;
    }
    time += instance.distance(prev, 0);
    dist += instance.distance(prev, 0);
    (load <= instance.vehicle_capacity() && time <= instance.depot_close()).then_some(dist)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Exact optimum of a crisp instance over every ordered partition of the
/// customers: each permutation is split at every possible set of cut points
/// by dynamic programming.
pub fn crisp_optimum(instance: &Instance) -> f64 {
    let n = instance.customer_count();
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut best = f64::INFINITY;
    loop {
        let mut dp = vec![f64::INFINITY; n + 1];
        dp[0] = 0.0;
        for end in 1..=n {
            for start in 0..end {
                if dp[start].is_finite() {
                    if let Some(c) = crisp_route_cost(instance, &perm[start..end]) {
                        dp[end] = dp[end].min(dp[start] + c);
                    }
                }
            }
        }
        best = best.min(dp[n]);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

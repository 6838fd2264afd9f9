//! Line-oriented instance files.
//!
//! ```text
//! fvrptw-instance 1
//! name short-horizon
//! capacity 1000
//! depot_close 5000
//! travel coordinates 0.8 1 1.3
//! nodes 3
//! # id x y demand open close service
//! node 0 50 50 0 0 5000 0
//! node 1 20 35 120 40 140 15
//! node 2 70 10 90 0 1000 15
//! ```
//!
//! `travel coordinates lo mid hi` places every node in the plane: distances
//! are Euclidean and the fuzzy travel time of an arc of length `d` is
//! `(lo·d, mid·d, hi·d)`. With `travel explicit` node lines drop the
//! coordinates (`node id demand open close service`) and the header is
//! followed by a `distance` block of `nodes` rows and a `fuzzy_travel` block
//! whose cells are `a,b,c` triples. Blank lines and `#` comments are ignored.
//! Header keys must precede the node records.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fuzzy::TriangularFuzzyNumber;
use crate::model::{Customer, Instance, ModelError, TravelFactors};

pub const FORMAT_TAG: &str = "fvrptw-instance";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, {field}: {message}")]
    Parse { line: usize, field: String, message: String },
    #[error("invalid instance: {0}")]
    Model(#[from] ModelError),
}

fn parse_err(line: usize, field: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        field: field.into(),
        message: message.into(),
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_instance(&text)
}

#[derive(Clone, Copy)]
enum TravelMode {
    Coordinates(TravelFactors),
    Explicit,
}

/// Significant lines with their 1-based numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self { inner: it.peekable() }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next()
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), InstanceError> {
        self.next()
            .ok_or_else(|| parse_err(0, what.to_string(), "unexpected end of file"))
    }
}

fn number(line: usize, field: &str, token: Option<&str>) -> Result<f64, InstanceError> {
    let token = token.ok_or_else(|| parse_err(line, field, "missing value"))?;
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, field, format!("`{token}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, field, format!("`{token}` is not finite")))
    }
}

fn count(line: usize, field: &str, token: Option<&str>) -> Result<usize, InstanceError> {
    let token = token.ok_or_else(|| parse_err(line, field, "missing value"))?;
    token
        .parse()
        .map_err(|_| parse_err(line, field, format!("`{token}` is not a non-negative integer")))
}

fn no_trailing<'a>(line: usize, field: &str, mut rest: impl Iterator<Item = &'a str>) -> Result<(), InstanceError> {
    match rest.next() {
        None => Ok(()),
        Some(extra) => Err(parse_err(line, field, format!("unexpected trailing token `{extra}`"))),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = Lines::new(text);

    let (line, tag) = lines.expect("format tag")?;
    let mut tokens = tag.split_whitespace();
    if tokens.next() != Some(FORMAT_TAG) {
        return Err(parse_err(line, "format tag", format!("expected `{FORMAT_TAG} {FORMAT_VERSION}`")));
    }
    let version = count(line, "format version", tokens.next())?;
    if version != FORMAT_VERSION as usize {
        return Err(parse_err(line, "format version", format!("unsupported version {version}")));
    }

    let mut name = None;
    let mut capacity = None;
    let mut depot_close = None;
    let mut mode = None;
    let mut node_count = None;

    // header
    while node_count.is_none() {
        let (line, text) = lines.expect("header")?;
        let (key, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let mut tokens = rest.split_whitespace();
        match key {
            "name" => name = Some(rest.to_string()),
            "capacity" => {
                let v = number(line, "capacity", tokens.next())?;
                if v <= 0.0 {
                    return Err(parse_err(line, "capacity", "must be positive"));
                }
                capacity = Some(v);
                no_trailing(line, "capacity", tokens)?;
            }
            "depot_close" => {
                depot_close = Some(number(line, "depot_close", tokens.next())?);
                no_trailing(line, "depot_close", tokens)?;
            }
            "travel" => {
                mode = Some(match tokens.next() {
                    Some("explicit") => TravelMode::Explicit,
                    Some("coordinates") => {
                        let lo = number(line, "travel factor lo", tokens.next())?;
                        let mid = number(line, "travel factor mid", tokens.next())?;
                        let hi = number(line, "travel factor hi", tokens.next())?;
                        let f = TravelFactors::new(lo, mid, hi)
                            .map_err(|e| parse_err(line, "travel factors", e.to_string()))?;
                        TravelMode::Coordinates(f)
                    }
                    other => {
                        return Err(parse_err(
                            line,
                            "travel",
                            format!("expected `explicit` or `coordinates`, got {other:?}"),
                        ))
                    }
                });
                no_trailing(line, "travel", tokens)?;
            }
            "nodes" => {
                let n = count(line, "nodes", tokens.next())?;
                if n == 0 {
                    return Err(parse_err(line, "nodes", "at least the depot is required"));
                }
                node_count = Some(n);
                no_trailing(line, "nodes", tokens)?;
            }
            other => return Err(parse_err(line, "header", format!("unknown key `{other}`"))),
        }
    }
    let n = node_count.expect("loop exits once set");
    let capacity = capacity.ok_or_else(|| parse_err(0, "capacity", "missing header key"))?;
    let depot_close = depot_close.ok_or_else(|| parse_err(0, "depot_close", "missing header key"))?;
    let mode = mode.ok_or_else(|| parse_err(0, "travel", "missing header key"))?;
    let name = name.unwrap_or_default();

    let mut customers = Vec::with_capacity(n);
    let mut coordinates = Vec::with_capacity(n);
    for index in 0..n {
        let (line, text) = lines.expect("node record")?;
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some("node") {
            return Err(parse_err(line, "node", format!("expected node record {index}")));
        }
        let id = count(line, "node id", tokens.next())?;
        if id != index {
            return Err(parse_err(line, "node id", format!("expected id {index}, got {id}")));
        }
        if let TravelMode::Coordinates(_) = mode {
            let x = number(line, "x", tokens.next())?;
            let y = number(line, "y", tokens.next())?;
            coordinates.push((x, y));
        }
        let demand = number(line, "demand", tokens.next())?;
        let window_open = number(line, "window open", tokens.next())?;
        let window_close = number(line, "window close", tokens.next())?;
        let service_time = number(line, "service time", tokens.next())?;
        no_trailing(line, "node", tokens)?;
        if demand < 0.0 {
            return Err(parse_err(line, "demand", "must be non-negative"));
        }
        if id == 0 && demand != 0.0 {
            return Err(parse_err(line, "demand", "depot demand must be 0"));
        }
        if demand > capacity {
            return Err(parse_err(line, "demand", format!("{demand} exceeds capacity {capacity}")));
        }
        if window_open > window_close {
            return Err(parse_err(line, "window", format!("open {window_open} after close {window_close}")));
        }
        if service_time < 0.0 {
            return Err(parse_err(line, "service time", "must be non-negative"));
        }
        customers.push(Customer {
            id,
            demand,
            window_open,
            window_close,
            service_time,
        });
    }

    let instance = match mode {
        TravelMode::Coordinates(factors) => {
            Instance::from_coordinates(name, customers, capacity, depot_close, coordinates, factors)?
        }
        TravelMode::Explicit => {
            let distance = parse_block(&mut lines, "distance", n, |line, i, j, tok| {
                number(line, &format!("distance[{i}][{j}]"), Some(tok))
            })?;
            let travel = parse_block(&mut lines, "fuzzy_travel", n, |line, i, j, tok| {
                let field = format!("fuzzy_travel[{i}][{j}]");
                let parts: Vec<&str> = tok.split(',').collect();
                if parts.len() != 3 {
                    return Err(parse_err(line, field, format!("expected a,b,c, got `{tok}`")));
                }
                let a = number(line, &field, Some(parts[0]))?;
                let b = number(line, &field, Some(parts[1]))?;
                let c = number(line, &field, Some(parts[2]))?;
                if a < 0.0 {
                    return Err(parse_err(line, field, "negative travel time"));
                }
                TriangularFuzzyNumber::new(a, b, c).map_err(|e| parse_err(line, field, e.to_string()))
            })?;
            Instance::new(name, customers, capacity, depot_close, distance, travel)?
        }
    };

    if let Some((line, text)) = lines.next() {
        if text != "end" {
            return Err(parse_err(line, "trailer", format!("unexpected content `{text}`")));
        }
        if let Some((line, text)) = lines.next() {
            return Err(parse_err(line, "trailer", format!("content after end: `{text}`")));
        }
    }
    Ok(instance)
}

fn parse_block<T>(
    lines: &mut Lines<'_>,
    keyword: &str,
    n: usize,
    mut cell: impl FnMut(usize, usize, usize, &str) -> Result<T, InstanceError>,
) -> Result<Vec<Vec<T>>, InstanceError> {
    let (line, text) = lines.expect(keyword)?;
    if text != keyword {
        return Err(parse_err(line, keyword, format!("expected `{keyword}` block, got `{text}`")));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (line, text) = lines.expect(keyword)?;
        let row = text
            .split_whitespace()
            .enumerate()
            .map(|(j, tok)| cell(line, i, j, tok))
            .collect::<Result<Vec<T>, _>>()?;
        if row.len() != n {
            return Err(parse_err(
                line,
                format!("{keyword}[{i}]"),
                format!("expected {n} entries, got {}", row.len()),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Serializes `instance` so that [`parse_instance`] gives back an equal value.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let n = instance.node_count();
    writeln!(out, "{FORMAT_TAG} {FORMAT_VERSION}").unwrap();
    if !instance.name().is_empty() {
        writeln!(out, "name {}", instance.name()).unwrap();
    }
    writeln!(out, "capacity {}", instance.vehicle_capacity()).unwrap();
    writeln!(out, "depot_close {}", instance.depot_close()).unwrap();
    match instance.layout() {
        Some(layout) => {
            let f = layout.factors;
            writeln!(out, "travel coordinates {} {} {}", f.lo, f.mid, f.hi).unwrap();
            writeln!(out, "nodes {n}").unwrap();
            writeln!(out, "# id x y demand open close service").unwrap();
            for (c, (x, y)) in instance.nodes().iter().zip(&layout.coordinates) {
                writeln!(
                    out,
                    "node {} {} {} {} {} {} {}",
                    c.id, x, y, c.demand, c.window_open, c.window_close, c.service_time
                )
                .unwrap();
            }
        }
        None => {
            writeln!(out, "travel explicit").unwrap();
            writeln!(out, "nodes {n}").unwrap();
            writeln!(out, "# id demand open close service").unwrap();
            for c in instance.nodes() {
                writeln!(
                    out,
                    "node {} {} {} {} {}",
                    c.id, c.demand, c.window_open, c.window_close, c.service_time
                )
                .unwrap();
            }
            writeln!(out, "distance").unwrap();
            for i in 0..n {
                let row: Vec<String> = (0..n).map(|j| instance.distance(i, j).to_string()).collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
            writeln!(out, "fuzzy_travel").unwrap();
            for i in 0..n {
                let row: Vec<String> = (0..n)
                    .map(|j| {
                        let t = instance.travel(i, j);
                        format!("{},{},{}", t.a(), t.b(), t.c())
                    })
                    .collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
    }
    writeln!(out, "end").unwrap();
    out
}

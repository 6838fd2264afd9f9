//! Triangular fuzzy numbers and the possibility / necessity / credibility
//! measures of the event `{X <= x0}`.
//!
//! Travel times, arrival times and service start times are all carried as
//! triangular fuzzy numbers `(a, b, c)` with `a <= b <= c`. A crisp value `k`
//! is the degenerate triple `(k, k, k)`.
//!
//! For a degenerate triple every measure is a step function: `1` when
//! `x0 >= k` and `0` otherwise.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("triangular fuzzy number ({a}, {b}, {c}) violates a <= b <= c")]
    Unordered { a: f64, b: f64, c: f64 },
    #[error("triangular fuzzy number ({a}, {b}, {c}) has a non-finite component")]
    NonFinite { a: f64, b: f64, c: f64 },
}

/// A triangular fuzzy number with left bound `a`, mode `b` and right bound `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct TriangularFuzzyNumber {
    a: f64,
    b: f64,
    c: f64,
}

impl TriangularFuzzyNumber {
    pub const ZERO: Self = Self { a: 0.0, b: 0.0, c: 0.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(FuzzyError::NonFinite { a, b, c });
        }
        if !(a <= b && b <= c) {
            return Err(FuzzyError::Unordered { a, b, c });
        }
        Ok(Self { a, b, c })
    }

    /// The degenerate triple `(value, value, value)`.
    pub fn crisp(value: f64) -> Self {
        Self { a: value, b: value, c: value }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_crisp(&self) -> bool {
        self.a == self.c
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Membership degree of `x`: piecewise linear, peaking at the mode.
    pub fn membership(&self, x: f64) -> f64 {
        let Self { a, b, c } = *self;
        if x < a || x > c {
            0.0
        } else if x <= b {
            if b == a {
                1.0
            } else {
                (x - a) / (b - a)
            }
        } else {
            // b < x <= c, so c > b
            (c - x) / (c - b)
        }
    }

    /// `Pos{X <= x0}`.
    pub fn possibility_le(&self, x0: f64) -> f64 {
        let Self { a, b, .. } = *self;
        if x0 < a {
            0.0
        } else if x0 >= b {
            1.0
        } else {
            (x0 - a) / (b - a)
        }
    }

    /// `Nec{X <= x0} = 1 - Pos{X > x0}`.
    pub fn necessity_le(&self, x0: f64) -> f64 {
        let Self { b, c, .. } = *self;
        if x0 < b {
            0.0
        } else if x0 >= c {
            1.0
        } else {
            (x0 - b) / (c - b)
        }
    }

    /// `Cr{X <= x0}`, the mean of possibility and necessity.
    pub fn credibility_le(&self, x0: f64) -> f64 {
        let Self { a, b, c } = *self;
        if x0 < a {
            0.0
        } else if x0 >= c {
            1.0
        } else if x0 < b {
            (x0 - a) / (2.0 * (b - a))
        } else {
            (x0 - 2.0 * b + c) / (2.0 * (c - b))
        }
    }

    /// Componentwise `max(self, e)` against a crisp value.
    ///
    /// This is the usual triangular approximation; the exact extension
    /// principle result is flattened on the left when `a < e < b`.
    pub fn max_crisp(&self, e: f64) -> Self {
        Self {
            a: self.a.max(e),
            b: self.b.max(e),
            c: self.c.max(e),
        }
    }

    /// Shift every component by a crisp amount.
    pub fn shift(&self, by: f64) -> Self {
        Self {
            a: self.a + by,
            b: self.b + by,
            c: self.c + by,
        }
    }
}

impl Add for TriangularFuzzyNumber {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            c: self.c + rhs.c,
        }
    }
}

impl TryFrom<[f64; 3]> for TriangularFuzzyNumber {
    type Error = FuzzyError;

    fn try_from([a, b, c]: [f64; 3]) -> Result<Self, Self::Error> {
        Self::new(a, b, c)
    }
}

impl From<TriangularFuzzyNumber> for [f64; 3] {
    fn from(t: TriangularFuzzyNumber) -> Self {
        t.as_array()
    }
}

impl fmt::Display for TriangularFuzzyNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

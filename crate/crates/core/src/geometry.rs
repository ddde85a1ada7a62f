//! Exact causal structure of flat spacetime with unit light speed.
//!
//! Every comparison is done on integers. Intervals are compared through
//! their squares, so light-cone boundaries are never misclassified.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {left} spatial coordinates vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("a point needs at least one spatial coordinate")]
    NoSpatialCoordinates,
}

/// A spacetime event: integer time plus integer spatial coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    t: i64,
    x: Vec<i64>,
}

impl Point {
    pub fn new(t: i64, x: Vec<i64>) -> Result<Self, GeometryError> {
        if x.is_empty() {
            return Err(GeometryError::NoSpatialCoordinates);
        }
        Ok(Point { t, x })
    }

    /// A point in 1+1 dimensions.
    pub fn line(t: i64, x: i64) -> Self {
        Point { t, x: vec![x] }
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn coords(&self) -> &[i64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// First spatial coordinate; the only one for 1-D points.
    pub fn x(&self) -> i64 {
        self.x[0]
    }

    fn check_dim(&self, other: &Point) -> Result<(), GeometryError> {
        if self.dim() != other.dim() {
            return Err(GeometryError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.t)?;
        for c in &self.x {
            write!(f, ",{c}")?;
        }
        write!(f, ")")
    }
}

/// Where `y` sits relative to `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    Coincident,
    CausalFuture,
    CausalPast,
    Spacelike,
}

impl CausalClass {
    pub fn reversed(self) -> Self {
        match self {
            CausalClass::CausalFuture => CausalClass::CausalPast,
            CausalClass::CausalPast => CausalClass::CausalFuture,
            other => other,
        }
    }
}

/// Classifies `y` relative to `x`. Lightlike separation counts as causal.
pub fn classify(x: &Point, y: &Point) -> Result<CausalClass, GeometryError> {
    x.check_dim(y)?;
    let dt = i128::from(y.t) - i128::from(x.t);
    let dt_sq = dt.unsigned_abs().pow(2);
    // A sum that overflows u128 is larger than any dt^2 (|dt| < 2^64).
    let q = x.x.iter().zip(&y.x).try_fold(0u128, |acc, (a, b)| {
        let d = (i128::from(*b) - i128::from(*a)).unsigned_abs();
        acc.checked_add(d * d)
    });
    let inside = q.is_some_and(|q| dt_sq >= q);
    Ok(match dt {
        0 if q == Some(0) => CausalClass::Coincident,
        dt if dt > 0 && inside => CausalClass::CausalFuture,
        dt if dt < 0 && inside => CausalClass::CausalPast,
        _ => CausalClass::Spacelike,
    })
}

/// `y` lies in the closed future light cone of `x` (including `x` itself).
pub fn precedes(x: &Point, y: &Point) -> Result<bool, GeometryError> {
    Ok(matches!(
        classify(x, y)?,
        CausalClass::Coincident | CausalClass::CausalFuture
    ))
}

/// `y` lies in the future light cone of `x` and differs from it.
pub fn strictly_precedes(x: &Point, y: &Point) -> Result<bool, GeometryError> {
    Ok(classify(x, y)? == CausalClass::CausalFuture)
}

/// Arrival time of a light signal sent along a line.
pub fn earliest_arrival(t_emit: i64, x_from: i64, x_to: i64) -> i64 {
    t_emit + (x_to - x_from).abs()
}

/// 1-D causal precedence without allocation; used by the hot search loops.
#[inline]
pub(crate) fn precedes_1d(t0: i64, x0: i64, t1: i64, x1: i64) -> bool {
    t1 - t0 >= (x1 - x0).abs()
}

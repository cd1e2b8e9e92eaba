// SPDX-License-Identifier: Apache-2.0

//! Inverse distance weighting arithmetic and the sequential reference
//! predictor every parallel strategy is checked against.
//!
//! A prediction at query `q` over samples `(x_i, y_i, z_i)` is
//!
//! ```text
//! Z(q) = sum_i w_i z_i / sum_i w_i,    w_i = 1 / d(q, (x_i, y_i))^p
//! ```
//!
//! with `d` the planar euclidean distance. When `q` coincides with a sample
//! (squared distance at or below `Params::zero_eps`) the prediction is that
//! sample's value; with several coincident samples the lowest index wins.

use serde::{Deserialize, Serialize};

use crate::error::{IdwError, Result};
use crate::real::{Precision, Real};

/// One sample: planar position plus the sampled value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointRecord {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        PointRecord { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A prediction location.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QueryPoint {
    pub x: f64,
    pub y: f64,
}

impl QueryPoint {
    pub fn new(x: f64, y: f64) -> Self {
        QueryPoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<PointRecord> for QueryPoint {
    fn from(r: PointRecord) -> Self {
        QueryPoint { x: r.x, y: r.y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Power exponent of the inverse distance.
    pub p: f64,
    /// Squared-distance threshold at or below which a query coincides with a
    /// sample.
    pub zero_eps: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { p: 2.0, zero_eps: 0.0 }
    }
}

impl Params {
    pub fn with_power(p: f64) -> Self {
        Params { p, ..Params::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(IdwError::InvalidConfig(format!(
                "power must be positive and finite, got {}",
                self.p
            )));
        }
        if !(self.zero_eps.is_finite() && self.zero_eps >= 0.0) {
            return Err(IdwError::InvalidConfig(format!(
                "zero_eps must be non-negative and finite, got {}",
                self.zero_eps
            )));
        }
        Ok(())
    }

    /// The per-precision constants used by the inner loops.
    pub fn kernel<T: Real>(&self) -> Kernel<T> {
        Kernel {
            power: Power::new(self.p),
            zero_eps: T::from_f64(self.zero_eps),
        }
    }
}

/// Weight function selected once per run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power<T> {
    /// `p == 2`: `1 / d2`, no square root or `pow`.
    InverseSquare,
    /// Any other exponent, evaluated as `d2^(-p/2)`.
    General { neg_half_p: T },
}

impl<T: Real> Power<T> {
    pub fn new(p: f64) -> Self {
        if p == 2.0 {
            Power::InverseSquare
        } else {
            Power::general(p)
        }
    }

    /// Forces the `pow` path, even for `p == 2`.
    pub fn general(p: f64) -> Self {
        Power::General {
            neg_half_p: T::from_f64(-0.5 * p),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Kernel<T> {
    pub power: Power<T>,
    pub zero_eps: T,
}

#[inline(always)]
pub fn squared_distance<T: Real>(qx: T, qy: T, dx: T, dy: T) -> T {
    let ex = qx - dx;
    let ey = qy - dy;
    ex * ex + ey * ey
}

/// Inverse distance weight for a strictly positive squared distance.
#[inline(always)]
pub fn weight<T: Real>(d2: T, power: Power<T>) -> T {
    debug_assert!(d2 > T::ZERO, "weight of a coincident point");
    match power {
        Power::InverseSquare => T::ONE / d2,
        Power::General { neg_half_p } => d2.powf(neg_half_p),
    }
}

/// Lowest-index coincident sample seen by an accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit<T> {
    pub index: usize,
    pub z: T,
}

/// Running numerator and denominator of one prediction.
///
/// `merge` adds the sums field-wise and keeps the lower-index hit, so any
/// partition of the samples merges back to the same prediction up to
/// floating point reassociation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accumulator<T> {
    pub sum_w: T,
    pub sum_wz: T,
    pub hit: Option<Hit<T>>,
}

impl<T: Real> Default for Accumulator<T> {
    fn default() -> Self {
        Self::EMPTY
    }
}

impl<T: Real> Accumulator<T> {
    pub const EMPTY: Self = Accumulator {
        sum_w: T::ZERO,
        sum_wz: T::ZERO,
        hit: None,
    };

    #[inline(always)]
    pub fn push(&mut self, index: usize, d2: T, z: T, kernel: &Kernel<T>) {
        if d2 <= kernel.zero_eps {
            match self.hit {
                Some(h) if h.index <= index => {}
                _ => self.hit = Some(Hit { index, z }),
            }
        } else {
            let w = weight(d2, kernel.power);
            self.sum_w = self.sum_w + w;
            self.sum_wz = self.sum_wz + w * z;
        }
    }

    #[inline]
    pub fn merge(self, other: Self) -> Self {
        let hit = match (self.hit, other.hit) {
            (Some(a), Some(b)) => Some(if b.index < a.index { b } else { a }),
            (a, b) => a.or(b),
        };
        Accumulator {
            sum_w: self.sum_w + other.sum_w,
            sum_wz: self.sum_wz + other.sum_wz,
            hit,
        }
    }

    /// The prediction. NaN for an accumulator that has seen no samples.
    #[inline]
    pub fn finish(&self) -> T {
        match self.hit {
            Some(h) => h.z,
            None => self.sum_wz / self.sum_w,
        }
    }
}

pub(crate) fn validate_data(data: &[PointRecord]) -> Result<()> {
    if data.is_empty() {
        return Err(IdwError::NoData);
    }
    if data.iter().any(|r| !r.is_finite()) {
        return Err(IdwError::InvalidCoordinate);
    }
    Ok(())
}

pub(crate) fn validate_queries(queries: &[QueryPoint]) -> Result<()> {
    if queries.iter().any(|q| !q.is_finite()) {
        return Err(IdwError::InvalidCoordinate);
    }
    Ok(())
}

/// Single-threaded reference predictor: one left-to-right pass over the
/// samples per query, entirely in the requested precision. Results are
/// widened to `f64`.
pub fn idw_predict_seq(
    data: &[PointRecord],
    queries: &[QueryPoint],
    params: &Params,
    precision: Precision,
) -> Result<Vec<f64>> {
    params.validate()?;
    validate_data(data)?;
    validate_queries(queries)?;
    Ok(match precision {
        Precision::Single => predict_seq::<f32>(data, queries, params),
        Precision::Double => predict_seq::<f64>(data, queries, params),
    })
}

fn predict_seq<T: Real>(data: &[PointRecord], queries: &[QueryPoint], params: &Params) -> Vec<f64> {
    let kernel = params.kernel::<T>();
    let samples: Vec<[T; 3]> = data
        .iter()
        .map(|r| [T::from_f64(r.x), T::from_f64(r.y), T::from_f64(r.z)])
        .collect();
    queries
        .iter()
        .map(|q| {
            let (qx, qy) = (T::from_f64(q.x), T::from_f64(q.y));
            let mut acc = Accumulator::EMPTY;
            for (i, s) in samples.iter().enumerate() {
                acc.push(i, squared_distance(qx, qy, s[0], s[1]), s[2], &kernel);
            }
            acc.finish().to_f64()
        })
        .collect()
}

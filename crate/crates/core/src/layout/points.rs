// SPDX-License-Identifier: Apache-2.0

//! Typed, monomorphizable views over a [`LayoutStore`]'s buffers.
//!
//! Strategies are written once against [`PointSource`] and instantiated per
//! layout, so each layout is read through its own record shape. Views do not
//! touch the store's counters; strategies count their reads locally and flush
//! the totals.

use super::{LayoutKind, LayoutStore};
use crate::real::{Precision, Real};

pub trait PointSource<T: Real>: Sync {
    /// One record as laid out in memory, pads included.
    type Record: Copy + Default + Send + Sync;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn record(&self, i: usize) -> Self::Record;

    /// `[x, y, z]` of a record.
    fn unpack(r: &Self::Record) -> [T; 3];

    #[inline(always)]
    fn point(&self, i: usize) -> [T; 3] {
        Self::unpack(&self.record(i))
    }
}

pub struct SoaSource<'a, T> {
    x: &'a [T],
    y: &'a [T],
    z: &'a [T],
}

impl<T: Real> PointSource<T> for SoaSource<'_, T> {
    type Record = [T; 3];

    fn len(&self) -> usize {
        self.x.len()
    }
    #[inline(always)]
    fn record(&self, i: usize) -> [T; 3] {
        [self.x[i], self.y[i], self.z[i]]
    }
    #[inline(always)]
    fn unpack(r: &[T; 3]) -> [T; 3] {
        *r
    }
}

pub struct AosSource<'a, T> {
    recs: &'a [[T; 3]],
}

impl<T: Real> PointSource<T> for AosSource<'_, T> {
    type Record = [T; 3];

    fn len(&self) -> usize {
        self.recs.len()
    }
    #[inline(always)]
    fn record(&self, i: usize) -> [T; 3] {
        self.recs[i]
    }
    #[inline(always)]
    fn unpack(r: &[T; 3]) -> [T; 3] {
        *r
    }
}

pub struct AoasSource<'a, T> {
    recs: &'a [[T; 4]],
}

impl<T: Real> PointSource<T> for AoasSource<'_, T> {
    type Record = [T; 4];

    fn len(&self) -> usize {
        self.recs.len()
    }
    #[inline(always)]
    fn record(&self, i: usize) -> [T; 4] {
        self.recs[i]
    }
    #[inline(always)]
    fn unpack(r: &[T; 4]) -> [T; 3] {
        [r[0], r[1], r[2]]
    }
}

pub struct SoaosSource<'a> {
    xy: &'a [[f64; 2]],
    zp: &'a [[f64; 2]],
}

impl PointSource<f64> for SoaosSource<'_> {
    type Record = ([f64; 2], [f64; 2]);

    fn len(&self) -> usize {
        self.xy.len()
    }
    #[inline(always)]
    fn record(&self, i: usize) -> Self::Record {
        (self.xy[i], self.zp[i])
    }
    #[inline(always)]
    fn unpack(r: &Self::Record) -> [f64; 3] {
        [r.0[0], r.0[1], r.1[0]]
    }
}

pub struct HybridSource<'a> {
    xy: &'a [[f64; 2]],
    z: &'a [f64],
}

impl PointSource<f64> for HybridSource<'_> {
    type Record = ([f64; 2], f64);

    fn len(&self) -> usize {
        self.xy.len()
    }
    #[inline(always)]
    fn record(&self, i: usize) -> Self::Record {
        (self.xy[i], self.z[i])
    }
    #[inline(always)]
    fn unpack(r: &Self::Record) -> [f64; 3] {
        [r.0[0], r.0[1], r.1]
    }
}

/// Generic callback invoked with the store's concrete view.
pub trait SourceVisitor {
    type Output;

    fn visit<T: Real, S: PointSource<T>>(self, source: &S) -> Self::Output;
}

impl LayoutStore {
    /// Calls `visitor` with the typed view matching this store's layout and
    /// precision.
    pub fn visit<V: SourceVisitor>(&self, visitor: V) -> V::Output {
        match self.precision() {
            Precision::Single => self.visit_as::<f32, V>(visitor),
            Precision::Double => match self.kind() {
                LayoutKind::Soaos => visitor.visit(&SoaosSource {
                    xy: self.buffer(0).typed(),
                    zp: self.buffer(1).typed(),
                }),
                LayoutKind::Hybrid => visitor.visit(&HybridSource {
                    xy: self.buffer(0).typed(),
                    z: self.buffer(1).typed(),
                }),
                _ => self.visit_as::<f64, V>(visitor),
            },
        }
    }

    fn visit_as<T: Real, V: SourceVisitor>(&self, visitor: V) -> V::Output {
        match self.kind() {
            LayoutKind::Soa => visitor.visit(&SoaSource::<T> {
                x: self.buffer(0).typed(),
                y: self.buffer(1).typed(),
                z: self.buffer(2).typed(),
            }),
            LayoutKind::Aos => visitor.visit(&AosSource::<T> {
                recs: self.buffer(0).typed(),
            }),
            LayoutKind::Aoas => visitor.visit(&AoasSource::<T> {
                recs: self.buffer(0).typed(),
            }),
            LayoutKind::Soaos | LayoutKind::Hybrid => {
                unreachable!("double-only layout stored at single precision")
            }
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::sync::atomic::{AtomicU64, Ordering};

use bytemuck::{Pod, Zeroable};

use super::{Component, ComponentSet, Field, LayoutKind, Shape};
use crate::error::{IdwError, Result};
use crate::model::{validate_data, PointRecord};
use crate::real::{Precision, Real};

#[repr(C, align(64))]
#[derive(Clone, Copy, Pod, Zeroable)]
struct Line([u8; 64]);

/// Zero-initialized byte buffer whose base address is 64-byte aligned.
#[derive(Clone)]
pub(crate) struct AlignedBuf {
    lines: Vec<Line>,
    len: usize,
}

impl AlignedBuf {
    pub(crate) fn zeroed(len: usize) -> Self {
        AlignedBuf {
            lines: vec![Line::zeroed(); len.div_ceil(64)],
            len,
        }
    }

    pub(crate) fn bytes(&self) -> &[u8] {
        &bytemuck::cast_slice(&self.lines)[..self.len]
    }

    pub(crate) fn bytes_mut(&mut self) -> &mut [u8] {
        &mut bytemuck::cast_slice_mut(&mut self.lines)[..self.len]
    }

    pub(crate) fn typed<T: Pod>(&self) -> &[T] {
        bytemuck::cast_slice(self.bytes())
    }

    fn typed_mut<T: Pod>(&mut self) -> &mut [T] {
        bytemuck::cast_slice_mut(self.bytes_mut())
    }
}

/// Element reads per component since the last reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AccessStats {
    pub reads_x: u64,
    pub reads_y: u64,
    pub reads_z: u64,
    /// Element reads times element size. Pad slots are never counted.
    pub bytes_touched: u64,
}

impl AccessStats {
    pub fn total_reads(&self) -> u64 {
        self.reads_x + self.reads_y + self.reads_z
    }
}

#[derive(Debug, Default)]
struct ReadCounters {
    x: AtomicU64,
    y: AtomicU64,
    z: AtomicU64,
}

/// Values returned by [`LayoutStore::read_components`]; unrequested
/// components are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Components {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
}

/// A point cloud held in one concrete layout.
///
/// The stored values are immutable after construction. Read counters use
/// relaxed atomics, so a store can be shared by any number of workers.
pub struct LayoutStore {
    shape: Shape,
    count: usize,
    buffers: Vec<AlignedBuf>,
    counters: ReadCounters,
}

impl std::fmt::Debug for LayoutStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LayoutStore")
            .field("kind", &self.shape.kind)
            .field("precision", &self.shape.precision)
            .field("count", &self.count)
            .field("stats", &self.stats())
            .finish()
    }
}

impl Clone for LayoutStore {
    /// Copies the data; the clone starts with zeroed counters.
    fn clone(&self) -> Self {
        LayoutStore {
            shape: self.shape.clone(),
            count: self.count,
            buffers: self.buffers.clone(),
            counters: ReadCounters::default(),
        }
    }
}

impl LayoutStore {
    /// Materializes `records` in `kind`. Single precision stores the
    /// nearest-even rounding of every value.
    pub fn build(records: &[PointRecord], kind: LayoutKind, precision: Precision) -> Result<Self> {
        let shape = Shape::of(kind, precision)?;
        validate_data(records)?;
        let mut store = Self::empty(shape, records.len());
        match precision {
            Precision::Single => store.fill::<f32>(records),
            Precision::Double => store.fill::<f64>(records),
        }
        Ok(store)
    }

    pub(crate) fn empty(shape: Shape, count: usize) -> Self {
        let buffers = shape
            .buffers
            .iter()
            .map(|b| AlignedBuf::zeroed(b.stride * count))
            .collect();
        LayoutStore {
            shape,
            count,
            buffers,
            counters: ReadCounters::default(),
        }
    }

    fn fill<T: Real>(&mut self, records: &[PointRecord]) {
        let e = self.shape.element_bytes;
        for (buf, bshape) in self.buffers.iter_mut().zip(&self.shape.buffers) {
            let elems = buf.typed_mut::<T>();
            let per_record = bshape.stride / e;
            for (i, r) in records.iter().enumerate() {
                for &(field, off) in &bshape.slots {
                    let v = match field {
                        Field::Component(Component::X) => r.x,
                        Field::Component(Component::Y) => r.y,
                        Field::Component(Component::Z) => r.z,
                        Field::Pad => continue,
                    };
                    elems[i * per_record + off / e] = T::from_f64(v);
                }
            }
        }
    }

    pub fn kind(&self) -> LayoutKind {
        self.shape.kind
    }

    pub fn precision(&self) -> Precision {
        self.shape.precision
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn buffer_count(&self) -> usize {
        self.buffers.len()
    }

    /// Raw bytes of one buffer, pads included.
    pub fn buffer_bytes(&self, index: usize) -> &[u8] {
        self.buffers[index].bytes()
    }

    pub(crate) fn buffer(&self, index: usize) -> &AlignedBuf {
        &self.buffers[index]
    }

    pub(crate) fn buffer_mut(&mut self, index: usize) -> &mut AlignedBuf {
        &mut self.buffers[index]
    }

    /// Overwrites every pad byte with values drawn from `byte`. Pads carry
    /// no data, so this never changes a result; it exists for fuzzing that
    /// claim.
    pub fn fill_padding(&mut self, mut byte: impl FnMut() -> u8) {
        let e = self.shape.element_bytes;
        for (buf, bshape) in self.buffers.iter_mut().zip(&self.shape.buffers) {
            let pads: Vec<usize> = bshape
                .slots
                .iter()
                .filter(|(f, _)| *f == Field::Pad)
                .map(|&(_, off)| off)
                .collect();
            if pads.is_empty() {
                continue;
            }
            let bytes = buf.bytes_mut();
            for rec in bytes.chunks_exact_mut(bshape.stride) {
                for &off in &pads {
                    rec[off..off + e].iter_mut().for_each(|b| *b = byte());
                }
            }
        }
    }

    /// True when every pad byte is zero.
    pub fn padding_is_zero(&self) -> bool {
        let e = self.shape.element_bytes;
        self.buffers.iter().zip(&self.shape.buffers).all(|(buf, bshape)| {
            bshape.slots.iter().filter(|(f, _)| *f == Field::Pad).all(|&(_, off)| {
                buf.bytes()
                    .chunks_exact(bshape.stride)
                    .all(|rec| rec[off..off + e].iter().all(|&b| b == 0))
            })
        })
    }

    fn element(&self, c: Component, i: usize) -> f64 {
        let (b, off) = self.shape.locate(c);
        let byte = i * self.shape.buffers[b].stride + off;
        match self.shape.precision {
            Precision::Single => self.buffers[b].typed::<f32>()[byte / 4] as f64,
            Precision::Double => self.buffers[b].typed::<f64>()[byte / 8],
        }
    }

    pub fn read_point(&self, i: usize) -> Result<PointRecord> {
        if i >= self.count {
            return Err(IdwError::IndexOutOfBounds);
        }
        self.record_reads(1, 1, 1);
        Ok(PointRecord::new(
            self.element(Component::X, i),
            self.element(Component::Y, i),
            self.element(Component::Z, i),
        ))
    }

    /// Reads only the requested components of point `i`.
    pub fn read_components(&self, i: usize, which: ComponentSet) -> Result<Components> {
        if which.is_empty() {
            return Err(IdwError::EmptyComponents);
        }
        if i >= self.count {
            return Err(IdwError::IndexOutOfBounds);
        }
        let mut out = Components::default();
        for c in which.iter() {
            let v = Some(self.element(c, i));
            match c {
                Component::X => out.x = v,
                Component::Y => out.y = v,
                Component::Z => out.z = v,
            }
        }
        let n = |c| u64::from(which.contains(c));
        self.record_reads(n(Component::X), n(Component::Y), n(Component::Z));
        Ok(out)
    }

    /// All stored values widened to `f64`, without touching the counters.
    pub fn to_records(&self) -> Vec<PointRecord> {
        (0..self.count)
            .map(|i| {
                PointRecord::new(
                    self.element(Component::X, i),
                    self.element(Component::Y, i),
                    self.element(Component::Z, i),
                )
            })
            .collect()
    }

    /// Same values in another layout at the same precision.
    pub fn convert(&self, target: LayoutKind) -> Result<LayoutStore> {
        target.check(self.precision())?;
        LayoutStore::build(&self.to_records(), target, self.precision())
    }

    pub(crate) fn record_reads(&self, x: u64, y: u64, z: u64) {
        if x != 0 {
            self.counters.x.fetch_add(x, Ordering::Relaxed);
        }
        if y != 0 {
            self.counters.y.fetch_add(y, Ordering::Relaxed);
        }
        if z != 0 {
            self.counters.z.fetch_add(z, Ordering::Relaxed);
        }
    }

    pub fn stats(&self) -> AccessStats {
        let reads_x = self.counters.x.load(Ordering::Relaxed);
        let reads_y = self.counters.y.load(Ordering::Relaxed);
        let reads_z = self.counters.z.load(Ordering::Relaxed);
        AccessStats {
            reads_x,
            reads_y,
            reads_z,
            bytes_touched: (reads_x + reads_y + reads_z) * self.shape.element_bytes as u64,
        }
    }

    /// Zeroes the counters. Taking `&mut self` keeps resets out of running
    /// strategies.
    pub fn reset_stats(&mut self) {
        self.counters = ReadCounters::default();
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Segment-counting model of coalesced global memory access.
//!
//! A warp of `W` consecutive lanes reads the requested components of points
//! `base_offset .. base_offset + W`. Every element read is mapped onto the
//! aligned `S`-byte segments it overlaps; the number of distinct segments is
//! the number of memory transactions. No caches, sectors or replays are
//! modeled. Each buffer is assumed to start on a segment boundary.

use std::io::Write;

use crate::error::{IdwError, Result};
use crate::layout::{ComponentSet, LayoutKind, Shape};
use crate::real::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessPattern {
    pub layout: LayoutKind,
    pub precision: Precision,
    pub components: ComponentSet,
    pub warp_size: usize,
    pub segment_bytes: usize,
    /// Index of the point read by lane 0.
    pub base_offset: usize,
}

impl AccessPattern {
    /// A 32-lane warp, 128-byte segments, starting at point 0.
    pub fn new(layout: LayoutKind, precision: Precision, components: ComponentSet) -> Self {
        AccessPattern {
            layout,
            precision,
            components,
            warp_size: 32,
            segment_bytes: 128,
            base_offset: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(IdwError::EmptyComponents);
        }
        if self.warp_size == 0 {
            return Err(IdwError::InvalidConfig("warp size must be at least 1".into()));
        }
        if self.segment_bytes < 32 || !self.segment_bytes.is_power_of_two() {
            return Err(IdwError::InvalidConfig(format!(
                "segment size must be a power of two >= 32, got {}",
                self.segment_bytes
            )));
        }
        self.layout.check(self.precision)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransactionReport {
    pub segments: usize,
    pub useful_bytes: usize,
    pub fetched_bytes: usize,
    /// `useful_bytes / fetched_bytes`.
    pub utilization: f64,
}

pub fn count_transactions(pattern: &AccessPattern) -> Result<TransactionReport> {
    pattern.validate()?;
    let shape = Shape::of(pattern.layout, pattern.precision)?;
    let e = shape.element_bytes;
    let s = pattern.segment_bytes;
    let lanes = pattern.base_offset..pattern.base_offset + pattern.warp_size;

    let mut touched: Vec<(usize, usize)> = Vec::new();
    for c in pattern.components.iter() {
        let (b, off) = shape.locate(c);
        let stride = shape.buffers[b].stride;
        for lane in lanes.clone() {
            let first = lane * stride + off;
            let last = first + e - 1;
            touched.extend((first / s..=last / s).map(|seg| (b, seg)));
        }
    }
    touched.sort_unstable();
    touched.dedup();

    let segments = touched.len();
    let useful_bytes = pattern.warp_size * pattern.components.len() * e;
    let fetched_bytes = segments * s;
    Ok(TransactionReport {
        segments,
        useful_bytes,
        fetched_bytes,
        utilization: useful_bytes as f64 / fetched_bytes as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorecardRow {
    pub layout: LayoutKind,
    pub precision: Precision,
    pub components: ComponentSet,
    pub warp_size: usize,
    pub segment_bytes: usize,
    /// `None` when the layout does not exist at this precision.
    pub report: Option<TransactionReport>,
}

impl ScorecardRow {
    fn for_pattern(pattern: &AccessPattern) -> Result<ScorecardRow> {
        let report = match count_transactions(pattern) {
            Ok(r) => Some(r),
            Err(IdwError::RequiresDouble) => None,
            Err(e) => return Err(e),
        };
        Ok(ScorecardRow {
            layout: pattern.layout,
            precision: pattern.precision,
            components: pattern.components,
            warp_size: pattern.warp_size,
            segment_bytes: pattern.segment_bytes,
            report,
        })
    }
}

/// One row per layout, in [`LayoutKind::ALL`] order; layouts illegal at
/// `precision` get an `n/a` row.
pub fn layout_scorecard(
    precision: Precision,
    components: ComponentSet,
    warp_size: usize,
    segment_bytes: usize,
) -> Result<Vec<ScorecardRow>> {
    LayoutKind::ALL
        .into_iter()
        .map(|layout| {
            ScorecardRow::for_pattern(&AccessPattern {
                layout,
                precision,
                components,
                warp_size,
                segment_bytes,
                base_offset: 0,
            })
        })
        .collect()
}

/// Scorecard for a single pattern, with an `n/a` row for an illegal layout.
pub fn scorecard_row(pattern: &AccessPattern) -> Result<ScorecardRow> {
    ScorecardRow::for_pattern(pattern)
}

pub const SCORECARD_HEADER: &str =
    "layout,precision,components,warp,segment_bytes,segments,useful_bytes,fetched_bytes,utilization";

pub fn write_scorecard_csv<W: Write>(rows: &[ScorecardRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SCORECARD_HEADER}")?;
    for r in rows {
        write!(
            w,
            "{},{},{},{},{},",
            r.layout, r.precision, r.components, r.warp_size, r.segment_bytes
        )?;
        match &r.report {
            Some(t) => writeln!(
                w,
                "{},{},{},{:.4}",
                t.segments, t.useful_bytes, t.fetched_bytes, t.utilization
            )?,
            None => writeln!(w, "n/a,n/a,n/a,n/a")?,
        }
    }
    w.flush()
}

// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use idw_core::{PointRecord, QueryPoint};

/// Straight transcription of the weighted-average formula: explicit
/// distance, `powf` for the weight, two separate sums. Shares no code with
/// the crate's inner loops.
pub fn brute_force_idw(data: &[PointRecord], queries: &[QueryPoint], p: f64) -> Vec<f64> {
    queries
        .iter()
        .map(|q| {
            let mut num = 0.0;
            let mut den = 0.0;
            for d in data {
                let dist = ((q.x - d.x).powi(2) + (q.y - d.y).powi(2)).sqrt();
                if dist == 0.0 {
                    return d.z;
                }
                let w = 1.0 / dist.powf(p);
                num += w * d.z;
                den += w;
            }
            num / den
        })
        .collect()
}

/// Small xorshift stream for test fixtures, independent of the crate's
/// generator.
pub struct Fixture(u64);

impl Fixture {
    pub fn new(seed: u64) -> Self {
        Fixture(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn records(&mut self, n: usize) -> Vec<PointRecord> {
        (0..n)
            .map(|_| PointRecord::new(self.next_f64(), self.next_f64(), 1.0 + 99.0 * self.next_f64()))
            .collect()
    }

    pub fn queries(&mut self, m: usize) -> Vec<QueryPoint> {
        (0..m)
            .map(|_| QueryPoint::new(self.next_f64(), self.next_f64()))
            .collect()
    }
}

use std::collections::BTreeSet;

use idw_core::{Component, ComponentSet, LayoutKind, Precision};

/// Byte-by-byte enumeration of the addresses a warp reads, with each
/// layout's address formula written out by hand. Returns
/// `(segments, useful_bytes)`.
pub fn enumerate_segments(
    layout: LayoutKind,
    precision: Precision,
    components: ComponentSet,
    warp: usize,
    segment: usize,
    base: usize,
) -> (usize, usize) {
    let e = match precision {
        Precision::Single => 4,
        Precision::Double => 8,
    };
    let mut segs = BTreeSet::new();
    let mut useful = 0;
    for lane in base..base + warp {
        for c in [Component::X, Component::Y, Component::Z] {
            if !components.contains(c) {
                continue;
            }
            let k = match c {
                Component::X => 0,
                Component::Y => 1,
                Component::Z => 2,
            };
            let (buffer, addr) = match layout {
                LayoutKind::Soa => (k, lane * e),
                LayoutKind::Aos => (0, lane * 3 * e + k * e),
                LayoutKind::Aoas => (0, lane * 4 * e + k * e),
                LayoutKind::Soaos if k < 2 => (0, lane * 16 + k * 8),
                LayoutKind::Soaos => (1, lane * 16),
                LayoutKind::Hybrid if k < 2 => (0, lane * 16 + k * 8),
                LayoutKind::Hybrid => (1, lane * 8),
            };
            for byte in addr..addr + e {
                segs.insert((buffer, byte / segment));
                useful += 1;
            }
        }
    }
    (segs.len(), useful)
}

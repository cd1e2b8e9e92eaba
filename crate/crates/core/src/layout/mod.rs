// SPDX-License-Identifier: Apache-2.0

//! Point clouds materialized in one of five memory layouts.
//!
//! Byte shapes per point, with `e` the element size (4 or 8 bytes):
//!
//! | layout | buffers                         | bytes per point      |
//! |--------|---------------------------------|----------------------|
//! | SoA    | `x[n]`, `y[n]`, `z[n]`          | `e + e + e`          |
//! | AoS    | `{x, y, z}[n]`, packed          | `3e`                 |
//! | AoaS   | `{x, y, z, pad}[n]`             | `4e` (16 or 32)      |
//! | SoAoS  | `{x, y}[n]`, `{z, pad}[n]`      | `16 + 16`, f64 only  |
//! | Hybrid | `{x, y}[n]`, `z[n]`             | `16 + 8`, f64 only   |
//!
//! Every buffer starts on a 64-byte boundary.

mod dump;
mod points;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IdwError, Result};
use crate::real::Precision;

pub use dump::{read_dump, read_dump_file, write_dump, write_dump_file, DUMP_MAGIC};
pub use points::{AoasSource, AosSource, HybridSource, PointSource, SoaSource, SoaosSource, SourceVisitor};
pub use store::{AccessStats, Components, LayoutStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayoutKind {
    Soa,
    Aos,
    Aoas,
    Soaos,
    Hybrid,
}

impl LayoutKind {
    pub const ALL: [LayoutKind; 5] = [
        LayoutKind::Soa,
        LayoutKind::Aos,
        LayoutKind::Aoas,
        LayoutKind::Soaos,
        LayoutKind::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::Soa => "soa",
            LayoutKind::Aos => "aos",
            LayoutKind::Aoas => "aoas",
            LayoutKind::Soaos => "soaos",
            LayoutKind::Hybrid => "hybrid",
        }
    }

    /// SoAoS and Hybrid exist only at double precision.
    pub fn supports(self, precision: Precision) -> bool {
        !matches!(
            (self, precision),
            (LayoutKind::Soaos | LayoutKind::Hybrid, Precision::Single)
        )
    }

    pub fn check(self, precision: Precision) -> Result<()> {
        if self.supports(precision) {
            Ok(())
        } else {
            Err(IdwError::RequiresDouble)
        }
    }

    pub(crate) fn tag(self) -> u8 {
        self as u8
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayoutKind {
    type Err = IdwError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        LayoutKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| IdwError::InvalidConfig(format!("unknown layout `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::X, Component::Y, Component::Z];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn letter(self) -> char {
        match self {
            Component::X => 'x',
            Component::Y => 'y',
            Component::Z => 'z',
        }
    }
}

/// A subset of `{x, y, z}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ComponentSet(u8);

impl ComponentSet {
    pub const EMPTY: ComponentSet = ComponentSet(0);
    pub const XYZ: ComponentSet = ComponentSet(0b111);

    pub fn of(components: &[Component]) -> Self {
        ComponentSet(components.iter().fold(0, |acc, c| acc | c.bit()))
    }

    pub fn with(self, c: Component) -> Self {
        ComponentSet(self.0 | c.bit())
    }

    pub fn contains(self, c: Component) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Component> {
        Component::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    /// Every subset, the empty one included, in bit order.
    pub fn all_subsets() -> impl Iterator<Item = ComponentSet> {
        (0u8..8).map(ComponentSet)
    }
}

impl fmt::Display for ComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.iter() {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

/// Accepts `x,z`, `xz`, `x+z` and similar spellings. An empty string parses
/// to the empty set; callers decide whether that is acceptable.
impl FromStr for ComponentSet {
    type Err = IdwError;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = ComponentSet::EMPTY;
        for ch in s.chars() {
            set = match ch.to_ascii_lowercase() {
                'x' => set.with(Component::X),
                'y' => set.with(Component::Y),
                'z' => set.with(Component::Z),
                ',' | '+' | ' ' => set,
                other => return Err(IdwError::InvalidConfig(format!("unknown component `{other}`"))),
            };
        }
        Ok(set)
    }
}

/// What occupies an element slot of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Component(Component),
    Pad,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BufferShape {
    pub name: &'static str,
    /// Bytes between consecutive records.
    pub stride: usize,
    /// `(field, byte offset within the record)`, in address order.
    pub slots: Vec<(Field, usize)>,
}

/// Byte-level shape of a layout at a given precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub kind: LayoutKind,
    pub precision: Precision,
    pub element_bytes: usize,
    pub buffers: Vec<BufferShape>,
}

impl Shape {
    pub fn of(kind: LayoutKind, precision: Precision) -> Result<Shape> {
        use Component::{X, Y, Z};
        use Field::{Component as C, Pad};

        kind.check(precision)?;
        let e = precision.element_bytes();
        let buf = |name, stride, slots: &[(Field, usize)]| BufferShape {
            name,
            stride,
            slots: slots.to_vec(),
        };
        let buffers = match kind {
            LayoutKind::Soa => vec![
                buf("x", e, &[(C(X), 0)]),
                buf("y", e, &[(C(Y), 0)]),
                buf("z", e, &[(C(Z), 0)]),
            ],
            LayoutKind::Aos => vec![buf("xyz", 3 * e, &[(C(X), 0), (C(Y), e), (C(Z), 2 * e)])],
            LayoutKind::Aoas => vec![buf("xyzp", 4 * e, &[(C(X), 0), (C(Y), e), (C(Z), 2 * e), (Pad, 3 * e)])],
            LayoutKind::Soaos => vec![
                buf("xy", 2 * e, &[(C(X), 0), (C(Y), e)]),
                buf("zp", 2 * e, &[(C(Z), 0), (Pad, e)]),
            ],
            LayoutKind::Hybrid => vec![buf("xy", 2 * e, &[(C(X), 0), (C(Y), e)]), buf("z", e, &[(C(Z), 0)])],
        };
        Ok(Shape {
            kind,
            precision,
            element_bytes: e,
            buffers,
        })
    }

    /// Buffer index and in-record byte offset of a component.
    pub fn locate(&self, c: Component) -> (usize, usize) {
        self.buffers
            .iter()
            .enumerate()
            .find_map(|(b, shape)| {
                shape
                    .slots
                    .iter()
                    .find(|(f, _)| *f == Field::Component(c))
                    .map(|&(_, off)| (b, off))
            })
            .expect("every shape stores x, y and z")
    }

    /// Sum of strides over all buffers.
    pub fn bytes_per_point(&self) -> usize {
        self.buffers.iter().map(|b| b.stride).sum()
    }

    /// Indices of the buffers holding any of `which`, ascending.
    pub fn buffers_for(&self, which: ComponentSet) -> Vec<usize> {
        let mut out: Vec<usize> = which.iter().map(|c| self.locate(c).0).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

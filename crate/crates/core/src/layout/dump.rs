// SPDX-License-Identifier: Apache-2.0

//! Binary dump of a store for debugging and interchange.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic  b"IDWL"
//! kind   u8      0 soa, 1 aos, 2 aoas, 3 soaos, 4 hybrid
//! prec   u8      0 single, 1 double
//! count  u64
//! buffers        raw records of each buffer in shape-table order, pads included
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{LayoutKind, LayoutStore, Shape};
use crate::error::{IdwError, Result};
use crate::real::{Precision, Real};

pub const DUMP_MAGIC: [u8; 4] = *b"IDWL";

const HEADER_LEN: usize = 14;

fn encode<T: Real>(bytes: &[u8], out: &mut Vec<u8>) {
    for v in bytemuck::cast_slice::<u8, T>(bytes) {
        v.write_le(out);
    }
}

fn decode<T: Real>(src: &[u8], dst: &mut [u8]) {
    let e = std::mem::size_of::<T>();
    let elems: &mut [T] = bytemuck::cast_slice_mut(dst);
    for (v, chunk) in elems.iter_mut().zip(src.chunks_exact(e)) {
        *v = T::read_le(chunk);
    }
}

pub fn write_dump<W: Write>(store: &LayoutStore, mut w: W) -> std::io::Result<()> {
    let mut out = Vec::with_capacity(HEADER_LEN + store.len() * store.shape().bytes_per_point());
    out.extend_from_slice(&DUMP_MAGIC);
    out.push(store.kind().tag());
    out.push(store.precision().tag());
    out.extend_from_slice(&(store.len() as u64).to_le_bytes());
    for b in 0..store.buffer_count() {
        match store.precision() {
            Precision::Single => encode::<f32>(store.buffer_bytes(b), &mut out),
            Precision::Double => encode::<f64>(store.buffer_bytes(b), &mut out),
        }
    }
    w.write_all(&out)?;
    w.flush()
}

/// Parses a dump. Pad bytes are taken as-is; they are never read as data.
pub fn read_dump<R: Read>(mut r: R) -> Result<LayoutStore> {
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)
        .map_err(|e| IdwError::Format(format!("reading dump: {e}")))?;
    if raw.len() < HEADER_LEN || raw[..4] != DUMP_MAGIC {
        return Err(IdwError::Format("not an IDWL dump".into()));
    }
    let kind =
        LayoutKind::from_tag(raw[4]).ok_or_else(|| IdwError::Format(format!("unknown layout tag {}", raw[4])))?;
    let precision =
        Precision::from_tag(raw[5]).ok_or_else(|| IdwError::Format(format!("unknown precision tag {}", raw[5])))?;
    let count = u64::from_le_bytes(raw[6..14].try_into().expect("8 bytes"));
    let count = usize::try_from(count).map_err(|_| IdwError::Format("count overflows".into()))?;
    let shape = Shape::of(kind, precision)?;
    if count == 0 {
        return Err(IdwError::NoData);
    }
    let expected = count
        .checked_mul(shape.bytes_per_point())
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| IdwError::Format("count overflows".into()))?;
    if raw.len() != expected {
        return Err(IdwError::Format(format!(
            "dump is {} bytes, expected {expected} for {count} {kind} points",
            raw.len()
        )));
    }
    let mut store = LayoutStore::empty(shape.clone(), count);
    let mut at = HEADER_LEN;
    for (b, bshape) in shape.buffers.iter().enumerate() {
        let len = bshape.stride * count;
        let dst = store.buffer_mut(b).bytes_mut();
        match precision {
            Precision::Single => decode::<f32>(&raw[at..at + len], dst),
            Precision::Double => decode::<f64>(&raw[at..at + len], dst),
        }
        at += len;
    }
    if store.to_records().iter().any(|r| !r.is_finite()) {
        return Err(IdwError::InvalidCoordinate);
    }
    Ok(store)
}

pub fn write_dump_file(store: &LayoutStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IdwError::io(path, e))?;
    write_dump(store, BufWriter::new(file)).map_err(|e| IdwError::io(path, e))
}

pub fn read_dump_file(path: impl AsRef<Path>) -> Result<LayoutStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IdwError::io(path, e))?;
    read_dump(BufReader::new(file))
}

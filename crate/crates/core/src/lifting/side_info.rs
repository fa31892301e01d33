//! GLS1 side-information container for `J_P` / `K_U` matrix pairs.
//!
//! All fields little-endian:
//!
//! ```text
//! magic "GLS1" | version u32 | pair count u32
//! per pair, prediction then update matrix:
//!   rows u32 | cols u32 | nnz u64
//!   row offsets u64[rows + 1] | column indices u32[nnz] (0-based)
//!   values as raw f64 bit patterns u64[nnz]
//! ```

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{McPair, SparseBinary, SparseStochastic};
use crate::volume::write_atomic;

pub const GLS1_MAGIC: [u8; 4] = *b"GLS1";
pub const GLS1_VERSION: u32 = 1;

fn put_matrix(out: &mut Vec<u8>, m: &SparseStochastic) {
    let p = m.pattern();
    out.extend_from_slice(&(p.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(p.cols() as u32).to_le_bytes());
    out.extend_from_slice(&(p.nnz() as u64).to_le_bytes());
    for &o in p.row_offsets() {
        out.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &c in p.col_indices() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    for &v in m.values() {
        out.extend_from_slice(&v.to_bits().to_le_bytes());
    }
}

pub fn encode_side_info(records: &[McPair]) -> Result<Vec<u8>> {
    let count = u32::try_from(records.len())
        .map_err(|_| Error::InvalidParameter("too many matrix pairs for GLS1".into()))?;
    let mut out = Vec::new();
    out.extend_from_slice(&GLS1_MAGIC);
    out.extend_from_slice(&GLS1_VERSION.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    for r in records {
        for m in [&r.prediction, &r.update] {
            if m.rows() > u32::MAX as usize || m.cols() > u32::MAX as usize {
                return Err(Error::InvalidParameter("matrix too large for GLS1".into()));
            }
            put_matrix(&mut out, m);
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated(format!("GLS1 ends inside {what} at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    /// Takes `count` fixed-size elements after checking they are all present,
    /// so corrupt counts cannot trigger huge allocations.
    fn array(&mut self, count: u64, width: usize, what: &str) -> Result<&'a [u8]> {
        let need = count
            .checked_mul(width as u64)
            .filter(|&n| n <= self.remaining() as u64)
            .ok_or_else(|| Error::Truncated(format!("GLS1 too short for {count} {what}")))?;
        self.take(need as usize, what)
    }

    fn matrix(&mut self) -> Result<SparseStochastic> {
        let rows = self.u32("matrix rows")? as usize;
        let cols = self.u32("matrix cols")? as usize;
        let nnz = self.u64("matrix nnz")?;
        let offsets = self
            .array(rows as u64 + 1, 8, "row offsets")?
            .chunks_exact(8)
            .map(|c| usize::try_from(u64::from_le_bytes(c.try_into().unwrap())))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Format("row offset overflows usize".into()))?;
        let cols_idx = self
            .array(nnz, 4, "column indices")?
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let values = self
            .array(nnz, 8, "matrix values")?
            .chunks_exact(8)
            .map(|c| f64::from_bits(u64::from_le_bytes(c.try_into().unwrap())))
            .collect();
        SparseStochastic::from_raw(SparseBinary::new(rows, cols, offsets, cols_idx)?, values)
    }
}

/// Decodes a complete GLS1 buffer. Any truncation or trailing garbage fails
/// the whole decode.
pub fn decode_side_info(bytes: &[u8]) -> Result<Vec<McPair>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic: [u8; 4] = cur.take(4, "magic")?.try_into().unwrap();
    if magic != GLS1_MAGIC {
        return Err(Error::BadMagic {
            expected: GLS1_MAGIC,
            found: magic,
        });
    }
    let version = cur.u32("version")?;
    if version != GLS1_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let count = cur.u32("pair count")? as usize;
    // a matrix record is at least 24 bytes
    if count.saturating_mul(48) > cur.remaining() {
        return Err(Error::Truncated(format!("GLS1 too short for {count} matrix pairs")));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let prediction = cur.matrix()?;
        let update = cur.matrix()?;
        out.push(McPair { prediction, update });
    }
    if cur.remaining() != 0 {
        return Err(Error::Format(format!("{} trailing bytes after GLS1 records", cur.remaining())));
    }
    Ok(out)
}

pub fn save_side_info(records: &[McPair], path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_side_info(records)?;
    write_atomic(path.as_ref(), |w| {
        w.write_all(&bytes)?;
        Ok(())
    })
}

pub fn load_side_info(path: impl AsRef<Path>) -> Result<Vec<McPair>> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_side_info(&bytes)
}

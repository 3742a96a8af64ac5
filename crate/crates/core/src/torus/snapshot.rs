//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! | bytes        | content                          |
//! |--------------|----------------------------------|
//! | 4            | magic `NSPF`                     |
//! | 4            | format version (`u32`)           |
//! | 4            | dimension (`u32`)                |
//! | 4 * dim      | points per axis (`u32`)          |
//! | 8 * dim      | period per axis (`f64`)          |
//! | 8 * total    | physical values, row-major `f64` |

use std::fs;
use std::path::Path;

use super::{SpectralField, TorusGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NSPF";
pub const VERSION: u32 = 1;

pub fn encode(field: &SpectralField) -> Vec<u8> {
    let grid = field.grid();
    let values = field.to_physical();
    let mut out = Vec::with_capacity(12 + 12 * grid.dim() + 8 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for &n in grid.points() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for &l in grid.period() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(format!("truncated at byte {}", self.pos));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode_inner(bytes: &[u8]) -> std::result::Result<(TorusGrid, Vec<f64>), String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("bad magic".into());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let dim = r.u32()? as usize;
    if !(1..=3).contains(&dim) {
        return Err(format!("bad dimension {dim}"));
    }
    let points = (0..dim).map(|_| r.u32().map(|n| n as usize)).collect::<std::result::Result<Vec<_>, _>>()?;
    let period = (0..dim).map(|_| r.f64()).collect::<std::result::Result<Vec<_>, _>>()?;
    let grid = TorusGrid::new(points, period).map_err(|e| e.to_string())?;
    let total = grid.total_points();
    if bytes.len() - r.pos != 8 * total {
        return Err(format!(
            "expected {} value bytes for the declared grid, found {}",
            8 * total,
            bytes.len() - r.pos
        ));
    }
    let values = (0..total).map(|_| r.f64()).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((grid, values))
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<SpectralField> {
    let (grid, values) = decode_inner(bytes).map_err(|reason| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    })?;
    SpectralField::from_physical(&grid, &values)
}

pub fn write(path: &Path, field: &SpectralField) -> Result<()> {
    fs::write(path, encode(field))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<SpectralField> {
    let bytes = fs::read(path)?;
    decode(&bytes, path)
}

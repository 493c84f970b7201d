//! Little-endian binary snapshots of real-space samples.
//!
//! Layout: magic `YMH1`, `dim: u32`, `N: u32`, `L: f64`, `count: u32`, then
//! `count` names as `u32` byte length plus UTF-8, then for each field its
//! `N^dim` samples as `f64` in row-major order (last axis fastest).

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, TorusGrid};

pub const MAGIC: &[u8; 4] = b"YMH1";

/// Decoded snapshot contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub grid: TorusGrid,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Spectral field reconstructed from the samples of `name`.
    pub fn spectral(&self, name: &str) -> Result<SpectralField> {
        let v = self.field(name).ok_or_else(|| Error::Format(format!("no field named {name:?}")))?;
        SpectralField::from_values(&self.grid, v.to_vec())
    }
}

pub fn write_snapshot<W: Write>(w: &mut W, grid: &TorusGrid, fields: &[(&str, &SpectralField)]) -> Result<()> {
    let mut buf = Vec::with_capacity(32 + fields.len() * 8 * grid.real_len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.length().to_le_bytes());
    buf.extend_from_slice(&(fields.len() as u32).to_le_bytes());
    for (name, f) in fields {
        grid.check_same(f.grid())?;
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
    }
    for (_, f) in fields {
        for v in f.to_values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn read_snapshot<R: Read>(r: &mut R) -> Result<Snapshot> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let mut c = Cursor { data: &data, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let dim = c.u32()? as usize;
    let n = c.u32()? as usize;
    let length = c.f64()?;
    let grid = TorusGrid::new(dim, n, length).map_err(|e| Error::Format(e.to_string()))?;
    let count = c.u32()? as usize;
    let mut names = Vec::new();
    for _ in 0..count {
        let len = c.u32()? as usize;
        let name = std::str::from_utf8(c.take(len)?).map_err(|_| Error::Format("field name is not UTF-8".into()))?;
        names.push(name.to_string());
    }
    let mut fields = Vec::with_capacity(count);
    for name in names {
        let values = (0..grid.real_len()).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
        fields.push((name, values));
    }
    if c.pos != data.len() {
        return Err(Error::Format(format!("{} trailing bytes", data.len() - c.pos)));
    }
    Ok(Snapshot { grid, fields })
}

//! Binary snapshots of biquaternion fields.
//!
//! Layout, all little-endian: the magic `BQF1`, `n: u32`, `h: f64`,
//! `tau: f64`, `order: u32`, then `n³` records of eight `f64`
//! (`s.re s.im x.re x.im y.re y.im z.re z.im`) in x-fastest order.

use std::io::{Read, Write};

use super::{BiqField, Field, Grid};
use crate::algebra::Biquaternion;
use crate::{Error, Result};

pub const DUMP_MAGIC: [u8; 4] = *b"BQF1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DumpHeader {
    pub n: u32,
    pub h: f64,
    pub tau: f64,
    pub order: u32,
}

pub fn write_dump<W: Write>(mut w: W, field: &BiqField, tau: f64, order: u32) -> Result<()> {
    let grid = field.grid();
    let n = u32::try_from(grid.n()).map_err(|_| Error::Dump("grid too large".into()))?;
    let mut buf = Vec::with_capacity(28 + grid.len() * 64);
    buf.extend_from_slice(&DUMP_MAGIC);
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&grid.h().to_le_bytes());
    buf.extend_from_slice(&tau.to_le_bytes());
    buf.extend_from_slice(&order.to_le_bytes());
    for b in field.data() {
        for c in b.to_components() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<(DumpHeader, BiqField)> {
    let mut head = [0u8; 28];
    r.read_exact(&mut head)?;
    if head[..4] != DUMP_MAGIC {
        return Err(Error::Dump("bad magic".into()));
    }
    let word = |a: usize| u32::from_le_bytes(head[a..a + 4].try_into().unwrap());
    let float = |a: usize| f64::from_le_bytes(head[a..a + 8].try_into().unwrap());
    let header = DumpHeader {
        n: word(4),
        h: float(8),
        tau: float(16),
        order: word(24),
    };
    let grid = Grid::new(header.n as usize, header.h)?;
    let mut body = vec![0u8; grid.len() * 64];
    r.read_exact(&mut body)?;
    let data = body
        .chunks_exact(64)
        .map(|rec| {
            let mut c = [0.0; 8];
            for (v, b) in c.iter_mut().zip(rec.chunks_exact(8)) {
                *v = f64::from_le_bytes(b.try_into().unwrap());
            }
            Biquaternion::from_components(c)
        })
        .collect();
    Ok((header, Field::from_vec(grid, data)?))
}

//! Binary channel dump, so a solve can be replayed from the exact channels it saw.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic        8 bytes  "IRSCHAN\x01"
//! seed         u64
//! realization  u64
//! N, M, G      u32 each
//! K_1..K_G     u32 each
//! H_ts         M·N complex, row-major
//! h_direct     K·N complex, users in group order
//! h_irs        K·M complex, users in group order
//! ```
//!
//! Each complex entry is a `(re, im)` pair of `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{CMatrix, ChannelSet};
use crate::scalar::{Cx, Real};

pub const MAGIC: [u8; 8] = *b"IRSCHAN\x01";

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDump {
    pub seed: u64,
    pub realization: u64,
    pub channels: ChannelSet<f64>,
}

pub fn write_dump<T: Real, W: Write>(mut w: W, ch: &ChannelSet<T>, seed: u64, realization: u64) -> Result<()> {
    let dim = |v: usize| -> Result<[u8; 4]> {
        u32::try_from(v)
            .map(u32::to_le_bytes)
            .map_err(|_| Error::Format(format!("dimension {v} does not fit in u32")))
    };
    w.write_all(&MAGIC)?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&realization.to_le_bytes())?;
    w.write_all(&dim(ch.antennas())?)?;
    w.write_all(&dim(ch.tiles())?)?;
    w.write_all(&dim(ch.groups())?)?;
    for &k in ch.group_sizes() {
        w.write_all(&dim(k)?)?;
    }
    for m in [ch.h_ts(), ch.direct_matrix(), ch.irs_matrix()] {
        for c in m.as_slice() {
            w.write_all(&c.re.to_f64_lossy().to_le_bytes())?;
            w.write_all(&c.im.to_f64_lossy().to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<ChannelDump> {
    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic)?;
    if magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let seed = read_u64(&mut r)?;
    let realization = read_u64(&mut r)?;
    let n = read_u32(&mut r)? as usize;
    let m = read_u32(&mut r)? as usize;
    let g = read_u32(&mut r)? as usize;
    let group_sizes = (0..g)
        .map(|_| read_u32(&mut r).map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let k: usize = group_sizes.iter().sum();
    let h_ts = read_matrix(&mut r, m, n)?;
    let direct = read_matrix(&mut r, k, n)?;
    let irs = read_matrix(&mut r, k, m)?;
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(Error::Format("trailing bytes after channel data".into()));
    }
    let channels = ChannelSet::from_parts(h_ts, direct, irs, group_sizes)?;
    Ok(ChannelDump {
        seed,
        realization,
        channels,
    })
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated dump".into()),
        _ => Error::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_matrix<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<CMatrix<f64>> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        data.push(Cx::new(re, im));
    }
    CMatrix::new(rows, cols, data)
}

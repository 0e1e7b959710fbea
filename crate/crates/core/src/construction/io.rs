//! Flat little-endian map files.
//!
//! ```text
//! magic      8 bytes  "HDMAP\0\0\0"
//! version    u32      FORMAT_VERSION
//! n          u32      group parameter (1)
//! target_n   u32      length of ξ
//! depth      u32
//! seed       u64
//! p, alpha, beta_c, sigma         f64 × 4
//! per level 1..=depth:
//!   level    u32
//!   reserved u32      0
//!   count    u64
//!   count × record: x, y, t, radius, i, j, k, ξ₁ … ξ_N
//! ```
//!
//! Record fields are all f64; the lattice index is stored as exact f64
//! integers so the whole record stays one type.

use std::io::{Read, Write};

use super::map::{BumpBall, RandomMap};
use super::params::{make_params, IFSParams};
use crate::error::{Error, Result};
use crate::heis::HPoint;

pub const MAGIC: [u8; 8] = *b"HDMAP\0\0\0";
pub const FORMAT_VERSION: u32 = 1;

/// Materializes every level of `map` and writes it. Refuses maps with more
/// than `max_balls` balls in total.
pub fn write_map<W: Write>(map: &RandomMap, out: &mut W, max_balls: u64) -> Result<()> {
    let q = map.params();
    let total: u64 = (1..=q.depth).map(|m| map.ball_count(m)).sum();
    if total > max_balls {
        return Err(Error::Format(format!("{total} balls exceed the limit {max_balls}")));
    }
    out.write_all(&MAGIC)?;
    for v in [FORMAT_VERSION, 1, q.target_n as u32, q.depth] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&map.seed().to_le_bytes())?;
    for v in [q.p, q.alpha, q.beta_c, q.sigma] {
        out.write_all(&v.to_le_bytes())?;
    }
    for level in 1..=q.depth {
        let balls = map.level_balls(level, max_balls)?;
        out.write_all(&level.to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        out.write_all(&(balls.len() as u64).to_le_bytes())?;
        for b in &balls {
            let head = [b.center.z()[0], b.center.z()[1], b.center.t(), b.radius];
            let idx = [b.index.0 as f64, b.index.1 as f64, b.index.2 as f64];
            for v in head.iter().chain(&idx).chain(&b.xi) {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub params: IFSParams,
    pub seed: u64,
    pub levels: Vec<Vec<BumpBall>>,
}

impl MapFile {
    /// The lazily evaluated map with the same parameters and seed.
    pub fn to_map(&self) -> RandomMap {
        super::map::build_map(&self.params, self.seed)
    }
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated file: {e}")))?;
        Ok(b)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

pub fn read_map<R: Read>(input: R) -> Result<MapFile> {
    let mut r = Reader { inner: input };
    if r.bytes::<8>()? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = r.u32()?;
    if n != 1 {
        return Err(Error::Format(format!("unsupported group parameter {n}")));
    }
    let target_n = r.u32()? as usize;
    let depth = r.u32()?;
    let seed = r.u64()?;
    let (p, alpha, beta_c, sigma) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
    let params = make_params(p, alpha, depth, target_n)?;
    if params.beta_c != beta_c || params.sigma != sigma {
        return Err(Error::Format("stored β or σ disagree with p and α".into()));
    }
    let mut levels = Vec::with_capacity(depth as usize);
    for want in 1..=depth {
        let level = r.u32()?;
        let _reserved = r.u32()?;
        if level != want {
            return Err(Error::Format(format!("expected level {want}, found {level}")));
        }
        let count = r.u64()?;
        let mut balls = Vec::with_capacity(count.min(1 << 20) as usize);
        for _ in 0..count {
            let (x, y, t, radius) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
            let (i, j, k) = (r.f64()? as i64, r.f64()? as i64, r.f64()? as i64);
            let xi = (0..target_n).map(|_| r.f64()).collect::<Result<Vec<f64>>>()?;
            let center = HPoint::new(&[x, y], t)?;
            balls.push(BumpBall { center, radius, level, xi, index: (i, j, k) });
        }
        levels.push(balls);
    }
    let mut tail = [0u8; 1];
    if r.inner.read(&mut tail)? != 0 {
        return Err(Error::Format("trailing bytes".into()));
    }
    Ok(MapFile { params, seed, levels })
}

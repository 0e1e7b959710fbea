use std::collections::BTreeMap;

use super::ifs::{cell, cells_meeting, Cell, Word};
use super::params::IFSParams;
use crate::heis::HPoint;

pub type LatticeIndex = (i64, i64, i64);

/// Minimum positive length for a tile/column overlap, relative to `h`.
const SLIVER: f64 = 1e-9;

/// The level-m lattice `{(ih, (j+½)h, kh²)}` with `h = σᵐ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelLattice {
    pub level: u32,
    pub h: f64,
}

impl LevelLattice {
    pub fn new(params: &IFSParams, level: u32) -> Self {
        LevelLattice { level, h: params.radius(level) }
    }

    pub fn point(&self, (i, j, k): LatticeIndex) -> HPoint {
        let h = self.h;
        HPoint::h1(i as f64 * h, (j as f64 + 0.5) * h, k as f64 * h * h)
    }

    /// Columns span `x ∈ [0, 1]`; only these `i` have tiles meeting one.
    pub fn i_range(&self) -> std::ops::RangeInclusive<i64> {
        let top = (1.0 / self.h + 0.5 - SLIVER).ceil() as i64 - 1;
        0..=top
    }

    /// Rows whose tiles overlap `[c.y, c.y + c.size]` in positive length.
    pub fn j_range(&self, c: &Cell) -> std::ops::RangeInclusive<i64> {
        let lo = (c.y / self.h - 1.0 + SLIVER).floor() as i64 + 1;
        let hi = ((c.y + c.size) / self.h - SLIVER).ceil() as i64 - 1;
        lo..=hi
    }

    /// The `k` whose tiles meet the column over `c` in positive measure, for
    /// fixed `(i, j)`. This is the single membership rule: net listing, counting
    /// and evaluation all go through it.
    pub fn k_range(&self, i: i64, j: i64, c: &Cell) -> Option<(i64, i64)> {
        let h = self.h;
        let x = i as f64 * h;
        let y = (j as f64 + 0.5) * h;
        let (u0, u1) = ((-0.5 * h).max(-x), (0.5 * h).min(1.0 - x));
        let (v0, v1) = ((-0.5 * h).max(c.y - y), (0.5 * h).min(c.y + c.size - y));
        if u1 - u0 <= SLIVER * h || v1 - v0 <= SLIVER * h {
            return None;
        }
        // φ-height of γ·(u, v, w) is t′_γ + w + v(4x + 2u); extremes at corners.
        let g = |u: f64, v: f64| v * (4.0 * x + 2.0 * u);
        let corners = [g(u0, v0), g(u0, v1), g(u1, v0), g(u1, v1)];
        let gmin = corners.iter().copied().fold(f64::INFINITY, f64::min);
        let gmax = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let h2 = h * h;
        // t′_γ = (k + i(2j+1)) h² must lie in the open interval (lo, hi).
        let lo = (c.t - gmax) / h2 - 0.5;
        let hi = (c.t + c.size - gmin) / h2 + 0.5;
        let shift = i * (2 * j + 1);
        let kmin = lo.floor() as i64 + 1 - shift;
        let kmax = hi.ceil() as i64 - 1 - shift;
        (kmin <= kmax).then_some((kmin, kmax))
    }

    pub fn tile_meets(&self, idx: LatticeIndex, c: &Cell) -> bool {
        self.k_range(idx.0, idx.1, c).map_or(false, |(a, b)| a <= idx.2 && idx.2 <= b)
    }

    /// φ-bounding box `(y0, y1, t0, t1)` of the tile of `idx`.
    pub fn tile_box(&self, (i, j, k): LatticeIndex) -> (f64, f64, f64, f64) {
        let h = self.h;
        let x = i as f64 * h;
        let y = (j as f64 + 0.5) * h;
        let tp = (k + i * (2 * j + 1)) as f64 * h * h;
        let spread = 0.5 * h * (4.0 * x.abs() + h) + 0.5 * h * h;
        (y - 0.5 * h, y + 0.5 * h, tp - spread, tp + spread)
    }

    /// Lattice points at Korányi distance `< factor·h` from `q`, with distances.
    pub fn near(&self, q: &HPoint, factor: f64) -> Vec<(LatticeIndex, f64)> {
        let h = self.h;
        let rad = factor * h;
        let (x, y, t) = (q.z()[0], q.z()[1], q.t());
        let (i0, i1) = (((x - rad) / h).ceil() as i64, ((x + rad) / h).floor() as i64);
        let (j0, j1) = (((y - rad) / h - 0.5).ceil() as i64, ((y + rad) / h - 0.5).floor() as i64);
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                let gx = i as f64 * h;
                let gy = (j as f64 + 0.5) * h;
                let dz2 = (gx - x).powi(2) + (gy - y).powi(2);
                if dz2 >= rad * rad {
                    continue;
                }
                // d < rad ⇔ |t_γ − t − 2ω(z_q, z_γ)| < sqrt(rad⁴ − |Δz|⁴)
                let centre = t + 2.0 * (x * gy - gx * y);
                let slack = (rad.powi(4) - dz2 * dz2).sqrt();
                let h2 = h * h;
                let (k0, k1) = (((centre - slack) / h2).floor() as i64, ((centre + slack) / h2).ceil() as i64);
                for k in k0..=k1 {
                    let d = q.dist(&self.point((i, j, k)));
                    if d < rad {
                        out.push(((i, j, k), d));
                    }
                }
            }
        }
        out
    }
}

/// Net of the column over `word`: lattice points whose tiles meet it, in
/// lattice order.
pub fn build_net(word: &Word, params: &IFSParams) -> Vec<HPoint> {
    net_indices(word, params).into_iter().map(|idx| LevelLattice::new(params, word.len() as u32).point(idx)).collect()
}

pub(crate) fn net_indices(word: &Word, params: &IFSParams) -> Vec<LatticeIndex> {
    let lat = LevelLattice::new(params, word.len() as u32);
    let c = cell(word, params);
    let mut out = Vec::new();
    for i in lat.i_range() {
        for j in lat.j_range(&c) {
            if let Some((a, b)) = lat.k_range(i, j, &c) {
                out.extend((a..=b).map(|k| (i, j, k)));
            }
        }
    }
    out
}

pub fn net_size(word: &Word, params: &IFSParams) -> u64 {
    let lat = LevelLattice::new(params, word.len() as u32);
    let c = cell(word, params);
    let mut total = 0u64;
    for i in lat.i_range() {
        for j in lat.j_range(&c) {
            if let Some((a, b)) = lat.k_range(i, j, &c) {
                total += (b - a + 1) as u64;
            }
        }
    }
    total
}

/// Number of distinct level-m balls: the union of all column nets, counted by
/// merging k-intervals per lattice row without listing the balls.
pub fn level_ball_count(params: &IFSParams, level: u32) -> u64 {
    let lat = LevelLattice::new(params, level);
    let cells = cells_meeting(params, level, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    let mut by_row: BTreeMap<i64, Vec<Cell>> = BTreeMap::new();
    for (_, c) in &cells {
        for j in lat.j_range(c) {
            by_row.entry(j).or_default().push(*c);
        }
    }
    let mut total = 0u64;
    let mut spans: Vec<(i64, i64)> = Vec::new();
    for (j, row) in &by_row {
        for i in lat.i_range() {
            spans.clear();
            spans.extend(row.iter().filter_map(|c| lat.k_range(i, *j, c)));
            spans.sort_unstable();
            let mut cur: Option<(i64, i64)> = None;
            for &(a, b) in &spans {
                cur = match cur {
                    Some((ca, cb)) if a <= cb + 1 => Some((ca, cb.max(b))),
                    Some((ca, cb)) => {
                        total += (cb - ca + 1) as u64;
                        Some((a, b))
                    }
                    None => Some((a, b)),
                };
            }
            if let Some((ca, cb)) = cur {
                total += (cb - ca + 1) as u64;
            }
        }
    }
    total
}

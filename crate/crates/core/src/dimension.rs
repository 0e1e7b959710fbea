//! Dimension estimates on finite point clouds.
//!
//! Covering numbers come from greedy r-nets taken in stored order, so every
//! count is reproducible. A hash grid prunes candidate centers; the grid only
//! filters, the final test is always the exact metric.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::heis::{dist_rows, HPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSel {
    /// Korányi metric on rows `(x₁, y₁, …, t)`.
    Heisenberg,
    /// Euclidean metric on the same rows.
    EuclideanAmbient,
    /// Euclidean metric on vectors of ℝᴺ.
    EuclideanTarget(usize),
}

fn eucl(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
    metric: MetricSel,
}

impl PointCloud {
    /// Builds a cloud from row-major data.
    pub fn from_rows(dim: usize, data: Vec<f64>, metric: MetricSel) -> Result<Self> {
        let ok_dim = match metric {
            MetricSel::Heisenberg | MetricSel::EuclideanAmbient => dim >= 3 && dim % 2 == 1,
            MetricSel::EuclideanTarget(n) => n >= 1 && dim == n,
        };
        if !ok_dim {
            return Err(domain(format!("row length {dim} does not fit metric {metric:?}")));
        }
        if data.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if data.len() % dim != 0 {
            return Err(domain("data length is not a multiple of the row length"));
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PointCloud { dim, data, metric })
    }

    pub fn from_hpoints(points: &[HPoint], metric: MetricSel) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyCloud)?.dim().topological();
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim().topological() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim().topological() });
            }
            data.extend(p.z());
            data.push(p.t());
        }
        PointCloud::from_rows(dim, data, metric)
    }

    /// Vectors of ℝᴺ under the Euclidean metric.
    pub fn target(vectors: &[Vec<f64>]) -> Result<Self> {
        let n = vectors.first().ok_or(Error::EmptyCloud)?.len();
        let mut data = Vec::with_capacity(vectors.len() * n);
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            data.extend(v);
        }
        PointCloud::from_rows(n, data, MetricSel::EuclideanTarget(n))
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> MetricSel {
        self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    fn dist_fn(&self) -> fn(&[f64], &[f64]) -> f64 {
        match self.metric {
            MetricSel::Heisenberg => dist_rows,
            _ => eucl,
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        (self.dist_fn())(self.point(i), self.point(j))
    }

    /// Same rows under another metric.
    pub fn with_metric(self, metric: MetricSel) -> Result<Self> {
        PointCloud::from_rows(self.dim, self.data, metric)
    }

    /// Intrinsic dilation for the Heisenberg metric, plain scaling otherwise.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(domain("dilation factor must be positive"));
        }
        let heis = self.metric == MetricSel::Heisenberg;
        let d = self.dim;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(k, c)| if heis && k % d == d - 1 { lambda * lambda * c } else { lambda * c })
            .collect();
        PointCloud::from_rows(d, data, self.metric)
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &PointCloud) -> Result<Self> {
        if self.dim != other.dim || self.metric != other.metric {
            return Err(domain("clouds differ in row length or metric"));
        }
        let mut data = self.data.clone();
        data.extend(&other.data);
        PointCloud::from_rows(self.dim, data, self.metric)
    }
}

/// Axes used for bucketing and their cell widths at scale `r`.
fn grid_axes(cloud: &PointCloud, r: f64) -> Vec<(usize, f64)> {
    let d = cloud.dim;
    match cloud.metric {
        MetricSel::Heisenberg => {
            let zmax = cloud
                .points()
                .map(|p| p[..d - 1].iter().map(|c| c * c).sum::<f64>())
                .fold(0.0, f64::max)
                .sqrt();
            vec![(0, r), (1, r), (d - 1, r * r + 2.0 * zmax * r)]
        }
        _ => (0..d.min(3)).map(|k| (k, r)).collect(),
    }
}

/// Indices of a greedy maximal r-separated subset, scanning in stored order.
/// A point becomes a center iff it is at distance ≥ r from all earlier centers.
pub fn greedy_net(cloud: &PointCloud, r: f64) -> Vec<usize> {
    assert!(r > 0.0, "net radius must be positive");
    let axes = grid_axes(cloud, r);
    let dist = cloud.dist_fn();
    let key = |p: &[f64]| {
        let mut k = [0i64; 3];
        for (slot, &(ax, w)) in k.iter_mut().zip(&axes) {
            *slot = (p[ax] / w).floor() as i64;
        }
        k
    };
    let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    let mut centers = Vec::new();
    let na = axes.len();
    'points: for i in 0..cloud.len() {
        let p = cloud.point(i);
        let k = key(p);
        for code in 0..3usize.pow(na as u32) {
            let mut nk = k;
            let mut c = code;
            for slot in nk.iter_mut().take(na) {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(list) = grid.get(&nk) {
                if list.iter().any(|&j| dist(p, cloud.point(j as usize)) < r) {
                    continue 'points;
                }
            }
        }
        grid.entry(k).or_default().push(i as u32);
        centers.push(i);
    }
    centers
}

pub fn covering_count(cloud: &PointCloud, r: f64) -> usize {
    greedy_net(cloud, r).len()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub value: f64,
    /// `(r, N(r))` from the largest radius down.
    pub scales: Vec<(f64, usize)>,
    /// Half-open index range of `scales` used by the fit.
    pub window: (usize, usize),
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// All counts in the window are equal; `value` is then 0 and meaningless.
    pub degenerate: bool,
}

/// Radii `r_max (r_min/r_max)^{k/(levels−1)}` for `k = 0..levels`.
pub fn geometric_radii(r_max: f64, r_min: f64, levels: usize) -> Vec<f64> {
    let q = r_min / r_max;
    (0..levels)
        .map(|k| match k {
            0 => r_max,
            _ if k + 1 == levels => r_min,
            _ => r_max * q.powf(k as f64 / (levels - 1) as f64),
        })
        .collect()
}

/// Box-counting slope with the default window (first and last scale dropped).
pub fn estimate_dim(cloud: &PointCloud, r_max: f64, r_min: f64, levels: usize) -> Result<DimensionEstimate> {
    estimate_dim_window(cloud, r_max, r_min, levels, 1..levels.saturating_sub(1))
}

pub fn estimate_dim_window(
    cloud: &PointCloud,
    r_max: f64,
    r_min: f64,
    levels: usize,
    window: std::ops::Range<usize>,
) -> Result<DimensionEstimate> {
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(domain(format!("need r_max > r_min > 0, got {r_max}, {r_min}")));
    }
    if levels < 4 {
        return Err(domain("need at least 4 levels"));
    }
    if window.end > levels || window.len() < 2 {
        return Err(domain("fit window must hold at least 2 scales inside the level range"));
    }
    let scales: Vec<(f64, usize)> =
        geometric_radii(r_max, r_min, levels).into_iter().map(|r| (r, covering_count(cloud, r))).collect();
    let pts: Vec<(f64, f64)> = scales[window.clone()].iter().map(|&(r, c)| ((1.0 / r).ln(), (c as f64).ln())).collect();
    let degenerate = pts.windows(2).all(|w| w[0].1 == w[1].1);
    let (slope, residual) = if degenerate { (0.0, 0.0) } else { least_squares(&pts) };
    Ok(DimensionEstimate { value: slope.max(0.0), scales, window: (window.start, window.end), residual, degenerate })
}

/// Slope and RMS residual of the least-squares line through `pts`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

pub const COINCIDENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszEnergy {
    pub value: f64,
    /// Ordered pairs `i ≠ j` whose distance was raised to the floor.
    pub coincident_pairs: usize,
}

/// `(1/M²) Σ_{i≠j} dist(pᵢ, pⱼ)^{−s}` with distances floored at
/// [`COINCIDENT_FLOOR`]. Row sums are reduced in index order, so the value does
/// not depend on the thread count.
pub fn riesz_energy(cloud: &PointCloud, s: f64) -> Result<RieszEnergy> {
    if !(s > 0.0) {
        return Err(domain("energy exponent must be positive"));
    }
    let m = cloud.len();
    if m < 2 {
        return Err(domain("energy needs at least two points"));
    }
    let dist = cloud.dist_fn();
    let rows: Vec<(f64, usize)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            let mut acc = 0.0;
            let mut hits = 0;
            for j in i + 1..m {
                let mut d = dist(p, cloud.point(j));
                if d < COINCIDENT_FLOOR {
                    d = COINCIDENT_FLOOR;
                    hits += 1;
                }
                acc += d.powf(-s);
            }
            (acc, hits)
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let hits: usize = rows.iter().map(|r| r.1).sum();
    Ok(RieszEnergy { value: 2.0 * total / (m as f64 * m as f64), coincident_pairs: 2 * hits })
}

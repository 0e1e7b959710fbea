use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::params::IFSParams;
use crate::dimension::{MetricSel, PointCloud};
use crate::error::{domain, Result};
use crate::heis::HPoint;
use crate::rng::trial_rng;
use crate::subgroups::{HorizontalSubgroup, VerticalPoint};

/// A finite sequence over {1, 2, 3, 4}; the empty word names the unit square.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.iter().any(|d| !(1..=4).contains(d)) {
            return Err(domain("word letters must lie in 1..=4"));
        }
        Ok(Word(digits))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Word of length `len` whose base-4 digits (first letter most significant) spell `index`.
    pub fn from_index(len: u32, index: u64) -> Self {
        let mut d = vec![0u8; len as usize];
        let mut x = index;
        for slot in d.iter_mut().rev() {
            *slot = (x % 4) as u8 + 1;
            x /= 4;
        }
        Word(d)
    }

    /// Position in the lexicographic order of words of the same length.
    pub fn index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &d| 4 * acc + u64::from(d - 1))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// All words of length `len` in lexicographic order.
pub fn words(len: u32) -> impl Iterator<Item = Word> {
    (0..4u64.pow(len)).map(move |i| Word::from_index(len, i))
}

/// The closed square `[y, y + size] × [t, t + size]` of W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub y: f64,
    pub t: f64,
    pub size: f64,
}

impl Cell {
    pub fn contains(&self, y: f64, t: f64) -> bool {
        y >= self.y && y <= self.y + self.size && t >= self.t && t <= self.t + self.size
    }

    pub fn center(&self) -> (f64, f64) {
        (self.y + 0.5 * self.size, self.t + 0.5 * self.size)
    }

    fn child(&self, letter: u8, sigma: f64) -> Cell {
        let (oy, ot) = offset(letter, sigma);
        Cell { y: self.y + self.size * oy, t: self.t + self.size * ot, size: self.size * sigma }
    }
}

fn offset(letter: u8, sigma: f64) -> (f64, f64) {
    let s = 1.0 - sigma;
    match letter {
        1 => (0.0, 0.0),
        2 => (s, 0.0),
        3 => (0.0, s),
        4 => (s, s),
        _ => unreachable!("validated word"),
    }
}

/// `f_{ω₁} ∘ … ∘ f_{ω_m}` applied to the unit square.
pub fn cell(word: &Word, params: &IFSParams) -> Cell {
    let sigma = params.sigma;
    let (mut y, mut t) = (0.0, 0.0);
    for &d in word.0.iter().rev() {
        let (oy, ot) = offset(d, sigma);
        y = sigma * y + oy;
        t = sigma * t + ot;
    }
    Cell { y, t, size: sigma.powi(word.len() as i32) }
}

/// Level-`level` cells meeting the closed rectangle `[y0, y1] × [t0, t1]`,
/// as `(word index, cell)` in increasing index order.
pub fn cells_meeting(params: &IFSParams, level: u32, y0: f64, y1: f64, t0: f64, t1: f64) -> Vec<(u64, Cell)> {
    fn walk(c: Cell, idx: u64, left: u32, sigma: f64, r: [f64; 4], out: &mut Vec<(u64, Cell)>) {
        if c.y > r[1] || c.y + c.size < r[0] || c.t > r[3] || c.t + c.size < r[2] {
            return;
        }
        if left == 0 {
            out.push((idx, c));
            return;
        }
        for d in 1..=4u8 {
            walk(c.child(d, sigma), 4 * idx + u64::from(d - 1), left - 1, sigma, r, out);
        }
    }
    let mut out = Vec::new();
    walk(Cell { y: 0.0, t: 0.0, size: 1.0 }, 0, level, params.sigma, [y0, y1, t0, t1], &mut out);
    out
}

/// `(x, y, t) ↦ (x, y, t + 2xy)`.
pub fn phi(q: &HPoint) -> (f64, f64, f64) {
    assert_eq!(q.dim().n(), 1, "the construction lives in the first Heisenberg group");
    let (x, y) = (q.z()[0], q.z()[1]);
    (x, y, q.t() + 2.0 * x * y)
}

pub fn phi_inv(x: f64, y: f64, tp: f64) -> HPoint {
    HPoint::h1(x, y, tp - 2.0 * x * y)
}

pub fn column_contains(q: &HPoint, word: &Word, params: &IFSParams) -> bool {
    let (x, y, tp) = phi(q);
    (0.0..=1.0).contains(&x) && cell(word, params).contains(y, tp)
}

/// Cell centers (or a regular sub-grid of each cell) at depth `params.depth`,
/// as rows `(0, y, t)` under the Euclidean metric.
pub fn four_corner_cloud(params: &IFSParams, samples_per_cell: usize) -> Result<PointCloud> {
    if samples_per_cell == 0 {
        return Err(domain("need at least one sample per cell"));
    }
    let g = (samples_per_cell as f64).sqrt().ceil() as usize;
    let mut data = Vec::with_capacity(4usize.pow(params.depth) * samples_per_cell * 3);
    for w in words(params.depth) {
        let c = cell(&w, params);
        for s in 0..samples_per_cell {
            let (a, b) = ((s % g) as f64 + 0.5, (s / g) as f64 + 0.5);
            data.extend([0.0, c.y + c.size * a / g as f64, c.t + c.size * b / g as f64]);
        }
    }
    PointCloud::from_rows(3, data, MetricSel::EuclideanAmbient)
}

/// Base points `(0, y, t)` at centers of uniformly drawn depth-`params.depth`
/// cells; sample `c` uses the trial stream `(seed, c)`.
pub fn sample_e_alpha(params: &IFSParams, count: usize, seed: u64) -> Vec<(Word, VerticalPoint)> {
    let v = HorizontalSubgroup::x_axis();
    (0..count)
        .map(|c| {
            let mut rng = trial_rng(seed, c as u64);
            let w = Word::from_index(params.depth, rng.gen_range(0..4u64.pow(params.depth)));
            let (y, t) = cell(&w, params).center();
            let a = v.vertical(HPoint::h1(0.0, y, t)).expect("x = 0 is vertical");
            (w, a)
        })
        .collect()
}

//! Image dimension of horizontal lines through the four-corner set under the
//! random map, against control lines that miss every column.

use anyhow::{bail, Result};
use heisdistort_core::construction::{build_map, eval_map, make_params, sample_e_alpha, IFSParams, RandomMap};
use heisdistort_core::dimension::{estimate_dim, riesz_energy, DimensionEstimate, PointCloud};
use heisdistort_core::subgroups::{HorizontalSubgroup, VerticalPoint};
use heisdistort_core::HPoint;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::report::{json, record, Check, ExperimentReport, Relation};
use crate::thresholds::Thresholds;

#[derive(Debug, Clone)]
pub struct DistortArgs {
    pub p: f64,
    pub alpha: f64,
    pub depth: u32,
    pub cosets: usize,
    pub samples: usize,
    pub seeds: Vec<u64>,
    pub controls: usize,
}

/// Bases `(0, y, t)` of control lines; every one lies outside the support of
/// every bump.
pub const CONTROL_BASES: [(f64, f64); 8] =
    [(-0.5, -0.5), (1.5, 0.5), (0.5, -5.0), (0.5, 6.0), (-0.5, 0.5), (-1.0, 0.0), (2.0, 0.5), (-0.5, 1.5)];

/// `f(a(s))` at `samples` evenly spaced `s ∈ [0, 1]`.
pub fn image_cloud(map: &RandomMap, base: &VerticalPoint, samples: usize) -> Vec<Vec<f64>> {
    let v = HorizontalSubgroup::x_axis();
    let last = (samples - 1).max(1) as f64;
    (0..samples).into_par_iter().map(|i| eval_map(map, &v.coset_point(base, &[i as f64 / last]))).collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Scale window of one image: `r_max` is a fixed fraction of the diameter,
/// `r_min` a fixed multiple of the median gap between consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageScales {
    pub diameter: f64,
    pub spacing: f64,
    pub r_max: f64,
    pub r_min: f64,
}

pub fn image_scales(img: &[Vec<f64>], th: &Thresholds) -> ImageScales {
    let mut gaps: Vec<f64> = img.windows(2).map(|w| euclid(&w[0], &w[1])).filter(|g| *g > 0.0).collect();
    gaps.sort_by(f64::total_cmp);
    let spacing = gaps.get(gaps.len() / 2).copied().unwrap_or(0.0);
    let dim = img.first().map_or(0, Vec::len);
    let (mut lo, mut hi) = (vec![f64::INFINITY; dim], vec![f64::NEG_INFINITY; dim]);
    for p in img {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let diameter = if img.is_empty() { 0.0 } else { euclid(&lo, &hi) };
    ImageScales {
        diameter,
        spacing,
        r_max: th.get("distort_rmax_fraction") * diameter,
        r_min: th.get("distort_rmin_spacing") * spacing,
    }
}

fn degenerate() -> DimensionEstimate {
    DimensionEstimate { value: 0.0, scales: Vec::new(), window: (0, 0), residual: 0.0, degenerate: true }
}

/// Box-counting estimate of an image; images too small to resolve any range
/// of scales come back flagged degenerate.
pub fn estimate_image(img: &[Vec<f64>], th: &Thresholds) -> Result<(DimensionEstimate, ImageScales)> {
    let sc = image_scales(img, th);
    if !(sc.r_min > 0.0 && sc.r_max > sc.r_min) {
        return Ok((degenerate(), sc));
    }
    let cloud = PointCloud::target(img)?;
    Ok((estimate_dim(&cloud, sc.r_max, sc.r_min, th.get("distort_levels") as usize)?, sc))
}

/// `sup_x (F_a(x) − F_b(x))` for the empirical CDFs; `a` stochastically
/// dominates `b` when this is at most 0.
pub fn dominance_gap(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |xs: &[f64], x: f64| xs.iter().filter(|&&y| y <= x).count() as f64 / xs.len() as f64;
    a.iter().chain(b).map(|&x| cdf(a, x) - cdf(b, x)).fold(0.0, f64::max)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

struct Line {
    kind: &'static str,
    label: String,
    base: VerticalPoint,
}

fn analyse(map: &RandomMap, line: &Line, samples: usize, s: f64, th: &Thresholds) -> Result<(f64, Map<String, Value>)> {
    let img = image_cloud(map, &line.base, samples);
    let (est, sc) = estimate_image(&img, th)?;
    let full = riesz_energy(&PointCloud::target(&img)?, s)?;
    let half: Vec<Vec<f64>> = img.iter().step_by(2).cloned().collect();
    let half = riesz_energy(&PointCloud::target(&half)?, s)?;
    let counts: Vec<String> = est.scales.iter().map(|(_, c)| c.to_string()).collect();
    let p = line.base.point();
    let rec = record([
        ("seed", json(map.seed())),
        ("kind", json(line.kind)),
        ("word", json(&line.label)),
        ("base_y", json(p.z()[1])),
        ("base_t", json(p.t())),
        ("estimate", json(est.value)),
        ("degenerate", json(est.degenerate)),
        ("residual", json(est.residual)),
        ("diameter", json(sc.diameter)),
        ("spacing", json(sc.spacing)),
        ("r_max", json(sc.r_max)),
        ("r_min", json(sc.r_min)),
        ("counts", json(counts.join(";"))),
        ("energy_exponent", json(s)),
        ("energy_half", json(half.value)),
        ("energy_full", json(full.value)),
        ("energy_growth", json(full.value / half.value)),
        ("coincident_pairs", json(full.coincident_pairs)),
    ]);
    Ok((est.value, rec))
}

fn lines(params: &IFSParams, cosets: usize, controls: usize, seed: u64) -> Vec<Line> {
    let v = HorizontalSubgroup::x_axis();
    let mut out: Vec<Line> =
        sample_e_alpha(params, cosets, seed).into_iter().map(|(w, base)| Line { kind: "e_alpha", label: w.to_string(), base }).collect();
    for &(y, t) in CONTROL_BASES.iter().take(controls) {
        let base = v.vertical(HPoint::h1(0.0, y, t)).expect("x = 0 is vertical");
        out.push(Line { kind: "control", label: String::new(), base });
    }
    out
}

pub fn run(args: &DistortArgs, th: &Thresholds) -> Result<ExperimentReport> {
    if args.cosets == 0 || args.samples < 2 || args.seeds.is_empty() {
        bail!("need at least one coset, two samples and one seed");
    }
    if args.controls == 0 || args.controls > CONTROL_BASES.len() {
        bail!("controls must lie in 1..={}", CONTROL_BASES.len());
    }
    let params = make_params(args.p, args.alpha, args.depth, 2)?;
    let s = args.alpha - th.get("distort_energy_offset");
    if !(s > 0.0) {
        bail!("energy exponent α − offset must be positive");
    }

    let mut rep = ExperimentReport::new("distort", args.seeds[0], th);
    rep.param("p", args.p);
    rep.param("alpha", args.alpha);
    rep.param("depth", args.depth);
    rep.param("cosets", args.cosets);
    rep.param("samples", args.samples);
    rep.param("seeds", &args.seeds);
    rep.param("controls", args.controls);
    rep.param("sigma", params.sigma);
    rep.param("beta", params.beta_c);

    let mut all_e = Vec::new();
    let mut all_c = Vec::new();
    for &seed in &args.seeds {
        let map = build_map(&params, seed);
        let (mut e, mut c) = (Vec::new(), Vec::new());
        for line in lines(&params, args.cosets, args.controls, seed) {
            let (value, rec) = analyse(&map, &line, args.samples, s, th)?;
            let bucket = if line.kind == "control" { &mut c } else { &mut e };
            bucket.push(value);
            rep.records.push(rec);
        }
        let med = median(&e);
        rep.stat(&format!("seed_{seed}_median"), med);
        rep.stat(&format!("seed_{seed}_min"), e.iter().copied().fold(f64::INFINITY, f64::min));
        rep.stat(&format!("seed_{seed}_max"), e.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        rep.check(Check::new(format!("seed {seed} median estimate"), med, Relation::AtLeast, th.get("distort_median"), "distort_median"));
        rep.check(Check::new(
            format!("seed {seed} dominance over controls"),
            dominance_gap(&e, &c),
            Relation::AtMost,
            th.get("dominance_slack"),
            "dominance_slack",
        ));
        all_e.extend(e);
        all_c.extend(c);
    }
    rep.stat("median", median(&all_e));
    rep.stat("control_max", all_c.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    rep.notes.push(format!(
        "window r_max = {} x image diameter, r_min = {} x median consecutive gap, {} levels, end scales dropped from the fit",
        th.get("distort_rmax_fraction"),
        th.get("distort_rmin_spacing"),
        th.get("distort_levels")
    ));
    Ok(rep)
}

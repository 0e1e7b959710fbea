//! Split round trips and the two Lipschitz behaviours of the vertical projection.

use anyhow::{bail, Result};
use heisdistort_core::rng::{gaussian, trial_rng};
use heisdistort_core::subgroups::{CoordBox, HorizontalSubgroup};
use heisdistort_core::HPoint;
use rand::Rng;
use rayon::prelude::*;

use crate::report::{json, record, Check, ExperimentReport, Relation};
use crate::thresholds::Thresholds;

#[derive(Debug, Clone)]
pub struct ProjectionArgs {
    pub n: usize,
    pub m: usize,
    pub box_scale: f64,
    /// Pair count N for the Euclidean ratio; 10N pairs are drawn in total.
    pub trials: usize,
    pub split_trials: usize,
    pub seed: u64,
}

/// Streams for the split and pair samples are disjoint: pairs use
/// `(seed, i)`, split points `(seed, PAIR_STREAMS + i)`.
const PAIR_STREAMS: u64 = 1 << 40;

fn split_residual(v: &HorizontalSubgroup, seed: u64, i: u64) -> f64 {
    let mut rng = trial_rng(seed, PAIR_STREAMS + i);
    let r = 10f64.powf(rng.gen_range(-1.0..1.0));
    let a = CoordBox::new(v.n(), r).expect("r > 0").sample(&mut rng);
    let (vert, horiz) = v.split(&a);
    let back = vert.point().multiply(&horiz);
    let diff = back.coords().iter().zip(a.coords()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    diff / a.sup_norm().max(1.0)
}

/// Unit-gauge direction.
fn direction<R: Rng>(rng: &mut R, n: usize) -> HPoint {
    loop {
        let z: Vec<f64> = (0..2 * n).map(|_| gaussian(rng)).collect();
        let u = HPoint::new(&z, gaussian(rng)).expect("finite");
        let l = u.norm();
        if l > 1e-9 {
            return u.dilate(1.0 / l).expect("positive");
        }
    }
}

/// `|π(a) − π(b)|_E / d(a, b)` for `a` in the box and `b = a * δ_ρ(u)`.
fn euclid_ratio(v: &HorizontalSubgroup, k: &CoordBox, seed: u64, i: u64) -> f64 {
    let mut rng = trial_rng(seed, i);
    let a = k.sample(&mut rng);
    let rho = k.r * 10f64.powf(rng.gen_range(-3.0..0.0));
    let b = a.multiply(&direction(&mut rng, v.n()).dilate(rho).expect("positive"));
    let (pa, pb) = (v.proj_vert(&a), v.proj_vert(&b));
    pa.point().eucl_dist(pb.point()) / a.dist(&b)
}

/// `J(x, y) = (−y, x)` on each coordinate pair, so `ω(z, Jz) = |z|²`.
pub fn rotate(z: &[f64]) -> Vec<f64> {
    z.chunks(2).flat_map(|p| [-p[1], p[0]]).collect()
}

/// `d(π a, π b)/d(a, b)` for `a = (v₁, 0)` and `b = a * (δ Jv₁, 0)`.
pub fn heis_ratio(v: &HorizontalSubgroup, delta: f64) -> f64 {
    let v1 = &v.basis()[0];
    let a = HPoint::new(v1, 0.0).expect("finite");
    let step: Vec<f64> = rotate(v1).iter().map(|c| delta * c).collect();
    let b = a.multiply(&HPoint::new(&step, 0.0).expect("finite"));
    v.proj_vert(&a).point().dist(v.proj_vert(&b).point()) / a.dist(&b)
}

pub const HEIS_DELTAS: [f64; 3] = [1e-2, 1e-3, 1e-4];

pub fn run(args: &ProjectionArgs, th: &Thresholds) -> Result<ExperimentReport> {
    if args.trials == 0 || args.split_trials == 0 {
        bail!("need at least one trial");
    }
    let v = HorizontalSubgroup::coordinate(args.n, args.m)?;
    let k = CoordBox::new(args.n, args.box_scale)?;

    let split_max = (0..args.split_trials as u64)
        .into_par_iter()
        .map(|i| split_residual(&v, args.seed, i))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);

    let ratios: Vec<f64> = (0..10 * args.trials as u64).into_par_iter().map(|i| euclid_ratio(&v, &k, args.seed, i)).collect();
    let sup_n = ratios[..args.trials].iter().copied().fold(0.0, f64::max);
    let sup_10n = ratios.iter().copied().fold(0.0, f64::max);
    let growth = sup_10n / sup_n - 1.0;

    let heis: Vec<f64> = HEIS_DELTAS.iter().map(|&d| heis_ratio(&v, d)).collect();
    let heis_growth = heis[2] / heis[0];

    let mut rep = ExperimentReport::new("projection", args.seed, th);
    rep.param("n", args.n);
    rep.param("m", args.m);
    rep.param("box_scale", args.box_scale);
    rep.param("trials", args.trials);
    rep.param("split_trials", args.split_trials);
    let row = |q: &str, scale: f64, value: f64| record([("quantity", json(q)), ("scale", json(scale)), ("value", json(value))]);
    rep.records.push(row("split_max_residual", args.split_trials as f64, split_max));
    rep.records.push(row("euclidean_sup_ratio", args.trials as f64, sup_n));
    rep.records.push(row("euclidean_sup_ratio", 10.0 * args.trials as f64, sup_10n));
    for (d, r) in HEIS_DELTAS.iter().zip(&heis) {
        rep.records.push(row("heisenberg_ratio", *d, *r));
    }
    rep.stat("euclidean_constant", sup_10n);
    rep.stat("heisenberg_ratio_times_sqrt_delta", heis[2] * HEIS_DELTAS[2].sqrt());
    rep.check(Check::new("split_round_trip", split_max, Relation::AtMost, th.get("split_tol"), "split_tol"));
    rep.check(Check::new("euclidean_sup_growth", growth, Relation::Below, th.get("stabilization"), "stabilization"));
    rep.check(Check::new("heisenberg_ratio_growth", heis_growth, Relation::Above, th.get("growth_factor"), "growth_factor"));
    Ok(rep)
}

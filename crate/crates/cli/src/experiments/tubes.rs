//! Randomized check of the disjoint-tubes estimate: two points on one
//! θ-line of 𝕍⊥ whose r-tubes meet are at most 8r² apart along θ.

use anyhow::{bail, Result};
use heisdistort_core::rng::{gaussian, trial_rng};
use heisdistort_core::subgroups::{HorizontalSubgroup, ThetaDirection};
use heisdistort_core::heis::symplectic;
use heisdistort_core::HPoint;
use rand::Rng;
use rayon::prelude::*;

use crate::report::{json, record, Check, ExperimentReport, Relation};
use crate::thresholds::Thresholds;

#[derive(Debug, Clone)]
pub struct TubesArgs {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub box_scale: f64,
}

/// Data of one trial, in Θ⊥ coordinates.
#[derive(Debug, Clone)]
pub struct TubeCase {
    pub theta: ThetaDirection,
    /// Θ⊥ coordinates of â.
    pub a_hat: Vec<f64>,
    pub t1: f64,
    pub t2: f64,
    /// Coefficients of v₁, v₂ in the basis of V.
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub r: f64,
}

fn on_line(v: &HorizontalSubgroup, c: &TubeCase, t: f64) -> HPoint {
    let mut coords = c.theta.lift(&c.a_hat);
    coords.iter_mut().zip(c.theta.theta()).for_each(|(x, th)| *x += t * th);
    v.vertical_from_coords(&coords).expect("length w").into_point()
}

fn horizontal(v: &HorizontalSubgroup, s: &[f64]) -> HPoint {
    HPoint::new(&v.combine(s), 0.0).expect("finite")
}

/// `‖(a₁*v₁)⁻¹*(a₂*v₂)‖`.
pub fn witness_norm(v: &HorizontalSubgroup, c: &TubeCase) -> f64 {
    let p1 = on_line(v, c, c.t1).multiply(&horizontal(v, &c.v1));
    let p2 = on_line(v, c, c.t2).multiply(&horizontal(v, &c.v2));
    p1.dist(&p2)
}

/// `|π_t(θ)| − |2ω(θ, â + v₁ + v₂)|`, which the cap must keep at least ½.
pub fn cap_margin(v: &HorizontalSubgroup, c: &TubeCase) -> f64 {
    let th = v.vertical_from_coords(c.theta.theta()).expect("length w").into_point();
    let base = on_line(v, c, 0.0);
    let mut x = base.z().to_vec();
    for s in [&c.v1, &c.v2] {
        x.iter_mut().zip(v.combine(s)).for_each(|(a, b)| *a += b);
    }
    th.t().abs() - (2.0 * symplectic(th.z(), &x)).abs()
}

fn sample_theta<R: Rng>(rng: &mut R, w: usize, spread: f64) -> ThetaDirection {
    let mut g: Vec<f64> = (0..w).map(|_| spread * gaussian(rng)).collect();
    g[w - 1] += 1.0;
    ThetaDirection::new(&g).expect("non-zero")
}

const THETA_ATTEMPTS: usize = 1000;

/// Draws one case. Pairs are kept close (Δt and v₂ − v₁ log-uniform down to
/// 10⁻³ of the box) and r is drawn around half the witness norm, so that the
/// overlap hypothesis holds in a good share of trials.
fn sample_case(v: &HorizontalSubgroup, big_r: f64, seed: u64, trial: u64) -> Result<TubeCase> {
    let mut rng = trial_rng(seed, trial);
    let (w, m) = (v.w(), v.m());
    let a_hat: Vec<f64> = (0..w - 1).map(|_| rng.gen_range(-big_r..=big_r)).collect();
    let t1 = rng.gen_range(-big_r * big_r..=big_r * big_r);
    let dt = big_r * big_r * 10f64.powf(rng.gen_range(-3.0..0.0)) * if rng.gen() { 1.0 } else { -1.0 };
    let v1: Vec<f64> = (0..m).map(|_| rng.gen_range(-big_r..=big_r)).collect();
    let dv = big_r * 10f64.powf(rng.gen_range(-3.0..0.0));
    let v2: Vec<f64> = v1.iter().map(|x| x + dv * rng.gen_range(-1.0..=1.0)).collect();
    let spread = 0.1 / (1.0 + big_r * big_r);
    let mut case = TubeCase { theta: sample_theta(&mut rng, w, spread), a_hat, t1, t2: t1 + dt, v1, v2, r: 0.0 };
    let mut tries = 1;
    while cap_margin(v, &case) < 0.5 {
        if tries == THETA_ATTEMPTS {
            bail!("trial {trial}: no direction in the cap after {THETA_ATTEMPTS} draws");
        }
        case.theta = sample_theta(&mut rng, w, spread);
        tries += 1;
    }
    case.r = 0.5 * witness_norm(v, &case) * rng.gen_range(0.6..1.6);
    Ok(case)
}

fn describe(c: &TubeCase) -> String {
    format!(
        "theta={:?} a_hat={:?} t1={} t2={} v1={:?} v2={:?} r={}",
        c.theta.theta(),
        c.a_hat,
        c.t1,
        c.t2,
        c.v1,
        c.v2,
        c.r
    )
}

const MAX_LISTED: usize = 20;

pub fn run(args: &TubesArgs, th: &Thresholds) -> Result<ExperimentReport> {
    if args.trials == 0 {
        bail!("need at least one trial");
    }
    if !(args.box_scale > 0.0 && args.box_scale.is_finite()) {
        bail!("box scale must be positive");
    }
    let v = HorizontalSubgroup::coordinate(args.n, args.m)?;
    let cases: Vec<TubeCase> =
        (0..args.trials as u64).into_par_iter().map(|i| sample_case(&v, args.box_scale, args.seed, i)).collect::<Result<_>>()?;

    let slack = th.get("tubes_slack");
    let mut nonvacuous = 0usize;
    let mut worst = 0.0f64;
    let mut violations = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        if witness_norm(&v, c) >= 2.0 * c.r {
            continue;
        }
        nonvacuous += 1;
        let ratio = (c.t1 - c.t2).abs() / (8.0 * c.r * c.r);
        worst = worst.max(ratio);
        if ratio > 1.0 + slack {
            violations.push((i, ratio));
        }
    }
    let mut rep = ExperimentReport::new("tubes", args.seed, th);
    rep.param("n", args.n);
    rep.param("m", args.m);
    rep.param("trials", args.trials);
    rep.param("box_scale", args.box_scale);
    for &(i, ratio) in violations.iter().take(MAX_LISTED) {
        rep.records.push(record([("trial", json(i)), ("ratio", json(ratio)), ("case", json(describe(&cases[i])))]));
    }
    let fraction = nonvacuous as f64 / args.trials as f64;
    rep.stat("nonvacuous", nonvacuous);
    rep.stat("vacuous", args.trials - nonvacuous);
    rep.stat("violations", violations.len());
    rep.stat("max_gap_over_8r2", worst);
    rep.check(Check::new("max |t1-t2|/(8r^2)", worst, Relation::AtMost, 1.0 + slack, "tubes_slack"));
    rep.check(Check::new("nonvacuous_fraction", fraction, Relation::AtLeast, th.get("min_nonvacuous"), "min_nonvacuous"));
    Ok(rep)
}

//! Randomized group-law and gauge invariants.

use anyhow::{bail, Result};
use heisdistort_core::rng::trial_rng;
use heisdistort_core::{GroupDim, HPoint};
use rand::Rng;
use rayon::prelude::*;

use crate::report::{json, record, Check, ExperimentReport, Relation};
use crate::thresholds::Thresholds;

/// A candidate group law. The suite only ever multiplies through this.
pub type Law = fn(&HPoint, &HPoint) -> HPoint;

pub fn standard_law(a: &HPoint, b: &HPoint) -> HPoint {
    a.multiply(b)
}

/// The standard law plus `(x₁x₁′)²` in the vertical coordinate; not associative.
pub fn corrupted_law(a: &HPoint, b: &HPoint) -> HPoint {
    let p = a.multiply(b);
    let bump = (a.z()[0] * b.z()[0]).powi(2);
    HPoint::new(p.z(), p.t() + bump).expect("finite")
}

#[derive(Debug, Clone)]
pub struct AxiomsArgs {
    /// Fixed group parameter, or `None` to cycle through n = 1, 2, 3.
    pub n: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub law: Law,
}

const INVARIANTS: [(&str, &str); 7] = [
    ("associativity", "assoc_tol"),
    ("left_invariance", "left_invariance_tol"),
    ("homogeneity", "homogeneity_tol"),
    ("dilation_homomorphism", "dilation_hom_tol"),
    ("inverse", "inverse_tol"),
    ("gauge_symmetry", "symmetry_tol"),
    ("triangle", "triangle_slack"),
];

/// Coordinates in `[−R, R]^{2n} × [−R², R²]`.
fn point<R: Rng>(rng: &mut R, n: usize, r: f64) -> HPoint {
    let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-r..=r)).collect();
    HPoint::new(&z, rng.gen_range(-r * r..=r * r)).expect("finite")
}

fn sup_diff(a: &HPoint, b: &HPoint) -> f64 {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct Trial {
    n: usize,
    residuals: [f64; 7],
    points: [HPoint; 4],
    r: f64,
}

fn run_trial(law: Law, n: usize, seed: u64, index: u64) -> Trial {
    let mut rng = trial_rng(seed, index);
    let scale = 10f64.powf(rng.gen_range(-1.0..1.0));
    let (a, b, c, g) = (point(&mut rng, n, scale), point(&mut rng, n, scale), point(&mut rng, n, scale), point(&mut rng, n, scale));
    let r = 10f64.powf(rng.gen_range(-2.0..2.0));
    let dist = |p: &HPoint, q: &HPoint| law(&p.inverse(), q).norm();
    let size = |p: &HPoint| p.sup_norm().max(1.0);

    let ab_c = law(&law(&a, &b), &c);
    let a_bc = law(&a, &law(&b, &c));
    let scale2 = [&a, &b, &c].iter().map(|p| size(p)).fold(1.0, f64::max).powi(2);
    let assoc = sup_diff(&ab_c, &a_bc) / scale2;

    let dab = dist(&a, &b);
    let left = (dist(&law(&g, &a), &law(&g, &b)) - dab).abs() / dab;

    let da = a.dilate(r).expect("r > 0");
    let homog = (da.norm() - r * a.norm()).abs() / (r * a.norm());

    let lhs = law(&a, &b).dilate(r).expect("r > 0");
    let rhs = law(&da, &b.dilate(r).expect("r > 0"));
    let dil = sup_diff(&lhs, &rhs) / size(&lhs);

    let inv = sup_diff(&law(&a, &a.inverse()), &HPoint::identity(a.dim())) / scale2;
    let sym = (a.inverse().norm() - a.norm()).abs() / a.norm();
    let (dbc, dac) = (dist(&b, &c), dist(&a, &c));
    let tri = (dac - dab - dbc).max(0.0) / (1.0 + dab + dbc);

    Trial { n, residuals: [assoc, left, homog, dil, inv, sym, tri], points: [a, b, c, g], r }
}

pub fn run(args: &AxiomsArgs, th: &Thresholds) -> Result<ExperimentReport> {
    if args.trials == 0 {
        bail!("need at least one trial");
    }
    if let Some(n) = args.n {
        GroupDim::new(n)?;
    }
    let trials: Vec<Trial> = (0..args.trials as u64)
        .into_par_iter()
        .map(|i| {
            let n = args.n.unwrap_or(1 + (i % 3) as usize);
            run_trial(args.law, n, args.seed, i)
        })
        .collect();

    let mut rep = ExperimentReport::new("axioms", args.seed, th);
    rep.param("n", args.n.map_or(json("1,2,3"), json));
    rep.param("trials", args.trials);
    for (k, (name, key)) in INVARIANTS.iter().enumerate() {
        let tol = th.get(key);
        let mut max = 0.0f64;
        let mut violations = 0usize;
        let mut first: Option<usize> = None;
        for (i, t) in trials.iter().enumerate() {
            let res = t.residuals[k];
            if !(res <= tol) {
                violations += 1;
                first.get_or_insert(i);
            }
            if res.is_nan() {
                max = f64::NAN;
            } else if !max.is_nan() {
                max = max.max(res);
            }
        }
        let mut rec = record([("invariant", json(name)), ("max_residual", json(max)), ("violations", json(violations))]);
        if let Some(i) = first {
            let t = &trials[i];
            rec.insert("trial".into(), json(i));
            rec.insert("n_group".into(), json(t.n));
            rec.insert("counterexample".into(), json(counterexample(t)));
        }
        rep.records.push(rec);
        rep.stat(&format!("{name}_max_residual"), max);
        rep.check(Check::new(*name, max, Relation::AtMost, tol, key));
    }
    Ok(rep)
}

fn counterexample(t: &Trial) -> String {
    let [a, b, c, g] = &t.points;
    format!("a={:?} b={:?} c={:?} g={:?} r={}", a.coords(), b.coords(), c.coords(), g.coords(), t.r)
}

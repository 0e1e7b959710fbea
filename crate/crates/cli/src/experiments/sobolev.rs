//! Level-by-level Sobolev norms of the random map.

use anyhow::{bail, Result};
use heisdistort_core::construction::{build_map, level_sobolev_norm, make_params, single_ball_sobolev};

use crate::report::{json, record, Check, ExperimentReport, Relation};
use crate::thresholds::Thresholds;

#[derive(Debug, Clone)]
pub struct SobolevArgs {
    pub p: f64,
    pub alpha: f64,
    pub depth: u32,
    pub mc_samples: usize,
    pub seed: u64,
}

pub fn level_norms(args: &SobolevArgs) -> Result<Vec<f64>> {
    let params = make_params(args.p, args.alpha, args.depth, 2)?;
    let map = build_map(&params, args.seed);
    (1..=args.depth).map(|m| Ok(level_sobolev_norm(&map, m, args.mc_samples, args.p)?)).collect()
}

pub fn run(args: &SobolevArgs, th: &Thresholds) -> Result<ExperimentReport> {
    if args.mc_samples == 0 {
        bail!("need at least one Monte-Carlo sample");
    }
    let params = make_params(args.p, args.alpha, args.depth, 2)?;
    let map = build_map(&params, args.seed);
    let norms = level_norms(args)?;

    let mut rep = ExperimentReport::new("sobolev", args.seed, th);
    rep.param("p", args.p);
    rep.param("alpha", args.alpha);
    rep.param("depth", args.depth);
    rep.param("mc_samples", args.mc_samples);
    rep.param("sigma", params.sigma);
    rep.param("beta", params.beta_c);
    for (k, norm) in norms.iter().enumerate() {
        let m = k as u32 + 1;
        let ratio = if k == 0 { None } else { Some(norm / norms[k - 1]) };
        rep.records.push(record([
            ("level", json(m)),
            ("balls", json(map.ball_count(m))),
            ("single_ball", json(single_ball_sobolev(&params, m, args.mc_samples, args.p, args.seed))),
            ("level_norm", json(norm)),
            ("ratio_to_previous", json(ratio)),
        ]));
    }
    rep.stat("total", norms.iter().sum::<f64>());
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.is_empty() {
        rep.notes.push("single level: no consecutive ratio to check".into());
    } else {
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rep.stat("min_ratio", lo);
        rep.stat("max_ratio", hi);
        rep.check(Check::new("min consecutive ratio", lo, Relation::AtLeast, th.get("ratio_lo"), "ratio_lo"));
        rep.check(Check::new("max consecutive ratio", hi, Relation::AtMost, th.get("ratio_hi"), "ratio_hi"));
    }
    Ok(rep)
}

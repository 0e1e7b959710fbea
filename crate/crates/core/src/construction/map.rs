use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ifs::{cells_meeting, words, Word};
use super::net::{level_ball_count, net_indices, LatticeIndex, LevelLattice};
use super::params::IFSParams;
use crate::error::{domain, Result};
use crate::heis::HPoint;
use crate::rng::{ball_rng, trial_rng, unit_ball};

/// Lebesgue volume `π²/2` of the unit Korányi ball of ℍ¹.
pub const UNIT_BALL_VOLUME: f64 = std::f64::consts::PI * std::f64::consts::PI / 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BumpBall {
    pub center: HPoint,
    pub radius: f64,
    pub level: u32,
    pub xi: Vec<f64>,
    pub index: LatticeIndex,
}

fn tent(ratio: f64) -> f64 {
    (2.0 - ratio).clamp(0.0, 1.0)
}

/// `clamp(2 − d(q, c)/r, 0, 1)`: 1 on the closed ball, 0 off the double ball.
pub fn bump(ball: &BumpBall, q: &HPoint) -> f64 {
    tent(q.dist(&ball.center) / ball.radius)
}

/// The random map, determined by its parameters and seed. Balls and their
/// vectors are produced on demand: ball `(level, i, j, k)` draws its vector
/// from the stream [`ball_rng`]`(seed, level, i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMap {
    params: IFSParams,
    seed: u64,
}

pub fn build_map(params: &IFSParams, seed: u64) -> RandomMap {
    RandomMap { params: *params, seed }
}

impl RandomMap {
    pub fn params(&self) -> &IFSParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lattice(&self, level: u32) -> LevelLattice {
        LevelLattice::new(&self.params, level)
    }

    pub fn xi(&self, level: u32, idx: LatticeIndex) -> Vec<f64> {
        unit_ball(&mut ball_rng(self.seed, level, idx.0, idx.1, idx.2), self.params.target_n)
    }

    /// Smallest word index whose column the tile of `idx` meets.
    pub fn owner(&self, level: u32, idx: LatticeIndex) -> Option<u64> {
        let lat = self.lattice(level);
        let (y0, y1, t0, t1) = lat.tile_box(idx);
        cells_meeting(&self.params, level, y0, y1, t0, t1)
            .into_iter()
            .find(|(_, c)| lat.tile_meets(idx, c))
            .map(|(w, _)| w)
    }

    pub fn ball(&self, level: u32, idx: LatticeIndex) -> BumpBall {
        let lat = self.lattice(level);
        BumpBall { center: lat.point(idx), radius: lat.h, level, xi: self.xi(level, idx), index: idx }
    }

    /// Level-`level` balls whose double ball contains `q`, with `d(q, center)`.
    pub fn balls_near(&self, level: u32, q: &HPoint) -> Vec<(LatticeIndex, f64)> {
        let lat = self.lattice(level);
        let irange = lat.i_range();
        let mut cand = lat.near(q, 2.0);
        cand.retain(|(idx, _)| irange.contains(&idx.0));
        if cand.is_empty() {
            return cand;
        }
        let mut bx = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (idx, _) in &cand {
            let b = lat.tile_box(*idx);
            bx = (bx.0.min(b.0), bx.1.max(b.1), bx.2.min(b.2), bx.3.max(b.3));
        }
        let cells = cells_meeting(&self.params, level, bx.0, bx.1, bx.2, bx.3);
        cand.retain(|(idx, _)| cells.iter().any(|(_, c)| lat.tile_meets(*idx, c)));
        cand
    }

    /// Number of level-`level` balls with `ψ_B(q) > 0`.
    pub fn overlap(&self, level: u32, q: &HPoint) -> usize {
        self.balls_near(level, q).len()
    }

    /// `Σ_B σ^{m/α} ψ_B(q) ξ_B` over level-m balls.
    pub fn level_value(&self, level: u32, q: &HPoint) -> Vec<f64> {
        let mut out = vec![0.0; self.params.target_n];
        let h = self.params.radius(level);
        let amp = self.params.sigma.powf(level as f64 / self.params.alpha);
        for (idx, d) in self.balls_near(level, q) {
            let w = amp * tent(d / h);
            if w > 0.0 {
                for (o, x) in out.iter_mut().zip(self.xi(level, idx)) {
                    *o += w * x;
                }
            }
        }
        out
    }

    pub fn ball_count(&self, level: u32) -> u64 {
        level_ball_count(&self.params, level)
    }

    /// All level-`level` balls in canonical order: by owning word, then
    /// lattice order. Fails if there are more than `limit`.
    pub fn level_balls(&self, level: u32, limit: u64) -> Result<Vec<BumpBall>> {
        let count = self.ball_count(level);
        if count > limit {
            return Err(domain(format!("level {level} has {count} balls, above the limit {limit}")));
        }
        let all: Vec<Word> = words(level).collect();
        let per_word: Vec<Vec<BumpBall>> = all
            .par_iter()
            .map(|w| {
                let me = w.index();
                net_indices(w, &self.params)
                    .into_iter()
                    .filter(|&idx| self.owner(level, idx) == Some(me))
                    .map(|idx| self.ball(level, idx))
                    .collect()
            })
            .collect();
        Ok(per_word.into_iter().flatten().collect())
    }
}

/// `Σ_m (1+m)^{−2} f_{ξ,m}(q)` over levels `1..=depth`.
pub fn eval_map(map: &RandomMap, q: &HPoint) -> Vec<f64> {
    let mut out = vec![0.0; map.params.target_n];
    for level in 1..=map.params.depth {
        let w = (1.0 + level as f64).powi(-2);
        for (o, x) in out.iter_mut().zip(map.level_value(level, q)) {
            *o += w * x;
        }
    }
    out
}

/// Monte-Carlo volume of the unit Korányi ball, sampled in `[−1, 1]³`.
pub fn unit_ball_volume_mc(samples: usize, seed: u64, stream: u64) -> f64 {
    let mut rng = trial_rng(seed, stream);
    let mut hits = 0usize;
    for _ in 0..samples {
        let (x, y, t): (f64, f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r2 = x * x + y * y;
        if r2 * r2 + t * t < 1.0 {
            hits += 1;
        }
    }
    8.0 * hits as f64 / samples as f64
}

const SOBOLEV_STREAM: u64 = 1 << 32;

/// `(σ^{m/α}/σᵐ)^p · |B(0, 2σᵐ)|` with the ball volume estimated by Monte Carlo.
pub fn single_ball_sobolev(params: &IFSParams, level: u32, mc_samples: usize, p: f64, seed: u64) -> f64 {
    let h = params.radius(level);
    let lip = params.sigma.powf(level as f64 / params.alpha) / h;
    let vol = unit_ball_volume_mc(mc_samples, seed, SOBOLEV_STREAM + u64::from(level)) * (2.0 * h).powi(4);
    lip.powf(p) * vol
}

/// Level-m total `Σ_B ∫_{2B} (σ^{m/α}/σᵐ)^p`.
pub fn level_sobolev_norm(map: &RandomMap, level: u32, mc_samples: usize, p: f64) -> Result<f64> {
    if level == 0 || level > map.params.depth {
        return Err(domain(format!("level {level} outside 1..={}", map.params.depth)));
    }
    let one = single_ball_sobolev(&map.params, level, mc_samples, p, map.seed);
    Ok(map.ball_count(level) as f64 * one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::make_params;

    fn quarter(depth: u32) -> IFSParams {
        make_params(6.0, 1.2, depth, 2).unwrap()
    }

    fn brute_eval(balls: &[BumpBall], params: &IFSParams, q: &HPoint) -> Vec<f64> {
        let mut out = vec![0.0; params.target_n];
        for b in balls {
            let w = params.level_weight(b.level) * bump(b, q);
            for (o, x) in out.iter_mut().zip(&b.xi) {
                *o += w * x;
            }
        }
        out
    }

    #[test]
    fn bump_profile() {
        let b = BumpBall { center: HPoint::h1(0.0, 0.0, 0.0), radius: 0.5, level: 1, xi: vec![1.0, 0.0], index: (0, 0, 0) };
        assert_eq!(bump(&b, &b.center), 1.0);
        assert_eq!(bump(&b, &HPoint::h1(1.0, 0.0, 0.0)), 0.0);
        assert_eq!(bump(&b, &HPoint::h1(0.75, 0.0, 0.0)), 0.5);
        assert_eq!(bump(&b, &HPoint::h1(0.5, 0.0, 0.0)), 1.0);
    }

    #[test]
    fn lazy_eval_matches_materialized_sum() {
        let q = quarter(2);
        let map = build_map(&q, 17);
        let mut balls = map.level_balls(1, 1 << 20).unwrap();
        balls.extend(map.level_balls(2, 1 << 20).unwrap());
        assert_eq!(balls.len() as u64, map.ball_count(1) + map.ball_count(2));
        let mut rng = trial_rng(4, 4);
        for _ in 0..300 {
            let pt = HPoint::h1(rng.gen_range(-0.3..1.3), rng.gen_range(-0.3..1.3), rng.gen_range(-1.5..2.5));
            let (a, b) = (eval_map(&map, &pt), brute_eval(&balls, &q, &pt));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn center_evaluation_single_level() {
        let q = quarter(1);
        let map = build_map(&q, 5);
        let balls = map.level_balls(1, 1 << 20).unwrap();
        let b = &balls[balls.len() / 2];
        let got = eval_map(&map, &b.center);
        let own = brute_eval(std::slice::from_ref(b), &q, &b.center);
        let rest: Vec<BumpBall> = balls.iter().filter(|c| c.index != b.index).cloned().collect();
        let others = brute_eval(&rest, &q, &b.center);
        for k in 0..2 {
            assert!((own[k] - q.level_weight(1) * b.xi[k]).abs() < 1e-15);
            assert!((got[k] - own[k] - others[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn far_points_map_to_zero() {
        let map = build_map(&quarter(3), 1);
        for q in [HPoint::h1(0.0, -0.5, -0.5), HPoint::h1(5.0, 0.5, 0.5), HPoint::h1(0.5, 0.5, 40.0)] {
            assert_eq!(eval_map(&map, &q), vec![0.0, 0.0]);
        }
    }

    #[test]
    fn vectors_are_deterministic_and_bounded() {
        let a = build_map(&quarter(2), 3).level_balls(2, 1 << 20).unwrap();
        let b = build_map(&quarter(2), 3).level_balls(2, 1 << 20).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.xi.iter().map(|c| c * c).sum::<f64>() <= 1.0));
        assert!(a.iter().all(|x| x.radius == 0.0625 && x.level == 2));
        let c = build_map(&quarter(2), 4).level_balls(2, 1 << 20).unwrap();
        assert_ne!(a[0].xi, c[0].xi);
    }

    #[test]
    fn value_bounded_by_overlap() {
        let q = quarter(3);
        let map = build_map(&q, 9);
        let mut rng = trial_rng(6, 0);
        for _ in 0..300 {
            let pt = HPoint::h1(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(-1.0..2.0));
            let bound: f64 = (1..=3).map(|m| q.level_weight(m) * map.overlap(m, &pt) as f64).sum();
            let v = eval_map(&map, &pt);
            assert!(v.iter().map(|c| c * c).sum::<f64>().sqrt() <= bound + 1e-12);
        }
    }

    #[test]
    fn ball_volume_estimates() {
        let v = unit_ball_volume_mc(200_000, 1, 0);
        assert!((v - UNIT_BALL_VOLUME).abs() / UNIT_BALL_VOLUME < 0.01);
        let q = quarter(2);
        let exact = (q.sigma.powf(2.0 / q.alpha) / q.radius(2)).powf(3.5) * UNIT_BALL_VOLUME * (2.0 * q.radius(2)).powi(4);
        let mc = single_ball_sobolev(&q, 2, 100_000, 3.5, 7);
        assert!((mc - exact).abs() / exact < 0.05);
    }

    #[test]
    fn sobolev_levels_are_uniform() {
        let q = quarter(4);
        let map = build_map(&q, 2);
        let v: Vec<f64> = (1..=4).map(|m| level_sobolev_norm(&map, m, 50_000, 6.0).unwrap()).collect();
        for w in v.windows(2) {
            let r = w[1] / w[0];
            assert!((0.1..=10.0).contains(&r), "{v:?}");
        }
        assert!(level_sobolev_norm(&map, 5, 10, 6.0).is_err());
    }
}

//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha::ChaCha8Rng`), so any
//! ChaCha8 implementation can replay them:
//!
//! * trial streams: key = `seed` expanded by `seed_from_u64`, stream id = trial index;
//! * ball streams: key = little-endian `(seed, level, i, j)` as four u64 words,
//!   stream id = `k` reinterpreted as u64.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn ball_rng(seed: u64, level: u32, i: i64, j: i64, k: i64) -> Stream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&u64::from(level).to_le_bytes());
    key[16..24].copy_from_slice(&i.to_le_bytes());
    key[24..].copy_from_slice(&j.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(k as u64);
    rng
}

/// Uniform point of the closed unit ball of ℝᴺ by rejection from the cube.
pub fn unit_ball<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

/// Standard normal deviate (Box–Muller).
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

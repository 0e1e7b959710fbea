use serde::Serialize;

use crate::bounds::construction_beta;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IFSParams {
    pub p: f64,
    pub alpha: f64,
    pub beta_c: f64,
    pub sigma: f64,
    pub target_n: usize,
    pub depth: u32,
}

/// `β = 2 − p(1 − 1/α)` and the ratio σ solving `4σ^β = 1`.
pub fn make_params(p: f64, alpha: f64, depth: u32, target_n: usize) -> Result<IFSParams> {
    let beta_c = construction_beta(p, alpha)?;
    if depth == 0 {
        return Err(domain("depth must be at least 1"));
    }
    if target_n == 0 {
        return Err(domain("target dimension must be at least 1"));
    }
    let raw = 4f64.powf(-1.0 / beta_c);
    // A short dyadic σ keeps lattice coordinates exact in binary.
    let dyadic = (raw * 1048576.0).round() / 1048576.0;
    let sigma = if (4.0 * dyadic.powf(beta_c) - 1.0).abs() <= 1e-13 { dyadic } else { raw };
    if (4.0 * sigma.powf(beta_c) - 1.0).abs() > 1e-12 {
        return Err(domain(format!("4σ^β = 1 not attained for β = {beta_c}")));
    }
    Ok(IFSParams { p, alpha, beta_c, sigma, target_n, depth })
}

impl IFSParams {
    /// Radius `σᵐ` of level-m balls.
    pub fn radius(&self, level: u32) -> f64 {
        self.sigma.powi(level as i32)
    }

    /// Amplitude `(1+m)^{−2} σ^{m/α}` of level m in the summed map.
    pub fn level_weight(&self, level: u32) -> f64 {
        let m = level as f64;
        (1.0 + m).powi(-2) * self.sigma.powf(m / self.alpha)
    }
}

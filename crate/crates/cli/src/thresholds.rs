//! The committed threshold table, embedded at build time.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Result};
use serde::Serialize;

use crate::config::parse_kv;

pub const DEFAULTS: &str = include_str!("../defaults/thresholds.txt");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    pub version: u32,
    values: BTreeMap<String, f64>,
}

const KEYS: &[&str] = &[
    "assoc_tol",
    "left_invariance_tol",
    "homogeneity_tol",
    "dilation_hom_tol",
    "inverse_tol",
    "symmetry_tol",
    "triangle_slack",
    "split_tol",
    "stabilization",
    "growth_factor",
    "tubes_slack",
    "min_nonvacuous",
    "dim_tolerance",
    "t_axis_tolerance",
    "riesz_tolerance",
    "ratio_lo",
    "ratio_hi",
    "count_factor",
    "overlap_bound",
    "distort_median",
    "distort_rmax_fraction",
    "distort_rmin_spacing",
    "distort_levels",
    "distort_energy_offset",
    "dominance_slack",
];

impl Thresholds {
    /// Parses a table; every known key must be present and no other.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = parse_kv(text)?;
        let version = raw.remove("version").ok_or_else(|| anyhow!("thresholds: missing version"))?.parse()?;
        let mut values = BTreeMap::new();
        for (k, v) in raw {
            if !KEYS.contains(&k.as_str()) {
                bail!("thresholds: unknown key {k}");
            }
            let x: f64 = v.parse().map_err(|e| anyhow!("thresholds: {k}: {e}"))?;
            if !x.is_finite() {
                bail!("thresholds: {k} is not finite");
            }
            values.insert(k, x);
        }
        if let Some(k) = KEYS.iter().find(|k| !values.contains_key(**k)) {
            bail!("thresholds: missing {k}");
        }
        Ok(Thresholds { version, values })
    }

    pub fn defaults() -> Self {
        Self::parse(DEFAULTS).expect("embedded thresholds are valid")
    }

    pub fn get(&self, key: &str) -> f64 {
        *self.values.get(key).unwrap_or_else(|| panic!("unknown threshold {key}"))
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }
}

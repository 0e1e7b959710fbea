//! Closed-form dimension-distortion bounds.
//!
//! All evaluators validate their domain and return [`Error::Domain`] instead of
//! clamping. Curves for plotting are produced by [`sample_curve`].

use serde::Serialize;

use crate::error::{domain, Result};

/// How strictly the exponent `p` is checked against its critical value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    /// `p` strictly above the critical exponent.
    Open,
    /// Also accepts `p` equal to the critical exponent, where the formula is
    /// still well defined (used for plotting at the boundary).
    Closure,
}

impl Admissibility {
    fn check_p(self, p: f64, critical: f64, what: &str) -> Result<()> {
        let ok = match self {
            Admissibility::Open => p > critical,
            Admissibility::Closure => p >= critical,
        };
        if !ok || !p.is_finite() {
            let rel = if self == Admissibility::Open { ">" } else { "≥" };
            return Err(domain(format!("{what}: need p {rel} {critical}, got p = {p}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQuery {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub alpha: f64,
}

/// Interval of admissible α with openness flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    fn contains(&self, a: f64) -> bool {
        let above = if self.lo_open { a > self.lo } else { a >= self.lo };
        let below = if self.hi_open { a < self.hi } else { a <= self.hi };
        above && below
    }

    fn check(&self, a: f64, what: &str) -> Result<()> {
        if !self.contains(a) {
            let l = if self.lo_open { '(' } else { '[' };
            let r = if self.hi_open { ')' } else { ']' };
            return Err(domain(format!("{what}: α = {a} outside {l}{}, {}{r}", self.lo, self.hi)));
        }
        Ok(())
    }
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || m > n {
        return Err(domain(format!("need 1 ≤ m ≤ n, got n = {n}, m = {m}")));
    }
    Ok(())
}

/// Bifurcation point `pm/(p−2)` of the Heisenberg bound.
pub fn knot(m: usize, p: f64) -> f64 {
    p * m as f64 / (p - 2.0)
}

fn main_interval(n: usize, m: usize, p: f64, adm: Admissibility) -> Result<Interval> {
    check_nm(n, m)?;
    let q = (2 * n + 2) as f64;
    adm.check_p(p, q, "Heisenberg bound")?;
    let mf = m as f64;
    Ok(Interval { lo: mf, hi: p * mf / (p - (q - mf)), lo_open: false, hi_open: false })
}

fn main_value(n: usize, m: usize, p: f64, alpha: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    if alpha <= knot(m, p) {
        (2.0 * nf + 1.0 - mf) - 0.5 * p * (1.0 - mf / alpha)
    } else {
        (2.0 * nf + 2.0 - mf) - p * (1.0 - mf / alpha)
    }
}

/// The two branches of the Heisenberg bound evaluated at the same α.
pub fn main_branches(n: usize, m: usize, p: f64, alpha: f64) -> (f64, f64) {
    let (nf, mf) = (n as f64, m as f64);
    (
        (2.0 * nf + 1.0 - mf) - 0.5 * p * (1.0 - mf / alpha),
        (2.0 * nf + 2.0 - mf) - p * (1.0 - mf / alpha),
    )
}

/// Heisenberg exceptional-set bound for left cosets of an m-dimensional
/// horizontal subgroup.
pub fn beta_main(q: &BoundQuery) -> Result<f64> {
    let iv = main_interval(q.n, q.m, q.p, Admissibility::Open)?;
    iv.check(q.alpha, "Heisenberg bound")?;
    Ok(main_value(q.n, q.m, q.p, q.alpha))
}

fn eucl_interval(n: usize, m: usize, p: f64) -> Result<Interval> {
    check_nm(n, m)?;
    Admissibility::Open.check_p(p, n as f64, "Euclidean bound")?;
    let mf = m as f64;
    Ok(Interval { lo: mf, hi: p * mf / (p - (n - m) as f64), lo_open: false, hi_open: false })
}

/// Euclidean exceptional-set bound `(n−m) − p(1 − m/α)`.
pub fn beta_euclidean(n: usize, m: usize, p: f64, alpha: f64) -> Result<f64> {
    eucl_interval(n, m, p)?.check(alpha, "Euclidean bound")?;
    Ok((n - m) as f64 - p * (1.0 - m as f64 / alpha))
}

/// Universal image-dimension bound `ps/(p − (2n+2−s))`.
pub fn universal_alpha_heis(n: usize, p: f64, s: f64) -> Result<f64> {
    check_nm(n, 1)?;
    let q = (2 * n + 2) as f64;
    Admissibility::Open.check_p(p, q, "Heisenberg universal bound")?;
    if !(0.0..q).contains(&s) {
        return Err(domain(format!("need 0 ≤ s < {q}, got s = {s}")));
    }
    Ok(p * s / (p - (q - s)))
}

/// Universal image-dimension bound `ps/(p − (n−s))`.
pub fn universal_alpha_eucl(n: usize, p: f64, s: f64) -> Result<f64> {
    check_nm(n, 1)?;
    let nf = n as f64;
    Admissibility::Open.check_p(p, nf, "Euclidean universal bound")?;
    if !(0.0..nf).contains(&s) {
        return Err(domain(format!("need 0 ≤ s < {nf}, got s = {s}")));
    }
    Ok(p * s / (p - (nf - s)))
}

fn foliation_interval(q: f64, s: f64, p: f64, adm: Admissibility) -> Result<Interval> {
    if !(s > 0.0 && s < q) {
        return Err(domain(format!("foliation bound: need 0 < s < Q, got s = {s}, Q = {q}")));
    }
    adm.check_p(p, q, "foliation bound")?;
    Ok(Interval { lo: s, hi: p * s / (p - q + s), lo_open: true, hi_open: false })
}

/// Foliation bound `(Q−s) − p(1 − s/α)`.
pub fn beta_foliation(q: f64, s: f64, p: f64, alpha: f64) -> Result<f64> {
    foliation_interval(q, s, p, Admissibility::Open)?.check(alpha, "foliation bound")?;
    Ok((q - s) - p * (1.0 - s / alpha))
}

fn construction_interval(p: f64) -> Result<Interval> {
    Admissibility::Open.check_p(p, 4.0, "construction")?;
    Ok(Interval { lo: 1.0, hi: p / (p - 2.0), lo_open: true, hi_open: true })
}

/// Dimension `2 − p(1 − 1/α)` of the four-corner set used by the construction.
pub fn construction_beta(p: f64, alpha: f64) -> Result<f64> {
    construction_interval(p)?.check(alpha, "construction")?;
    Ok(2.0 - p * (1.0 - 1.0 / alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "formula", rename_all = "lowercase")]
pub enum Formula {
    Main { n: usize, m: usize, p: f64 },
    Euclidean { n: usize, m: usize, p: f64 },
    Foliation { q: f64, s: f64, p: f64 },
    Construction { p: f64 },
}

impl Formula {
    pub fn id(&self) -> &'static str {
        match self {
            Formula::Main { .. } => "main",
            Formula::Euclidean { .. } => "euclidean",
            Formula::Foliation { .. } => "foliation",
            Formula::Construction { .. } => "construction",
        }
    }

    pub fn domain(&self, adm: Admissibility) -> Result<Interval> {
        match *self {
            Formula::Main { n, m, p } => main_interval(n, m, p, adm),
            Formula::Euclidean { n, m, p } => eucl_interval(n, m, p),
            Formula::Foliation { q, s, p } => foliation_interval(q, s, p, adm),
            Formula::Construction { p } => construction_interval(p),
        }
    }

    pub fn knot(&self) -> Option<f64> {
        match *self {
            Formula::Main { m, p, .. } => Some(knot(m, p)),
            _ => None,
        }
    }

    /// The closed-form expression, without domain checks; at an open endpoint
    /// this is the one-sided limit.
    pub fn value(&self, alpha: f64) -> f64 {
        match *self {
            Formula::Main { n, m, p } => main_value(n, m, p, alpha),
            Formula::Euclidean { n, m, p } => (n - m) as f64 - p * (1.0 - m as f64 / alpha),
            Formula::Foliation { q, s, p } => (q - s) - p * (1.0 - s / alpha),
            Formula::Construction { p } => 2.0 - p * (1.0 - 1.0 / alpha),
        }
    }

    pub fn eval(&self, alpha: f64, adm: Admissibility) -> Result<f64> {
        self.domain(adm)?.check(alpha, self.id())?;
        Ok(self.value(alpha))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    pub formula: Formula,
    pub admissibility: Admissibility,
    pub domain: Interval,
    pub knot: Option<f64>,
    /// `(α, β)` pairs; endpoints of open intervals carry limit values.
    pub points: Vec<(f64, f64)>,
}

/// `count` evenly spaced α over the closure of the formula's domain, with the
/// bifurcation point inserted exactly.
pub fn sample_curve(formula: Formula, count: usize, adm: Admissibility) -> Result<CurveSeries> {
    let iv = formula.domain(adm)?;
    sample_curve_on(formula, iv.lo, iv.hi, count, adm)
}

/// Like [`sample_curve`] on a sub-interval `[lo, hi]` of the domain's closure.
pub fn sample_curve_on(formula: Formula, lo: f64, hi: f64, count: usize, adm: Admissibility) -> Result<CurveSeries> {
    let iv = formula.domain(adm)?;
    if count < 2 {
        return Err(domain("a curve needs at least 2 points"));
    }
    if !(lo < hi) || lo < iv.lo || hi > iv.hi {
        return Err(domain(format!("sub-interval [{lo}, {hi}] not inside [{}, {}]", iv.lo, iv.hi)));
    }
    let mut alphas: Vec<f64> = (0..count)
        .map(|k| if k + 1 == count { hi } else { lo + (hi - lo) * k as f64 / (count - 1) as f64 })
        .collect();
    let knot = formula.knot().filter(|&k| k >= lo && k <= hi);
    if let Some(k) = knot {
        let pos = alphas.partition_point(|&a| a < k);
        let near = |i: usize| alphas.get(i).map_or(false, |&a| (a - k).abs() <= 1e-12 * k.abs().max(1.0));
        if near(pos) {
            alphas[pos] = k;
        } else if pos > 0 && near(pos - 1) {
            alphas[pos - 1] = k;
        } else {
            alphas.insert(pos, k);
        }
    }
    let points = alphas.into_iter().map(|a| (a, formula.value(a))).collect();
    Ok(CurveSeries { formula, admissibility: adm, domain: iv, knot, points })
}

/// Heisenberg bound over its whole domain.
pub fn figure1(n: usize, m: usize, p: f64, count: usize) -> Result<Vec<CurveSeries>> {
    Ok(vec![sample_curve(Formula::Main { n, m, p }, count, Admissibility::Open)?])
}

/// Heisenberg bound for n = m = 1 and the four-corner dimension, both over
/// `[1, p/(p−2)]`.
pub fn figure2(p: f64, count: usize) -> Result<Vec<CurveSeries>> {
    let hi = p / (p - 2.0);
    let main = Formula::Main { n: 1, m: 1, p };
    let cons = Formula::Construction { p };
    Ok(vec![
        sample_curve_on(main, 1.0, hi, count, Admissibility::Open)?,
        sample_curve(cons, count, Admissibility::Open)?,
    ])
}

/// Heisenberg bound against the foliation bound with `Q = 2n+2`, `s = m+1`.
/// The exponent may sit on the critical value, as in the usual illustration.
pub fn figure3(n: usize, m: usize, p: f64, count: usize) -> Result<Vec<CurveSeries>> {
    let q = (2 * n + 2) as f64;
    let s = (m + 1) as f64;
    Ok(vec![
        sample_curve(Formula::Main { n, m, p }, count, Admissibility::Closure)?,
        sample_curve(Formula::Foliation { q, s, p }, count, Admissibility::Closure)?,
    ])
}

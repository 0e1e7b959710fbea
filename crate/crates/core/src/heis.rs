//! Arithmetic of ℍⁿ = ℝ²ⁿ × ℝ.
//!
//! Points are stored as `z = (x₁, y₁, …, xₙ, yₙ)` together with the height `t`.
//! The product is `(z, t)·(z′, t′) = (z + z′, t + t′ + 2ω(z, z′))` and the
//! identity is the origin.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{domain, Error, Result};

pub type Coords = SmallVec<[f64; 4]>;

/// The ambient dimension parameter `n` of ℍⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDim(usize);

impl GroupDim {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("n must be at least 1"));
        }
        Ok(GroupDim(n))
    }

    pub fn n(self) -> usize {
        self.0
    }

    pub fn topological(self) -> usize {
        2 * self.0 + 1
    }

    pub fn homogeneous(self) -> usize {
        2 * self.0 + 2
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    z: Coords,
    t: f64,
}

/// Standard symplectic form `Σ (xᵢy′ᵢ − x′ᵢyᵢ)` on interleaved coordinates.
///
/// Panics if the lengths differ or are odd.
pub fn symplectic(z: &[f64], w: &[f64]) -> f64 {
    assert_eq!(z.len(), w.len(), "symplectic: length mismatch");
    assert!(z.len() % 2 == 0, "symplectic: odd length");
    z.chunks_exact(2)
        .zip(w.chunks_exact(2))
        .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
        .sum()
}

impl HPoint {
    pub fn new(z: &[f64], t: f64) -> Result<Self> {
        if z.is_empty() || z.len() % 2 != 0 {
            return Err(domain(format!("z must have even positive length, got {}", z.len())));
        }
        if !t.is_finite() || z.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(HPoint { z: z.into(), t })
    }

    /// Point of ℍ¹.
    pub fn h1(x: f64, y: f64, t: f64) -> Self {
        HPoint::new(&[x, y], t).expect("finite ℍ¹ coordinates")
    }

    /// Builds a point from the flat list `(x₁, y₁, …, t)`.
    pub fn from_coords(c: &[f64]) -> Result<Self> {
        match c.split_last() {
            Some((t, z)) => HPoint::new(z, *t),
            None => Err(domain("empty coordinate list")),
        }
    }

    pub fn identity(dim: GroupDim) -> Self {
        HPoint { z: SmallVec::from_elem(0.0, 2 * dim.n()), t: 0.0 }
    }

    pub fn dim(&self) -> GroupDim {
        GroupDim(self.z.len() / 2)
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.z.to_vec();
        c.push(self.t);
        c
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0.0 && self.z.iter().all(|&c| c == 0.0)
    }

    fn check_same(&self, other: &HPoint) {
        assert_eq!(self.z.len(), other.z.len(), "points from different groups");
    }

    pub fn multiply(&self, other: &HPoint) -> HPoint {
        self.check_same(other);
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect();
        HPoint { z, t: self.t + other.t + 2.0 * symplectic(&self.z, &other.z) }
    }

    pub fn inverse(&self) -> HPoint {
        HPoint { z: self.z.iter().map(|c| -c).collect(), t: -self.t }
    }

    /// Korányi gauge `(‖z‖⁴ + t²)^{1/4}`.
    pub fn norm(&self) -> f64 {
        gauge(self.z.iter().map(|c| c * c).sum(), self.t)
    }

    /// Korányi distance `‖a⁻¹·b‖`, evaluated without forming the product.
    pub fn dist(&self, other: &HPoint) -> f64 {
        self.check_same(other);
        let r2: f64 = self.z.iter().zip(&other.z).map(|(a, b)| (b - a) * (b - a)).sum();
        let tau = other.t - self.t - 2.0 * symplectic(&self.z, &other.z);
        gauge(r2, tau)
    }

    pub fn eucl_dist(&self, other: &HPoint) -> f64 {
        self.check_same(other);
        let r2: f64 = self.z.iter().zip(&other.z).map(|(a, b)| (b - a) * (b - a)).sum();
        (r2 + (other.t - self.t).powi(2)).sqrt()
    }

    /// Intrinsic dilation `(rz, r²t)`.
    pub fn dilate(&self, r: f64) -> Result<HPoint> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("dilation factor must be positive, got {r}")));
        }
        Ok(HPoint { z: self.z.iter().map(|c| r * c).collect(), t: r * r * self.t })
    }

    /// Largest absolute coordinate.
    pub fn sup_norm(&self) -> f64 {
        self.z.iter().fold(self.t.abs(), |m, c| m.max(c.abs()))
    }
}

/// `(|z|⁴ + t²)^{1/4}` from `|z|²`; two square roots keep powers of two exact.
pub fn gauge(z_sq: f64, t: f64) -> f64 {
    (z_sq * z_sq + t * t).sqrt().sqrt()
}

/// Korányi distance between two flat coordinate rows `(x₁, y₁, …, t)`.
pub fn dist_rows(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len() - 1;
    let mut r2 = 0.0;
    let mut om = 0.0;
    for i in (0..k).step_by(2) {
        let (x, y, u, v) = (a[i], a[i + 1], b[i], b[i + 1]);
        r2 += (u - x) * (u - x) + (v - y) * (v - y);
        om += x * v - u * y;
    }
    gauge(r2, b[k] - a[k] - 2.0 * om)
}

impl Mul for &HPoint {
    type Output = HPoint;
    fn mul(self, rhs: &HPoint) -> HPoint {
        self.multiply(rhs)
    }
}

impl fmt::Debug for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for c in &self.z {
            write!(f, "{c}, ")?;
        }
        write!(f, "{})", self.t)
    }
}

//! Horizontal subgroups 𝕍 = V × {0}, their vertical complements 𝕍⊥ = V⊥ × ℝ,
//! and the geometry of left cosets `a·𝕍`.
//!
//! Every point splits as `a = a⊥ · a_V` with
//! `a_V = (P_V z, 0)` and `a⊥ = (z − P_V z, t − 2ω(z − P_V z, P_V z))`.
//! The height correction cancels the cross term of the product, which the
//! tests confirm by reconstruction.

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::heis::{gauge, symplectic, GroupDim, HPoint};

const ISO_TOL: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// True iff every pair of vectors has vanishing symplectic product.
pub fn check_isotropic(basis: &[Vec<f64>]) -> bool {
    basis.iter().enumerate().all(|(i, u)| {
        basis[i + 1..].iter().all(|v| u.len() == v.len() && symplectic(u, v).abs() <= ISO_TOL)
    })
}

/// Orthonormalizes `candidates` against `fixed` (assumed orthonormal) in order,
/// keeping at most `want` vectors.
fn gram_schmidt(fixed: &[Vec<f64>], candidates: impl Iterator<Item = Vec<f64>>, want: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(want);
    for mut v in candidates {
        if out.len() == want {
            break;
        }
        for u in fixed.iter().chain(out.iter()) {
            let c = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        let l = norm(&v);
        if l > 1e-8 {
            v.iter_mut().for_each(|a| *a /= l);
            out.push(v);
        }
    }
    out
}

fn unit(len: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; len];
    e[k] = 1.0;
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalSubgroup {
    n: usize,
    basis: Vec<Vec<f64>>,
    complement: Vec<Vec<f64>>,
}

impl HorizontalSubgroup {
    pub fn new(dim: GroupDim, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = dim.n();
        let m = basis.len();
        if m == 0 || m > n {
            return Err(Error::InvalidSubgroup(format!("need 1 ≤ m ≤ n = {n}, got m = {m}")));
        }
        for v in &basis {
            if v.len() != 2 * n {
                return Err(Error::DimensionMismatch { expected: 2 * n, got: v.len() });
            }
        }
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(u, v) - want).abs() > ISO_TOL {
                    return Err(Error::InvalidSubgroup("basis is not orthonormal".into()));
                }
            }
        }
        if !check_isotropic(&basis) {
            return Err(Error::InvalidSubgroup("basis is not isotropic".into()));
        }
        let complement = gram_schmidt(&basis, (0..2 * n).map(|k| unit(2 * n, k)), 2 * n - m);
        Ok(HorizontalSubgroup { n, basis, complement })
    }

    /// `span{e_{x₁}, …, e_{x_m}}` in ℍⁿ.
    pub fn coordinate(n: usize, m: usize) -> Result<Self> {
        let dim = GroupDim::new(n)?;
        HorizontalSubgroup::new(dim, (0..m).map(|i| unit(2 * n, 2 * i)).collect())
    }

    /// The x-axis of ℍ¹.
    pub fn x_axis() -> Self {
        HorizontalSubgroup::coordinate(1, 1).expect("x-axis is isotropic")
    }

    pub fn group_dim(&self) -> GroupDim {
        GroupDim::new(self.n).expect("validated")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.basis.len()
    }

    /// Real dimension `w = 2n + 1 − m` of the vertical complement.
    pub fn w(&self) -> usize {
        2 * self.n + 1 - self.m()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Orthonormal frame of V⊥ used for vertical coordinates.
    pub fn complement(&self) -> &[Vec<f64>] {
        &self.complement
    }

    /// Coefficients `⟨z, vᵢ⟩`.
    pub fn coefficients(&self, z: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|v| dot(z, v)).collect()
    }

    /// `Σ sᵢ vᵢ`.
    pub fn combine(&self, s: &[f64]) -> Vec<f64> {
        assert_eq!(s.len(), self.m(), "coefficient count must equal m");
        let mut z = vec![0.0; 2 * self.n];
        for (c, v) in s.iter().zip(&self.basis) {
            z.iter_mut().zip(v).for_each(|(a, b)| *a += c * b);
        }
        z
    }

    fn check_point(&self, a: &HPoint) {
        assert_eq!(a.dim().n(), self.n, "point and subgroup live in different groups");
    }

    /// The pair `(a⊥, a_V)` with `a = a⊥ · a_V`.
    pub fn split(&self, a: &HPoint) -> (VerticalPoint, HPoint) {
        self.check_point(a);
        let zv = self.combine(&self.coefficients(a.z()));
        let zp: Vec<f64> = a.z().iter().zip(&zv).map(|(z, v)| z - v).collect();
        let t = a.t() - 2.0 * symplectic(&zp, &zv);
        let vert = HPoint::new(&zp, t).expect("finite");
        let horiz = HPoint::new(&zv, 0.0).expect("finite");
        (VerticalPoint(vert), horiz)
    }

    pub fn proj_vert(&self, a: &HPoint) -> VerticalPoint {
        self.split(a).0
    }

    pub fn proj_horiz(&self, a: &HPoint) -> HPoint {
        self.split(a).1
    }

    pub fn vertical(&self, p: HPoint) -> Result<VerticalPoint> {
        self.check_point(&p);
        let scale = 1.0 + norm(p.z());
        if self.coefficients(p.z()).iter().any(|c| c.abs() > ISO_TOL * scale) {
            return Err(domain("point is not in the vertical complement"));
        }
        Ok(VerticalPoint(p))
    }

    /// Coordinates of a vertical point in the frame `(complement…, t)`.
    pub fn vertical_coords(&self, a: &VerticalPoint) -> Vec<f64> {
        let mut c: Vec<f64> = self.complement.iter().map(|u| dot(a.0.z(), u)).collect();
        c.push(a.0.t());
        c
    }

    pub fn vertical_from_coords(&self, c: &[f64]) -> Result<VerticalPoint> {
        if c.len() != self.w() {
            return Err(Error::DimensionMismatch { expected: self.w(), got: c.len() });
        }
        let mut z = vec![0.0; 2 * self.n];
        for (k, u) in self.complement.iter().enumerate() {
            z.iter_mut().zip(u).for_each(|(a, b)| *a += c[k] * b);
        }
        Ok(VerticalPoint(HPoint::new(&z, c[self.w() - 1])?))
    }

    /// `a · (Σ sᵢvᵢ, 0)`.
    pub fn coset_point(&self, a: &VerticalPoint, s: &[f64]) -> HPoint {
        let v = HPoint::new(&self.combine(s), 0.0).expect("finite");
        a.0.multiply(&v)
    }

    pub fn dist_to_coset(&self, q: &HPoint, a: &VerticalPoint) -> f64 {
        self.nearest_on_coset(q, a).1
    }

    /// Minimizes `s ↦ d(q, a(s))`: grid search over the box that must contain
    /// the minimizer, then golden-section (m = 1) or coordinate descent.
    pub fn nearest_on_coset(&self, q: &HPoint, a: &VerticalPoint) -> (Vec<f64>, f64) {
        self.check_point(q);
        let b = a.0.inverse().multiply(q);
        let zb = b.z();
        let c = self.coefficients(zb);
        let w: Vec<f64> = self.basis.iter().map(|v| symplectic(v, zb)).collect();
        let zz = dot(zb, zb);
        let objective = |s: &[f64]| {
            let r2 = (zz - 2.0 * dot(s, &c) + dot(s, s)).max(0.0);
            gauge(r2, b.t() - 2.0 * dot(s, &w))
        };
        let d0 = objective(&c);
        if d0 == 0.0 {
            return (c, 0.0);
        }
        let m = self.m();
        const GRID: usize = 64;
        let step = 2.0 * d0 / (GRID - 1) as f64;
        let mut best = c.clone();
        let mut best_val = d0;
        let mut idx = vec![0usize; m];
        let mut s = vec![0.0; m];
        loop {
            for k in 0..m {
                s[k] = c[k] - d0 + step * idx[k] as f64;
            }
            let v = objective(&s);
            if v < best_val {
                best_val = v;
                best.copy_from_slice(&s);
            }
            let mut k = 0;
            while k < m {
                idx[k] += 1;
                if idx[k] < GRID {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == m {
                break;
            }
        }
        let sweeps = if m == 1 { 1 } else { 20 };
        let mut radius = step;
        for _ in 0..sweeps {
            for k in 0..m {
                let mut probe = best.clone();
                let centre = best[k];
                let (sk, v) = golden(centre - radius, centre + radius, |x| {
                    probe[k] = x;
                    objective(&probe)
                });
                if v < best_val {
                    best_val = v;
                    best[k] = sk;
                }
            }
            radius *= 0.5;
        }
        (best, best_val)
    }
}

fn golden(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// A point of 𝕍⊥: its z-part is orthogonal to V.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalPoint(HPoint);

impl VerticalPoint {
    pub fn point(&self) -> &HPoint {
        &self.0
    }

    pub fn into_point(self) -> HPoint {
        self.0
    }
}

/// A unit direction in 𝕍⊥ coordinates together with a frame of its orthogonal
/// complement Θ⊥.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaDirection {
    theta: Vec<f64>,
    frame: Vec<Vec<f64>>,
}

impl ThetaDirection {
    /// Normalizes `v`; the frame is Gram–Schmidt over the standard basis with
    /// the coordinate most aligned with θ left out.
    pub fn new(v: &[f64]) -> Result<Self> {
        let l = norm(v);
        if v.is_empty() || !l.is_finite() || l == 0.0 {
            return Err(domain("direction must be a non-zero finite vector"));
        }
        let theta: Vec<f64> = v.iter().map(|c| c / l).collect();
        let w = theta.len();
        let skip = (0..w)
            .max_by(|&i, &j| theta[i].abs().total_cmp(&theta[j].abs()).then(j.cmp(&i)))
            .expect("non-empty");
        let frame = gram_schmidt(
            std::slice::from_ref(&theta),
            (0..w).filter(|&k| k != skip).map(|k| unit(w, k)),
            w - 1,
        );
        Ok(ThetaDirection { theta, frame })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    /// Coordinates in Θ⊥ of the orthogonal projection of a 𝕍⊥ coordinate vector.
    pub fn project(&self, c: &[f64]) -> Vec<f64> {
        self.frame.iter().map(|f| dot(c, f)).collect()
    }

    /// 𝕍⊥ coordinates of `Σ hₖ fₖ`.
    pub fn lift(&self, h: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.theta.len()];
        for (hk, f) in h.iter().zip(&self.frame) {
            c.iter_mut().zip(f).for_each(|(a, b)| *a += hk * b);
        }
        c
    }
}

pub fn theta_project(a: &VerticalPoint, theta: &ThetaDirection, v: &HorizontalSubgroup) -> Vec<f64> {
    theta.project(&v.vertical_coords(a))
}

/// Membership in the tilted slab over the Θ⊥-ball `B(â, r)`.
pub fn slab_contains(q: &HPoint, a_hat: &[f64], r: f64, v: &HorizontalSubgroup, theta: &ThetaDirection) -> bool {
    let p = theta_project(&v.proj_vert(q), theta, v);
    let d2: f64 = p.iter().zip(a_hat).map(|(x, y)| (x - y) * (x - y)).sum();
    d2.sqrt() < r
}

/// The compact box `[−R, R]^{2n} × [−R², R²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordBox {
    pub n: usize,
    pub r: f64,
}

impl CoordBox {
    pub fn new(n: usize, r: f64) -> Result<Self> {
        if n == 0 || !(r > 0.0) {
            return Err(domain("box needs n ≥ 1 and R > 0"));
        }
        Ok(CoordBox { n, r })
    }

    /// The companion box with side parameter 2R.
    pub fn doubled(self) -> Self {
        CoordBox { n: self.n, r: 2.0 * self.r }
    }

    pub fn contains(&self, a: &HPoint) -> bool {
        a.z().iter().all(|c| c.abs() <= self.r) && a.t().abs() <= self.r * self.r
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> HPoint {
        let z: Vec<f64> = (0..2 * self.n).map(|_| rng.gen_range(-self.r..=self.r)).collect();
        let r2 = self.r * self.r;
        HPoint::new(&z, rng.gen_range(-r2..=r2)).expect("finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use proptest::prelude::*;

    fn rel_close(a: &HPoint, b: &HPoint, tol: f64) -> bool {
        let scale = 1.0 + b.sup_norm();
        a.coords().iter().zip(b.coords()).all(|(x, y)| (x - y).abs() <= tol * scale)
    }

    #[test]
    fn isotropy_examples() {
        assert!(check_isotropic(&[vec![1.0, 0.0]]));
        assert!(!check_isotropic(&[vec![1.0, 0.0], vec![0.0, 1.0]]));
        assert!(check_isotropic(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]));
        let h1 = GroupDim::new(1).unwrap();
        assert!(HorizontalSubgroup::new(h1, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        let h2 = GroupDim::new(2).unwrap();
        assert!(HorizontalSubgroup::new(h2, vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn split_examples_h1() {
        let v = HorizontalSubgroup::x_axis();
        let (x, y, t) = (0.7, -1.3, 0.4);
        let (vert, horiz) = v.split(&HPoint::h1(x, y, t));
        assert_eq!(*vert.point(), HPoint::h1(0.0, y, t + 2.0 * x * y));
        assert_eq!(horiz, HPoint::h1(x, 0.0, 0.0));

        let on_v = HPoint::h1(2.5, 0.0, 0.0);
        let (a, b) = v.split(&on_v);
        assert!(a.point().is_identity());
        assert_eq!(b, on_v);

        let on_perp = HPoint::h1(0.0, 1.5, -2.0);
        let (a, b) = v.split(&on_perp);
        assert_eq!(*a.point(), on_perp);
        assert!(b.is_identity());
    }

    #[test]
    fn coset_point_examples() {
        let v = HorizontalSubgroup::x_axis();
        let e = v.vertical(HPoint::h1(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(v.coset_point(&e, &[1.0]), HPoint::h1(1.0, 0.0, 0.0));
        let a = v.vertical(HPoint::h1(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(v.coset_point(&a, &[1.0]), HPoint::h1(1.0, 1.0, -2.0));
        assert!(v.vertical(HPoint::h1(0.1, 1.0, 0.0)).is_err());
    }

    #[test]
    fn dist_to_coset_examples() {
        let v = HorizontalSubgroup::x_axis();
        let e = v.vertical(HPoint::h1(0.0, 0.0, 0.0)).unwrap();
        let a = v.vertical(HPoint::h1(0.0, 0.3, -0.2)).unwrap();
        // the gauge turns a round-off height of ~1e-17 into ~1e-8
        assert!(v.dist_to_coset(&v.coset_point(&a, &[0.8]), &a) < 1e-7);
        assert_eq!(v.dist_to_coset(&v.coset_point(&e, &[0.8]), &e), 0.0);
        let tau: f64 = 0.09;
        assert!((v.dist_to_coset(&HPoint::h1(0.0, 0.0, tau), &e) - tau.sqrt()).abs() < 1e-9);
        // brute force over a fine grid
        let q = HPoint::h1(0.0, 0.05, 0.0);
        let brute = (-20000..=20000)
            .map(|k| q.dist(&HPoint::h1(k as f64 * 1e-5, 0.0, 0.0)))
            .fold(f64::INFINITY, f64::min);
        let got = v.dist_to_coset(&q, &e);
        assert!(got <= brute * 1.0001 && got >= brute * 0.99, "{got} vs {brute}");
    }

    #[test]
    fn dist_to_coset_h2_matches_brute_force() {
        let v = HorizontalSubgroup::coordinate(2, 2).unwrap();
        let mut rng = trial_rng(11, 0);
        for _ in 0..5 {
            let a = v.proj_vert(&CoordBox::new(2, 1.0).unwrap().sample(&mut rng));
            let q = CoordBox::new(2, 1.0).unwrap().sample(&mut rng);
            let mut brute = f64::INFINITY;
            for i in -300..=300 {
                for j in -300..=300 {
                    let s = [i as f64 * 0.01, j as f64 * 0.01];
                    brute = brute.min(q.dist(&v.coset_point(&a, &s)));
                }
            }
            let got = v.dist_to_coset(&q, &a);
            assert!(got <= brute + 1e-12 && got >= 0.99 * brute, "{got} vs {brute}");
        }
    }

    #[test]
    fn theta_examples() {
        let v = HorizontalSubgroup::x_axis();
        let th = ThetaDirection::new(&[0.0, 1.0]).unwrap();
        let a = v.vertical(HPoint::h1(0.0, 0.4, 1.7)).unwrap();
        assert_eq!(theta_project(&a, &th, &v), vec![0.4]);
        let along = v.vertical_from_coords(th.theta()).unwrap();
        assert_eq!(theta_project(&along, &th, &v), vec![0.0]);
        let tilted = ThetaDirection::new(&[0.3, 0.9]).unwrap();
        let h = vec![0.25];
        let back = tilted.project(&tilted.lift(&h));
        assert!((back[0] - h[0]).abs() < 1e-15);
        assert!(ThetaDirection::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn slab_examples() {
        let v = HorizontalSubgroup::x_axis();
        let th = ThetaDirection::new(&[0.0, 1.0]).unwrap();
        let (y0, r) = (0.3, 0.1);
        for &(x, y, t) in &[(0.5, 0.35, 1.0), (-2.0, 0.41, 0.0), (0.0, 0.2, -3.0), (1.0, 0.25, 0.5)] {
            let q = HPoint::h1(x, y, t);
            assert_eq!(slab_contains(&q, &[y0], r, &v, &th), (y - y0).abs() < r);
        }
        let q = HPoint::h1(0.0, 0.3, 5.0);
        assert!(slab_contains(&q, &[0.3], 1e-9, &v, &th));
    }

    #[test]
    fn heisenberg_projection_ratio_blows_up() {
        let v = HorizontalSubgroup::x_axis();
        let ratio = |delta: f64| {
            let a = HPoint::h1(1.0, 0.0, 0.0);
            let b = a.multiply(&HPoint::h1(0.0, delta, 0.0));
            let pa = v.proj_vert(&a);
            let pb = v.proj_vert(&b);
            pa.point().dist(pb.point()) / a.dist(&b)
        };
        assert!(ratio(1e-4) > 3.0 * ratio(1e-2));
        assert!((ratio(1e-6) * 1e-3 - 2.0).abs() < 1e-2);
        // The coordinate offset (1,0,0) → (1,δ,0) has constant ratio 1.
        let a = HPoint::h1(1.0, 0.0, 0.0);
        let b = HPoint::h1(1.0, 1e-4, 0.0);
        let r = v.proj_vert(&a).point().dist(v.proj_vert(&b).point()) / a.dist(&b);
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn box_membership() {
        let b = CoordBox::new(1, 2.0).unwrap();
        assert!(b.contains(&HPoint::h1(2.0, -2.0, 4.0)));
        assert!(!b.contains(&HPoint::h1(2.0, -2.0, 4.1)));
        assert!(b.doubled().contains(&HPoint::h1(4.0, 0.0, 16.0)));
        let mut rng = trial_rng(1, 1);
        assert!((0..100).all(|_| b.contains(&b.sample(&mut rng))));
    }

    fn subgroup() -> impl Strategy<Value = HorizontalSubgroup> {
        prop_oneof![
            Just(HorizontalSubgroup::x_axis()),
            Just(HorizontalSubgroup::coordinate(2, 1).unwrap()),
            Just(HorizontalSubgroup::coordinate(2, 2).unwrap()),
            (0.0..std::f64::consts::TAU).prop_map(|a| {
                // rotated isotropic line (cos a, 0, 0, sin a) in ℍ²
                HorizontalSubgroup::new(GroupDim::new(2).unwrap(), vec![vec![a.cos(), 0.0, a.sin(), 0.0]]).unwrap()
            }),
        ]
    }

    fn point_for(n: usize) -> impl Strategy<Value = HPoint> {
        (prop::collection::vec(-3.0..3.0f64, 2 * n), -9.0..9.0f64).prop_map(|(z, t)| HPoint::new(&z, t).unwrap())
    }

    fn case() -> impl Strategy<Value = (HorizontalSubgroup, HPoint, HPoint)> {
        subgroup().prop_flat_map(|v| {
            let n = v.n();
            (Just(v), point_for(n), point_for(n))
        })
    }

    proptest! {
        #[test]
        fn split_reconstructs((v, a, _b) in case()) {
            let (vert, horiz) = v.split(&a);
            prop_assert!(rel_close(&vert.point().multiply(&horiz), &a, 1e-9));
            prop_assert!(v.vertical(vert.point().clone()).is_ok());
            let again = v.proj_vert(vert.point());
            prop_assert!(rel_close(again.point(), vert.point(), 1e-12));
        }

        #[test]
        fn coset_is_isometric((v, a, b) in case(), s1 in -2.0..2.0f64, s2 in -2.0..2.0f64) {
            let base = v.proj_vert(&a);
            let m = v.m();
            let s: Vec<f64> = (0..m).map(|i| if i == 0 { s1 } else { b.z()[i] }).collect();
            let t: Vec<f64> = (0..m).map(|i| if i == 0 { s2 } else { -b.z()[i] }).collect();
            let want = s.iter().zip(&t).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            let got = v.coset_point(&base, &s).dist(&v.coset_point(&base, &t));
            prop_assert!((got - want).abs() <= 1e-9);
        }

        #[test]
        fn vertical_coords_round_trip((v, a, _b) in case()) {
            let p = v.proj_vert(&a);
            let back = v.vertical_from_coords(&v.vertical_coords(&p)).unwrap();
            prop_assert!(rel_close(back.point(), p.point(), 1e-12));
        }

        #[test]
        fn slab_invariant_under_right_translation((v, a, b) in case(), r in 0.05..2.0f64) {
            let w = v.w();
            let th = ThetaDirection::new(&(0..w).map(|k| 0.1 * k as f64 + if k + 1 == w { 1.0 } else { 0.0 }).collect::<Vec<_>>()).unwrap();
            let hat = theta_project(&v.proj_vert(&b), &th, &v);
            let shift = HPoint::new(&v.combine(&b.z()[..v.m()]), 0.0).unwrap();
            let q = a.multiply(&shift);
            prop_assert_eq!(
                slab_contains(&a, &hat, r, &v, &th),
                slab_contains(&q, &hat, r, &v, &th)
            );
        }

        #[test]
        fn theta_project_idempotent_on_complement(h in prop::collection::vec(-2.0..2.0f64, 3), th in prop::collection::vec(-1.0..1.0f64, 4)) {
            prop_assume!(th.iter().map(|c| c * c).sum::<f64>() > 0.01);
            let dir = ThetaDirection::new(&th).unwrap();
            let back = dir.project(&dir.lift(&h));
            for (x, y) in back.iter().zip(&h) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn nearest_is_no_worse_than_samples((v, a, q) in case(), s in -3.0..3.0f64) {
            let base = v.proj_vert(&a);
            let got = v.dist_to_coset(&q, &base);
            let mut probe = vec![0.0; v.m()];
            probe[0] = s;
            prop_assert!(got <= q.dist(&v.coset_point(&base, &probe)) + 1e-12);
        }
    }
}

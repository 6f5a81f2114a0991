//! Unimodular 2x2 complex matrices, their real and projective subgroups,
//! the Mobius action on the upper half-plane and on triples, and the
//! characters `psi`, `phi` defined on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C = Complex64;

/// Relative determinant tolerance, scaled by `1 + |g|^2`.
pub const DET_TOL: f64 = 1e-10;
/// Relative pole threshold for `cz + d`.
pub const POLE_TOL: f64 = 1e-14;
/// Pairwise distance below which a triple counts as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

const I: C = C::new(0.0, 1.0);

/// A 2x2 complex matrix `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniMat2 {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl UniMat2 {
    pub const IDENTITY: UniMat2 = UniMat2 {
        a: C::new(1.0, 0.0),
        b: C::new(0.0, 0.0),
        c: C::new(0.0, 0.0),
        d: C::new(1.0, 0.0),
    };

    /// Checked constructor; fails when the determinant is off by more than
    /// the scale-aware tolerance.
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self> {
        let m = UniMat2 { a, b, c, d };
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let residual = (m.det() - 1.0).norm();
        if residual > DET_TOL * (1.0 + m.norm_sqr()) {
            return Err(Error::NotUnimodular { residual });
        }
        Ok(m)
    }

    /// Real matrix constructor.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Scales an invertible matrix by `1/sqrt(det)` so that it lands in SL(2,C).
    pub fn normalized(a: C, b: C, c: C, d: C) -> Result<Self> {
        let det = a * d - b * c;
        let scale = (a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr()).max(f64::MIN_POSITIVE);
        if !(det.norm() > 1e-300 && det.norm() > 1e-24 * scale) {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        let k = det.sqrt().inv();
        let m = UniMat2 { a: a * k, b: b * k, c: c * k, d: d * k };
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(m)
    }

    /// Builds a matrix without checking the determinant.
    pub(crate) const fn raw(a: C, b: C, c: C, d: C) -> Self {
        UniMat2 { a, b, c, d }
    }

    pub fn det(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C {
        self.a + self.d
    }

    /// Squared Euclidean (Frobenius) norm `|a|^2 + |b|^2 + |c|^2 + |d|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn entries(&self) -> [C; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every entry has zero imaginary part (within `tol`).
    pub fn is_real(&self, tol: f64) -> bool {
        self.entries().iter().all(|z| z.im.abs() <= tol * (1.0 + z.re.abs()))
    }

    /// Entrywise real part.
    pub fn re_part(&self) -> [f64; 4] {
        [self.a.re, self.b.re, self.c.re, self.d.re]
    }

    /// Entrywise imaginary part.
    pub fn im_part(&self) -> [f64; 4] {
        [self.a.im, self.b.im, self.c.im, self.d.im]
    }

    /// Euclidean distance `|g - h|` between matrices.
    pub fn dist(&self, other: &UniMat2) -> f64 {
        ((self.a - other.a).norm_sqr()
            + (self.b - other.b).norm_sqr()
            + (self.c - other.c).norm_sqr()
            + (self.d - other.d).norm_sqr())
        .sqrt()
    }

    /// Distance between the classes `{+g, -g}` and `{+h, -h}`.
    pub fn proj_dist(&self, other: &UniMat2) -> f64 {
        self.dist(other).min(self.dist(&-*other))
    }

    pub fn inv(&self) -> UniMat2 {
        UniMat2::raw(self.d, -self.b, -self.c, self.a)
    }

    /// Matrix product, renormalized when rounding pushes the determinant
    /// more than half the tolerance away from 1.
    pub fn mul(&self, rhs: &UniMat2) -> UniMat2 {
        let p = UniMat2::raw(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        );
        p.renormalize()
    }

    pub(crate) fn renormalize(self) -> UniMat2 {
        let det = self.det();
        if (det - 1.0).norm() > 0.5 * DET_TOL * (1.0 + self.norm_sqr()) && det.norm() > 0.0 {
            let k = det.sqrt().inv();
            UniMat2::raw(self.a * k, self.b * k, self.c * k, self.d * k)
        } else {
            self
        }
    }

    /// Serializes as 8 reals, row-major, real and imaginary parts interleaved.
    pub fn to_reals(&self) -> [f64; 8] {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
    }

    pub fn from_reals(v: &[f64; 8]) -> Result<Self> {
        Self::new(
            C::new(v[0], v[1]),
            C::new(v[2], v[3]),
            C::new(v[4], v[5]),
            C::new(v[6], v[7]),
        )
    }
}

impl std::ops::Neg for UniMat2 {
    type Output = UniMat2;
    fn neg(self) -> UniMat2 {
        UniMat2::raw(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Rotation `[[cos t, -sin t], [sin t, cos t]]`, the one-parameter group
/// generating SO(2).
pub fn rotation(theta: f64) -> UniMat2 {
    let (s, c) = theta.sin_cos();
    UniMat2::raw(c.into(), (-s).into(), s.into(), c.into())
}

/// `diag(e^s, e^-s)`.
pub fn boost(s: f64) -> UniMat2 {
    UniMat2::raw(s.exp().into(), C::new(0.0, 0.0), C::new(0.0, 0.0), (-s).exp().into())
}

/// `[[1, u], [0, 1]]`.
pub fn shear(u: f64) -> UniMat2 {
    UniMat2::raw(C::new(1.0, 0.0), u.into(), C::new(0.0, 0.0), C::new(1.0, 0.0))
}

/// An element of PSL(2,C), stored through a canonical representative of `{+g, -g}`.
///
/// The representative is the one whose first entry of largest modulus (in
/// the order a, b, c, d) has argument in `(-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjMat2 {
    rep: UniMat2,
}

impl ProjMat2 {
    pub const IDENTITY: ProjMat2 = ProjMat2 { rep: UniMat2::IDENTITY };

    pub fn new(g: UniMat2) -> Self {
        ProjMat2 { rep: normalize_sign(g) }
    }

    pub fn rep(&self) -> &UniMat2 {
        &self.rep
    }

    pub fn mul(&self, rhs: &ProjMat2) -> ProjMat2 {
        ProjMat2::new(self.rep.mul(&rhs.rep))
    }

    pub fn inv(&self) -> ProjMat2 {
        ProjMat2::new(self.rep.inv())
    }

    pub fn dist(&self, other: &ProjMat2) -> f64 {
        self.rep.proj_dist(&other.rep)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.rep.proj_dist(&UniMat2::IDENTITY) <= tol
    }
}

impl From<UniMat2> for ProjMat2 {
    fn from(g: UniMat2) -> Self {
        ProjMat2::new(g)
    }
}

/// Sign normalization for PSL representatives.
pub fn normalize_sign(g: UniMat2) -> UniMat2 {
    let entries = g.entries();
    let mut lead = 0;
    let mut best = entries[0].norm();
    for (k, e) in entries.iter().enumerate().skip(1) {
        let m = e.norm();
        if m > best {
            best = m;
            lead = k;
        }
    }
    let e = entries[lead];
    let keep = e.re > 0.0 || (e.re == 0.0 && e.im >= 0.0);
    if keep {
        g
    } else {
        -g
    }
}

/// Anything that acts on the Riemann sphere by fractional-linear maps.
pub trait Mobius {
    fn matrix(&self) -> &UniMat2;

    /// `(az + b) / (cz + d)`.
    fn apply(&self, z: C) -> Result<C> {
        mobius_apply(self.matrix(), z)
    }
}

impl Mobius for UniMat2 {
    fn matrix(&self) -> &UniMat2 {
        self
    }
}

impl Mobius for ProjMat2 {
    fn matrix(&self) -> &UniMat2 {
        &self.rep
    }
}

pub fn mobius_apply(g: &UniMat2, z: C) -> Result<C> {
    let den = g.c * z + g.d;
    if !(den.norm() > POLE_TOL * g.norm() * (1.0 + z.norm())) {
        return Err(Error::Pole { component: None });
    }
    Ok((g.a * z + g.b) / den)
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint(C);

impl HalfPlanePoint {
    pub fn new(z: C) -> Result<Self> {
        if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
            Ok(HalfPlanePoint(z))
        } else {
            Err(Error::InvalidInput(format!("{z} is not in the upper half-plane")))
        }
    }

    pub fn z(&self) -> C {
        self.0
    }

    /// Image under a real unimodular matrix; stays in the half-plane since
    /// `Im(gz) = Im z / |cz + d|^2`.
    pub fn act(&self, g: &UniMat2) -> Result<Self> {
        if !g.is_real(1e-12) {
            return Err(Error::InvalidInput("matrix is not real".into()));
        }
        HalfPlanePoint::new(mobius_apply(g, self.0)?)
    }
}

/// A point of C^3, typically a triple of points of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple(pub [C; 3]);

impl Triple {
    pub fn new(z1: C, z2: C, z3: C) -> Self {
        Triple([z1, z2, z3])
    }

    /// The fixed base point `(i, 1 + i, 2i)`.
    pub fn default_base() -> Self {
        Triple::new(I, C::new(1.0, 1.0), C::new(0.0, 2.0))
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let z = &self.0;
        (z[0] - z[1]).norm().min((z[0] - z[2]).norm()).min((z[1] - z[2]).norm())
    }

    pub fn min_im(&self) -> f64 {
        self.0.iter().map(|z| z.im).fold(f64::INFINITY, f64::min)
    }

    /// All components in the upper half-plane and pairwise separated by
    /// more than `tol`.
    pub fn is_distinct_halfplane(&self, tol: f64) -> bool {
        self.min_im() > 0.0 && self.min_pairwise_distance() > tol
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn dist(&self, other: &Triple) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Real coordinates `(Re z1, Im z1, Re z2, Im z2, Re z3, Im z3)`.
    pub fn to_reals(&self) -> [f64; 6] {
        let z = &self.0;
        [z[0].re, z[0].im, z[1].re, z[1].im, z[2].re, z[2].im]
    }

    pub fn from_reals(v: &[f64; 6]) -> Self {
        Triple::new(C::new(v[0], v[1]), C::new(v[2], v[3]), C::new(v[4], v[5]))
    }

    pub fn add(&self, v: &[C; 3]) -> Triple {
        Triple([self.0[0] + v[0], self.0[1] + v[1], self.0[2] + v[2]])
    }
}

/// Componentwise Mobius action on a triple.
pub fn act_triple<M: Mobius + ?Sized>(g: &M, t: &Triple) -> Result<Triple> {
    let mut out = [C::new(0.0, 0.0); 3];
    for (k, z) in t.0.iter().enumerate() {
        out[k] = mobius_apply(g.matrix(), *z).map_err(|_| Error::Pole { component: Some(k) })?;
    }
    Ok(Triple(out))
}

/// Coefficients of `xE + yF + zH` in sl(2,R), with
/// `E = [[0,1],[0,0]]`, `F = [[0,0],[1,0]]`, `H = [[1,0],[0,-1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2Element {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Sl2Element {
    pub const E: Sl2Element = Sl2Element { x: 1.0, y: 0.0, z: 0.0 };
    pub const F: Sl2Element = Sl2Element { x: 0.0, y: 1.0, z: 0.0 };
    pub const H: Sl2Element = Sl2Element { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Sl2Element { x, y, z }
    }

    /// The generator of the rotation subgroup, `F - E`, with
    /// `exp(t (F - E)) = rotation(t)`.
    pub fn rotation_generator() -> Self {
        Sl2Element { x: -1.0, y: 1.0, z: 0.0 }
    }

    pub fn scale(&self, t: f64) -> Self {
        Sl2Element { x: self.x * t, y: self.y * t, z: self.z * t }
    }

    /// Matrix `[[z, x], [y, -z]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.z, self.x], [self.y, -self.z]]
    }

    /// `-det X = z^2 + xy`; positive for hyperbolic, negative for elliptic.
    pub fn discriminant(&self) -> f64 {
        self.z * self.z + self.x * self.y
    }

    /// Vector field of the flow `exp(tX) * w` at `w`: `x + 2zw - yw^2`.
    pub fn vector_field(&self, w: C) -> C {
        self.x + 2.0 * self.z * w - self.y * w * w
    }
}

/// Closed-form exponential `exp(tX)` using `X^2 = -det(X) I`.
pub fn exp_sl2(x: &Sl2Element, t: f64) -> UniMat2 {
    let m = x.scale(t);
    let q = m.discriminant();
    // exp(M) = c0 I + c1 M
    let (c0, c1) = if q.abs() < 1e-8 {
        // series: cosh(r) = 1 + q/2 + q^2/24, sinh(r)/r = 1 + q/6 + q^2/120
        (1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0)
    } else if q > 0.0 {
        let r = q.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-q).sqrt();
        (r.cos(), r.sin() / r)
    };
    let mm = m.matrix();
    UniMat2::raw(
        (c0 + c1 * mm[0][0]).into(),
        (c1 * mm[0][1]).into(),
        (c1 * mm[1][0]).into(),
        (c0 + c1 * mm[1][1]).into(),
    )
    .renormalize()
}

/// Iwasawa coordinates `g = k(theta) a(s) n(u)` of SL(2,R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iwasawa {
    pub theta: f64,
    pub s: f64,
    pub u: f64,
}

impl Iwasawa {
    pub const ORIGIN: Iwasawa = Iwasawa { theta: 0.0, s: 0.0, u: 0.0 };

    pub fn new(theta: f64, s: f64, u: f64) -> Self {
        Iwasawa { theta, s, u }
    }

    pub fn matrix(&self) -> UniMat2 {
        rotation(self.theta).mul(&boost(self.s)).mul(&shear(self.u))
    }

    /// Coordinates of a real unimodular matrix, with `theta` in `(-pi, pi]`.
    pub fn of_sl2(g: &UniMat2) -> Iwasawa {
        let (a, c) = (g.a.re, g.c.re);
        let theta = c.atan2(a);
        let r = a.hypot(c);
        let s = r.ln();
        // k(theta)^-1 g = a(s) n(u) has (1,2) entry e^s u
        let (sn, cs) = theta.sin_cos();
        let top_right = cs * g.b.re + sn * g.d.re;
        Iwasawa { theta, s, u: top_right / r }
    }

    /// Coordinates of the projective class, with `theta` in `[0, pi)`.
    pub fn of_psl(g: &UniMat2) -> Iwasawa {
        let mut p = Iwasawa::of_sl2(g);
        if p.theta < 0.0 {
            p.theta += PI;
        }
        if p.theta >= PI {
            p.theta -= PI;
        }
        p
    }
}

/// `psi(g) = (a + d) + i(c - b)`.
pub fn psi(g: &UniMat2) -> C {
    (g.a + g.d) + I * (g.c - g.b)
}

/// `phi(g) = psi(g)^2 / 4`, well defined on PSL(2,C).
pub fn phi_main(g: &ProjMat2) -> C {
    phi_main_sl(g.rep())
}

/// `psi(g)^2 / 4` evaluated on either representative.
pub fn phi_main_sl(g: &UniMat2) -> C {
    let p = psi(g);
    0.25 * p * p
}

/// `a + ic`.
pub fn phi_prelim(g: &UniMat2) -> C {
    g.a + I * g.c
}

/// `(a + ic)^2`, well defined on PSL(2,C).
pub fn phi_square(g: &ProjMat2) -> C {
    let p = phi_prelim(g.rep());
    p * p
}

/// `h -> h * zeta = (h zeta_1, h zeta_2, h zeta_3)`.
pub fn big_phi(h: &ProjMat2, zeta: &Triple) -> Result<Triple> {
    act_triple(h, zeta)
}

/// The map sending `z1, z2, z3` to `0, 1, infinity` (unnormalized).
fn cross_ratio_matrix(t: &Triple) -> [C; 4] {
    let [z1, z2, z3] = t.0;
    [z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)]
}

/// Inverse of `big_phi`: the unique `h` in PSL(2,C) with `h * zeta = z`.
///
/// Closed form through the matrices sending each triple to `(0, 1, inf)`.
pub fn big_phi_inverse(z: &Triple, zeta: &Triple) -> Result<ProjMat2> {
    for t in [z, zeta] {
        let d = t.min_pairwise_distance();
        if !(d > DEGENERATE_TOL) {
            return Err(Error::DegenerateTriple { min_distance: d });
        }
    }
    let mz = cross_ratio_matrix(z);
    let mzeta = cross_ratio_matrix(zeta);
    // adj(mz) * mzeta is proportional to mz^-1 * mzeta
    let [a, b, c, d] = mz;
    let adj = [d, -b, -c, a];
    let [p, q, r, s] = mzeta;
    let h = UniMat2::normalized(
        adj[0] * p + adj[1] * r,
        adj[0] * q + adj[1] * s,
        adj[2] * p + adj[3] * r,
        adj[2] * q + adj[3] * s,
    )?;
    Ok(ProjMat2::new(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn random_sl2c(rng: &mut ChaCha8Rng) -> UniMat2 {
        loop {
            let mut e = [C::new(0.0, 0.0); 4];
            for v in e.iter_mut() {
                *v = C::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            }
            if let Ok(g) = UniMat2::normalized(e[0], e[1], e[2], e[3]) {
                if g.norm() <= 10.0 {
                    return g;
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let i = C::new(0.0, 1.0);
        assert!(close(mobius_apply(&UniMat2::IDENTITY, i).unwrap(), i, 1e-15));
        let t = UniMat2::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(close(mobius_apply(&t, i).unwrap(), C::new(1.0, 1.0), 1e-15));
        let s = UniMat2::real(0.0, -1.0, 1.0, 0.0).unwrap();
        assert!(close(mobius_apply(&s, 2.0 * i).unwrap(), C::new(0.0, 0.5), 1e-15));
    }

    #[test]
    fn mobius_pole() {
        let s = UniMat2::real(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(mobius_apply(&s, C::new(0.0, 0.0)), Err(Error::Pole { component: None }));
        let t = Triple::new(C::new(0.0, 1.0), C::new(0.0, 0.0), C::new(1.0, 0.0));
        assert_eq!(act_triple(&s, &t), Err(Error::Pole { component: Some(1) }));
    }

    #[test]
    fn triple_examples() {
        let i = C::new(0.0, 1.0);
        let t = Triple::new(i, 2.0 * i, 3.0 * i);
        let id = ProjMat2::IDENTITY;
        assert_eq!(act_triple(&id, &t).unwrap(), t);
        let g = ProjMat2::new(shear(1.0));
        let out = act_triple(&g, &t).unwrap();
        for (k, z) in out.0.iter().enumerate() {
            assert!(close(*z, C::new(1.0, (k + 1) as f64), 1e-15));
        }
    }

    #[test]
    fn inverse_of_shear() {
        let g = UniMat2::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(g.inv(), UniMat2::real(1.0, -1.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn checked_constructor_rejects_bad_det() {
        assert!(matches!(UniMat2::real(2.0, 0.0, 0.0, 1.0), Err(Error::NotUnimodular { .. })));
        assert!(UniMat2::real(2.0, 0.0, 0.0, 0.5).is_ok());
    }

    #[test]
    fn exp_diagonal_and_rotation() {
        for &t in &[-2.0, -0.3, 0.0, 0.7, 3.0] {
            let e = exp_sl2(&Sl2Element::H, t);
            assert_abs_diff_eq!(e.a.re, t.exp(), epsilon = 1e-12 * t.exp());
            assert_abs_diff_eq!(e.d.re, (-t).exp(), epsilon = 1e-12);
            assert_eq!(e.b, C::new(0.0, 0.0));
            let r = exp_sl2(&Sl2Element::rotation_generator(), t);
            assert!(r.dist(&rotation(t)) < 1e-12);
            // E - F generates the opposite rotation
            let r2 = exp_sl2(&Sl2Element::new(1.0, -1.0, 0.0), t);
            assert!(r2.dist(&rotation(-t)) < 1e-12);
        }
    }

    /// Matrix power series `sum_k M^k / k!`, 20 terms.
    fn exp_series(x: &Sl2Element, t: f64) -> [[f64; 2]; 2] {
        let m = x.scale(t).matrix();
        let mut acc = [[1.0, 0.0], [0.0, 1.0]];
        let mut term = [[1.0, 0.0], [0.0, 1.0]];
        for k in 1..20 {
            let mut next = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = (term[i][0] * m[0][j] + term[i][1] * m[1][j]) / k as f64;
                }
            }
            term = next;
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += term[i][j];
                }
            }
        }
        acc
    }

    #[test]
    fn exp_matches_power_series() {
        let gens = [
            Sl2Element::E,
            Sl2Element::F,
            Sl2Element::H,
            Sl2Element::rotation_generator(),
            Sl2Element::new(0.3, -0.8, 0.2),
            Sl2Element::new(0.5, 0.7, -0.4),
            Sl2Element::new(1e-5, 1e-5, 0.0),
        ];
        for x in gens {
            for &t in &[-1.3, 0.4, 1.0] {
                let e = exp_sl2(&x, t);
                let s = exp_series(&x, t);
                assert_abs_diff_eq!(e.a.re, s[0][0], epsilon = 1e-12);
                assert_abs_diff_eq!(e.b.re, s[0][1], epsilon = 1e-12);
                assert_abs_diff_eq!(e.c.re, s[1][0], epsilon = 1e-12);
                assert_abs_diff_eq!(e.d.re, s[1][1], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn exp_one_parameter_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = Sl2Element::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let s = rng.random_range(-2.0..2.0);
            let t = rng.random_range(-2.0..2.0);
            assert!(exp_sl2(&x, 0.0).dist(&UniMat2::IDENTITY) < 1e-15);
            let lhs = exp_sl2(&x, s + t);
            let rhs = exp_sl2(&x, s).mul(&exp_sl2(&x, t));
            assert!(lhs.dist(&rhs) < 1e-10 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn psi_and_phi_examples() {
        assert!(close(psi(&UniMat2::IDENTITY), C::new(2.0, 0.0), 0.0));
        let diag = UniMat2::real(2.0, 0.0, 0.0, 0.5).unwrap();
        assert!(close(psi(&diag), C::new(2.5, 0.0), 1e-15));
        assert!(close(phi_main(&ProjMat2::new(diag)), C::new(25.0 / 16.0, 0.0), 1e-15));
        assert!(close(phi_main(&ProjMat2::IDENTITY), C::new(1.0, 0.0), 0.0));
        assert!(close(phi_prelim(&UniMat2::IDENTITY), C::new(1.0, 0.0), 0.0));
        for k in 0..16 {
            let th = -3.0 + 0.4 * k as f64;
            let r = rotation(th);
            // psi(k(t)) = 2cos t + 2i sin t
            assert!(close(psi(&r), 2.0 * C::from_polar(1.0, th), 1e-14));
            assert_abs_diff_eq!(psi(&r).norm(), 2.0, epsilon = 1e-15);
            assert!(close(phi_prelim(&r), C::from_polar(1.0, th), 1e-15));
            assert!(close(phi_main(&ProjMat2::new(r)), C::from_polar(1.0, 2.0 * th), 1e-14));
            assert!(close(phi_square(&ProjMat2::new(r)), C::from_polar(1.0, 2.0 * th), 1e-14));
        }
    }

    #[test]
    fn psi_is_odd_and_phi_sign_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = random_sl2c(&mut rng);
            assert_eq!(psi(&-g), -psi(&g));
            assert_eq!(normalize_sign(-g), normalize_sign(g));
            assert_eq!(phi_main(&ProjMat2::new(-g)), phi_main(&ProjMat2::new(g)));
            assert_eq!(phi_square(&ProjMat2::new(-g)), phi_square(&ProjMat2::new(g)));
        }
    }

    #[test]
    fn sign_normalization_rule() {
        // largest entry b = -3: flipped to +3
        let g = UniMat2::real(1.0, -3.0, 0.0, 1.0).unwrap();
        assert_eq!(ProjMat2::new(g).rep().b.re, 3.0);
        // purely imaginary lead entry: positive imaginary part kept
        let i = C::new(0.0, 1.0);
        let h = UniMat2::new(-2.0 * i, C::new(0.0, 0.0), C::new(0.0, 0.0), 0.5 * i).unwrap();
        assert_eq!(ProjMat2::new(h).rep().a, 2.0 * i);
    }

    #[test]
    fn real_maps_preserve_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let g = Iwasawa::new(
                rng.random_range(0.0..PI),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            )
            .matrix();
            let z = C::new(rng.random_range(-3.0..3.0), rng.random_range(0.01..3.0));
            let p = HalfPlanePoint::new(z).unwrap().act(&g).unwrap();
            let expected = z.im / (g.c * z + g.d).norm_sqr();
            assert_abs_diff_eq!(p.z().im, expected, epsilon = 1e-12 * (1.0 + expected));
        }
    }

    #[test]
    fn iwasawa_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let p = Iwasawa::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-4.0..4.0),
                rng.random_range(-4.0..4.0),
            );
            let g = p.matrix();
            let q = Iwasawa::of_sl2(&g);
            assert!(q.matrix().dist(&g) < 1e-10 * g.norm());
            let r = Iwasawa::of_psl(&g);
            assert!((0.0..PI).contains(&r.theta));
            assert!(r.matrix().proj_dist(&g) < 1e-10 * g.norm());
        }
    }

    #[test]
    fn big_phi_inverse_recovers_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let zeta = Triple::default_base();
        for _ in 0..500 {
            let h = ProjMat2::new(random_sl2c(&mut rng));
            let Ok(z) = big_phi(&h, &zeta) else { continue };
            let back = big_phi_inverse(&z, &zeta).unwrap();
            assert!(back.dist(&h) < 1e-8 * h.rep().norm_sqr(), "{:?} vs {:?}", back, h);
        }
    }

    #[test]
    fn big_phi_equivariance_and_injectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let zeta = Triple::default_base();
        let mut checked = 0;
        while checked < 1000 {
            let g = ProjMat2::new(random_sl2c(&mut rng));
            let h = ProjMat2::new(random_sl2c(&mut rng));
            let (Ok(lhs), Ok(inner)) = (big_phi(&g.mul(&h), &zeta), big_phi(&h, &zeta)) else {
                continue;
            };
            let Ok(rhs) = act_triple(&g, &inner) else { continue };
            let scale = 1.0 + lhs.norm_sqr().sqrt();
            assert!(lhs.dist(&rhs) < 1e-10 * scale * g.rep().norm_sqr());
            if g.dist(&h) > 1e-3 {
                assert!(big_phi(&g, &zeta).map(|a| a.dist(&inner) > 1e-6).unwrap_or(true));
            }
            checked += 1;
        }
    }

    #[test]
    fn distinctness_preserved_by_real_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let g = ProjMat2::new(
                Iwasawa::new(rng.random_range(0.0..PI), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
                    .matrix(),
            );
            let t = Triple::new(
                C::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..3.0)),
                C::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..3.0)),
                C::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..3.0)),
            );
            if !t.is_distinct_halfplane(1e-3) {
                continue;
            }
            let out = act_triple(&g, &t).unwrap();
            assert!(out.is_distinct_halfplane(DEGENERATE_TOL));
        }
    }
}

//! The quotient `G = R x R x T` of the Heisenberg group acting on
//! `C x C x C*`, the saturated domain `Omega = G U`, the map
//! `w -> w + 2C e^{u^2}` and the embedding onto a bounded domain.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Triple, C};
use crate::report::VerificationReport;
use crate::sampling::{disc_point, run_chunks};
use crate::verify::{totally_real_rank, OrbitFrame, TotallyRealRank};

pub const UNIT_TOL: f64 = 1e-12;
pub const Z_FLOOR: f64 = 1e-300;
/// Grid step of the brute-force membership oracle, and the width of the
/// boundary band in which it may disagree with the closed form.
pub const BRUTE_STEP: f64 = 1e-3;

fn i() -> C {
    C::new(0.0, 1.0)
}

/// An element `(a, b, c)` of `R x R x T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisElement {
    pub a: f64,
    pub b: f64,
    pub c: C,
}

impl HeisElement {
    pub const IDENTITY: HeisElement = HeisElement { a: 0.0, b: 0.0, c: C::new(1.0, 0.0) };

    pub fn new(a: f64, b: f64, c: C) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || (c.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!("({a}, {b}, {c}) is not in R x R x T")));
        }
        Ok(HeisElement { a, b, c })
    }

    /// `(a, b, c)(a', b', c') = (a + a', b + b', c c' e^{i a b'})`.
    pub fn mul(&self, rhs: &HeisElement) -> HeisElement {
        HeisElement { a: self.a + rhs.a, b: self.b + rhs.b, c: self.c * rhs.c * (i() * self.a * rhs.b).exp() }
    }

    pub fn inv(&self) -> HeisElement {
        HeisElement { a: -self.a, b: -self.b, c: self.c.conj() * (i() * self.a * self.b).exp() }
    }

    pub fn dist(&self, other: &HeisElement) -> f64 {
        ((self.a - other.a).powi(2) + (self.b - other.b).powi(2) + (self.c - other.c).norm_sqr()).sqrt()
    }
}

/// A point `(x, y, z)` of `C x C x C*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisCPoint {
    pub x: C,
    pub y: C,
    pub z: C,
}

impl HeisCPoint {
    pub fn new(x: C, y: C, z: C) -> Result<Self> {
        let finite = [x, y, z].iter().all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite || !(z.norm() > Z_FLOOR) {
            return Err(Error::InvalidInput("point must be finite with z != 0".into()));
        }
        Ok(HeisCPoint { x, y, z })
    }

    pub fn dist(&self, other: &HeisCPoint) -> f64 {
        ((self.x - other.x).norm_sqr() + (self.y - other.y).norm_sqr() + (self.z - other.z).norm_sqr()).sqrt()
    }

    pub fn as_array(&self) -> [C; 3] {
        [self.x, self.y, self.z]
    }

    pub fn to_reals(&self) -> [f64; 6] {
        [self.x.re, self.x.im, self.y.re, self.y.im, self.z.re, self.z.im]
    }
}

/// `(a, b, c)(x, y, z) = (a + x, b + y, c z e^{i a y})`.
pub fn heis_mul(g: &HeisElement, p: &HeisCPoint) -> HeisCPoint {
    HeisCPoint { x: p.x + g.a, y: p.y + g.b, z: g.c * p.z * (i() * g.a * p.y).exp() }
}

/// `|x| < 1, |y| < 1, |z| < 2`.
pub fn in_u(p: &HeisCPoint) -> bool {
    p.x.norm() < 1.0 && p.y.norm() < 1.0 && p.z.norm() < 2.0
}

/// The open interval of admissible `a` for `p = (u, v, w)`, or `None` when
/// `|Im u| >= 1` or `|Im v| >= 1`. The interval is empty when `hi <= lo`.
pub fn omega_interval(p: &HeisCPoint) -> Option<(f64, f64)> {
    let (u, v, w) = (p.x, p.y, p.z);
    if !(u.im.abs() < 1.0 && v.im.abs() < 1.0) {
        return None;
    }
    let s = (1.0 - u.im * u.im).sqrt();
    let (lo, hi) = (u.re - s, u.re + s);
    if v.im == 0.0 {
        return Some(if w.norm() < 2.0 { (lo, hi) } else { (hi, lo) });
    }
    // |w| e^{a Im v} < 2  <=>  a Im v < ln(2/|w|)
    let a_star = (2.0 / w.norm()).ln() / v.im;
    Some(if v.im > 0.0 { (lo, hi.min(a_star)) } else { (lo.max(a_star), hi) })
}

/// A decomposition `p = g q` with `q` in `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaWitness {
    pub g: HeisElement,
    pub q: HeisCPoint,
}

/// Closed-form membership in `Omega = G U`, with a witness taken at the
/// middle of the admissible `a`-interval, `b = Re v` and `c = 1`.
pub fn omega_membership(p: &HeisCPoint) -> Option<OmegaWitness> {
    let (lo, hi) = omega_interval(p)?;
    if !(hi > lo) {
        return None;
    }
    let a = 0.5 * (lo + hi);
    let b = p.y.re;
    let y = p.y - b;
    let q = HeisCPoint { x: p.x - a, y, z: p.z * (-i() * a * y).exp() };
    Some(OmegaWitness { g: HeisElement { a, b, c: C::new(1.0, 0.0) }, q })
}

pub fn in_omega(p: &HeisCPoint) -> bool {
    omega_membership(p).is_some()
}

/// Grid search for `a` in `[Re u - 1, Re u + 1]` at [`BRUTE_STEP`] with
/// `b = Re v` and the phase of `c` cancelling that of `z`.
pub fn omega_membership_brute(p: &HeisCPoint) -> bool {
    let b = p.y.re;
    let y = p.y - b;
    let steps = (2.0 / BRUTE_STEP).round() as usize;
    (0..=steps).any(|k| {
        let a = p.x.re - 1.0 + k as f64 * BRUTE_STEP;
        let z = p.z * (-i() * a * y).exp();
        let c = z / z.norm();
        in_u(&HeisCPoint { x: p.x - a, y, z: z / c })
    })
}

/// Whether the admissible interval is shorter than the grid step, where the
/// grid oracle may miss it.
pub fn in_boundary_band(p: &HeisCPoint) -> bool {
    match omega_interval(p) {
        Some((lo, hi)) => (hi - lo).abs() < BRUTE_STEP,
        None => false,
    }
}

/// A constant with `|w| < C |e^{u^2}|` on `Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingConstant {
    pub c: f64,
}

/// `max_{t >= 0} 2 e^{t + 3 - t^2} = 2 e^{13/4}`, from `|w| < 2 e^{|a|}`,
/// `|a| < |Re u| + 2` and `|e^{u^2}| > e^{(Re u)^2 - 1}`.
pub fn derive_c() -> BoundingConstant {
    BoundingConstant { c: 2.0 * (13.0f64 / 4.0).exp() }
}

/// Grid maximum of `2 e^{t + 3 - t^2}` over `[0, 10]`.
pub fn derive_c_by_grid(step: f64) -> f64 {
    let n = (10.0 / step).round() as usize;
    (0..=n).map(|k| k as f64 * step).map(|t| 2.0 * (t + 3.0 - t * t).exp()).fold(0.0, f64::max)
}

impl BoundingConstant {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= derive_c().c) {
            return Err(Error::InvalidInput(format!("bounding constant {c} below 2e^(13/4)")));
        }
        Ok(BoundingConstant { c })
    }

    /// `C |e^{u^2}| > C / e > 1`: `w'` stays outside the unit disc.
    pub fn clears_unit_disc(&self) -> bool {
        self.c / std::f64::consts::E > 1.0
    }
}

impl Default for BoundingConstant {
    fn default() -> Self {
        derive_c()
    }
}

/// `(u, v, w) -> (u, v, w + 2C e^{u^2})` on `Omega`.
pub fn bounding_map(p: &HeisCPoint, c: &BoundingConstant) -> Result<HeisCPoint> {
    if !in_omega(p) {
        return Err(Error::NotInOmega);
    }
    Ok(bounding_map_unchecked(p, c))
}

fn bounding_map_unchecked(p: &HeisCPoint, c: &BoundingConstant) -> HeisCPoint {
    HeisCPoint { x: p.x, y: p.y, z: p.z + 2.0 * c.c * (p.x * p.x).exp() }
}

/// `tanh(pi t / 4)`: the strip `|Im t| < 1` onto the unit disc.
pub fn strip_to_disc(t: C) -> C {
    (t * (PI / 4.0)).tanh()
}

pub fn disc_to_strip(s: C) -> C {
    s.atanh() * (4.0 / PI)
}

/// `(sigma(u), sigma(v), 1 / w')`, a biholomorphism of `Omega` onto a
/// domain in the unit polydisc.
pub fn bounded_embedding(p: &HeisCPoint, c: &BoundingConstant) -> Result<[C; 3]> {
    let q = bounding_map(p, c)?;
    Ok(embed_unchecked(&q))
}

fn embed_unchecked(q: &HeisCPoint) -> [C; 3] {
    [strip_to_disc(q.x), strip_to_disc(q.y), q.z.inv()]
}

/// Inverse of [`bounded_embedding`] on its image.
pub fn bounded_embedding_inverse(e: &[C; 3], c: &BoundingConstant) -> Result<HeisCPoint> {
    let u = disc_to_strip(e[0]);
    let v = disc_to_strip(e[1]);
    let w = e[2].inv() - 2.0 * c.c * (u * u).exp();
    HeisCPoint::new(u, v, w)
}

/// Largest `|d f / d zbar_j|` over outputs and variables, by central
/// differences, relative to `1 + |f(p)|`.
pub fn cauchy_riemann_residual<F: Fn(&[C; 3]) -> [C; 3]>(f: F, p: &[C; 3], h: f64) -> f64 {
    let scale = 1.0 + f(p).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for j in 0..3 {
        let shifted = |d: C| {
            let mut q = *p;
            q[j] += d;
            f(&q)
        };
        let (xp, xm) = (shifted(C::new(h, 0.0)), shifted(C::new(-h, 0.0)));
        let (yp, ym) = (shifted(C::new(0.0, h)), shifted(C::new(0.0, -h)));
        for k in 0..3 {
            let dx = (xp[k] - xm[k]) / (2.0 * h);
            let dy = (yp[k] - ym[k]) / (2.0 * h);
            worst = worst.max((0.5 * (dx + i() * dy)).norm() / scale);
        }
    }
    worst
}

/// Tangent generators of the orbit through `p` for the flows of `a`, `b`
/// and `arg c`: `(1, 0, i y z)`, `(0, 1, 0)`, `(0, 0, i z)`.
pub fn orbit_frame(p: &HeisCPoint) -> OrbitFrame {
    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    OrbitFrame {
        base: Triple::new(p.x, p.y, p.z),
        generators: [[one, zero, i() * p.y * p.z], [zero, one, zero], [zero, zero, i() * p.z]],
    }
}

pub fn orbit_rank(p: &HeisCPoint) -> TotallyRealRank {
    totally_real_rank(&orbit_frame(p))
}

/// Uniform-ish point of `U` with `z != 0`.
pub fn sample_u<R: Rng + ?Sized>(rng: &mut R) -> HeisCPoint {
    loop {
        let z = disc_point(rng, 2.0);
        if z.norm() > 1e-12 {
            return HeisCPoint { x: disc_point(rng, 1.0), y: disc_point(rng, 1.0), z };
        }
    }
}

pub fn sample_element<R: Rng + ?Sized>(rng: &mut R, extent: f64) -> HeisElement {
    HeisElement {
        a: rng.random_range(-extent..extent),
        b: rng.random_range(-extent..extent),
        c: C::from_polar(1.0, rng.random_range(-PI..PI)),
    }
}

/// `g q` with `q` uniform in `U` and `a, b` uniform in `[-extent, extent]`.
pub fn sample_omega<R: Rng + ?Sized>(rng: &mut R, extent: f64) -> HeisCPoint {
    let g = sample_element(rng, extent);
    heis_mul(&g, &sample_u(rng))
}

/// Point of the box `|Re| < 3`, `|Im| < 1.2` for `u, v` with `|w|`
/// log-uniform in `[e^-3, e^5]`; roughly a third of them lie in `Omega`.
pub fn sample_box<R: Rng + ?Sized>(rng: &mut R) -> HeisCPoint {
    let mut strip = || C::new(rng.random_range(-3.0..3.0), rng.random_range(-1.2..1.2));
    let (u, v) = (strip(), strip());
    let w = C::from_polar(rng.random_range(-3.0f64..5.0).exp(), rng.random_range(-PI..PI));
    HeisCPoint { x: u, y: v, z: w }
}

/// Closed-form membership against the grid oracle on box samples.
pub fn membership_audit(samples: usize, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let p = sample_box(rng);
                (first + j, p, in_omega(&p), omega_membership_brute(&p), in_boundary_band(&p))
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("heisenberg-membership", seed);
    let (mut members, mut band, mut band_disagree, mut disagree, mut bad_witness) = (0, 0, 0, 0, 0);
    for (k, p, closed, brute, in_band) in rows.into_iter().flatten() {
        report.samples += 1;
        if closed {
            members += 1;
            let w = omega_membership(&p).expect("member has a witness");
            if !(in_u(&w.q) && heis_mul(&w.g, &w.q).dist(&p) < 1e-9 * (1.0 + p.z.norm())) && !in_band {
                bad_witness += 1;
                report.fail(witness_row(k, &p));
            }
        }
        if in_band {
            band += 1;
        }
        if closed != brute {
            if in_band {
                band_disagree += 1;
            } else {
                disagree += 1;
                report.fail(witness_row(k, &p));
            }
        }
    }
    report.worst_margin = 0.0 - disagree as f64;
    report.set_detail("members", members as f64);
    report.set_detail("band_points", band as f64);
    report.set_detail("band_disagreements", band_disagree as f64);
    report.set_detail("disagreements", disagree as f64);
    report.set_detail("bad_witnesses", bad_witness as f64);
    report.timed(start)
}

fn witness_row(k: usize, p: &HeisCPoint) -> Vec<f64> {
    let mut w = vec![k as f64];
    w.extend(p.to_reals());
    w
}

/// `G`-invariance of `Omega`: `g p` stays a member for members `p`.
pub fn invariance_audit(samples: usize, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let p = sample_omega(rng, 3.0);
                let g = sample_element(rng, 3.0);
                (first + j, p, in_omega(&p) && in_omega(&heis_mul(&g, &p)))
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("heisenberg-invariance", seed);
    let mut violations = 0;
    for (k, p, ok) in rows.into_iter().flatten() {
        report.samples += 1;
        if !ok {
            violations += 1;
            report.fail(witness_row(k, &p));
        }
    }
    report.worst_margin = 0.0 - violations as f64;
    report.set_detail("violations", violations as f64);
    report.timed(start)
}

/// `max |w| / |e^{u^2}|` over `Omega` samples against `C`.
pub fn constant_audit(samples: usize, seed: u64, c: &BoundingConstant) -> VerificationReport {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        let mut best = (0.0f64, first, HeisCPoint { x: C::new(0.0, 0.0), y: C::new(0.0, 0.0), z: C::new(1.0, 0.0) });
        for j in 0..len {
            let p = sample_omega(rng, 3.0);
            let ratio = p.z.norm() / (p.x * p.x).exp().norm();
            if ratio > best.0 {
                best = (ratio, first + j, p);
            }
        }
        best
    });
    let mut report = VerificationReport::new("heisenberg-constant", seed).detail("c", c.c);
    let (mut max_ratio, mut arg) = (0.0f64, None);
    for (ratio, k, p) in rows {
        if ratio > max_ratio {
            max_ratio = ratio;
            arg = Some((k, p));
        }
    }
    report.samples = samples as u64;
    report.worst_margin = c.c - max_ratio;
    report.set_detail("max_ratio", max_ratio);
    report.set_detail("grid_c", derive_c_by_grid(1e-4));
    if !(max_ratio < c.c) {
        let (k, p) = arg.expect("a maximizer exists");
        report.fail(witness_row(k, &p));
    }
    if !c.clears_unit_disc() {
        report.fail_plain();
    }
    report.timed(start)
}

/// `|w'| > C |e^{u^2}| > 1` on `Omega` samples.
pub fn bounding_audit(samples: usize, seed: u64, c: &BoundingConstant) -> VerificationReport {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let p = sample_omega(rng, 3.0);
                let lower = c.c * (p.x * p.x).exp().norm();
                let q = bounding_map(&p, c).map(|q| q.z.norm());
                (first + j, p, lower, q)
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("heisenberg-bounding", seed).detail("c", c.c);
    let mut worst = f64::INFINITY;
    let mut min_w = f64::INFINITY;
    let mut violations = 0;
    for (k, p, lower, q) in rows.into_iter().flatten() {
        report.samples += 1;
        let ok = match q {
            Ok(wp) => {
                worst = worst.min(wp / lower - 1.0);
                min_w = min_w.min(wp);
                wp > lower && lower > 1.0
            }
            Err(_) => false,
        };
        if !ok {
            violations += 1;
            report.fail(witness_row(k, &p));
        }
    }
    report.worst_margin = worst;
    report.set_detail("min_abs_w_prime", min_w);
    report.set_detail("violations", violations as f64);
    report.timed(start)
}

/// Image of `Omega` samples in the open unit polydisc, round trip through
/// the inverse, and separation of independent pairs.
pub fn embedding_audit(samples: usize, seed: u64, c: &BoundingConstant) -> VerificationReport {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let p = sample_omega(rng, 1.0);
                let p2 = sample_omega(rng, 1.0);
                let e = bounded_embedding(&p, c);
                let e2 = bounded_embedding(&p2, c);
                let (modulus, round_trip, sep) = match (e, e2) {
                    (Ok(e), Ok(e2)) => {
                        let m = e.iter().map(|v| v.norm()).fold(0.0, f64::max);
                        let rt = bounded_embedding_inverse(&e, c).map(|q| q.dist(&p)).unwrap_or(f64::INFINITY);
                        let sep = (0..3).map(|k| (e[k] - e2[k]).norm_sqr()).sum::<f64>().sqrt();
                        (m, rt, sep)
                    }
                    _ => (f64::INFINITY, f64::INFINITY, 0.0),
                };
                (first + j, p, modulus, round_trip, sep)
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("heisenberg-embedding", seed);
    let (mut max_mod, mut max_rt, mut min_sep) = (0.0f64, 0.0f64, f64::INFINITY);
    for (k, p, m, rt, sep) in rows.into_iter().flatten() {
        report.samples += 1;
        max_mod = max_mod.max(m);
        max_rt = max_rt.max(rt);
        min_sep = min_sep.min(sep);
        if !(m < 1.0 && rt < 1e-9 && sep > 1e-12) {
            report.fail(witness_row(k, &p));
        }
    }
    report.worst_margin = (1.0 - max_mod).min(1e-9 - max_rt);
    report.set_detail("max_modulus", max_mod);
    report.set_detail("max_round_trip_error", max_rt);
    report.set_detail("min_pair_separation", min_sep);
    report.timed(start)
}

//! Levi form of orbit tubes `{x : dist(x, G zeta) < r}` by finite
//! differences of the defining function `rho = dist^2 - r^2`.

use std::time::Instant;

use nalgebra::{DMatrix, SVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::{Iwasawa, Triple, C};
use crate::orbit::{orbit_distance, orbit_distance_from, orbit_point, OrbitDistance};
use crate::report::VerificationReport;
use crate::sampling::{run_chunks, IwasawaRange};

use super::rank::OrbitFrame;

/// Step for gradients and second differences; the Richardson check reruns
/// the second differences at twice this step.
pub const FD_STEP: f64 = 1e-4;
/// Relative agreement required between the two Richardson steps.
pub const RICHARDSON_TOL: f64 = 0.05;

/// A tube of the given radius around the orbit of `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSpec {
    pub zeta: Triple,
    pub radius: f64,
}

impl TubeSpec {
    /// The radius must stay below half the minimal pairwise distance of `zeta`.
    pub fn new(zeta: Triple, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.5 * zeta.min_pairwise_distance()) {
            return Err(Error::InvalidInput(format!("tube radius {radius} out of range")));
        }
        Ok(TubeSpec { zeta, radius })
    }
}

/// Distance from `x` to the orbit of the tube's base triple.
pub fn tube_distance(x: &Triple, spec: &TubeSpec) -> Result<OrbitDistance> {
    orbit_distance(x, &spec.zeta)
}

fn displaced(p: &[f64; 6], v: &[C; 3], t: f64) -> [f64; 6] {
    let mut q = *p;
    for j in 0..3 {
        q[2 * j] += t * v[j].re;
        q[2 * j + 1] += t * v[j].im;
    }
    q
}

fn gradient<F: Fn(&[f64; 6]) -> f64>(rho: &F, p: &[f64; 6], h: f64) -> [f64; 6] {
    let mut g = [0.0; 6];
    for k in 0..6 {
        let mut a = *p;
        let mut b = *p;
        a[k] += h;
        b[k] -= h;
        g[k] = (rho(&a) - rho(&b)) / (2.0 * h);
    }
    g
}

/// `sum rho_{j kbar} v_j conj(v_k)`, as a quarter of the Laplacian of `rho`
/// on the complex line through `p` in direction `v`.
pub fn levi_quadratic<F: Fn(&[f64; 6]) -> f64>(rho: &F, p: &[f64; 6], v: &[C; 3], h: f64) -> f64 {
    let iv = [v[0] * C::new(0.0, 1.0), v[1] * C::new(0.0, 1.0), v[2] * C::new(0.0, 1.0)];
    let r0 = rho(p);
    let d2 = |w: &[C; 3]| (rho(&displaced(p, w, h)) - 2.0 * r0 + rho(&displaced(p, w, -h))) / (h * h);
    0.25 * (d2(v) + d2(&iv))
}

/// Hermitian matrix of the complex Hessian on the span of `basis`, by
/// polarization of [`levi_quadratic`].
pub fn complex_hessian<F: Fn(&[f64; 6]) -> f64>(rho: &F, p: &[f64; 6], basis: &[[C; 3]], h: f64) -> DMatrix<C> {
    let n = basis.len();
    let q = |v: &[C; 3]| levi_quadratic(rho, p, v, h);
    let diag: Vec<f64> = basis.iter().map(q).collect();
    let mut m = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = C::new(diag[j], 0.0);
        for k in (j + 1)..n {
            let sum = [basis[j][0] + basis[k][0], basis[j][1] + basis[k][1], basis[j][2] + basis[k][2]];
            let i = C::new(0.0, 1.0);
            let isum = [
                basis[j][0] + i * basis[k][0],
                basis[j][1] + i * basis[k][1],
                basis[j][2] + i * basis[k][2],
            ];
            let re = 0.5 * (q(&sum) - diag[j] - diag[k]);
            let im = 0.5 * (q(&isum) - diag[j] - diag[k]);
            m[(j, k)] = C::new(re, im);
            m[(k, j)] = C::new(re, -im);
        }
    }
    m
}

fn hermitian_eigen_range(m: &DMatrix<C>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (f64::INFINITY, f64::NEG_INFINITY);
    }
    let ev = m.clone().symmetric_eigenvalues();
    (ev.iter().cloned().fold(f64::INFINITY, f64::min), ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// Orthonormal basis of the complex tangent space `{v : sum d rho/dz_j v_j = 0}`.
fn complex_tangent_basis(grad: &[f64; 6]) -> Vec<[C; 3]> {
    // d rho / d zbar_j = (d_x + i d_y) / 2; the tangent space is its
    // Hermitian orthogonal complement
    let n: [C; 3] = [0, 1, 2].map(|j| C::new(grad[2 * j], grad[2 * j + 1]) * 0.5);
    let inner = |a: &[C; 3], b: &[C; 3]| -> C { (0..3).map(|j| a[j] * b[j].conj()).sum() };
    let norm = |a: &[C; 3]| inner(a, a).re.sqrt();
    let mut basis: Vec<[C; 3]> = Vec::new();
    let nn = norm(&n);
    if nn > 0.0 {
        basis.push(n.map(|z| z / nn));
    }
    for e in 0..3 {
        let mut v = [C::new(0.0, 0.0); 3];
        v[e] = C::new(1.0, 0.0);
        for b in basis.iter() {
            let c = inner(&v, b);
            for j in 0..3 {
                v[j] -= c * b[j];
            }
        }
        let l = norm(&v);
        if l > 1e-8 {
            basis.push(v.map(|z| z / l));
        }
        if basis.len() == 3 {
            break;
        }
    }
    if nn > 0.0 {
        basis.remove(0);
    }
    basis
}

/// Levi form at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeviAtPoint {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `|grad rho|`, for the normalized eigenvalue `min_eigenvalue / grad_norm`.
    pub grad_norm: f64,
    /// Minimum eigenvalue computed with the doubled step.
    pub min_eigenvalue_2h: f64,
    pub richardson_ok: bool,
}

impl LeviAtPoint {
    pub fn normalized_min(&self) -> f64 {
        self.min_eigenvalue / self.grad_norm
    }
}

/// Levi form of `rho` at `p`, restricted to the complex tangent space.
pub fn levi_at<F: Fn(&[f64; 6]) -> f64>(rho: &F, p: &[f64; 6], h: f64) -> LeviAtPoint {
    let grad = gradient(rho, p, h);
    let grad_norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    let basis = complex_tangent_basis(&grad);
    let (lo, hi) = hermitian_eigen_range(&complex_hessian(rho, p, &basis, h));
    let (lo2, _) = hermitian_eigen_range(&complex_hessian(rho, p, &basis, 2.0 * h));
    let richardson_ok = (lo - lo2).abs() <= RICHARDSON_TOL * lo.abs().max(1e-9);
    LeviAtPoint { min_eigenvalue: lo, max_eigenvalue: hi, grad_norm, min_eigenvalue_2h: lo2, richardson_ok }
}

/// Orthonormal basis of the real normal space of the orbit at `y`.
fn normal_basis(y: &Triple) -> [[f64; 6]; 3] {
    let t = OrbitFrame::new(*y).real_matrix();
    let mut vecs: Vec<SVector<f64, 6>> = Vec::new();
    for k in 0..3 {
        vecs.push(t.column(k).into_owned());
    }
    for e in 0..6 {
        let mut v = SVector::<f64, 6>::zeros();
        v[e] = 1.0;
        vecs.push(v);
    }
    let mut ortho: Vec<SVector<f64, 6>> = Vec::new();
    for v in vecs {
        let mut w = v;
        for _ in 0..2 {
            for o in ortho.iter() {
                w -= o * o.dot(&w);
            }
        }
        let l = w.norm();
        if l > 1e-8 && ortho.len() < 6 {
            ortho.push(w / l);
        }
    }
    [0, 1, 2].map(|k| {
        let v = &ortho[3 + k];
        [v[0], v[1], v[2], v[3], v[4], v[5]]
    })
}

/// The boundary point `y + r n` for `y = g(coords) zeta` and the unit normal
/// `n` mixing the normal basis with weights `mix`. Returns `(p, y)`.
pub fn tube_boundary_point(spec: &TubeSpec, coords: &Iwasawa, mix: [f64; 3]) -> (Triple, Triple) {
    let y = orbit_point(coords, &spec.zeta);
    let nb = normal_basis(&y);
    let mut n = [0.0; 6];
    for k in 0..3 {
        for j in 0..6 {
            n[j] += mix[k] * nb[k][j];
        }
    }
    let l = n.iter().map(|v| v * v).sum::<f64>().sqrt();
    let yr = y.to_reals();
    let p: [f64; 6] = std::array::from_fn(|j| yr[j] + spec.radius * n[j] / l);
    (Triple::from_reals(&p), y)
}

/// `rho = dist^2 - r^2` near a boundary point, warm-started at `coords`.
fn tube_rho(spec: &TubeSpec, coords: Iwasawa) -> impl Fn(&[f64; 6]) -> f64 + '_ {
    move |x: &[f64; 6]| {
        let t = Triple::from_reals(x);
        match orbit_distance_from(&t, &spec.zeta, coords) {
            Some(d) => d.dist_sq - spec.radius * spec.radius,
            None => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeviConfig {
    pub samples: usize,
    pub seed: u64,
    /// Range of the orbit coordinates of the sampled foot points.
    pub range: IwasawaRange,
    pub step: f64,
    pub record_series: bool,
}

impl Default for LeviConfig {
    fn default() -> Self {
        LeviConfig { samples: 200, seed: 0, range: IwasawaRange::new(0.5, 0.5), step: FD_STEP, record_series: false }
    }
}

struct LeviSample {
    index: usize,
    levi: LeviAtPoint,
    dist_error: f64,
    point: Triple,
}

/// Samples boundary points of the tube and checks the Levi form is positive
/// definite on the complex tangent space at each of them.
pub fn levi_form_check(spec: &TubeSpec, cfg: &LeviConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let chunks = run_chunks(cfg.seed, cfg.samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let coords = cfg.range.sample_coords(rng);
                let mix: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
                let (p, _) = tube_boundary_point(spec, &coords, mix);
                let found = orbit_distance_from(&p, &spec.zeta, coords);
                let dist_error = found.map(|d| (d.dist - spec.radius).abs()).unwrap_or(f64::INFINITY);
                let levi = levi_at(&tube_rho(spec, coords), &p.to_reals(), cfg.step);
                LeviSample { index: first + j, levi, dist_error, point: p }
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("levi-form", cfg.seed).detail("radius", spec.radius);
    let mut min_eig = f64::INFINITY;
    let mut min_norm = f64::INFINITY;
    let mut max_dist_error = 0.0f64;
    let mut richardson_failures = 0;
    let mut negative = 0;
    for s in chunks.into_iter().flatten() {
        report.samples += 1;
        min_eig = min_eig.min(s.levi.min_eigenvalue);
        min_norm = min_norm.min(s.levi.normalized_min());
        max_dist_error = max_dist_error.max(s.dist_error);
        if !s.levi.richardson_ok {
            richardson_failures += 1;
        }
        let positive = s.levi.min_eigenvalue > 0.0;
        if !positive {
            negative += 1;
        }
        if !(positive && s.levi.richardson_ok && s.dist_error < 1e-6) {
            let mut w = vec![s.index as f64];
            w.extend(s.point.to_reals());
            w.extend([s.levi.min_eigenvalue, s.levi.min_eigenvalue_2h, s.dist_error]);
            report.fail(w);
        }
        if cfg.record_series {
            report.series.push(s.levi.min_eigenvalue);
        }
    }
    if report.samples == 0 {
        return Err(Error::Config("at least one boundary sample is required".into()));
    }
    report.worst_margin = min_eig;
    report.set_detail("min_eigenvalue", min_eig);
    report.set_detail("min_normalized_eigenvalue", min_norm);
    report.set_detail("max_boundary_distance_error", max_dist_error);
    report.set_detail("richardson_failures", richardson_failures as f64);
    report.set_detail("non_positive_samples", negative as f64);
    Ok(report.timed(start))
}

/// Minimum Levi eigenvalue at a fixed foot point and normal direction for
/// each radius, as `(radius, min_eigenvalue, normalized)`.
pub fn levi_radius_scaling(zeta: &Triple, coords: &Iwasawa, mix: [f64; 3], radii: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    radii
        .iter()
        .map(|&r| {
            let spec = TubeSpec::new(*zeta, r)?;
            let (p, _) = tube_boundary_point(&spec, coords, mix);
            let levi = levi_at(&tube_rho(&spec, *coords), &p.to_reals(), FD_STEP);
            Ok((r, levi.min_eigenvalue, levi.normalized_min()))
        })
        .collect()
}

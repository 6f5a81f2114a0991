//! Totally-real rank of orbit tangent frames and the fixed-point system
//! behind freeness of the action on triples.

use std::time::Instant;

use nalgebra::{Matrix4, SMatrix};
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Sl2Element, Triple, DEGENERATE_TOL, C};
use crate::report::VerificationReport;
use crate::sampling::run_chunks;

/// Relative singular-value threshold for full rank.
pub const RANK_TOL: f64 = 1e-6;

/// A base point in C^3 together with three real tangent generators of its
/// orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitFrame {
    pub base: Triple,
    pub generators: [[C; 3]; 3],
}

impl OrbitFrame {
    /// Tangent vectors `d/dt exp(tX) * base` at `t = 0` for `X = E, F, H`.
    pub fn new(base: Triple) -> Self {
        let gen = |x: Sl2Element| -> [C; 3] {
            [x.vector_field(base.0[0]), x.vector_field(base.0[1]), x.vector_field(base.0[2])]
        };
        OrbitFrame { base, generators: [gen(Sl2Element::E), gen(Sl2Element::F), gen(Sl2Element::H)] }
    }

    pub fn from_generators(base: Triple, generators: [[C; 3]; 3]) -> Result<Self> {
        if generators.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite generator".into()));
        }
        Ok(OrbitFrame { base, generators })
    }

    /// Real 6x6 matrix with columns `v_k` and `i v_k`, rows
    /// `(Re z1, Im z1, ..., Re z3, Im z3)`.
    pub fn real_matrix(&self) -> SMatrix<f64, 6, 6> {
        let mut m = SMatrix::<f64, 6, 6>::zeros();
        for (k, v) in self.generators.iter().enumerate() {
            for j in 0..3 {
                let iv = C::new(0.0, 1.0) * v[j];
                m[(2 * j, k)] = v[j].re;
                m[(2 * j + 1, k)] = v[j].im;
                m[(2 * j, k + 3)] = iv.re;
                m[(2 * j + 1, k + 3)] = iv.im;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotallyRealRank {
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Numerical rank at the relative threshold.
    pub rank: usize,
    pub rank6: bool,
}

/// `T` is totally real iff `T + iT` has real dimension 6, i.e. the span of
/// `{v_k, i v_k}` is all of R^6.
pub fn totally_real_rank(frame: &OrbitFrame) -> TotallyRealRank {
    let sv = frame.real_matrix().singular_values();
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * sigma_max).count();
    TotallyRealRank { sigma_min, sigma_max, rank, rank6: sigma_min > RANK_TOL * sigma_max }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreenessCertificate {
    pub free: bool,
    pub rank: usize,
    pub singular_values: [f64; 4],
    /// Distance of the unit null vector from the line through `(1, 0, 0, 1)`.
    pub null_residual: f64,
}

/// Solves `a z_i + b - c z_i^2 - d z_i = 0` for `(a, b, c, d)`, i.e. all
/// matrices fixing the three points. The action is free at `t` iff the
/// solution space is spanned by the identity.
pub fn freeness_certificate(t: &Triple) -> Result<FreenessCertificate> {
    let md = t.min_pairwise_distance();
    if !(md > DEGENERATE_TOL) {
        return Err(Error::DegenerateTriple { min_distance: md });
    }
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let mut m = Matrix4::<C>::from_element(zero);
    for (i, z) in t.0.iter().enumerate() {
        m[(i, 0)] = *z;
        m[(i, 1)] = one;
        m[(i, 2)] = -z * z;
        m[(i, 3)] = -z;
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::SearchFailed("SVD without right vectors".into()))?;
    let mut sv = [0.0; 4];
    for (k, s) in svd.singular_values.iter().enumerate() {
        sv[k] = *s;
    }
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-9 * smax).count();
    let (kmin, _) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("four singular values");
    // right singular vector: conjugate of the row of V^H
    let v: Vec<C> = (0..4).map(|j| v_t[(kmin, j)].conj()).collect();
    let u = [one, zero, zero, one].map(|x| x / 2f64.sqrt());
    let proj: C = v.iter().zip(u.iter()).map(|(a, b)| a * b.conj()).sum();
    let null_residual = v
        .iter()
        .zip(u.iter())
        .map(|(a, b)| (a - proj * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(FreenessCertificate { free: rank == 3 && null_residual < 1e-8, rank, singular_values: sv, null_residual })
}

/// Absolute `sigma_min` bound for frames at triples with a repeated component.
pub const DEGENERATE_SIGMA: f64 = 1e-10;

/// Random triple with `Re z` in `[-3, 3]` and `Im z` in `[0.1, 3]`,
/// resampled until the components are at least `0.05` apart.
pub fn random_distinct_triple<R: Rng + ?Sized>(rng: &mut R) -> Triple {
    loop {
        let mut z = || C::new(rng.random_range(-3.0..3.0), rng.random_range(0.1..3.0));
        let t = Triple::new(z(), z(), z());
        if t.min_pairwise_distance() > 0.05 {
            return t;
        }
    }
}

/// Full rank at random distinct triples, and `sigma_min` below
/// [`DEGENERATE_SIGMA`] once a component is repeated.
pub fn totally_real_audit(samples: usize, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let t = random_distinct_triple(rng);
                let slot = rng.random_range(0..3usize);
                let mut d = t;
                d.0[(slot + 1) % 3] = d.0[slot];
                (first + j, t, totally_real_rank(&OrbitFrame::new(t)), totally_real_rank(&OrbitFrame::new(d)))
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("totally-real", seed);
    let (mut min_rel, mut max_degenerate) = (f64::INFINITY, 0.0f64);
    for (k, t, good, bad) in rows.into_iter().flatten() {
        report.samples += 1;
        min_rel = min_rel.min(good.sigma_min / good.sigma_max);
        max_degenerate = max_degenerate.max(bad.sigma_min);
        if !good.rank6 || !(bad.sigma_min < DEGENERATE_SIGMA) {
            let mut w = vec![k as f64];
            w.extend(t.to_reals());
            w.extend([good.sigma_min, good.sigma_max, bad.sigma_min]);
            report.fail(w);
        }
    }
    report.worst_margin = min_rel - RANK_TOL;
    report.set_detail("min_relative_sigma", min_rel);
    report.set_detail("max_degenerate_sigma", max_degenerate);
    report.timed(start)
}

/// Freeness certificates at random distinct triples.
pub fn freeness_audit(samples: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let rows = run_chunks(seed, samples, |rng, first, len| {
        (0..len)
            .map(|j| {
                let t = random_distinct_triple(rng);
                freeness_certificate(&t).map(|c| (first + j, t, c))
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("freeness", seed);
    let mut max_null = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for row in rows.into_iter().flatten() {
        let (k, t, c) = row?;
        report.samples += 1;
        max_null = max_null.max(c.null_residual);
        // third singular value over the first: the distance from a 2-dim nullspace
        let mut sv = c.singular_values;
        sv.sort_by(|a, b| b.total_cmp(a));
        min_gap = min_gap.min(sv[2] / sv[0]);
        if !c.free {
            let mut w = vec![k as f64];
            w.extend(t.to_reals());
            w.push(c.rank as f64);
            report.fail(w);
        }
    }
    report.worst_margin = min_gap;
    report.set_detail("max_null_residual", max_null);
    report.set_detail("min_relative_sigma3", min_gap);
    Ok(report.timed(start))
}

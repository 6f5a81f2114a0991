//! Monte Carlo certification of the lower bound `|psi(gh)| > eps` for real
//! `g` and `h` near the identity, of the inequality behind it, and the
//! explicit zeros of the rejected character `(a + ic)^2`.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{boost, phi_prelim, psi, shear, UniMat2, C};
use crate::report::{matrix_witness, VerificationReport};
use crate::sampling::{disc_point, near_identity, run_chunks, IwasawaRange};

pub const DEFAULT_EPS: f64 = 1.0 / 3.0;
pub const DEFAULT_DELTA: f64 = 0.3;
/// Largest admissible `delta`: the bound is proved for `delta < 1/3`.
pub const DELTA_LIMIT: f64 = 1.0 / 3.0;
/// `43/6 eps^2 < 1` keeps the final inequality effective.
pub const CLAIM_EPS_LIMIT: f64 = 0.373;
/// Real and imaginary parts of `b, c` in the level-set sampler lie in
/// `[-CLAIM_ENTRY_RANGE, CLAIM_ENTRY_RANGE]`.
pub const CLAIM_ENTRY_RANGE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaConfig {
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub range: IwasawaRange,
    pub seed: u64,
    pub record_series: bool,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            eps: DEFAULT_EPS,
            delta: DEFAULT_DELTA,
            trials: 100_000,
            range: IwasawaRange::new(10.0, 10.0),
            seed: 0,
            record_series: false,
        }
    }
}

impl LemmaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < DELTA_LIMIT) {
            return Err(Error::Config(format!("delta must lie in (0, 1/3), got {}", self.delta)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config("eps must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }
}

struct Extreme {
    value: f64,
    index: usize,
    witness: Vec<f64>,
}

impl Extreme {
    fn none() -> Self {
        Extreme { value: f64::INFINITY, index: usize::MAX, witness: Vec::new() }
    }

    fn offer(&mut self, value: f64, index: usize, witness: impl FnOnce() -> Vec<f64>) {
        if value < self.value || (value == self.value && index < self.index) {
            self.value = value;
            self.index = index;
            self.witness = witness();
        }
    }

    fn merge(&mut self, other: Extreme) {
        if other.value < self.value || (other.value == self.value && other.index < self.index) {
            *self = other;
        }
    }
}

struct LemmaChunk {
    min_psi: Extreme,
    violations: u64,
    first_violation: Option<(usize, Vec<f64>)>,
    series: Vec<f64>,
}

/// Draws `g` in SL(2,R) and `h` with `|h - I| < delta`, and checks
/// `|psi(gh)| > eps`. Also reports the induced bound `|phi(gh)| > eps^2/4`.
pub fn check_lemma(cfg: &LemmaConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let start = Instant::now();
    let chunks = run_chunks(cfg.seed, cfg.trials, |rng: &mut ChaCha8Rng, first, len| {
        let mut out = LemmaChunk {
            min_psi: Extreme::none(),
            violations: 0,
            first_violation: None,
            series: if cfg.record_series { Vec::with_capacity(len) } else { Vec::new() },
        };
        for j in 0..len {
            let idx = first + j;
            let g = cfg.range.sample(rng);
            let h = near_identity(rng, cfg.delta);
            let gh = g.mul(&h);
            let m = psi(&gh).norm();
            out.min_psi.offer(m, idx, || matrix_witness(&[&g, &h]));
            if !(m > cfg.eps) {
                out.violations += 1;
                if out.first_violation.is_none() {
                    out.first_violation = Some((idx, matrix_witness(&[&g, &h])));
                }
            }
            if cfg.record_series {
                out.series.push(m);
            }
        }
        out
    });
    let mut min_psi = Extreme::none();
    let mut violations = 0;
    let mut first_violation = None;
    let mut series = Vec::new();
    for c in chunks {
        min_psi.merge(c.min_psi);
        violations += c.violations;
        if first_violation.is_none() {
            first_violation = c.first_violation;
        }
        series.extend(c.series);
    }
    let phi_bound = cfg.eps * cfg.eps / 4.0;
    let min_phi = min_psi.value * min_psi.value / 4.0;
    let mut report = VerificationReport::new("lemma", cfg.seed)
        .detail("eps", cfg.eps)
        .detail("delta", cfg.delta)
        .detail("iwasawa_t", cfg.range.t)
        .detail("iwasawa_n", cfg.range.n)
        .detail("min_abs_psi", min_psi.value)
        .detail("min_abs_phi", min_phi)
        .detail("phi_bound", phi_bound)
        .detail("violations", violations as f64);
    report.samples = cfg.trials as u64;
    report.worst_margin = min_psi.value - cfg.eps;
    if let Some((idx, w)) = first_violation {
        let mut witness = vec![idx as f64];
        witness.extend(w);
        report.fail(witness);
    }
    report.series = series;
    Ok(report.timed(start))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimConfig {
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub record_series: bool,
}

impl Default for ClaimConfig {
    fn default() -> Self {
        ClaimConfig { eps: DEFAULT_EPS, trials: 100_000, seed: 0, record_series: false }
    }
}

/// A point of the level set `{g in SL(2,C) : psi(g) = w}`, built from `b`,
/// `c` and `w` by solving `a + d = i(b - c) + w`, `ad = 1 + bc` for `a, d`.
pub fn sample_psi_level_set(b: C, c: C, w: C, larger_root_first: bool) -> UniMat2 {
    let i = C::new(0.0, 1.0);
    let s = i * (b - c) + w;
    let p = 1.0 + b * c;
    let disc = (s * s - 4.0 * p).sqrt();
    let (r1, r2) = ((s + disc) / 2.0, (s - disc) / 2.0);
    // the root of smaller modulus is recomputed from the product for accuracy
    let (big, small) = if r1.norm() >= r2.norm() { (r1, r2) } else { (r2, r1) };
    let small = if big.norm() > 0.0 { p / big } else { small };
    let (a, d) = if larger_root_first { (big, small) } else { (small, big) };
    UniMat2::raw(a, b, c, d)
}

fn re_im_norms(g: &UniMat2) -> (f64, f64) {
    let re = g.re_part().iter().map(|v| v * v).sum::<f64>().sqrt();
    let im = g.im_part().iter().map(|v| v * v).sum::<f64>().sqrt();
    (re, im)
}

struct ClaimChunk {
    final_margin: Extreme,
    claim_margin: Extreme,
    max_abs_psi: f64,
    max_det_residual: f64,
    violation: Option<(usize, Vec<f64>)>,
    violations: u64,
    series: Vec<f64>,
}

/// On samples with `|psi(g)| <= eps`, checks
/// `|Re g|^2 <= 4|Im g|^2 + 5(43/6 eps^2 - 1)` and `|Re g| <= 2|Im g|`.
pub fn check_lemma_claim(cfg: &ClaimConfig) -> Result<VerificationReport> {
    if !(cfg.eps > 0.0 && cfg.eps <= CLAIM_EPS_LIMIT) {
        return Err(Error::Config(format!("eps must lie in (0, {CLAIM_EPS_LIMIT}], got {}", cfg.eps)));
    }
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let offset = 5.0 * (43.0 / 6.0 * cfg.eps * cfg.eps - 1.0);
    let r = CLAIM_ENTRY_RANGE;
    let chunks = run_chunks(cfg.seed, cfg.trials, |rng, first, len| {
        let mut out = ClaimChunk {
            final_margin: Extreme::none(),
            claim_margin: Extreme::none(),
            max_abs_psi: 0.0,
            max_det_residual: 0.0,
            violation: None,
            violations: 0,
            series: Vec::new(),
        };
        for j in 0..len {
            let idx = first + j;
            let b = C::new(rng.random_range(-r..=r), rng.random_range(-r..=r));
            let c = C::new(rng.random_range(-r..=r), rng.random_range(-r..=r));
            let w = disc_point(rng, cfg.eps);
            let g = sample_psi_level_set(b, c, w, rng.random::<bool>());
            out.max_abs_psi = out.max_abs_psi.max(psi(&g).norm());
            out.max_det_residual = out.max_det_residual.max((g.det() - 1.0).norm());
            let (re, im) = re_im_norms(&g);
            let final_margin = 4.0 * im * im + offset - re * re;
            let claim_margin = 2.0 * im - re;
            out.final_margin.offer(final_margin, idx, || matrix_witness(&[&g]));
            out.claim_margin.offer(claim_margin, idx, || matrix_witness(&[&g]));
            if !(final_margin >= 0.0 && claim_margin >= 0.0) {
                out.violations += 1;
                if out.violation.is_none() {
                    out.violation = Some((idx, matrix_witness(&[&g])));
                }
            }
            if cfg.record_series {
                out.series.push(final_margin);
            }
        }
        out
    });
    let mut final_margin = Extreme::none();
    let mut claim_margin = Extreme::none();
    let (mut max_psi, mut max_det, mut violations) = (0.0f64, 0.0f64, 0u64);
    let mut violation = None;
    let mut series = Vec::new();
    for c in chunks {
        final_margin.merge(c.final_margin);
        claim_margin.merge(c.claim_margin);
        max_psi = max_psi.max(c.max_abs_psi);
        max_det = max_det.max(c.max_det_residual);
        violations += c.violations;
        if violation.is_none() {
            violation = c.violation;
        }
        series.extend(c.series);
    }
    let mut report = VerificationReport::new("lemma-claim", cfg.seed)
        .detail("eps", cfg.eps)
        .detail("final_offset", offset)
        .detail("min_final_margin", final_margin.value)
        .detail("min_claim_margin", claim_margin.value)
        .detail("max_abs_psi", max_psi)
        .detail("max_det_residual", max_det)
        .detail("violations", violations as f64);
    report.samples = cfg.trials as u64;
    report.worst_margin = final_margin.value.min(claim_margin.value);
    if let Some((idx, w)) = violation {
        let mut witness = vec![idx as f64];
        witness.extend(w);
        report.fail(witness);
    }
    report.series = series;
    Ok(report.timed(start))
}

/// A point `g h` with `g` real, `|h - I| < delta` and `a + ic` vanishing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSquareZero {
    pub g: UniMat2,
    pub h: UniMat2,
    /// `(a + ic)` evaluated at `g h`.
    pub value: C,
    pub h_distance: f64,
}

/// Constructs `g = diag(e^-s, e^s) n(u)` and the lower-triangular
/// `h = [[1, 0], [q, 1]]` solving `(a + ic)(gh) = 0`, where
/// `q = -(g11 + i g21) / (g12 + i g22)` has modulus at most `e^(-2s)`.
pub fn find_phi_square_zero(delta: f64, seed: u64) -> Result<PhiSquareZero> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("delta must be positive".into()));
    }
    let mut rng = crate::sampling::chunk_rng(seed, 0);
    let u = rng.random_range(-1.0..1.0);
    let s = 0.5 * (2.0 / delta).ln().max(0.0) + 0.1;
    let g = boost(-s).mul(&shear(u));
    let i = C::new(0.0, 1.0);
    let q = -(g.a + i * g.c) / (g.b + i * g.d);
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let h = UniMat2::new(one, zero, q, one)?;
    let value = phi_prelim(&g.mul(&h));
    let h_distance = h.dist(&UniMat2::IDENTITY);
    if !(value.norm() < 1e-6 && h_distance < delta) {
        return Err(Error::SearchFailed(format!(
            "constructed witness has |a + ic| = {:e}, |h - I| = {h_distance}",
            value.norm()
        )));
    }
    Ok(PhiSquareZero { g, h, value, h_distance })
}

/// Report wrapper around [`find_phi_square_zero`]: passes iff a zero of
/// `a + ic` is found with `|h - I| < delta`.
pub fn phi_square_zero_report(delta: f64, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new("phi-square-zero", seed).detail("delta", delta);
    report.samples = 1;
    match find_phi_square_zero(delta, seed) {
        Ok(z) => {
            report.worst_margin = (delta - z.h_distance).min(1e-6 - z.value.norm());
            report.set_detail("abs_value", z.value.norm());
            report.set_detail("h_distance", z.h_distance);
            report.witness = Some(matrix_witness(&[&z.g, &z.h]));
        }
        Err(_) => report.fail_plain(),
    }
    report.timed(start)
}

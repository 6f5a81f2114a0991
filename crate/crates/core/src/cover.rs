//! Branch-tracked analytic continuation of `log phi` and `phi^(1/k)`, the
//! universal cover of PSL(2,R) and its k-sheeted quotients, and their
//! lifted actions on the graph domains over the base domain.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    act_triple, big_phi_inverse, phi_main_sl, rotation, Iwasawa, ProjMat2, Triple, UniMat2, C,
};
use crate::orbit::translate_distance;
use crate::report::VerificationReport;
use crate::sampling::{disc_point, run_chunks, unit_complex_vector, IwasawaRange};

pub const BRANCH_FLOOR: f64 = 1e-8;
pub const REFINEMENT_BUDGET: u32 = 20;
/// Relative tolerance for `exp(initial) = values[0]`.
pub const INITIAL_TOL: f64 = 1e-9;
/// Radius of the discs around the branches of `log phi`; not configurable.
pub const DISC_RADIUS: f64 = 1.0;

const TWO_PI_I: C = C::new(0.0, 2.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Continuation {
    pub branch_floor: f64,
    pub refinement_budget: u32,
}

impl Default for Continuation {
    fn default() -> Self {
        Continuation { branch_floor: BRANCH_FLOOR, refinement_budget: REFINEMENT_BUDGET }
    }
}

impl Continuation {
    fn check_floor(&self, v: C, index: usize) -> Result<()> {
        let m = v.norm();
        if !(m > self.branch_floor) {
            return Err(Error::BranchFloor { index, modulus: m });
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F>(&self, f: &mut F, ta: f64, tb: f64, va: C, vb: C, depth: u32, index: usize) -> Result<C>
    where
        F: FnMut(f64) -> Result<C>,
    {
        let ratio = vb / va;
        if ratio.arg().abs() < PI / 2.0 {
            return Ok(ratio.ln());
        }
        if depth >= self.refinement_budget {
            return Err(Error::RefinementExhausted { index });
        }
        let tm = 0.5 * (ta + tb);
        let vm = f(tm)?;
        self.check_floor(vm, index)?;
        Ok(self.refine(f, ta, tm, va, vm, depth + 1, index)?
            + self.refine(f, tm, tb, vm, vb, depth + 1, index)?)
    }

    /// Continues `log f(t)` over the knots, bisecting any step whose
    /// argument jump is not below `pi/2`. Returns the terminal value.
    pub fn continue_log<F>(&self, mut f: F, knots: &[f64], initial_log: C) -> Result<C>
    where
        F: FnMut(f64) -> Result<C>,
    {
        let Some(&t0) = knots.first() else {
            return Ok(initial_log);
        };
        let mut prev = f(t0)?;
        self.check_floor(prev, 0)?;
        let mut acc = initial_log;
        for (i, w) in knots.windows(2).enumerate() {
            let next = f(w[1])?;
            self.check_floor(next, i + 1)?;
            acc += self.refine(&mut f, w[0], w[1], prev, next, 0, i)?;
            prev = next;
        }
        Ok(acc)
    }
}

fn check_initial(initial_value: C, first: C) -> Result<()> {
    if (initial_value - first).norm() > INITIAL_TOL * first.norm() {
        return Err(Error::InitialMismatch);
    }
    Ok(())
}

fn polyline(values: &[C]) -> impl FnMut(f64) -> Result<C> + '_ {
    move |t: f64| {
        let n = values.len() - 1;
        let k = (t.floor() as usize).min(n.saturating_sub(1));
        let frac = t - k as f64;
        if n == 0 || frac == 0.0 {
            return Ok(values[k]);
        }
        Ok(values[k] + (values[k + 1] - values[k]) * frac)
    }
}

/// Terminal value of the continuous logarithm along the polyline through
/// `values`, starting from `initial_log`.
pub fn log_continue(values: &[C], initial_log: C, opts: &Continuation) -> Result<C> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    opts.check_floor(values[0], 0)?;
    check_initial(initial_log.exp(), values[0])?;
    let knots: Vec<f64> = (0..values.len()).map(|k| k as f64).collect();
    opts.continue_log(polyline(values), &knots, initial_log)
}

/// Terminal value of the continuous k-th root along the polyline through
/// `values`, starting from `initial_root`.
pub fn root_continue_k(values: &[C], initial_root: C, k: u32, opts: &Continuation) -> Result<C> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    if values.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    opts.check_floor(values[0], 0)?;
    check_initial(initial_root.powu(k), values[0])?;
    let start = values[0].ln();
    let end = log_continue(values, start, opts)?;
    Ok(initial_root * ((end - start) / k as f64).exp())
}

/// One piece of a path in SL(2,R) starting at the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PathPiece {
    /// `t -> rotation(n pi t)`: `n` traversals of the generator loop of
    /// PSL(2,R) (negative `n` runs backwards).
    Loops(i64),
    /// `t -> k(t theta) a(t s) n(t u)`.
    Iwasawa(Iwasawa),
}

impl PathPiece {
    fn at(&self, t: f64) -> UniMat2 {
        match *self {
            PathPiece::Loops(n) => rotation(n as f64 * PI * t),
            PathPiece::Iwasawa(p) => Iwasawa::new(t * p.theta, t * p.s, t * p.u).matrix(),
        }
    }

    fn knot_count(&self) -> usize {
        match *self {
            PathPiece::Loops(n) => 16 * n.unsigned_abs().max(1) as usize + 1,
            PathPiece::Iwasawa(_) => 33,
        }
    }
}

/// A continuous path from the identity, the concatenation of its pieces:
/// each piece starts where the previous one ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupPath {
    pieces: Vec<PathPiece>,
    pub refinement_budget: u32,
}

impl GroupPath {
    /// Builds a path; empty loop pieces are dropped.
    pub fn new(mut pieces: Vec<PathPiece>) -> Self {
        pieces.retain(|p| *p != PathPiece::Loops(0));
        GroupPath { pieces, refinement_budget: REFINEMENT_BUDGET }
    }

    pub fn pieces(&self) -> &[PathPiece] {
        &self.pieces
    }

    /// Value at `t` in `[0, 1]`, pieces sharing the interval equally.
    pub fn at(&self, t: f64) -> UniMat2 {
        let m = self.pieces.len();
        if m == 0 {
            return UniMat2::IDENTITY;
        }
        let scaled = (t.clamp(0.0, 1.0) * m as f64).min(m as f64);
        let k = (scaled.floor() as usize).min(m - 1);
        let mut acc = UniMat2::IDENTITY;
        for piece in &self.pieces[..k] {
            acc = acc.mul(&piece.at(1.0));
        }
        acc.mul(&self.pieces[k].at(scaled - k as f64))
    }

    pub fn endpoint(&self) -> UniMat2 {
        self.pieces.iter().fold(UniMat2::IDENTITY, |acc, p| acc.mul(&p.at(1.0)))
    }

    /// `n + 1` evenly spaced samples, the first being the identity.
    pub fn samples(&self, n: usize) -> Vec<ProjMat2> {
        (0..=n).map(|k| ProjMat2::new(self.at(k as f64 / n as f64))).collect()
    }

    /// Continues `log f(left * path(t) * right)` from `initial_log`.
    pub fn continue_log<F>(&self, f: F, left: &UniMat2, right: &UniMat2, initial_log: C) -> Result<C>
    where
        F: Fn(&UniMat2) -> C,
    {
        let opts = Continuation { refinement_budget: self.refinement_budget, ..Default::default() };
        let mut acc = initial_log;
        let mut offset = *left;
        for piece in &self.pieces {
            let knots: Vec<f64> = {
                let n = piece.knot_count();
                (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
            };
            let eval = |t: f64| Ok(f(&offset.mul(&piece.at(t)).mul(right)));
            // the piece starts where the previous one ended: keep the branch
            acc = opts.continue_log(eval, &knots, acc)?;
            offset = offset.mul(&piece.at(1.0));
        }
        Ok(acc)
    }
}

/// Continuation of `log phi(left * path(t) * right)`.
fn continue_log_phi(path: &GroupPath, left: &UniMat2, right: &UniMat2, initial: C) -> Result<C> {
    path.continue_log(phi_main_sl, left, right, initial)
}

/// Tolerance for recognizing `branch - short_branch` as an integer multiple
/// of `2 pi i`.
const BRANCH_INTEGRALITY_TOL: f64 = 1e-6;

/// An element of the universal cover of PSL(2,R): an endpoint together
/// with the value of `log phi` at the endpoint continued from `log phi(e) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverElement {
    endpoint: ProjMat2,
    branch: C,
}

impl CoverElement {
    pub fn identity() -> Self {
        CoverElement { endpoint: ProjMat2::IDENTITY, branch: C::new(0.0, 0.0) }
    }

    /// The central element over the identity reached by `n` generator loops.
    pub fn deck(n: i64) -> Self {
        CoverElement { endpoint: ProjMat2::IDENTITY, branch: TWO_PI_I * n as f64 }
    }

    /// Checked constructor: the endpoint must be real and `exp(branch)` must
    /// equal `phi(endpoint)`.
    pub fn new(endpoint: ProjMat2, branch: C) -> Result<Self> {
        if !endpoint.rep().is_real(1e-12) {
            return Err(Error::InvalidInput("cover endpoint must lie in PSL(2,R)".into()));
        }
        let target = phi_main_sl(endpoint.rep());
        if (branch.exp() - target).norm() > 1e-9 * target.norm() {
            return Err(Error::InvalidInput("branch is not a logarithm of phi(endpoint)".into()));
        }
        let x = CoverElement { endpoint, branch };
        x.loop_count()?;
        Ok(x)
    }

    /// The element represented by `n` generator loops followed by the short
    /// Iwasawa path to `k(theta) a(s) n(u)`.
    pub fn from_iwasawa(p: Iwasawa, loops: i64) -> Result<Self> {
        let path = GroupPath::new(vec![PathPiece::Loops(loops), PathPiece::Iwasawa(p)]);
        let branch = continue_log_phi(&path, &UniMat2::IDENTITY, &UniMat2::IDENTITY, C::new(0.0, 0.0))?;
        Ok(CoverElement { endpoint: ProjMat2::new(path.endpoint()), branch })
    }

    /// Lift of `g` along its short canonical path.
    pub fn lift(g: &ProjMat2) -> Result<Self> {
        let p = Iwasawa::of_psl(g.rep());
        let short = short_branch(&p)?;
        Ok(CoverElement { endpoint: *g, branch: short })
    }

    pub fn endpoint(&self) -> &ProjMat2 {
        &self.endpoint
    }

    pub fn branch(&self) -> C {
        self.branch
    }

    fn short_coords(&self) -> Iwasawa {
        Iwasawa::of_psl(self.endpoint.rep())
    }

    /// Number of generator loops prepended in the canonical path.
    pub fn loop_count(&self) -> Result<i64> {
        let short = short_branch(&self.short_coords())?;
        let diff = (self.branch - short) / TWO_PI_I;
        let n = diff.re.round();
        if (diff - n).norm() > BRANCH_INTEGRALITY_TOL {
            return Err(Error::InvalidInput(format!(
                "branch differs from the short lift by {diff}, not an integer number of loops"
            )));
        }
        Ok(n as i64)
    }

    /// `n` generator loops, then the short Iwasawa path of the endpoint.
    pub fn canonical_path(&self) -> Result<GroupPath> {
        Ok(GroupPath::new(vec![PathPiece::Loops(self.loop_count()?), PathPiece::Iwasawa(self.short_coords())]))
    }

    /// Equal endpoints (projectively, within `tol`) and branches closer than pi.
    pub fn approx_eq(&self, other: &CoverElement, tol: f64) -> bool {
        self.endpoint.dist(&other.endpoint) <= tol * (1.0 + self.endpoint.rep().norm())
            && (self.branch - other.branch).norm() < PI
    }

    /// Image in the k-sheeted cover.
    pub fn to_sheeted(&self, k: u32) -> SheetedElement {
        SheetedElement { endpoint: self.endpoint, root: (self.branch / k as f64).exp(), k }
    }
}

fn short_branch(p: &Iwasawa) -> Result<C> {
    let path = GroupPath::new(vec![PathPiece::Iwasawa(*p)]);
    continue_log_phi(&path, &UniMat2::IDENTITY, &UniMat2::IDENTITY, C::new(0.0, 0.0))
}

/// Product in the universal cover: `x` followed by `x.endpoint * path(y)`.
pub fn cover_mul(x: &CoverElement, y: &CoverElement) -> Result<CoverElement> {
    let path = y.canonical_path()?;
    let branch = continue_log_phi(&path, x.endpoint.rep(), &UniMat2::IDENTITY, x.branch)?;
    Ok(CoverElement { endpoint: x.endpoint.mul(&y.endpoint), branch })
}

pub fn cover_inv(x: &CoverElement) -> Result<CoverElement> {
    let ginv = x.endpoint.inv();
    let candidate = CoverElement::lift(&ginv)?;
    let prod = cover_mul(x, &candidate)?;
    let m = (prod.branch / TWO_PI_I).re.round();
    Ok(CoverElement { endpoint: ginv, branch: candidate.branch - TWO_PI_I * m })
}

/// An element of the k-sheeted cover: endpoint plus the continued value of
/// `phi^(1/k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SheetedElement {
    endpoint: ProjMat2,
    root: C,
    k: u32,
}

impl SheetedElement {
    pub fn identity(k: u32) -> Self {
        SheetedElement { endpoint: ProjMat2::IDENTITY, root: C::new(1.0, 0.0), k }
    }

    pub fn endpoint(&self) -> &ProjMat2 {
        &self.endpoint
    }

    pub fn root(&self) -> C {
        self.root
    }

    pub fn sheets(&self) -> u32 {
        self.k
    }

    /// A representative in the universal cover.
    fn representative(&self) -> Result<CoverElement> {
        let base = CoverElement::lift(&self.endpoint)?;
        let r0 = (base.branch / self.k as f64).exp();
        // root = r0 * e^(2 pi i m / k) for the sheet index m
        let m = ((self.root / r0).arg() / (2.0 * PI) * self.k as f64).round() as i64;
        Ok(CoverElement { endpoint: self.endpoint, branch: base.branch + TWO_PI_I * m as f64 })
    }

    /// Product, computing the root by continuing `phi^(1/k)` along
    /// `x.endpoint * path(y)`.
    pub fn mul(&self, other: &SheetedElement) -> Result<SheetedElement> {
        if self.k != other.k {
            return Err(Error::InvalidInput("sheet counts differ".into()));
        }
        let path = other.representative()?.canonical_path()?;
        let start = phi_main_sl(self.endpoint.rep()).ln();
        let end = continue_log_phi(&path, self.endpoint.rep(), &UniMat2::IDENTITY, start)?;
        Ok(SheetedElement {
            endpoint: self.endpoint.mul(&other.endpoint),
            root: self.root * ((end - start) / self.k as f64).exp(),
            k: self.k,
        })
    }

    pub fn approx_eq(&self, other: &SheetedElement, tol: f64) -> bool {
        self.k == other.k
            && self.endpoint.dist(&other.endpoint) <= tol * (1.0 + self.endpoint.rep().norm())
            && (self.root - other.root).norm() <= tol * (1.0 + self.root.norm())
    }
}

/// The base domain: the G-saturation `G * B(zeta, radius)` of a ball about
/// the base triple, a G-invariant neighborhood of the orbit of `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseDomain {
    pub zeta: Triple,
    pub radius: f64,
}

impl Default for BaseDomain {
    fn default() -> Self {
        BaseDomain { zeta: Triple::default_base(), radius: 0.1 }
    }
}

impl BaseDomain {
    pub fn new(zeta: Triple, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !(radius < 0.5 * zeta.min_pairwise_distance()) {
            return Err(Error::InvalidInput("tube radius out of range".into()));
        }
        if !zeta.is_distinct_halfplane(crate::group::DEGENERATE_TOL) {
            return Err(Error::DegenerateTriple { min_distance: zeta.min_pairwise_distance() });
        }
        Ok(BaseDomain { zeta, radius })
    }

    /// Exact membership through `min_g |g z - zeta| < radius`.
    pub fn contains(&self, z: &Triple) -> Result<bool> {
        if !z.is_distinct_halfplane(crate::group::DEGENERATE_TOL) {
            return Ok(false);
        }
        Ok(translate_distance(z, &self.zeta)?.dist < self.radius)
    }

    /// A point `g * (zeta + n)` with `g` Iwasawa-sampled and `|n| < radius`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, range: &IwasawaRange) -> Result<Triple> {
        let g = range.sample(rng);
        let dir: [C; 3] = unit_complex_vector(rng);
        let r = self.radius * rng.random::<f64>().powf(1.0 / 6.0) * (1.0 - 1e-9);
        let n = [dir[0] * r, dir[1] * r, dir[2] * r];
        act_triple(&g, &self.zeta.add(&n))
    }

    /// `phi(Phi^-1(z))` together with the group coordinate `Phi^-1(z)`.
    pub fn phi_hat(&self, z: &Triple) -> Result<(ProjMat2, C)> {
        let h = big_phi_inverse(z, &self.zeta)?;
        Ok((h, phi_main_sl(h.rep())))
    }
}

/// A point `(z, w)` of the lifted domain: `z` in the base domain and `w`
/// within distance 1 of a value of `log phi(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftedPoint {
    pub z: Triple,
    pub w: C,
}

impl LiftedPoint {
    pub fn new(z: Triple, w: C) -> Self {
        LiftedPoint { z, w }
    }

    /// Deck shift `w -> w + 2 pi i n`.
    pub fn deck_shift(&self, n: i64) -> LiftedPoint {
        LiftedPoint { z: self.z, w: self.w + TWO_PI_I * n as f64 }
    }
}

/// Returns the branch `L` of `log phi(z)` with `|w - L| < 1`, if any.
///
/// Assumes `z` lies in the base domain; only the cheap necessary conditions
/// (distinct components in the upper half-plane, `phi` above the branch
/// floor) are checked here. Use [`BaseDomain::contains`] for the full test.
pub fn omega_tilde_membership(p: &LiftedPoint, domain: &BaseDomain) -> Option<C> {
    if !p.z.is_distinct_halfplane(crate::group::DEGENERATE_TOL) {
        return None;
    }
    let (_, value) = domain.phi_hat(&p.z).ok()?;
    if !(value.norm() > BRANCH_FLOOR) {
        return None;
    }
    let principal = value.ln();
    let n = ((p.w.im - principal.im) / (2.0 * PI)).round();
    let branch = principal + TWO_PI_I * n;
    ((p.w - branch).norm() < DISC_RADIUS).then_some(branch)
}

/// `g~ (z, w) = (g z, w - log phi(z) + log phi(g~ z))`, the second logarithm
/// continued along `t -> path(t) * Phi^-1(z)` from the branch nearest `w`.
pub fn lift_action(gt: &CoverElement, p: &LiftedPoint, domain: &BaseDomain) -> Result<LiftedPoint> {
    let branch = omega_tilde_membership(p, domain)
        .ok_or_else(|| Error::NotInDomain("no branch of log phi within distance 1".into()))?;
    let (h, _) = domain.phi_hat(&p.z)?;
    let path = gt.canonical_path()?;
    let moved = continue_log_phi(&path, &UniMat2::IDENTITY, h.rep(), branch)?;
    let z = act_triple(gt.endpoint(), &p.z)?;
    Ok(LiftedPoint { z, w: p.w - branch + moved })
}

/// The action of the k-sheeted cover on the root graph domain,
/// `(z, r) -> (g z, r * phi^(1/k)(g~ z) / phi^(1/k)(z))`.
pub fn lift_action_k(gt: &SheetedElement, z: &Triple, root: C, domain: &BaseDomain) -> Result<(Triple, C)> {
    let (h, value) = domain.phi_hat(z)?;
    if (root.powu(gt.k) - value).norm() > 1e-9 * value.norm() {
        return Err(Error::NotInDomain("root is not a k-th root of phi(z)".into()));
    }
    let path = gt.representative()?.canonical_path()?;
    let start = value.ln();
    let end = continue_log_phi(&path, &UniMat2::IDENTITY, h.rep(), start)?;
    Ok((act_triple(gt.endpoint(), z)?, root * ((end - start) / gt.k as f64).exp()))
}

/// Samples a point of the lifted domain over [`BaseDomain::sample`], with
/// `w` uniform in the unit disc about a random branch `L + 2 pi i m`,
/// `|m| <= 3`.
pub fn sample_lifted<R: Rng + ?Sized>(rng: &mut R, domain: &BaseDomain, range: &IwasawaRange) -> Result<LiftedPoint> {
    let z = domain.sample(rng, range)?;
    let (_, value) = domain.phi_hat(&z)?;
    let m = rng.random_range(-3..=3) as f64;
    let w = value.ln() + TWO_PI_I * m + disc_point(rng, DISC_RADIUS * (1.0 - 1e-9));
    Ok(LiftedPoint { z, w })
}

/// Seeded lifted samples over the base domain, chunk-deterministic.
pub fn sample_lifted_batch(n: usize, seed: u64, domain: &BaseDomain, range: &IwasawaRange) -> Result<Vec<LiftedPoint>> {
    let chunks = run_chunks(seed, n, |rng, _, len| {
        (0..len).map(|_| sample_lifted(rng, domain, range)).collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(n);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

fn lifted_residual(a: &LiftedPoint, b: &LiftedPoint) -> f64 {
    let scale = 1.0 + a.z.norm_sqr().sqrt();
    (a.z.dist(&b.z) / scale).max((a.w - b.w).norm())
}

/// Residual allowed in the cover algebra checks.
pub const ALGEBRA_TOL: f64 = 1e-8;

/// Deck shifts commute with the lifted action, and the lifted action is a
/// group action: `(g h) p = g (h p)`.
pub fn cover_algebra_audit(instances: usize, seed: u64, domain: &BaseDomain) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let range = IwasawaRange::new(1.0, 1.0);
    let rows = run_chunks(seed, instances, |rng, first, len| {
        (0..len)
            .map(|j| -> Result<(usize, f64, f64)> {
                let g = CoverElement::from_iwasawa(range.sample_coords(rng), rng.random_range(-2..=2))?;
                let h = CoverElement::from_iwasawa(range.sample_coords(rng), rng.random_range(-2..=2))?;
                let n = rng.random_range(-3..=3);
                let p = sample_lifted(rng, domain, &range)?;
                let deck_first = lift_action(&g, &p.deck_shift(n), domain)?;
                let deck_last = lift_action(&g, &p, domain)?.deck_shift(n);
                let via_deck = lift_action(&CoverElement::deck(n), &p, domain)?;
                let deck = lifted_residual(&deck_first, &deck_last).max(lifted_residual(&via_deck, &p.deck_shift(n)));
                let gh = cover_mul(&g, &h)?;
                let law = lifted_residual(&lift_action(&gh, &p, domain)?, &lift_action(&g, &lift_action(&h, &p, domain)?, domain)?);
                Ok((first + j, deck, law))
            })
            .collect::<Vec<_>>()
    });
    let mut report = VerificationReport::new("cover-algebra", seed);
    let (mut max_deck, mut max_law) = (0.0f64, 0.0f64);
    for row in rows.into_iter().flatten() {
        let (k, deck, law) = row?;
        report.samples += 1;
        max_deck = max_deck.max(deck);
        max_law = max_law.max(law);
        if !(deck < ALGEBRA_TOL && law < ALGEBRA_TOL) {
            report.fail(vec![k as f64, deck, law]);
        }
    }
    report.worst_margin = ALGEBRA_TOL - max_deck.max(max_law);
    report.set_detail("max_deck_residual", max_deck);
    report.set_detail("max_group_law_residual", max_law);
    Ok(report.timed(start))
}

/// The deck generator has order exactly `k` in the k-sheeted cover, both as
/// a group element and through its action on the root graph domain.
pub fn sheet_period_check(k: u32, seed: u64, domain: &BaseDomain) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let mut report = VerificationReport::new(format!("sheet-period-{k}"), seed).detail("k", k as f64);
    let gen = CoverElement::deck(1).to_sheeted(k);
    let id = SheetedElement::identity(k);
    let mut acc = id;
    let mut period = None;
    for m in 1..=2 * k {
        acc = acc.mul(&gen)?;
        if acc.approx_eq(&id, 1e-9) && period.is_none() {
            period = Some(m);
        }
    }
    let mut rng = crate::sampling::chunk_rng(seed, 0);
    let z = domain.sample(&mut rng, &IwasawaRange::new(1.0, 1.0))?;
    let (_, value) = domain.phi_hat(&z)?;
    let root0 = (value.ln() / k as f64).exp();
    let (mut zz, mut root) = (z, root0);
    let mut action_period = None;
    for m in 1..=2 * k {
        (zz, root) = lift_action_k(&gen, &zz, root, domain)?;
        if (root - root0).norm() < 1e-9 * root0.norm() && action_period.is_none() {
            action_period = Some(m);
        }
    }
    report.samples = 4 * k as u64;
    let (p, ap) = (period.unwrap_or(0), action_period.unwrap_or(0));
    report.set_detail("group_period", p as f64);
    report.set_detail("action_period", ap as f64);
    report.set_detail("base_drift", zz.dist(&z));
    if p != k || ap != k || zz.dist(&z) > 1e-9 {
        report.fail(vec![k as f64, p as f64, ap as f64]);
    }
    report.worst_margin = if report.pass { 0.0 } else { -1.0 };
    Ok(report.timed(start))
}

/// Checks `Re w > log(eps) - 1` on every sample.
pub fn re_log_phi_lower_bound(samples: &[LiftedPoint], eps: f64, seed: u64) -> VerificationReport {
    let start = std::time::Instant::now();
    let bound = eps.ln() - DISC_RADIUS;
    let mut report = VerificationReport::new("re-log-phi-bound", seed).detail("bound", bound);
    report.samples = samples.len() as u64;
    if samples.is_empty() {
        report.set_detail("vacuous", 1.0);
        return report.timed(start);
    }
    let mut min_re = f64::INFINITY;
    for (k, p) in samples.iter().enumerate() {
        let re = p.w.re;
        if re < min_re {
            min_re = re;
        }
        if !(re > bound) {
            let mut witness = vec![k as f64];
            witness.extend(p.z.to_reals());
            witness.extend([p.w.re, p.w.im]);
            report.fail(witness);
        }
    }
    report.worst_margin = min_re - bound;
    report.set_detail("min_re_w", min_re);
    report.timed(start)
}

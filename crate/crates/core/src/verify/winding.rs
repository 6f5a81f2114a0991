//! Winding numbers of the candidate characters along the generator loops of
//! SL(2,R) and PSL(2,R).

use std::f64::consts::PI;
use std::time::Instant;

use crate::cover::Continuation;
use crate::error::{Error, Result};
use crate::group::{phi_main_sl, phi_prelim, psi, rotation, UniMat2, C};
use crate::report::VerificationReport;

/// Residual allowed between the continued change and an integer multiple of `2 pi i`.
pub const ROUNDING_TOL: f64 = 1e-6;
/// Gap allowed between the first and last values of a closed loop.
pub const CLOSURE_TOL: f64 = 1e-9;

fn to_winding(change: C) -> Result<(i64, f64)> {
    let turns = change / C::new(0.0, 2.0 * PI);
    let n = turns.re.round();
    let residual = (turns - n).norm();
    if residual >= ROUNDING_TOL {
        return Err(Error::InvalidInput(format!("winding residual {residual:e} too large")));
    }
    Ok((n as i64, residual))
}

/// Winding number of a closed polyline of nonzero values, with its rounding
/// residual.
pub fn winding_number(values: &[C], opts: &Continuation) -> Result<(i64, f64)> {
    let (Some(first), Some(last)) = (values.first(), values.last()) else {
        return Err(Error::InvalidInput("empty loop".into()));
    };
    let gap = (first - last).norm();
    if gap >= CLOSURE_TOL {
        return Err(Error::NotClosed { gap });
    }
    if !(first.norm() > opts.branch_floor) {
        return Err(Error::BranchFloor { index: 0, modulus: first.norm() });
    }
    let start = first.ln();
    let end = crate::cover::log_continue(values, start, opts)?;
    to_winding(end - start)
}

/// Winding number of `t -> f(t)` over `[t0, t1]`, sampled at `knots`
/// points and refined adaptively.
pub fn winding_of<F>(f: F, t0: f64, t1: f64, knots: usize, opts: &Continuation) -> Result<(i64, f64)>
where
    F: Fn(f64) -> C,
{
    let (a, b) = (f(t0), f(t1));
    let gap = (a - b).norm();
    if gap >= CLOSURE_TOL {
        return Err(Error::NotClosed { gap });
    }
    let ts: Vec<f64> = (0..knots.max(2)).map(|k| t0 + (t1 - t0) * k as f64 / (knots.max(2) - 1) as f64).collect();
    let start = a.ln();
    let end = opts.continue_log(|t| Ok(f(t)), &ts, start)?;
    to_winding(end - start)
}

/// Windings of the four characters along their natural loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingSummary {
    /// `psi` over the rotation loop of SL(2,R), `theta in [0, 2 pi]`.
    pub psi_sl: i64,
    /// `phi` over the rotation loop of PSL(2,R), `theta in [0, pi]`.
    pub phi_psl: i64,
    /// `a + ic` over the SL(2,R) loop.
    pub prelim_sl: i64,
    /// `(a + ic)^2` over the SL(2,R) loop.
    pub square_sl: i64,
    pub max_residual: f64,
}

fn on_rotation<F: Fn(&UniMat2) -> C>(f: F, turns: f64) -> impl Fn(f64) -> C {
    move |t| f(&rotation(turns * t))
}

pub fn winding_summary(loops: i64) -> Result<WindingSummary> {
    let opts = Continuation::default();
    let n = loops as f64;
    let knots = 64 * loops.unsigned_abs().max(1) as usize + 1;
    let (psi_sl, r1) = winding_of(on_rotation(psi, 2.0 * PI * n), 0.0, 1.0, knots, &opts)?;
    let (phi_psl, r2) = winding_of(on_rotation(phi_main_sl, PI * n), 0.0, 1.0, knots, &opts)?;
    let (prelim_sl, r3) = winding_of(on_rotation(phi_prelim, 2.0 * PI * n), 0.0, 1.0, knots, &opts)?;
    let square = |g: &UniMat2| {
        let p = phi_prelim(g);
        p * p
    };
    let (square_sl, r4) = winding_of(on_rotation(square, 2.0 * PI * n), 0.0, 1.0, knots, &opts)?;
    Ok(WindingSummary { psi_sl, phi_psl, prelim_sl, square_sl, max_residual: r1.max(r2).max(r3).max(r4) })
}

/// Checks windings `(1, 1, 1, 2)` for one traversal and `n` times that for
/// `n` traversals, `n = 1..=max_loops`.
pub fn verify_winding(max_loops: i64, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new("winding", seed);
    let mut worst = f64::INFINITY;
    let mut max_residual = 0.0f64;
    for n in 1..=max_loops.max(1) {
        let s = winding_summary(n)?;
        let expected = [n, n, n, 2 * n];
        let got = [s.psi_sl, s.phi_psl, s.prelim_sl, s.square_sl];
        if n == 1 {
            report.set_detail("psi_sl", s.psi_sl as f64);
            report.set_detail("phi_psl", s.phi_psl as f64);
            report.set_detail("prelim_sl", s.prelim_sl as f64);
            report.set_detail("square_sl", s.square_sl as f64);
        }
        max_residual = max_residual.max(s.max_residual);
        worst = worst.min(ROUNDING_TOL - s.max_residual);
        if got != expected {
            let mut w = vec![n as f64];
            w.extend(got.iter().map(|&v| v as f64));
            report.fail(w);
        }
        report.samples += 4;
    }
    report.worst_margin = worst;
    report.set_detail("max_residual", max_residual);
    Ok(report.timed(start))
}

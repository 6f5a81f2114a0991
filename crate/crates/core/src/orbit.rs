//! Distance from a point of C^3 to a PSL(2,R)-orbit, by multistart
//! Levenberg-Marquardt over Iwasawa coordinates.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::group::{big_phi_inverse, Iwasawa, ProjMat2, Triple, UniMat2, C};

/// Starts used by [`orbit_distance`].
pub const MULTISTART: usize = 8;
/// Two starts must agree on the distance to within this.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitDistance {
    pub dist: f64,
    pub dist_sq: f64,
    pub params: Iwasawa,
}

/// `g(p) * base` with its 6x3 real Jacobian in `(theta, s, u)`.
fn residual_and_jacobian(p: &Iwasawa, base: &Triple, target: &Triple) -> Option<([f64; 6], [[f64; 3]; 6])> {
    let (sn, cs) = p.theta.sin_cos();
    let e2s = (2.0 * p.s).exp();
    let mut r = [0.0; 6];
    let mut jac = [[0.0; 3]; 6];
    for i in 0..3 {
        let m = e2s * (base.0[i] + p.u);
        let den = sn * m + cs;
        if !(den.norm() > 1e-300) {
            return None;
        }
        let y = (cs * m - sn) / den;
        let dk = (den * den).inv();
        let d_theta = -(1.0 + y * y);
        let d_s = dk * 2.0 * m;
        let d_u = dk * e2s;
        let res = y - target.0[i];
        if !(res.re.is_finite() && res.im.is_finite()) {
            return None;
        }
        r[2 * i] = res.re;
        r[2 * i + 1] = res.im;
        for (col, dv) in [d_theta, d_s, d_u].iter().enumerate() {
            jac[2 * i][col] = dv.re;
            jac[2 * i + 1][col] = dv.im;
        }
    }
    Some((r, jac))
}

fn cost(p: &Iwasawa, base: &Triple, target: &Triple) -> f64 {
    match residual_and_jacobian(p, base, target) {
        Some((r, _)) => r.iter().map(|v| v * v).sum(),
        None => f64::INFINITY,
    }
}

/// Local minimization of `|g(p) base - target|^2` from `start`.
pub fn local_minimize(start: Iwasawa, base: &Triple, target: &Triple) -> Option<OrbitDistance> {
    let mut p = start;
    let mut lambda = 1e-3;
    let (mut r, mut jac) = residual_and_jacobian(&p, base, target)?;
    let mut c = r.iter().map(|v| v * v).sum::<f64>();
    for _ in 0..200 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for row in 0..6 {
            for a in 0..3 {
                jtr[a] += jac[row][a] * r[row];
                for b in 0..3 {
                    jtj[(a, b)] += jac[row][a] * jac[row][b];
                }
            }
        }
        if jtr.norm() <= 1e-18 {
            break;
        }
        let mut accepted = false;
        let mut step_norm = 0.0;
        for _ in 0..40 {
            let mut m = jtj;
            for a in 0..3 {
                m[(a, a)] += lambda * jtj[(a, a)].max(1e-12);
            }
            let Some(delta) = m.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let q = Iwasawa::new(p.theta + delta[0], p.s + delta[1], p.u + delta[2]);
            let cq = cost(&q, base, target);
            if cq <= c {
                step_norm = delta.norm();
                p = q;
                c = cq;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
        let (r2, j2) = residual_and_jacobian(&p, base, target)?;
        r = r2;
        jac = j2;
        if step_norm <= 1e-14 * (1.0 + p.s.abs() + p.u.abs() + p.theta.abs()) {
            break;
        }
    }
    Some(OrbitDistance { dist: c.sqrt(), dist_sq: c, params: p })
}

/// Real projection of a point of PSL(2,C) near PSL(2,R), as Iwasawa
/// coordinates.
fn real_projection(h: &UniMat2) -> Option<Iwasawa> {
    let re = h.re_part();
    let det = re[0] * re[3] - re[1] * re[2];
    if det <= 1e-12 {
        return None;
    }
    let k = det.sqrt().recip();
    let g = UniMat2::raw(
        (re[0] * k).into(),
        (re[1] * k).into(),
        (re[2] * k).into(),
        (re[3] * k).into(),
    );
    Some(Iwasawa::of_psl(&g))
}

fn starts(center: Option<Iwasawa>) -> Vec<Iwasawa> {
    let base = center.unwrap_or(Iwasawa::ORIGIN);
    let o = 0.25;
    let offsets = [
        (0.0, 0.0, 0.0),
        (o, 0.0, 0.0),
        (-o, 0.0, 0.0),
        (0.0, o, 0.0),
        (0.0, -o, 0.0),
        (0.0, 0.0, o),
        (0.0, 0.0, -o),
        (o, o, -o),
    ];
    offsets
        .iter()
        .take(MULTISTART)
        .map(|(a, b, c)| Iwasawa::new(base.theta + a, base.s + b, base.u + c))
        .collect()
}

fn multistart(base: &Triple, target: &Triple, center: Option<Iwasawa>) -> Result<OrbitDistance> {
    let mut results: Vec<OrbitDistance> =
        starts(center).into_iter().filter_map(|s| local_minimize(s, base, target)).collect();
    if center.is_none() {
        // no usable initial guess: widen with a coarse grid
        for k in 0..8 {
            for s in [-1.0, 0.0, 1.0] {
                let st = Iwasawa::new(k as f64 * std::f64::consts::PI / 8.0, s, 0.0);
                results.extend(local_minimize(st, base, target));
            }
        }
    }
    let best = results
        .iter()
        .copied()
        .min_by(|a, b| a.dist.total_cmp(&b.dist))
        .ok_or_else(|| Error::ConvergenceFailure("no start converged".into()))?;
    let agreeing = results.iter().filter(|r| (r.dist - best.dist).abs() <= AGREEMENT_TOL).count();
    if agreeing < 2 {
        return Err(Error::ConvergenceFailure(format!(
            "best distance {:e} reached by a single start",
            best.dist
        )));
    }
    let mut params = best.params;
    params.theta = params.theta.rem_euclid(std::f64::consts::PI);
    Ok(OrbitDistance { params, ..best })
}

/// Euclidean distance from `x` to the orbit `{g * zeta : g in PSL(2,R)}`.
pub fn orbit_distance(x: &Triple, zeta: &Triple) -> Result<OrbitDistance> {
    let center = big_phi_inverse(x, zeta).ok().and_then(|h| real_projection(h.rep()));
    multistart(zeta, x, center)
}

/// `min_g |g * z - zeta|`: distance from the `g`-translates of `z` to `zeta`.
pub fn translate_distance(z: &Triple, zeta: &Triple) -> Result<OrbitDistance> {
    let center = big_phi_inverse(z, zeta)
        .ok()
        .and_then(|h| real_projection(ProjMat2::inv(&h).rep()));
    multistart(z, zeta, center)
}

/// Distance from `x` to the orbit, warm-started from known coordinates.
pub fn orbit_distance_from(x: &Triple, zeta: &Triple, start: Iwasawa) -> Option<OrbitDistance> {
    local_minimize(start, zeta, x)
}

/// Orbit point `g(p) * zeta`.
pub fn orbit_point(p: &Iwasawa, zeta: &Triple) -> Triple {
    let g = p.matrix();
    let mut out = [C::new(0.0, 0.0); 3];
    for (k, z) in zeta.0.iter().enumerate() {
        out[k] = (g.a * z + g.b) / (g.c * z + g.d);
    }
    Triple(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::act_triple;

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn jacobian_matches_finite_differences() {
        let base = Triple::default_base();
        let target = Triple::new(C::new(0.3, 1.0), C::new(1.0, 0.7), C::new(-0.5, 2.0));
        let p = Iwasawa::new(0.7, -0.3, 0.4);
        let (r0, j) = residual_and_jacobian(&p, &base, &target).unwrap();
        let h = 1e-6;
        for col in 0..3 {
            let mut q = p;
            match col {
                0 => q.theta += h,
                1 => q.s += h,
                _ => q.u += h,
            }
            let (r1, _) = residual_and_jacobian(&q, &base, &target).unwrap();
            for row in 0..6 {
                let fd = (r1[row] - r0[row]) / h;
                assert!((fd - j[row][col]).abs() < 1e-4, "row {row} col {col}");
            }
        }
    }

    #[test]
    fn base_point_is_on_orbit() {
        let zeta = Triple::default_base();
        let d = orbit_distance(&zeta, &zeta).unwrap();
        assert!(d.dist < 1e-10);
        assert!(d.params.matrix().proj_dist(&UniMat2::IDENTITY) < 1e-8);
    }

    #[test]
    fn translated_point_is_on_orbit() {
        let zeta = Triple::default_base();
        let g = Iwasawa::new(0.4, 0.3, -0.6);
        let x = act_triple(&g.matrix(), &zeta).unwrap();
        let d = orbit_distance(&x, &zeta).unwrap();
        assert!(d.dist < 1e-8);
        assert!(d.params.matrix().proj_dist(&g.matrix()) < 1e-6);
        let t = translate_distance(&x, &zeta).unwrap();
        assert!(t.dist < 1e-8);
    }
}

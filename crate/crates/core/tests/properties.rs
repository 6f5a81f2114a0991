use holoaut::cover::{cover_inv, cover_mul, CoverElement};
use holoaut::group::{
    act_triple, big_phi, big_phi_inverse, exp_sl2, mobius_apply, phi_main, psi, Iwasawa, ProjMat2, Sl2Element,
};
use holoaut::heisenberg::{
    bounded_embedding, derive_c, heis_mul, in_boundary_band, in_omega, omega_membership, omega_membership_brute,
    HeisCPoint, HeisElement,
};
use holoaut::{Triple, UniMat2, C};
use proptest::prelude::*;
use std::f64::consts::PI;

fn iwasawa() -> impl Strategy<Value = Iwasawa> {
    (-PI..PI, -2.0..2.0f64, -3.0..3.0f64).prop_map(|(t, s, u)| Iwasawa::new(t, s, u))
}

fn complex(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(x, y)| C::new(x, y))
}

fn upper(r: f64) -> impl Strategy<Value = C> {
    (-r..r, 0.05..r).prop_map(|(x, y)| C::new(x, y))
}

fn sl2c() -> impl Strategy<Value = UniMat2> {
    (complex(2.0), complex(2.0), complex(2.0), complex(2.0))
        .prop_filter_map("singular", |(a, b, c, d)| UniMat2::normalized(a, b, c, d).ok())
        .prop_filter("ill conditioned", |g| g.norm() < 50.0)
}

fn triple() -> impl Strategy<Value = Triple> {
    (upper(3.0), upper(3.0), upper(3.0))
        .prop_map(|(a, b, c)| Triple::new(a, b, c))
        .prop_filter("near collision", |t| t.min_pairwise_distance() > 0.1)
}

fn heis_element() -> impl Strategy<Value = HeisElement> {
    (-3.0..3.0f64, -3.0..3.0f64, -PI..PI).prop_map(|(a, b, t)| HeisElement::new(a, b, C::from_polar(1.0, t)).unwrap())
}

fn heis_point() -> impl Strategy<Value = HeisCPoint> {
    (complex(3.0), complex(1.2), -3.0..5.0f64, -PI..PI)
        .prop_map(|(x, y, lr, t)| HeisCPoint::new(x, y, C::from_polar(lr.exp(), t)).unwrap())
}

fn u_point() -> impl Strategy<Value = HeisCPoint> {
    (0.0..0.999f64, -PI..PI, 0.0..0.999f64, -PI..PI, 0.001..1.999f64, -PI..PI).prop_map(|(r1, t1, r2, t2, r3, t3)| {
        HeisCPoint::new(C::from_polar(r1, t1), C::from_polar(r2, t2), C::from_polar(r3, t3)).unwrap()
    })
}

fn negate(g: &UniMat2) -> UniMat2 {
    UniMat2::new(-g.a, -g.b, -g.c, -g.d).unwrap()
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn products_stay_unimodular(g in sl2c(), h in sl2c()) {
        let p = g.mul(&h);
        prop_assert!((p.det() - 1.0).norm() < 1e-9);
        prop_assert!(g.mul(&g.inv()).dist(&UniMat2::IDENTITY) < 1e-9 * g.norm_sqr());
    }

    #[test]
    fn mobius_is_a_homomorphism(p in iwasawa(), q in iwasawa(), z in upper(3.0)) {
        let (g, h) = (p.matrix(), q.matrix());
        let lhs = mobius_apply(&g.mul(&h), z).unwrap();
        let rhs = mobius_apply(&g, mobius_apply(&h, z).unwrap()).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-9);
    }

    #[test]
    fn real_matrices_preserve_the_half_plane(p in iwasawa(), z in upper(3.0)) {
        let w = mobius_apply(&p.matrix(), z).unwrap();
        // Im(gz) = Im(z) / |cz + d|^2
        let g = p.matrix();
        let expected = z.im / (g.c * z + g.d).norm_sqr();
        prop_assert!(w.im > 0.0);
        prop_assert!((w.im - expected).abs() < 1e-9 * (1.0 + expected));
    }

    #[test]
    fn sign_normalization_identifies_g_and_minus_g(g in sl2c()) {
        let (p, m) = (ProjMat2::new(g), ProjMat2::new(negate(&g)));
        prop_assert_eq!(p.rep(), m.rep());
        prop_assert!(rel(psi(&g), -psi(&negate(&g))) < 1e-12);
        prop_assert!(rel(phi_main(&p), phi_main(&m)) < 1e-12);
    }

    #[test]
    fn iwasawa_coordinates_round_trip(p in iwasawa()) {
        let g = p.matrix();
        let back = Iwasawa::of_sl2(&g).matrix();
        prop_assert!(back.dist(&g) < 1e-9 * (1.0 + g.norm()));
    }

    #[test]
    fn one_parameter_subgroups(x in -1.5..1.5f64, y in -1.5..1.5f64, z in -1.5..1.5f64, s in -1.0..1.0f64, t in -1.0..1.0f64) {
        let v = Sl2Element::new(x, y, z);
        let lhs = exp_sl2(&v, s).mul(&exp_sl2(&v, t));
        let rhs = exp_sl2(&v, s + t);
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + rhs.norm_sqr()));
        prop_assert!((rhs.det() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn orbit_map_is_equivariant(p in iwasawa(), q in iwasawa(), zeta in triple()) {
        let (g, h) = (ProjMat2::new(p.matrix()), ProjMat2::new(q.matrix()));
        let lhs = big_phi(&g.mul(&h), &zeta).unwrap();
        let rhs = act_triple(&g, &big_phi(&h, &zeta).unwrap()).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-8 * (1.0 + rhs.norm_sqr().sqrt()));
    }

    #[test]
    fn orbit_map_inverse(h in sl2c(), zeta in triple()) {
        let h = ProjMat2::new(h);
        let z = big_phi(&h, &zeta);
        prop_assume!(z.is_ok());
        let z = z.unwrap();
        prop_assume!(z.min_pairwise_distance() > 1e-3 && z.norm_sqr() < 1e6);
        let back = big_phi_inverse(&z, &zeta).unwrap();
        prop_assert!(back.dist(&h) < 1e-6 * (1.0 + h.rep().norm_sqr()));
    }

    #[test]
    fn heisenberg_law_is_associative(g in heis_element(), h in heis_element(), k in heis_element(), p in heis_point()) {
        prop_assert!(g.mul(&h).mul(&k).dist(&g.mul(&h.mul(&k))) < 1e-12);
        prop_assert!(g.mul(&g.inv()).dist(&HeisElement::IDENTITY) < 1e-12);
        let lhs = heis_mul(&g.mul(&h), &p);
        let rhs = heis_mul(&g, &heis_mul(&h, &p));
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + p.z.norm()) * (1.0 + p.y.norm() + p.y.im.abs().exp()));
    }

    #[test]
    fn omega_is_invariant(g in heis_element(), p in heis_point()) {
        let q = heis_mul(&g, &p);
        prop_assume!(!in_boundary_band(&p) && !in_boundary_band(&q));
        prop_assert_eq!(in_omega(&p), in_omega(&q));
    }

    #[test]
    fn witnesses_reconstruct_the_point(p in heis_point()) {
        if let Some(w) = omega_membership(&p) {
            let back = heis_mul(&w.g, &w.q);
            prop_assert!(back.dist(&p) < 1e-9 * (1.0 + p.z.norm()));
            prop_assert!(w.q.x.norm() < 1.0 && w.q.y.norm() < 1.0 && w.q.z.norm() < 2.0);
        }
    }

    #[test]
    fn closed_form_matches_the_grid(p in heis_point()) {
        prop_assume!(!in_boundary_band(&p));
        prop_assert_eq!(in_omega(&p), omega_membership_brute(&p));
    }

    #[test]
    fn embedding_lands_in_the_polydisc(g in heis_element(), q in u_point()) {
        let p = heis_mul(&g, &q);
        prop_assert!(in_omega(&p));
        let e = bounded_embedding(&p, &derive_c()).unwrap();
        prop_assert!(e.iter().all(|c| c.norm() < 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deck_group_is_central(p in iwasawa(), loops in -3i64..3, n in -4i64..4) {
        let x = CoverElement::from_iwasawa(p, loops).unwrap();
        let d = CoverElement::deck(n);
        let lhs = cover_mul(&d, &x).unwrap();
        let rhs = cover_mul(&x, &d).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-8));
        prop_assert_eq!(lhs.loop_count().unwrap(), x.loop_count().unwrap() + n);
    }

    #[test]
    fn cover_law_is_associative(p in iwasawa(), q in iwasawa(), r in iwasawa(), l in -2i64..2) {
        let x = CoverElement::from_iwasawa(p, l).unwrap();
        let y = CoverElement::from_iwasawa(q, 0).unwrap();
        let z = CoverElement::from_iwasawa(r, -l).unwrap();
        let lhs = cover_mul(&cover_mul(&x, &y).unwrap(), &z).unwrap();
        let rhs = cover_mul(&x, &cover_mul(&y, &z).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-7));
        let e = cover_mul(&x, &cover_inv(&x).unwrap()).unwrap();
        prop_assert!(e.approx_eq(&CoverElement::identity(), 1e-8));
    }
}

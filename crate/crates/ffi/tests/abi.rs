use std::ffi::{CStr, CString};
use std::ptr;

use holoaut_ffi::*;

fn last_error() -> String {
    let p = ha_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_round_trip_and_action() {
    unsafe {
        let shear = [1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut m = ptr::null_mut();
        assert_eq!(ha_matrix_new(shear.as_ptr(), &mut m), HaStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ha_mobius_apply(m, 0.0, 1.0, &mut re, &mut im), HaStatus::Ok);
        assert_eq!((re, im), (1.0, 1.0));
        let mut sq = ptr::null_mut();
        assert_eq!(ha_matrix_mul(m, m, &mut sq), HaStatus::Ok);
        let mut e = [0.0; 8];
        assert_eq!(ha_matrix_entries(sq, e.as_mut_ptr()), HaStatus::Ok);
        assert_eq!(e[2], 2.0);
        assert_eq!(ha_psi(m, &mut re, &mut im), HaStatus::Ok);
        assert_eq!((re, im), (2.0, -1.0));
        ha_matrix_free(sq);
        ha_matrix_free(m);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let bad = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut m = ptr::null_mut();
        assert_eq!(ha_matrix_new(bad.as_ptr(), &mut m), HaStatus::NotUnimodular);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(ha_matrix_new(ptr::null(), &mut m), HaStatus::NullPointer);

        let pole = [0.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        assert_eq!(ha_matrix_new(pole.as_ptr(), &mut m), HaStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ha_mobius_apply(m, 0.0, 0.0, &mut re, &mut im), HaStatus::Pole);
        assert_eq!(ha_psi(m, ptr::null_mut(), &mut im), HaStatus::NullPointer);
        ha_matrix_free(m);
        ha_matrix_free(ptr::null_mut());
    }
}

#[test]
fn cover_elements() {
    unsafe {
        let mut loop_el = ptr::null_mut();
        assert_eq!(ha_cover_from_iwasawa(0.0, 0.0, 0.0, 1, &mut loop_el), HaStatus::Ok);
        let mut n = 0i64;
        assert_eq!(ha_cover_loop_count(loop_el, &mut n), HaStatus::Ok);
        assert_eq!(n, 1);
        let mut deck = ptr::null_mut();
        assert_eq!(ha_cover_deck(2, &mut deck), HaStatus::Ok);
        let mut prod = ptr::null_mut();
        assert_eq!(ha_cover_mul(loop_el, deck, &mut prod), HaStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ha_cover_branch(prod, &mut re, &mut im), HaStatus::Ok);
        assert!(re.abs() < 1e-9 && (im - 6.0 * std::f64::consts::PI).abs() < 1e-9);
        let mut inv = ptr::null_mut();
        assert_eq!(ha_cover_inv(prod, &mut inv), HaStatus::Ok);
        assert_eq!(ha_cover_loop_count(inv, &mut n), HaStatus::Ok);
        assert_eq!(n, -3);
        let mut end = ptr::null_mut();
        assert_eq!(ha_cover_endpoint(inv, &mut end), HaStatus::Ok);
        let mut e = [0.0; 8];
        ha_matrix_entries(end, e.as_mut_ptr());
        assert!((e[0] - 1.0).abs() < 1e-9 && e[2].abs() < 1e-9);
        for x in [loop_el, deck, prod, inv] {
            ha_cover_free(x);
        }
        ha_matrix_free(end);
    }
}

#[test]
fn heisenberg_membership() {
    unsafe {
        let mut inside = false;
        assert_eq!(ha_heisenberg_in_omega([100.0, 0.0, 0.0, 0.0, 1.9, 0.0].as_ptr(), &mut inside), HaStatus::Ok);
        assert!(inside);
        assert_eq!(ha_heisenberg_in_omega([100.0, 0.0, 0.0, 0.0, 3.0, 0.0].as_ptr(), &mut inside), HaStatus::Ok);
        assert!(!inside);
        assert_eq!(ha_heisenberg_in_omega([0.0; 6].as_ptr(), &mut inside), HaStatus::InvalidInput);
    }
}

#[test]
fn run_returns_bundle_json() {
    unsafe {
        let args = CString::new(r#"["verify-winding", "--seed", "4"]"#).unwrap();
        let mut out = ptr::null_mut();
        let mut code = -1;
        assert_eq!(ha_run(args.as_ptr(), &mut out, &mut code), HaStatus::Ok);
        assert_eq!(code, 0);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        ha_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["overall_pass"], true);
        assert_eq!(v["config"]["seed"], 4);

        let bad = CString::new(r#"["verify-lemma", "--delta", "0.4"]"#).unwrap();
        assert_eq!(ha_run(bad.as_ptr(), &mut out, &mut code), HaStatus::Config);
        assert!(last_error().contains("delta"));
        let junk = CString::new("not json").unwrap();
        assert_eq!(ha_run(junk.as_ptr(), &mut out, &mut code), HaStatus::InvalidInput);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(ha_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

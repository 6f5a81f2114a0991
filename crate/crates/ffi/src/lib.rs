//! C ABI over `holoaut`.
//!
//! Matrices and cover elements are opaque heap handles created by the
//! `ha_*_new`-style constructors and released by the matching `_free`
//! function. Every fallible call returns an [`HaStatus`]; on failure the
//! message is available from [`ha_last_error_message`] on the same thread.
//! Strings returned through out-parameters are owned by the caller and
//! released with [`ha_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use holoaut::cli::{exit_code, run, RunConfig};
use holoaut::cover::{cover_inv, cover_mul, CoverElement};
use holoaut::group::{mobius_apply, phi_main, psi, Iwasawa};
use holoaut::heisenberg::{in_omega, HeisCPoint};
use holoaut::{Error, ProjMat2, UniMat2, C};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Pole = 3,
    NotUnimodular = 4,
    Continuation = 5,
    NotInDomain = 6,
    Config = 7,
    SearchFailed = 8,
    Panic = 9,
}

/// Opaque SL(2,C) matrix.
pub struct HaMatrix(UniMat2);

/// Opaque element of the universal cover of PSL(2,R).
pub struct HaCoverElement(CoverElement);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HaStatus {
    match e {
        Error::Pole { .. } => HaStatus::Pole,
        Error::NotUnimodular { .. } => HaStatus::NotUnimodular,
        Error::BranchFloor { .. } | Error::RefinementExhausted { .. } | Error::InitialMismatch | Error::NotClosed { .. } => {
            HaStatus::Continuation
        }
        Error::NotInDomain(_) | Error::NotInOmega | Error::DegenerateTriple { .. } => HaStatus::NotInDomain,
        Error::Config(_) => HaStatus::Config,
        Error::SearchFailed(_) | Error::ConvergenceFailure(_) => HaStatus::SearchFailed,
        Error::InvalidInput(_) => HaStatus::InvalidInput,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), HaStatus>>(f: F) -> HaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HaStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside holoaut".into());
            HaStatus::Panic
        }
    }
}

fn lib<T>(r: holoaut::Result<T>) -> Result<T, HaStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> HaStatus {
    set_error(format!("{what} is null"));
    HaStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, HaStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), HaStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ha_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ha_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a matrix from 8 reals `(re a, im a, re b, im b, ...)`; the
/// determinant must be 1 within tolerance.
///
/// # Safety
/// `entries` must point to 8 readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ha_matrix_new(entries: *const f64, out: *mut *mut HaMatrix) -> HaStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        let e = std::slice::from_raw_parts(entries, 8);
        let m = lib(UniMat2::from_reals(e.try_into().expect("eight entries")))?;
        write(out, Box::into_raw(Box::new(HaMatrix(m))), "out")
    })
}

/// `k(theta) a(s) n(u)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ha_matrix_iwasawa(theta: f64, s: f64, u: f64, out: *mut *mut HaMatrix) -> HaStatus {
    guard(|| {
        if !(theta.is_finite() && s.is_finite() && u.is_finite()) {
            set_error("non-finite Iwasawa coordinate".into());
            return Err(HaStatus::InvalidInput);
        }
        write(out, Box::into_raw(Box::new(HaMatrix(Iwasawa::new(theta, s, u).matrix()))), "out")
    })
}

/// # Safety
/// `m` must be null or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn ha_matrix_free(m: *mut HaMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_matrix_mul(a: *const HaMatrix, b: *const HaMatrix, out: *mut *mut HaMatrix) -> HaStatus {
    guard(|| {
        let p = deref(a, "a")?.0.mul(&deref(b, "b")?.0);
        write(out, Box::into_raw(Box::new(HaMatrix(p))), "out")
    })
}

/// Writes the 8 reals of `m` to `out`.
///
/// # Safety
/// `m` must be a live handle and `out` must hold 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn ha_matrix_entries(m: *const HaMatrix, out: *mut f64) -> HaStatus {
    guard(|| {
        let r = deref(m, "m")?.0.to_reals();
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(r.as_ptr(), out, 8);
        Ok(())
    })
}

/// `(a z + b) / (c z + d)`.
///
/// # Safety
/// `m` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_mobius_apply(
    m: *const HaMatrix,
    z_re: f64,
    z_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HaStatus {
    guard(|| {
        let w = lib(mobius_apply(&deref(m, "m")?.0, C::new(z_re, z_im)))?;
        write(out_re, w.re, "out_re")?;
        write(out_im, w.im, "out_im")
    })
}

/// `psi(g) = (a + d) + i(c - b)`.
///
/// # Safety
/// `m` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_psi(m: *const HaMatrix, out_re: *mut f64, out_im: *mut f64) -> HaStatus {
    guard(|| {
        let v = psi(&deref(m, "m")?.0);
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// `phi(g) = psi(g)^2 / 4`, independent of the sign of `g`.
///
/// # Safety
/// `m` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_phi(m: *const HaMatrix, out_re: *mut f64, out_im: *mut f64) -> HaStatus {
    guard(|| {
        let v = phi_main(&ProjMat2::new(deref(m, "m")?.0));
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// `loops` generator loops followed by the short path to `k(theta) a(s) n(u)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_from_iwasawa(
    theta: f64,
    s: f64,
    u: f64,
    loops: i64,
    out: *mut *mut HaCoverElement,
) -> HaStatus {
    guard(|| {
        let x = lib(CoverElement::from_iwasawa(Iwasawa::new(theta, s, u), loops))?;
        write(out, Box::into_raw(Box::new(HaCoverElement(x))), "out")
    })
}

/// The central element reached by `n` generator loops.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_deck(n: i64, out: *mut *mut HaCoverElement) -> HaStatus {
    guard(|| write(out, Box::into_raw(Box::new(HaCoverElement(CoverElement::deck(n)))), "out"))
}

/// # Safety
/// `x`, `y` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_mul(
    x: *const HaCoverElement,
    y: *const HaCoverElement,
    out: *mut *mut HaCoverElement,
) -> HaStatus {
    guard(|| {
        let p = lib(cover_mul(&deref(x, "x")?.0, &deref(y, "y")?.0))?;
        write(out, Box::into_raw(Box::new(HaCoverElement(p))), "out")
    })
}

/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_inv(x: *const HaCoverElement, out: *mut *mut HaCoverElement) -> HaStatus {
    guard(|| {
        let p = lib(cover_inv(&deref(x, "x")?.0))?;
        write(out, Box::into_raw(Box::new(HaCoverElement(p))), "out")
    })
}

/// The continued value of `log phi` at the endpoint.
///
/// # Safety
/// `x` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_branch(x: *const HaCoverElement, out_re: *mut f64, out_im: *mut f64) -> HaStatus {
    guard(|| {
        let b = deref(x, "x")?.0.branch();
        write(out_re, b.re, "out_re")?;
        write(out_im, b.im, "out_im")
    })
}

/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_loop_count(x: *const HaCoverElement, out: *mut i64) -> HaStatus {
    guard(|| {
        let n = lib(deref(x, "x")?.0.loop_count())?;
        write(out, n, "out")
    })
}

/// Copies the endpoint into a new matrix handle.
///
/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_endpoint(x: *const HaCoverElement, out: *mut *mut HaMatrix) -> HaStatus {
    guard(|| {
        let m = *deref(x, "x")?.0.endpoint().rep();
        write(out, Box::into_raw(Box::new(HaMatrix(m))), "out")
    })
}

/// # Safety
/// `x` must be null or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn ha_cover_free(x: *mut HaCoverElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Membership of `(u, v, w)`, given as 6 reals, in the Heisenberg domain.
///
/// # Safety
/// `point` must hold 6 doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ha_heisenberg_in_omega(point: *const f64, out: *mut bool) -> HaStatus {
    guard(|| {
        if point.is_null() {
            return Err(null("point"));
        }
        let p = std::slice::from_raw_parts(point, 6);
        let q = lib(HeisCPoint::new(C::new(p[0], p[1]), C::new(p[2], p[3]), C::new(p[4], p[5])))?;
        write(out, in_omega(&q), "out")
    })
}

/// Runs a command given as a JSON array of CLI arguments without the
/// program name, e.g. `["verify-winding", "--seed", "3"]`. On success
/// `out_json` receives the report bundle and `out_exit` the exit status the
/// binary would return. Output flags (`--out`, `--format`) are ignored.
///
/// # Safety
/// `args_json` must be a nul-terminated string; the out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ha_run(args_json: *const c_char, out_json: *mut *mut c_char, out_exit: *mut i32) -> HaStatus {
    guard(|| {
        if args_json.is_null() {
            return Err(null("args_json"));
        }
        let text = CStr::from_ptr(args_json).to_str().map_err(|_| {
            set_error("arguments are not UTF-8".into());
            HaStatus::InvalidInput
        })?;
        let args: Vec<String> = serde_json::from_str(text).map_err(|e| {
            set_error(format!("arguments must be a JSON array of strings: {e}"));
            HaStatus::InvalidInput
        })?;
        let cfg = lib(RunConfig::from_args(args))?;
        let result = run(&cfg);
        let code = exit_code(&result);
        let bundle = lib(result)?;
        let json = CString::new(bundle.to_json()).expect("JSON has no nul bytes");
        write(out_json, json.into_raw(), "out_json")?;
        write(out_exit, code, "out_exit")
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn ha_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

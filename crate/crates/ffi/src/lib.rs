//! C ABI for `rank2-cluster`.
//!
//! Polynomials cross the boundary as opaque `R2Polynomial` handles. Every
//! fallible call returns an [`R2Status`]; on failure the message is available
//! from [`r2_last_error_message`] until the next call on the same thread.
//! Strings returned by this library must be released with [`r2_string_free`],
//! handles with [`r2_polynomial_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rank2_cluster::ccmap::CCMap;
use rank2_cluster::{ClusterAlgebra, Error, ExchangeType, LaurentPolynomial, Status};

/// Opaque Laurent polynomial.
pub struct R2Polynomial(LaurentPolynomial);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum R2Status {
    Ok = 0,
    /// Bad arguments: null pointers, b or c below 1, malformed JSON.
    InvalidArgument = 1,
    /// A recurrence division was not exact.
    NotDivisible = 2,
    /// The computation could not decide (budget, rigidity, interpolation).
    Inconclusive = 3,
    /// A verification ran and found a counterexample.
    CheckFailed = 4,
    /// Internal error, including caught panics.
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> R2Status {
    match e {
        Error::NotDivisible => R2Status::NotDivisible,
        e if e.is_inconclusive() => R2Status::Inconclusive,
        Error::InvalidExchangeType { .. }
        | Error::Parse(_)
        | Error::InvalidVertex(_)
        | Error::ArityMismatch { .. }
        | Error::ContextMismatch { .. } => R2Status::InvalidArgument,
        _ => R2Status::Internal,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (R2Status, String)>) -> R2Status {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => R2Status::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            R2Status::Internal
        }
    }
}

fn lib_err(e: Error) -> (R2Status, String) {
    (status_of(&e), e.to_string())
}

fn null_arg(name: &str) -> (R2Status, String) {
    (R2Status::InvalidArgument, format!("`{name}` is null"))
}

unsafe fn write_handle(out: *mut *mut R2Polynomial, p: LaurentPolynomial) {
    *out = Box::into_raw(Box::new(R2Polynomial(p)));
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn r2_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Cluster variable `x_k` of `A(b, c)` in the initial cluster.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn r2_cluster_variable(b: i64, c: i64, k: i64, out: *mut *mut R2Polynomial) -> R2Status {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let ty = ExchangeType::new(b, c).map_err(lib_err)?;
        let p = ClusterAlgebra::new(ty).cluster_variable(k).map_err(lib_err)?;
        write_handle(out, p);
        Ok(())
    })
}

/// `x_k` written in the cluster `(x_m, x_{m+1})` with variables `y1, y2`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn r2_expand_in_cluster(
    b: i64,
    c: i64,
    k: i64,
    m: i64,
    out: *mut *mut R2Polynomial,
) -> R2Status {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let ty = ExchangeType::new(b, c).map_err(lib_err)?;
        let p = ClusterAlgebra::new(ty).expand_in_cluster(k, m).map_err(lib_err)?;
        write_handle(out, p);
        Ok(())
    })
}

/// Caldero-Chapoton character of the object attached to `x_k`, over the
/// `u` variables of `K_{b,c}`, or its folding onto `x1, x2` when `fold` is set.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn r2_cc_polynomial(
    b: i64,
    c: i64,
    k: i64,
    seed: u64,
    fold: bool,
    out: *mut *mut R2Polynomial,
) -> R2Status {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let map = CCMap::new(b, c, seed).map_err(lib_err)?;
        let obj = map.object_for_index(k).map_err(lib_err)?;
        let mut p = map.cc_polynomial(&obj).map_err(lib_err)?;
        if fold {
            p = map.fold(&p).map_err(lib_err)?;
        }
        write_handle(out, p);
        Ok(())
    })
}

/// Smallest period `<= max_period` of the sequence `x_k`; writes 0 when none.
///
/// # Safety
/// `out_period` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r2_detect_period(b: i64, c: i64, max_period: u32, out_period: *mut u32) -> R2Status {
    guard(|| {
        if out_period.is_null() {
            return Err(null_arg("out_period"));
        }
        let ty = ExchangeType::new(b, c).map_err(lib_err)?;
        let period = ClusterAlgebra::new(ty).detect_period(max_period).map_err(lib_err)?;
        *out_period = period.unwrap_or(0);
        Ok(())
    })
}

/// Compares folded characters with the recurrence for `k_min <= k <= k_max`.
/// Returns `CheckFailed` if any index failed, `Inconclusive` if some could not
/// be resolved, `Ok` otherwise. Counts are written when the pointers are
/// non-null.
///
/// # Safety
/// Each non-null output pointer must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn r2_verify_folding(
    b: i64,
    c: i64,
    k_min: i64,
    k_max: i64,
    seed: u64,
    passed: *mut u32,
    failed: *mut u32,
    inconclusive: *mut u32,
) -> R2Status {
    guard(|| {
        if k_min > k_max {
            return Err((R2Status::InvalidArgument, "empty k range".into()));
        }
        let map = CCMap::new(b, c, seed).map_err(lib_err)?;
        let report = map.verify_folding(k_min..=k_max);
        for (ptr, status) in [(passed, Status::Pass), (failed, Status::Fail), (inconclusive, Status::Inconclusive)] {
            if !ptr.is_null() {
                *ptr = report.count(status) as u32;
            }
        }
        if let Some(w) = report.witness() {
            return Err((
                R2Status::CheckFailed,
                format!("{}: {}", w.label, w.detail.as_deref().unwrap_or("")),
            ));
        }
        if report.has_inconclusive() {
            return Err((R2Status::Inconclusive, report.summary()));
        }
        Ok(())
    })
}

/// Parses the JSON form `{"variables": [...], "terms": [...]}`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_from_json(json: *const c_char, out: *mut *mut R2Polynomial) -> R2Status {
    guard(|| {
        if json.is_null() {
            return Err(null_arg("json"));
        }
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (R2Status::InvalidArgument, "json is not UTF-8".to_string()))?;
        let p = LaurentPolynomial::from_json(text).map_err(lib_err)?;
        write_handle(out, p);
        Ok(())
    })
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Fraction form such as `(1 + x2) / x1`. Null if `p` is null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_to_string(p: *const R2Polynomial) -> *mut c_char {
    match p.as_ref() {
        Some(p) => export_string(p.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Canonical JSON form. Null if `p` is null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_to_json(p: *const R2Polynomial) -> *mut c_char {
    match p.as_ref() {
        Some(p) => export_string(p.0.to_json()),
        None => ptr::null_mut(),
    }
}

/// Number of nonzero terms; 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_num_terms(p: *const R2Polynomial) -> usize {
    p.as_ref().map_or(0, |p| p.0.num_terms())
}

/// True when every coefficient is positive; false for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_is_positive(p: *const R2Polynomial) -> bool {
    p.as_ref().is_some_and(|p| p.0.is_positive())
}

/// Equality of canonical forms (same variables, same terms); false if either
/// is null.
///
/// # Safety
/// Both pointers must be null or live handles.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_equal(a: *const R2Polynomial, b: *const R2Polynomial) -> bool {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => a.0 == b.0,
        _ => false,
    }
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn r2_polynomial_free(p: *mut R2Polynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn r2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

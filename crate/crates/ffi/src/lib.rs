//! C interface. Graphs and certificates are opaque handles owned by the
//! caller and released with the matching `_free` function. Every fallible
//! call returns an [`LpgError`] code; the message for the most recent
//! failure on the calling thread is available from
//! [`lpg_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpgraph::exponents::{certify_with, replay, Certificate, CertifyOptions, Status};
use lpgraph::rational::fmt_q;
use lpgraph::rigidity::{numerical_rank, rigidity_jacobian, RankPolicy};
use lpgraph::{parse_graph, Graph};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpgError {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Compute = 4,
    ReplayFailed = 5,
    Panic = 6,
}

/// Certificate status as an integer.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpgStatus {
    Unknown = 0,
    Conditional = 1,
    Proven = 2,
}

/// Opaque graph handle.
pub struct LpgGraph(Graph);

/// Opaque certificate handle.
pub struct LpgCertificate(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn guard(f: impl FnOnce() -> Result<(), (LpgError, String)>) -> LpgError {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LpgError::Ok
        }
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            LpgError::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (LpgError, String)> {
    if p.is_null() {
        return Err((LpgError::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (LpgError::InvalidUtf8, e.to_string()))
}

fn null(what: &str) -> (LpgError, String) {
    (LpgError::NullPointer, format!("null {what}"))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn lpg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lpg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lpg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a graph in the text or JSON format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_graph_parse(text: *const c_char, out: *mut *mut LpgGraph) -> LpgError {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let s = read_str(text)?;
        let g = parse_graph(s).map_err(|e| (LpgError::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(LpgGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`lpg_graph_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lpg_graph_free(g: *mut LpgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle and `n`, `m` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lpg_graph_size(g: *const LpgGraph, n: *mut usize, m: *mut usize) -> LpgError {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        if n.is_null() || m.is_null() {
            return Err(null("output pointer"));
        }
        *n = g.0.n();
        *m = g.0.edge_count();
        Ok(())
    })
}

/// Certifies `g` with the circle profile in dimension `d`. A graph that
/// cannot be certified still succeeds, with status `Unknown`.
///
/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_certify(g: *const LpgGraph, d: u32, out: *mut *mut LpgCertificate) -> LpgError {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let opts = CertifyOptions {
            dimension: d,
            ..CertifyOptions::default()
        };
        let c = certify_with(&g.0, &opts).map_err(|e| (LpgError::Compute, e.to_string()))?;
        *out = Box::into_raw(Box::new(LpgCertificate(c)));
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lpg_certificate_free(c: *mut LpgCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live certificate handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_certificate_status(c: *const LpgCertificate, out: *mut LpgStatus) -> LpgError {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = match c.0.status {
            Status::Unknown => LpgStatus::Unknown,
            Status::Conditional => LpgStatus::Conditional,
            Status::Proven => LpgStatus::Proven,
        };
        Ok(())
    })
}

/// Exact exponent sum as a rational string such as `"5/3"`. Release it
/// with [`lpg_string_free`].
///
/// # Safety
/// `c` must be a live certificate handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_certificate_sum(c: *const LpgCertificate, out: *mut *mut c_char) -> LpgError {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = to_c_string(fmt_q(&c.0.sum));
        Ok(())
    })
}

/// Certificate JSON. Release it with [`lpg_string_free`].
///
/// # Safety
/// `c` must be a live certificate handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_certificate_to_json(c: *const LpgCertificate, out: *mut *mut c_char) -> LpgError {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = to_c_string(c.0.to_json());
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_certificate_from_json(json: *const c_char, out: *mut *mut LpgCertificate) -> LpgError {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let s = read_str(json)?;
        let c = Certificate::from_json(s).map_err(|e| (LpgError::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(LpgCertificate(c)));
        Ok(())
    })
}

/// Re-checks every step of a certificate in exact arithmetic. Returns
/// `ReplayFailed` with the offending step in the error message.
///
/// # Safety
/// `c` must be a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn lpg_certificate_replay(c: *const LpgCertificate) -> LpgError {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        replay(&c.0).map_err(|e| (LpgError::ReplayFailed, e.to_string()))
    })
}

/// Numerical rank of the rigidity matrix at `xy = [x1, y1, x2, y2, …]`
/// (`len = 2n`).
///
/// # Safety
/// `g` must be a live graph handle, `xy` must point to `len` doubles and
/// `rank` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lpg_rigidity_rank(g: *const LpgGraph, xy: *const f64, len: usize, rank: *mut usize) -> LpgError {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        if xy.is_null() || rank.is_null() {
            return Err(null("pointer"));
        }
        if len != 2 * g.0.n() {
            return Err((LpgError::Compute, format!("expected {} coordinates, got {len}", 2 * g.0.n())));
        }
        let coords = std::slice::from_raw_parts(xy, len);
        let points: Vec<[f64; 2]> = coords.chunks(2).map(|c| [c[0], c[1]]).collect();
        let jac = rigidity_jacobian(&g.0, &points).map_err(|e| (LpgError::Compute, e.to_string()))?;
        *rank = numerical_rank(&jac, RankPolicy::default()).rank;
        Ok(())
    })
}

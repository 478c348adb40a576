use std::ffi::{CStr, CString};
use std::ptr;

use lpgraph_ffi::*;

const K3: &str = "n 3\ne 1 2\ne 1 3\ne 2 3\n";
const C4: &str = "n 4\ne 1 2\ne 2 3\ne 3 4\ne 1 4\n";

fn parse(text: &str) -> *mut LpgGraph {
    let s = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lpg_graph_parse(s.as_ptr(), &mut g) }, LpgError::Ok);
    assert!(!g.is_null());
    g
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lpg_last_error_message()) }.to_str().unwrap().to_owned()
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { lpg_string_free(s) };
    out
}

#[test]
fn triangle_round_trip() {
    let g = parse(K3);
    let (mut n, mut m) = (0, 0);
    assert_eq!(unsafe { lpg_graph_size(g, &mut n, &mut m) }, LpgError::Ok);
    assert_eq!((n, m), (3, 3));

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { lpg_certify(g, 2, &mut c) }, LpgError::Ok);
    let mut status = LpgStatus::Unknown;
    assert_eq!(unsafe { lpg_certificate_status(c, &mut status) }, LpgError::Ok);
    assert_eq!(status, LpgStatus::Proven);

    let mut sum = ptr::null_mut();
    assert_eq!(unsafe { lpg_certificate_sum(c, &mut sum) }, LpgError::Ok);
    assert_eq!(take(sum), "3/2");
    assert_eq!(unsafe { lpg_certificate_replay(c) }, LpgError::Ok);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lpg_certificate_to_json(c, &mut json) }, LpgError::Ok);
    let json = CString::new(take(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lpg_certificate_from_json(json.as_ptr(), &mut back) }, LpgError::Ok);
    assert_eq!(unsafe { lpg_certificate_replay(back) }, LpgError::Ok);

    unsafe {
        lpg_certificate_free(back);
        lpg_certificate_free(c);
        lpg_graph_free(g);
    }
}

#[test]
fn tampered_certificate_fails_replay() {
    let g = parse(K3);
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { lpg_certify(g, 2, &mut c) }, LpgError::Ok);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lpg_certificate_to_json(c, &mut json) }, LpgError::Ok);
    let text = take(json);
    assert!(text.contains("\"sum\": \"3/2\""));
    let bad = CString::new(text.replace("\"sum\": \"3/2\"", "\"sum\": \"2/3\"")).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { lpg_certificate_from_json(bad.as_ptr(), &mut t) }, LpgError::Ok);
    assert_eq!(unsafe { lpg_certificate_replay(t) }, LpgError::ReplayFailed);
    assert!(!last_error().is_empty());
    unsafe {
        lpg_certificate_free(t);
        lpg_certificate_free(c);
        lpg_graph_free(g);
    }
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lpg_graph_parse(ptr::null(), &mut g) }, LpgError::NullPointer);
    let bad = CString::new("n 2\ne 1 5\n").unwrap();
    assert_eq!(unsafe { lpg_graph_parse(bad.as_ptr(), &mut g) }, LpgError::Parse);
    assert!(g.is_null());
    assert!(!last_error().is_empty());

    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { lpg_graph_parse(invalid.as_ptr().cast(), &mut g) }, LpgError::InvalidUtf8);

    let junk = CString::new("{not json").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { lpg_certificate_from_json(junk.as_ptr(), &mut c) }, LpgError::Parse);
    assert_eq!(unsafe { lpg_certificate_replay(ptr::null()) }, LpgError::NullPointer);

    let mut status = LpgStatus::Unknown;
    assert_eq!(unsafe { lpg_certificate_status(ptr::null(), &mut status) }, LpgError::NullPointer);

    let ok = parse(K3);
    assert!(last_error().is_empty());
    unsafe {
        lpg_graph_free(ok);
        lpg_graph_free(ptr::null_mut());
        lpg_certificate_free(ptr::null_mut());
        lpg_string_free(ptr::null_mut());
    }
}

#[test]
fn rigidity_rank_of_the_square() {
    let g = parse(C4);
    let generic = [0.0, 0.0, 1.0, 0.1, 1.2, 1.0, -0.1, 0.9];
    let mut rank = 0;
    assert_eq!(unsafe { lpg_rigidity_rank(g, generic.as_ptr(), generic.len(), &mut rank) }, LpgError::Ok);
    assert_eq!(rank, 4);
    let collinear = [0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 1.0, 0.0];
    assert_eq!(unsafe { lpg_rigidity_rank(g, collinear.as_ptr(), collinear.len(), &mut rank) }, LpgError::Ok);
    assert_eq!(rank, 3);
    assert_eq!(unsafe { lpg_rigidity_rank(g, generic.as_ptr(), 6, &mut rank) }, LpgError::Compute);
    unsafe { lpg_graph_free(g) };
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(lpg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lpgraph.h")).unwrap();
    for f in [
        "lpg_graph_parse",
        "lpg_graph_free",
        "lpg_graph_size",
        "lpg_certify",
        "lpg_certificate_free",
        "lpg_certificate_status",
        "lpg_certificate_sum",
        "lpg_certificate_to_json",
        "lpg_certificate_from_json",
        "lpg_certificate_replay",
        "lpg_rigidity_rank",
        "lpg_last_error_message",
        "lpg_string_free",
        "lpg_version",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct LpgGraph LpgGraph"));
}

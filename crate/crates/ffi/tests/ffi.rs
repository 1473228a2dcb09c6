use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use d2d_cache_ffi::*;

const THREE_USERS: &str = r#"{ "n": 3, "m": 3, "M": 2, "L": 1, "Lp": 1, "F": 48, "r": 2, "delta": 1, "cr": [[2, 8]], "seed": 1 }"#;

fn params(json: &str) -> *mut D2dParams {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { d2d_params_from_json(c.as_ptr(), &mut out) }, D2dStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = d2d_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rates_of_three_user_example() {
    let p = params(THREE_USERS);
    let mut r = D2dRates::default();
    assert_eq!(unsafe { d2d_rates(p, &mut r) }, D2dStatus::Ok);
    assert_eq!((r.det.num, r.det.den), (1, 2));
    assert_eq!((r.converse.num, r.converse.den), (1, 2));
    assert_eq!((r.basestation.num, r.basestation.den), (1, 3));
    assert_eq!((r.t.num, r.t.den), (2, 1));
    let mut sim = D2dRational::default();
    assert_eq!(unsafe { d2d_simulate_det(p, &mut sim) }, D2dStatus::Ok);
    assert_eq!((sim.num, sim.den), (1, 2));
    unsafe { d2d_params_free(p) };
}

#[test]
fn transcript_round_trip() {
    let p = params(THREE_USERS);
    let files = [0u32, 1, 2];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { d2d_det_transcript(p, files.as_ptr(), 3, &mut s) }, D2dStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.starts_with('{')));
    unsafe { d2d_string_free(s) };
    let bad = [0u32, 1, 7];
    assert_eq!(unsafe { d2d_det_transcript(p, bad.as_ptr(), 3, &mut s) }, D2dStatus::InvalidParams);
    unsafe { d2d_params_free(p) };
}

#[test]
fn rejects_bad_input() {
    let c = CString::new(r#"{ "n": 2, "m": 4, "M": 1, "L": 1, "Lp": 1, "F": 48, "r": 2, "delta": 1, "cr": [[2, 8]] }"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { d2d_params_from_json(c.as_ptr(), &mut out) }, D2dStatus::InvalidParams);
    assert!(out.is_null());
    assert!(last_error().contains("t = Mn/m"));
    let c = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { d2d_params_from_json(c.as_ptr(), &mut out) }, D2dStatus::ConfigError);
    assert_eq!(unsafe { d2d_params_from_json(ptr::null(), &mut out) }, D2dStatus::NullPointer);
    let mut r = D2dRates::default();
    assert_eq!(unsafe { d2d_rates(ptr::null(), &mut r) }, D2dStatus::NullPointer);
    unsafe { d2d_params_free(ptr::null_mut()) };
    unsafe { d2d_string_free(ptr::null_mut()) };
}

#[test]
fn fixed_point_and_random_rate() {
    let (mut star, mut rho) = (0.0, 0.0);
    assert_eq!(unsafe { d2d_solve_rho(2.0, 0.001, &mut star, &mut rho) }, D2dStatus::Ok);
    assert!((star - 0.796812).abs() < 1e-6);
    assert!(rho < star);
    assert_eq!(unsafe { d2d_solve_rho(1.0, 0.001, &mut star, &mut rho) }, D2dStatus::NoSolution);
    let (mut exact, mut upper) = (0.0, 0.0);
    assert_eq!(unsafe { d2d_rand_rate(3, 3, 2.0, 0.95, &mut exact, &mut upper) }, D2dStatus::Ok);
    assert!((exact - 0.77).abs() <= 0.005);
    assert!(exact <= upper);
}

#[test]
fn random_run() {
    let p = params(r#"{ "n": 3, "m": 3, "M": 2, "L": 1, "Lp": 1, "F": 960, "r": 2, "delta": 1, "cr": [[2, 8]] }"#);
    let mut run = D2dRandomRun::default();
    assert_eq!(unsafe { d2d_simulate_random(p, 60, 0.75, 3, &mut run) }, D2dStatus::Ok);
    assert_eq!(run.k, 60);
    assert!(run.measured_rate > 0.0);
    assert_eq!(run.decoded, run.distinct_symbols >= 60);
    unsafe { d2d_params_free(p) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(d2d_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/d2d_cache.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["d2d_params_from_json", "d2d_rates", "d2d_solve_rho", "d2d_simulate_det", "d2d_det_transcript", "d2d_simulate_random", "d2d_string_free", "d2d_last_error", "D2D_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

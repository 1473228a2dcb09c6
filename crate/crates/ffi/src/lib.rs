//! C ABI over `d2d_cache`.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free` function. Every fallible call returns a
//! [`D2dStatus`]; on failure the message is available from
//! [`d2d_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use d2d_cache::analysis::{rate_basestation_reference, rate_converse, rate_det_formula, rate_det_naive, rate_rand_formula};
use d2d_cache::decentral::{run_random, solve_rho_star};
use d2d_cache::det::{place_any, run_det, simulate_det, transcript_jsonl};
use d2d_cache::model::{gen_library, worst_case_demands, Demand, DemandFamily, SegmentChoice, SystemParams, ENUMERATION_CAP};
use d2d_cache::rational::{to_f64, Rational};
use d2d_cache::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    InvalidParams = 4,
    CheckFailed = 5,
    NoSolution = 6,
    Overflow = 7,
    Panic = 8,
}

/// Validated system parameters.
pub struct D2dParams {
    inner: SystemParams,
}

/// An exact rational, `num / den`, with its float value.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct D2dRational {
    pub num: i64,
    pub den: i64,
    pub value: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct D2dRates {
    pub t: D2dRational,
    pub det: D2dRational,
    pub det_naive: D2dRational,
    pub converse: D2dRational,
    pub basestation: D2dRational,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct D2dRandomRun {
    pub k: usize,
    pub distinct_symbols: usize,
    pub decoded: bool,
    pub measured_rate: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> D2dStatus {
    match err {
        Error::Config(_) | Error::Io(_) => D2dStatus::ConfigError,
        Error::NoSolution(_) => D2dStatus::NoSolution,
        Error::DecodeMismatch { .. }
        | Error::MissingTransmission { .. }
        | Error::Cancellation { .. }
        | Error::InfeasibleTransmission(_) => D2dStatus::CheckFailed,
        _ => D2dStatus::InvalidParams,
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (D2dStatus, String)>) -> D2dStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => D2dStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside d2d-cache".into());
            D2dStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (D2dStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (D2dStatus, String) {
    (D2dStatus::NullPointer, format!("{what} is null"))
}

fn rational(r: Rational) -> Result<D2dRational, (D2dStatus, String)> {
    let num = i64::try_from(*r.numer()).map_err(|_| (D2dStatus::Overflow, format!("{r} does not fit in 64 bits")))?;
    let den = i64::try_from(*r.denom()).map_err(|_| (D2dStatus::Overflow, format!("{r} does not fit in 64 bits")))?;
    Ok(D2dRational {
        num,
        den,
        value: to_f64(&r),
    })
}

unsafe fn params_ref<'a>(p: *const D2dParams) -> Result<&'a SystemParams, (D2dStatus, String)> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("params"))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn d2d_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn d2d_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a JSON configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d2d_params_from_json(json: *const c_char, out: *mut *mut D2dParams) -> D2dStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (D2dStatus::InvalidUtf8, e.to_string()))?;
        let params = SystemParams::from_json(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(D2dParams { inner: params }));
        Ok(())
    })
}

/// # Safety
/// `params` must come from [`d2d_params_from_json`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn d2d_params_free(params: *mut D2dParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Closed-form rates for the configured `(n, m, M)`.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d2d_rates(params: *const D2dParams, out: *mut D2dRates) -> D2dStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (n, m, cache) = (p.n() as u64, p.m() as u64, p.cache_size());
        *out = D2dRates {
            t: rational(p.t())?,
            det: rational(rate_det_formula(n, m, cache).map_err(lib_err)?)?,
            det_naive: rational(rate_det_naive(n, m, cache).map_err(lib_err)?)?,
            converse: rational(rate_converse(n, m, cache))?,
            basestation: rational(rate_basestation_reference(n, m, cache))?,
        };
        Ok(())
    })
}

/// Fixed point `rho*` of `x = 1 - exp(-t x)` and `rho = (1 - epsilon) rho*`.
///
/// # Safety
/// `rho_star` and `rho` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn d2d_solve_rho(t: f64, epsilon: f64, rho_star: *mut f64, rho: *mut f64) -> D2dStatus {
    guard(|| {
        if rho_star.is_null() || rho.is_null() {
            return Err(null("output"));
        }
        let s = solve_rho_star(t, epsilon).map_err(lib_err)?;
        *rho_star = s.rho_star;
        *rho = s.rho;
        Ok(())
    })
}

/// Decentralized rate and its upper bound.
///
/// # Safety
/// `exact` and `upper` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn d2d_rand_rate(
    n: u64,
    m: u64,
    cache: f64,
    rho: f64,
    exact: *mut f64,
    upper: *mut f64,
) -> D2dStatus {
    guard(|| {
        if exact.is_null() || upper.is_null() {
            return Err(null("output"));
        }
        if n == 0 || m == 0 {
            return Err((D2dStatus::InvalidParams, "n and m must be positive".into()));
        }
        let r = rate_rand_formula(n, m, cache, rho).map_err(lib_err)?;
        *exact = r.exact;
        *upper = r.upper;
        Ok(())
    })
}

/// Worst-case measured rate of the deterministic scheme over the periodic
/// demand family, every decode checked.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d2d_simulate_det(params: *const D2dParams, out: *mut D2dRational) -> D2dStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let library = gen_library(p, p.seed());
        let demands = worst_case_demands(p, DemandFamily::Periodic, SegmentChoice::Staggered, ENUMERATION_CAP);
        *out = rational(simulate_det(p, &library, &demands).map_err(lib_err)?)?;
        Ok(())
    })
}

/// JSON-lines transcript of the deterministic delivery for the aligned
/// demand `files[0..len]` (0-based file indices). Free the result with
/// [`d2d_string_free`].
///
/// # Safety
/// `params` must be a live handle, `files` must point to `len` values and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d2d_det_transcript(
    params: *const D2dParams,
    files: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> D2dStatus {
    guard(|| {
        let p = params_ref(params)?;
        if files.is_null() {
            return Err(null("files"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let demand = Demand::aligned(std::slice::from_raw_parts(files, len).iter().map(|&f| f as usize).collect());
        demand.validate(p).map_err(lib_err)?;
        let library = gen_library(p, p.seed());
        let placement = place_any(p, &library).map_err(lib_err)?;
        let run = run_det(p, &library, &placement, &demand).map_err(lib_err)?;
        let text = transcript_jsonl(&run.transmissions).map_err(lib_err)?;
        *out = CString::new(text)
            .map_err(|e| (D2dStatus::ConfigError, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// One run of decentralized caching with `K` source symbols per packet for
/// the demand `f_u = u mod m`.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d2d_simulate_random(
    params: *const D2dParams,
    k: usize,
    rho: f64,
    seed: u64,
    out: *mut D2dRandomRun,
) -> D2dStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let demand = Demand::aligned((0..p.n()).map(|u| u % p.m()).collect());
        let row = run_random(p, &demand, k, rho, seed).map_err(lib_err)?;
        *out = D2dRandomRun {
            k: row.k,
            distinct_symbols: row.distinct_symbols,
            decoded: row.decoded,
            measured_rate: row.measured_rate,
        };
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn d2d_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

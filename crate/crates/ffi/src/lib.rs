//! C ABI over the `jamsec` library.
//!
//! Scenarios are opaque heap handles created by [`jamsec_scenario_new_default`]
//! and released with [`jamsec_scenario_free`]. Every fallible function returns
//! a [`JamsecStatus`] and writes its result through an out-pointer; on failure
//! [`jamsec_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jamsec::analysis::{self, RateRegion};
use jamsec::optimizer::{self, SolverPath};
use jamsec::simulator::{self, SimParams};
use jamsec::{Error, RatePair, Scenario, SystemConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamsecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    SolverFailure = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamsecRegion {
    /// Jamming cost below outage odds: battery accumulates.
    D1 = 0,
    /// Both terms equal.
    Boundary = 1,
    D2 = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamsecSolverPath {
    SingleAccumulation = 0,
    SingleBoundary = 1,
    MultiBoundary = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JamsecDerived {
    pub rho_d: f64,
    /// Mean energy harvested per power-transfer block, joules.
    pub rho_j: f64,
    pub k1: f64,
    pub k2: f64,
    /// NaN for a single-antenna jammer.
    pub m: f64,
    pub secrecy_factor: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JamsecThroughput {
    pub pi: f64,
    pub p_tx: f64,
    pub p_co: f64,
    pub p_so: f64,
    /// Least jamming power meeting the secrecy constraint, watts.
    pub jam_power: f64,
    pub term_a: f64,
    pub term_b: f64,
    pub region: JamsecRegion,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JamsecOptimum {
    pub rt: f64,
    pub rs: f64,
    pub jam_power: f64,
    pub pi: f64,
    pub residual: f64,
    pub iterations: u64,
    pub region: JamsecRegion,
    pub path: JamsecSolverPath,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JamsecSimSummary {
    pub n_it: u64,
    pub n_pt: u64,
    pub p_tx: f64,
    pub p_tx_se: f64,
    pub p_co: f64,
    pub p_so: f64,
    pub mean_harvested_power: f64,
    pub final_energy: f64,
}

/// Opaque scenario handle.
pub struct JamsecScenario {
    scn: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> JamsecStatus {
    match err {
        Error::InvalidConfig(_) | Error::Parse { .. } => JamsecStatus::InvalidConfig,
        e if e.is_solver_failure() => JamsecStatus::SolverFailure,
        _ => JamsecStatus::InvalidArgument,
    }
}

fn fail(status: JamsecStatus, msg: impl Into<String>) -> JamsecStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), JamsecStatus>>(f: F) -> JamsecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JamsecStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(JamsecStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: jamsec::Result<T>) -> Result<T, JamsecStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn handle<'a>(s: *const JamsecScenario) -> Result<&'a JamsecScenario, JamsecStatus> {
    s.as_ref().ok_or_else(|| fail(JamsecStatus::NullPointer, "scenario handle is null"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, JamsecStatus> {
    p.as_mut().ok_or_else(|| fail(JamsecStatus::NullPointer, "output pointer is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, JamsecStatus> {
    if p.is_null() {
        return Err(fail(JamsecStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(JamsecStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn region(r: RateRegion) -> JamsecRegion {
    match r {
        RateRegion::D1 => JamsecRegion::D1,
        RateRegion::Boundary => JamsecRegion::Boundary,
        RateRegion::D2 => JamsecRegion::D2,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn jamsec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn jamsec_dbm_to_watts(p_dbm: f64) -> f64 {
    jamsec::config::dbm_to_watts(p_dbm)
}

#[no_mangle]
pub extern "C" fn jamsec_watts_to_dbm(p_watts: f64) -> f64 {
    jamsec::config::watts_to_dbm(p_watts)
}

/// New scenario with the reference parameters. Never NULL.
#[no_mangle]
pub extern "C" fn jamsec_scenario_new_default() -> *mut JamsecScenario {
    let scn = Scenario::new(SystemConfig::default()).expect("default config is valid");
    Box::into_raw(Box::new(JamsecScenario { scn }))
}

/// Parses `key = value` lines over the defaults into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_handle` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jamsec_scenario_from_text(
    text: *const c_char,
    out_handle: *mut *mut JamsecScenario,
) -> JamsecStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let body = c_str(text, "config text")?;
        let scn = lib(SystemConfig::from_text(body).and_then(Scenario::new))?;
        *slot = Box::into_raw(Box::new(JamsecScenario { scn }));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn jamsec_scenario_free(s: *mut JamsecScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Sets one config key. On error the scenario is left unchanged.
///
/// # Safety
/// `s` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn jamsec_scenario_set(
    s: *mut JamsecScenario,
    key: *const c_char,
    value: *const c_char,
) -> JamsecStatus {
    guard(|| {
        let h = s.as_mut().ok_or_else(|| fail(JamsecStatus::NullPointer, "scenario handle is null"))?;
        let (k, v) = (c_str(key, "key")?, c_str(value, "value")?);
        let mut cfg = h.scn.config().clone();
        lib(cfg.set(k, v))?;
        h.scn = lib(Scenario::new(cfg))?;
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jamsec_derived(s: *const JamsecScenario, result: *mut JamsecDerived) -> JamsecStatus {
    guard(|| {
        let k = handle(s)?.scn.constants();
        *out(result)? = JamsecDerived {
            rho_d: k.rho_d,
            rho_j: k.rho_j,
            k1: k.k1,
            k2: k.k2,
            m: k.m.unwrap_or(f64::NAN),
            secrecy_factor: k.secrecy_factor,
        };
        Ok(())
    })
}

/// Throughput at (rt, rs) with the secrecy-optimal jamming power.
///
/// # Safety
/// `s` must be a live handle and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jamsec_throughput(
    s: *const JamsecScenario,
    rt: f64,
    rs: f64,
    result: *mut JamsecThroughput,
) -> JamsecStatus {
    guard(|| {
        let scn = &handle(s)?.scn;
        let slot = out(result)?;
        let rates = lib(RatePair::new(rt, rs))?;
        let r = lib(analysis::throughput(scn, rates))?;
        *slot = JamsecThroughput {
            pi: r.pi,
            p_tx: r.p_tx,
            p_co: r.p_co,
            p_so: r.p_so,
            jam_power: r.jam_power,
            term_a: r.term_a,
            term_b: r.term_b,
            region: region(r.region),
        };
        Ok(())
    })
}

/// Throughput-optimal rates and jamming power.
///
/// # Safety
/// `s` must be a live handle and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jamsec_optimize(s: *const JamsecScenario, result: *mut JamsecOptimum) -> JamsecStatus {
    guard(|| {
        let scn = &handle(s)?.scn;
        let slot = out(result)?;
        let r = lib(optimizer::solve(scn))?;
        let path = match r.path {
            SolverPath::SingleAccumulation => JamsecSolverPath::SingleAccumulation,
            SolverPath::SingleBoundary => JamsecSolverPath::SingleBoundary,
            _ => JamsecSolverPath::MultiBoundary,
        };
        *slot = JamsecOptimum {
            rt: r.rates.rt,
            rs: r.rates.rs,
            jam_power: r.jam_power,
            pi: r.throughput,
            residual: r.residual,
            iterations: r.iterations as u64,
            region: region(r.region),
            path,
        };
        Ok(())
    })
}

/// Simulates `n_blocks` blocks at jamming power `jam_power` (watts).
///
/// # Safety
/// `s` must be a live handle and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jamsec_simulate(
    s: *const JamsecScenario,
    rt: f64,
    rs: f64,
    jam_power: f64,
    n_blocks: u64,
    seed: u64,
    result: *mut JamsecSimSummary,
) -> JamsecStatus {
    guard(|| {
        let scn = &handle(s)?.scn;
        let slot = out(result)?;
        let rates = lib(RatePair::new(rt, rs))?;
        let run = lib(simulator::run(scn, &SimParams::new(rates, jam_power, n_blocks, seed)))?;
        let m = run.summary;
        *slot = JamsecSimSummary {
            n_it: m.n_it,
            n_pt: m.n_pt,
            p_tx: m.p_tx.value,
            p_tx_se: m.p_tx.std_error,
            p_co: m.p_co.value,
            p_so: m.p_so.value,
            mean_harvested_power: m.mean_harvested_power,
            final_energy: m.final_energy,
        };
        Ok(())
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn jamsec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

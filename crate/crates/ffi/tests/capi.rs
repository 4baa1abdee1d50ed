use std::ffi::{CStr, CString};
use std::ptr;

use jamsec_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = jamsec_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handle(*mut JamsecScenario);

impl Handle {
    fn new() -> Self {
        Handle(jamsec_scenario_new_default())
    }

    fn set(&self, k: &str, v: &str) -> JamsecStatus {
        unsafe { jamsec_scenario_set(self.0, cstr(k).as_ptr(), cstr(v).as_ptr()) }
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { jamsec_scenario_free(self.0) }
    }
}

#[test]
fn derived_constants_of_default_scenario() {
    let h = Handle::new();
    let mut d = JamsecDerived::default();
    assert_eq!(unsafe { jamsec_derived(h.0, &mut d) }, JamsecStatus::Ok);
    assert!((d.rho_j - 2.56e-7).abs() < 1e-18);
    assert!((d.rho_d - 8e7).abs() < 1e-4);
    assert!(d.m.is_finite());

    assert_eq!(h.set("jammer_antennas", "1"), JamsecStatus::Ok);
    assert_eq!(unsafe { jamsec_derived(h.0, &mut d) }, JamsecStatus::Ok);
    assert!(d.m.is_nan());
    assert!((d.rho_j - 3.2e-8).abs() < 1e-19);
}

#[test]
fn set_rejects_and_keeps_previous_state() {
    let h = Handle::new();
    assert_eq!(h.set("no_such_key", "1"), JamsecStatus::InvalidArgument);
    assert!(last_error().contains("no_such_key"));
    assert_eq!(h.set("secrecy_constraint", "1.5"), JamsecStatus::InvalidConfig);
    let mut d = JamsecDerived::default();
    unsafe { jamsec_derived(h.0, &mut d) };
    assert!((d.rho_j - 2.56e-7).abs() < 1e-18);
}

#[test]
fn throughput_and_optimum() {
    let h = Handle::new();
    let mut t = JamsecThroughput {
        pi: 0.0,
        p_tx: 0.0,
        p_co: 0.0,
        p_so: 0.0,
        jam_power: 0.0,
        term_a: 0.0,
        term_b: 0.0,
        region: JamsecRegion::D2,
    };
    assert_eq!(unsafe { jamsec_throughput(h.0, 24.0, 12.0, &mut t) }, JamsecStatus::Ok);
    assert!((t.p_so - 0.01).abs() < 1e-12);
    assert!((t.pi - 12.0 * t.p_tx).abs() < 1e-12);

    assert_eq!(unsafe { jamsec_throughput(h.0, 1.0, 2.0, &mut t) }, JamsecStatus::InvalidArgument);

    let mut o = JamsecOptimum {
        rt: 0.0,
        rs: 0.0,
        jam_power: 0.0,
        pi: 0.0,
        residual: 1.0,
        iterations: 0,
        region: JamsecRegion::D2,
        path: JamsecSolverPath::SingleAccumulation,
    };
    assert_eq!(unsafe { jamsec_optimize(h.0, &mut o) }, JamsecStatus::Ok);
    assert_eq!(o.path, JamsecSolverPath::MultiBoundary);
    assert_eq!(o.region, JamsecRegion::Boundary);
    assert!((o.pi - 9.38268).abs() < 1e-4);

    h.set("jammer_antennas", "1");
    assert_eq!(unsafe { jamsec_optimize(h.0, &mut o) }, JamsecStatus::Ok);
    assert_eq!(o.path, JamsecSolverPath::SingleAccumulation);
    assert_eq!(o.region, JamsecRegion::D1);
}

#[test]
fn simulate_is_seeded() {
    let h = Handle::new();
    let mut a = JamsecSimSummary::default();
    let mut b = JamsecSimSummary::default();
    unsafe {
        assert_eq!(jamsec_simulate(h.0, 26.9, 15.0, 1e-3, 50_000, 9, &mut a), JamsecStatus::Ok);
        assert_eq!(jamsec_simulate(h.0, 26.9, 15.0, 1e-3, 50_000, 9, &mut b), JamsecStatus::Ok);
    }
    assert_eq!(a, b);
    assert_eq!(a.n_it + a.n_pt, 50_000 - 500);
    assert_eq!(
        unsafe { jamsec_simulate(h.0, 26.9, 15.0, 1e-3, 0, 9, &mut a) },
        JamsecStatus::InvalidArgument
    );
}

#[test]
fn null_pointers_are_reported() {
    let mut d = JamsecDerived::default();
    assert_eq!(unsafe { jamsec_derived(ptr::null(), &mut d) }, JamsecStatus::NullPointer);
    assert!(last_error().contains("null"));
    let h = Handle::new();
    assert_eq!(unsafe { jamsec_derived(h.0, ptr::null_mut()) }, JamsecStatus::NullPointer);
    assert_eq!(
        unsafe { jamsec_scenario_set(h.0, ptr::null(), cstr("1").as_ptr()) },
        JamsecStatus::NullPointer
    );
    unsafe { jamsec_scenario_free(ptr::null_mut()) };
}

#[test]
fn from_text() {
    let mut h: *mut JamsecScenario = ptr::null_mut();
    let text = cstr("jammer_antennas = 1\nsource_power_dbm = 30\n");
    assert_eq!(unsafe { jamsec_scenario_from_text(text.as_ptr(), &mut h) }, JamsecStatus::Ok);
    let mut d = JamsecDerived::default();
    unsafe { jamsec_derived(h, &mut d) };
    assert!(d.m.is_nan());
    unsafe { jamsec_scenario_free(h) };

    let mut h2: *mut JamsecScenario = ptr::null_mut();
    let bad = cstr("d_sj = 25\nnonsense\n");
    assert_eq!(unsafe { jamsec_scenario_from_text(bad.as_ptr(), &mut h2) }, JamsecStatus::InvalidConfig);
    assert!(h2.is_null());
    assert!(last_error().contains("line 2"));
}

#[test]
fn unit_helpers_and_version() {
    assert_eq!(jamsec_dbm_to_watts(30.0), 1.0);
    assert!((jamsec_watts_to_dbm(1e-3)).abs() < 1e-12);
    let v = unsafe { CStr::from_ptr(jamsec_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

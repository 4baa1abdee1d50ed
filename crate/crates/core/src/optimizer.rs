//! Throughput-optimal wiretap code rates under the secrecy outage constraint.
//!
//! Jamming power is always set to the smallest value meeting the constraint,
//! which leaves a two-dimensional problem over (R_t, R_s). Exact solvers are
//! provided for both jammer types, together with high-SNR and large-array
//! approximations and a brute-force grid search used as an independent check.

use std::f64::consts::{E, LN_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, RateRegion};
use crate::config::{pow2_minus_one, RatePair, Scenario};
use crate::error::{Error, Result};
use crate::numerics::{find_root, lambert_w0, sign_changes, Monotonicity, RootSpec};

const ROOT_TOL: f64 = 1e-13;
/// Upper end of every R_t search, in bits per channel use.
const RT_CEILING: f64 = 60.0;

/// Upper end of the R_t search, raised for very high SNR.
fn rt_ceiling(rho_d: f64) -> f64 {
    RT_CEILING.max(rho_d.log2() + 16.0)
}
const SCAN_POINTS: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SolverPath {
    /// Single antenna, optimum inside the accumulation region.
    SingleAccumulation,
    /// Single antenna, optimum on the boundary.
    SingleBoundary,
    /// Multi-antenna, optimum on the boundary.
    MultiBoundary,
    SingleHighSnr,
    MultiHighSnr,
    LargeArray,
    Grid,
}

impl SolverPath {
    pub fn label(self) -> &'static str {
        match self {
            SolverPath::SingleAccumulation => "single-accumulation",
            SolverPath::SingleBoundary => "single-boundary",
            SolverPath::MultiBoundary => "multi-boundary",
            SolverPath::SingleHighSnr => "asymptotic-single-high-snr",
            SolverPath::MultiHighSnr => "asymptotic-multi-high-snr",
            SolverPath::LargeArray => "asymptotic-large-array",
            SolverPath::Grid => "grid",
        }
    }

    pub fn is_asymptotic(self) -> bool {
        matches!(self, SolverPath::SingleHighSnr | SolverPath::MultiHighSnr | SolverPath::LargeArray)
    }
}

/// Intermediate quantities of the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AuxVars {
    /// 2^(R_t - R_s) - 1 in the accumulation-region solve.
    pub xi: Option<f64>,
    /// 2^(R_t - R_s) - 1 on the single-antenna boundary, and its R_t derivative.
    pub zeta: Option<f64>,
    pub zeta_prime: Option<f64>,
    /// 2^R_t in the multi-antenna solve.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub rates: RatePair,
    pub jam_power: f64,
    /// Throughput at `rates`, evaluated by [`analysis::throughput`].
    pub throughput: f64,
    pub region: RateRegion,
    pub path: SolverPath,
    pub iterations: usize,
    /// Residual of the defining equation at the returned point.
    pub residual: f64,
    pub aux: AuxVars,
    /// Closed-form throughput value attached to an asymptotic design.
    pub asymptotic_bound: Option<f64>,
    /// Largest throughput change to a neighbouring grid point (grid only).
    pub grid_slack: Option<f64>,
    /// Whether the solved equation was confirmed monotone on its bracket.
    pub monotone: Option<bool>,
}

impl OptResult {
    fn at(scn: &Scenario, rates: RatePair, path: SolverPath) -> Result<Self> {
        let report = analysis::throughput(scn, rates)?;
        Ok(OptResult {
            rates,
            jam_power: report.jam_power,
            throughput: report.pi,
            region: report.region,
            path,
            iterations: 0,
            residual: 0.0,
            aux: AuxVars::default(),
            asymptotic_bound: None,
            grid_slack: None,
            monotone: None,
        })
    }

    /// Recomputes the throughput terms at the returned rates.
    pub fn report(&self, scn: &Scenario) -> Result<analysis::ThroughputReport> {
        analysis::throughput(scn, self.rates)
    }
}

fn rate_pair(rt: f64, rs: f64, what: &str) -> Result<RatePair> {
    if !(rs > 0.0) || !(rt > rs) {
        return Err(Error::Infeasible(format!("{what} gives R_t = {rt}, R_s = {rs}")));
    }
    RatePair::new(rt, rs)
}

fn check_monotone<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, increasing: bool) -> bool {
    let n = 256;
    let ratio = (hi / lo).powf(1.0 / n as f64);
    let mut prev = f(lo);
    let mut x = lo;
    for _ in 0..n {
        x *= ratio;
        let v = f(x.min(hi));
        if !v.is_finite() || (increasing && v < prev) || (!increasing && v > prev) {
            return false;
        }
        prev = v;
    }
    true
}

/// Dispatches on the jammer type.
pub fn solve(scn: &Scenario) -> Result<OptResult> {
    if scn.is_single_antenna() {
        solve_single_antenna(scn)
    } else {
        solve_multi_antenna(scn)
    }
}

fn require_single(scn: &Scenario) -> Result<()> {
    if scn.is_single_antenna() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("needs N_J = 1, got {}", scn.jammer_antennas())))
    }
}

fn multi_m(scn: &Scenario) -> Result<f64> {
    scn.constants()
        .m
        .ok_or_else(|| Error::InvalidArgument("needs N_J >= 2, got 1".into()))
}

/// Positive root of xi^2 + A xi - B/4 = 0 for a given R_s.
pub fn xi(rs: f64, rho_d: f64, k2: f64) -> f64 {
    let p = rs.exp2();
    let pm1 = pow2_minus_one(rs);
    let den = 1.0 + k2 * p;
    let a = k2 * pm1 / den;
    let b = 4.0 * rho_d * k2 * (pm1 / p) / den;
    // (-a + sqrt(a^2 + b)) / 2 without cancellation
    0.5 * b / (a + (a * a + b).sqrt())
}

/// Stationarity condition in R_s for the accumulation region.
pub fn accumulation_condition(rs: f64, rho_d: f64, k2: f64) -> f64 {
    let x = xi(rs, rho_d, k2);
    let l = rs * LN_2;
    k2 * (rs.exp2() + pow2_minus_one(rs) / x) * (l - 1.0 + l / x) - 1.0
}

/// Single-antenna boundary curve: for each R_t the rate redundancy
/// zeta = 2^(R_t - R_s) - 1 that puts (R_t, R_s) on term (a) = term (b).
#[derive(Debug, Clone, Copy)]
struct Boundary {
    rho_d: f64,
    k1: f64,
    k2: f64,
}

impl Boundary {
    fn zeta(&self, rt: f64) -> (f64, f64) {
        let x = pow2_minus_one(rt);
        let em = (x / self.rho_d).exp_m1();
        let e = em + 1.0;
        let zeta = (self.k1 - self.k2 * e * x) / em;
        let zeta_prime =
            LN_2 * e / (em * em) * (self.k2 * rt.exp2() * (1.0 / self.rho_d - em) - (self.k1 + self.k2) / self.rho_d);
        (zeta, zeta_prime)
    }

    fn rs(&self, rt: f64) -> f64 {
        rt - self.zeta(rt).0.ln_1p() / LN_2
    }

    /// Throughput along the boundary.
    fn pi(&self, rt: f64) -> f64 {
        let (z, _) = self.zeta(rt);
        self.rs(rt) * z / (z + self.k1)
    }

    /// d(pi)/d(R_t) = 0, scaled by (zeta + k1) / zeta so that it reads
    /// zeta' (1/(ln2 (1+zeta)) - k1 R_s / (zeta (zeta + k1))) = 1.
    fn stationarity(&self, rt: f64) -> f64 {
        let (z, zp) = self.zeta(rt);
        let rs = rt - z.ln_1p() / LN_2;
        zp * (1.0 / (LN_2 * (1.0 + z)) - self.k1 * rs / (z * (z + self.k1))) - 1.0
    }
}

/// Points on (lo, hi), dense near both ends.
fn scan_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let w = hi - lo;
    let mut pts: Vec<f64> = (1..n).map(|i| lo + w * i as f64 / n as f64).collect();
    for i in 0..n {
        let off = w * 10f64.powf(-13.0 + 13.0 * i as f64 / n as f64);
        pts.push(lo + off);
        pts.push(hi - off);
    }
    pts.retain(|p| *p > lo && *p < hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Exact optimum for a single-antenna jammer.
///
/// First assumes an interior optimum in the accumulation region; if the
/// resulting point is not there, searches the boundary curve.
pub fn solve_single_antenna(scn: &Scenario) -> Result<OptResult> {
    require_single(scn)?;
    let k = scn.constants();
    let (rho_d, k1, k2) = (k.rho_d, k.k1, k.k2);

    let lo = 1e-6;
    let hi = rho_d.ln_1p() / LN_2;
    if hi <= lo {
        return Err(Error::Infeasible(format!("SNR {rho_d} leaves no positive secrecy rate")));
    }
    let cond = |rs: f64| accumulation_condition(rs, rho_d, k2);
    let monotone = check_monotone(cond, lo, hi, true);
    let root = find_root(cond, RootSpec::new(lo, hi).tol(ROOT_TOL).monotone(Monotonicity::Increasing))?;
    let rs = root.root;
    let x = xi(rs, rho_d, k2);
    let rt = rs + x.ln_1p() / LN_2;
    if let Ok(rates) = rate_pair(rt, rs, "accumulation-region solve") {
        let mut res = OptResult::at(scn, rates, SolverPath::SingleAccumulation)?;
        if res.region == RateRegion::D1 {
            res.iterations = root.iterations;
            res.residual = root.value;
            res.aux.xi = Some(x);
            res.monotone = Some(monotone);
            return Ok(res);
        }
    }
    solve_single_boundary(scn, Boundary { rho_d, k1, k2 }, root.iterations, monotone)
}

fn solve_single_boundary(scn: &Scenario, bd: Boundary, prior_iters: usize, monotone: bool) -> Result<OptResult> {
    // zeta > 0 exactly below the R_t where k2 e^u x = k1
    let edge = |rt: f64| {
        let x = pow2_minus_one(rt);
        bd.k2.ln() + x / bd.rho_d + x.ln() - bd.k1.ln()
    };
    let spec = RootSpec::new(1e-9, rt_ceiling(bd.rho_d)).tol(ROOT_TOL).monotone(Monotonicity::Increasing);
    let rt_max = find_root(edge, spec)?;
    // R_s > 0 above the R_t where 2^R_t = 1 + zeta
    let rt_min = find_root(
        |rt| bd.rs(rt),
        RootSpec::new(1e-9, rt_max.root * (1.0 - 1e-15)).tol(ROOT_TOL).monotone(Monotonicity::Increasing),
    )?;
    let (lo, hi) = (rt_min.root, rt_max.root);
    let mut iterations = prior_iters + rt_max.iterations + rt_min.iterations;

    let pts = scan_points(lo, hi, SCAN_POINTS);
    let mut best: Option<(f64, f64, f64)> = None;
    for (a, b) in sign_changes(|rt| bd.stationarity(rt), &pts) {
        let r = find_root(|rt| bd.stationarity(rt), RootSpec::new(a, b).tol(ROOT_TOL))?;
        iterations += r.iterations;
        let pi = bd.pi(r.root);
        if pi.is_finite() && best.is_none_or(|(p, _, _)| pi > p) {
            best = Some((pi, r.root, r.value));
        }
    }
    // both ends of the interval carry zero throughput
    let (_, rt, residual) = best
        .filter(|(pi, _, _)| *pi > 0.0)
        .ok_or_else(|| Error::Infeasible(format!("no stationary point on the boundary for R_t in ({lo}, {hi})")))?;
    let (zeta, zeta_prime) = bd.zeta(rt);
    let rates = rate_pair(rt, bd.rs(rt), "boundary solve")?;
    let mut res = OptResult::at(scn, rates, SolverPath::SingleBoundary)?;
    res.iterations = iterations;
    res.residual = residual;
    res.aux.zeta = Some(zeta);
    res.aux.zeta_prime = Some(zeta_prime);
    res.monotone = Some(monotone);
    Ok(res)
}

/// Left side of the multi-antenna optimality condition as a function of
/// z = 2^R_t. Decreasing in z.
pub fn multi_condition(z: f64, rho_d: f64, m: f64) -> f64 {
    multi_condition_rt(z.log2(), rho_d, m)
}

fn multi_condition_rt(rt: f64, rho_d: f64, m: f64) -> f64 {
    let z = rt.exp2();
    let u = pow2_minus_one(rt) / rho_d;
    let base = rho_d / z - rt * LN_2;
    if u > 700.0 {
        // the remaining terms are below 1e-300
        return base;
    }
    let em = u.exp_m1();
    base + (m / em).ln_1p() + m * (em + 1.0) / (em * (em + m))
}

/// Exact optimum for a multi-antenna jammer, always on the boundary.
pub fn solve_multi_antenna(scn: &Scenario) -> Result<OptResult> {
    let m = multi_m(scn)?;
    let rho_d = scn.constants().rho_d;
    let f = |rt: f64| multi_condition_rt(rt, rho_d, m);
    let lo = 1e-9f64.ln_1p() / LN_2;
    let hi = rt_ceiling(rho_d);
    let monotone = check_monotone(f, lo, hi, false);
    let root = find_root(f, RootSpec::new(lo, hi).tol(ROOT_TOL).monotone(Monotonicity::Decreasing))?;
    let rt = root.root;
    let em = (pow2_minus_one(rt) / rho_d).exp_m1();
    let rs = rt - (m / em).ln_1p() / LN_2;
    let mut res = OptResult::at(scn, rate_pair(rt, rs, "multi-antenna solve")?, SolverPath::MultiBoundary)?;
    res.iterations = root.iterations;
    res.residual = root.value;
    res.aux.z = Some(rt.exp2());
    res.monotone = Some(monotone);
    Ok(res)
}

/// High-SNR design for a single-antenna jammer. `asymptotic_bound` holds the
/// limiting throughput W0(1/(e k2)) / ln 2, which does not depend on P_s.
pub fn asymptotic_single_antenna(scn: &Scenario) -> Result<OptResult> {
    require_single(scn)?;
    let k = scn.constants();
    let w = lambert_w0(1.0 / (E * k.k2))?;
    let rs = (1.0 + w) / LN_2;
    let xi = (k.rho_d * k.k2 * (1.0 - (-rs).exp2()) / (1.0 + k.k2 * rs.exp2())).sqrt();
    let rt = rs + xi.ln_1p() / LN_2;
    let mut res = OptResult::at(scn, rate_pair(rt, rs, "high-SNR design")?, SolverPath::SingleHighSnr)?;
    res.aux.xi = Some(xi);
    res.asymptotic_bound = Some(w / LN_2);
    Ok(res)
}

/// High-SNR design for a multi-antenna jammer; `asymptotic_bound` is the
/// approximate throughput, equal to the design's R_s.
pub fn asymptotic_multi_antenna_high_snr(scn: &Scenario) -> Result<OptResult> {
    let m = multi_m(scn)?;
    let rho_d = scn.constants().rho_d;
    let w = lambert_w0(2.0 * rho_d)?;
    let rt = (2.0 * rho_d).log2() - w.log2();
    let rs = 2.0 * w / LN_2 - (m * rho_d).log2();
    let mut res = OptResult::at(scn, rate_pair(rt, rs, "high-SNR design")?, SolverPath::MultiHighSnr)?;
    res.aux.z = Some(2.0 * rho_d / w);
    res.asymptotic_bound = Some(rs);
    Ok(res)
}

/// Limiting throughput of a very large jammer array, independent of N_J.
pub fn large_array_bound(rho_d: f64) -> Result<f64> {
    let w = lambert_w0(rho_d)?;
    Ok(w / (LN_2 * (1.0 / w - 1.0 / rho_d).exp()))
}

/// Large-array design for a multi-antenna jammer; `asymptotic_bound` holds
/// [`large_array_bound`].
pub fn asymptotic_large_nj(scn: &Scenario) -> Result<OptResult> {
    let m = multi_m(scn)?;
    let rho_d = scn.constants().rho_d;
    let w = lambert_w0(rho_d)?;
    let rt = w / LN_2;
    let z = w.exp();
    let em = ((z - 1.0) / rho_d).exp_m1();
    let rs = rt - (m / em).ln_1p() / LN_2;
    let mut res = OptResult::at(scn, rate_pair(rt, rs, "large-array design")?, SolverPath::LargeArray)?;
    res.aux.z = Some(z);
    res.asymptotic_bound = Some(large_array_bound(rho_d)?);
    Ok(res)
}

/// Brute-force grid search, built directly on the derived constants rather
/// than on [`analysis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub rt_max: f64,
    pub rs_max: f64,
    pub step: f64,
    /// Multiplier on the jamming-cost term; 1 except in negative controls.
    pub(crate) cost_scale: f64,
}

impl Grid {
    pub fn new(rt_max: f64, rs_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) || !(rt_max >= step) || !(rs_max >= step) {
            return Err(Error::InvalidArgument(format!(
                "grid needs step > 0 and maxima >= step, got step {step}, R_t max {rt_max}, R_s max {rs_max}"
            )));
        }
        Ok(Grid { rt_max, rs_max, step, cost_scale: 1.0 })
    }

    pub(crate) fn with_cost_scale(mut self, s: f64) -> Self {
        self.cost_scale = s;
        self
    }
}

struct GridEval {
    single: bool,
    rho_d: f64,
    cost: f64,
    k2: f64,
    step: f64,
    /// tau_table[d] = 2^(d * step) - 1
    tau_table: Vec<f64>,
}

impl GridEval {
    fn new(scn: &Scenario, grid: &Grid, n_t: usize) -> Self {
        let k = scn.constants();
        let single = scn.is_single_antenna();
        let base = if single { k.k1 } else { k.m.unwrap_or(f64::NAN) };
        GridEval {
            single,
            rho_d: k.rho_d,
            cost: base * grid.cost_scale,
            k2: k.k2,
            step: grid.step,
            tau_table: (0..=n_t).map(|d| pow2_minus_one(d as f64 * grid.step)).collect(),
        }
    }

    fn row(&self, i: usize) -> (f64, f64) {
        let x = pow2_minus_one(i as f64 * self.step);
        let em = (x / self.rho_d).exp_m1();
        (x, em)
    }

    fn cell(&self, i: usize, j: usize, x: f64, em: f64) -> f64 {
        if j == 0 || j >= i || !em.is_finite() {
            return 0.0;
        }
        let tau = self.tau_table[i - j];
        let a = self.cost / tau;
        let b = if self.single { em + (em + 1.0) * self.k2 * x / tau } else { em };
        j as f64 * self.step / (1.0 + a.max(b))
    }
}

/// Maximises throughput over R_t = i * step <= rt_max, R_s = j * step <= rs_max.
/// Ties go to the smaller R_t, then the smaller R_s.
pub fn grid_oracle(scn: &Scenario, grid: Grid) -> Result<OptResult> {
    let n_t = (grid.rt_max / grid.step + 1e-9).floor() as usize;
    let n_s = (grid.rs_max / grid.step + 1e-9).floor() as usize;
    let eval = GridEval::new(scn, &grid, n_t);

    let rows: Vec<(f64, usize, usize)> = (0..=n_t)
        .into_par_iter()
        .map(|i| {
            let (x, em) = eval.row(i);
            let mut best = (0.0, i, 0);
            for j in 1..=n_s.min(i.saturating_sub(1)) {
                let pi = eval.cell(i, j, x, em);
                if pi > best.0 {
                    best = (pi, i, j);
                }
            }
            best
        })
        .collect();
    let (best_pi, bi, bj) = rows
        .into_iter()
        .fold((0.0, 0, 0), |acc, r| if r.0 > acc.0 { r } else { acc });
    if !(best_pi > 0.0) {
        return Err(Error::Infeasible("no grid point has positive throughput".into()));
    }

    let mut slack = 0.0f64;
    for di in -1i64..=1 {
        for dj in -1i64..=1 {
            let (i, j) = (bi as i64 + di, bj as i64 + dj);
            if i < 0 || j < 0 || i as usize > n_t || j as usize > n_s {
                continue;
            }
            let (x, em) = eval.row(i as usize);
            slack = slack.max(best_pi - eval.cell(i as usize, j as usize, x, em));
        }
    }

    let rates = RatePair::new(bi as f64 * grid.step, bj as f64 * grid.step)?;
    let mut res = OptResult::at(scn, rates, SolverPath::Grid)?;
    // the oracle's own value, which differs from the re-evaluation only by
    // rounding unless the cost term was scaled
    res.throughput = best_pi;
    res.iterations = (n_t + 1) * (n_s + 1);
    res.grid_slack = Some(slack);
    Ok(res)
}

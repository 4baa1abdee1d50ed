//! Experiment harness: figure data, parameter sweeps and self-validation,
//! all emitted as CSV tables.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis;
use crate::config::{BatteryCapacity, RatePair, Scenario, SystemConfig};
use crate::error::{Error, Result};
use crate::optimizer::{self, Grid, OptResult};
use crate::simulator::{self, SimParams};

/// Battery capacity used for the finite-battery curves.
pub const FINITE_CAPACITY_J: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v:?}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) if s.contains([',', '"', '\n']) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v.into())
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Int(v.into())
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::to_string).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    /// Numeric column by name; non-numeric cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[idx] {
                    Value::Num(v) => *v,
                    Value::Int(v) => *v as f64,
                    Value::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

/// A named output table; written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub table: Table,
}

impl Artifact {
    fn new(name: impl Into<String>, table: Table) -> Self {
        Artifact { name: name.into(), table }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

/// Budgets shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunOptions {
    pub seed: u64,
    /// Blocks per simulation point.
    pub blocks: u64,
    /// Resolution of the brute-force grid search.
    pub grid_step: f64,
    /// Resolution of the rate-region heatmaps.
    pub heatmap_step: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 1, blocks: 1_000_000, grid_step: 0.01, heatmap_step: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6a,
    Fig6b,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Fig2,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4,
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig6a,
        Figure::Fig6b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig6a => "fig6a",
            Figure::Fig6b => "fig6b",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Figure::Fig2 => &FIG2_COLUMNS,
            Figure::Fig3a | Figure::Fig3b | Figure::Fig5a | Figure::Fig5b => &HEATMAP_COLUMNS,
            Figure::Fig4 => &FIG4_COLUMNS,
            Figure::Fig6a => &FIG6A_COLUMNS,
            Figure::Fig6b => &FIG6B_COLUMNS,
        }
    }

    /// Heatmap panels: (N_J, P_s in dBm).
    fn heatmap(self) -> Option<(u32, f64)> {
        match self {
            Figure::Fig3a => Some((1, 0.0)),
            Figure::Fig3b => Some((1, 30.0)),
            Figure::Fig5a => Some((8, 0.0)),
            Figure::Fig5b => Some((8, 30.0)),
            _ => None,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure {s:?}")))
    }
}

pub const FIG2_COLUMNS: [&str; 6] = ["trace", "rt", "capacity_j", "block", "kind", "battery_j"];
pub const HEATMAP_COLUMNS: [&str; 6] = ["rt", "rs", "pi", "jam_power_w", "p_tx", "region"];
pub const OPTIMUM_COLUMNS: [&str; 7] = ["rt", "rs", "pi", "jam_power_w", "p_tx", "region", "path"];
pub const FIG4_COLUMNS: [&str; 5] = ["ps_dbm", "pi_opt", "pi_subopt", "pi_upper", "pi_sim_finite"];
pub const FIG6A_COLUMNS: [&str; 4] = ["ps_dbm", "pi_opt", "pi_subopt", "pi_approx"];
pub const FIG6B_COLUMNS: [&str; 4] = ["n_j", "pi_opt", "pi_subopt", "pi_upper"];
pub const SWEEP_COLUMNS: [&str; 9] = ["value", "rt", "rs", "jam_power_w", "pi", "p_tx", "p_co", "region", "path"];
pub const VALIDATE_COLUMNS: [&str; 5] = ["check", "passed", "value", "limit", "detail"];

/// Power axis of the throughput-versus-P_s figures, in dBm.
pub fn power_axis() -> Vec<f64> {
    (0..=20).map(|i| -10.0 + 2.5 * f64::from(i)).collect()
}

fn scenario_at(base: &SystemConfig, n_j: u32, ps_dbm: f64) -> Result<Scenario> {
    Scenario::new(base.clone().with_jammer_antennas(n_j).with_source_power_dbm(ps_dbm))
}

fn optimum_row(r: &OptResult, scn: &Scenario) -> Result<Vec<Value>> {
    let rep = r.report(scn)?;
    Ok(vec![
        r.rates.rt.into(),
        r.rates.rs.into(),
        r.throughput.into(),
        r.jam_power.into(),
        rep.p_tx.into(),
        r.region.label().into(),
        r.path.label().into(),
    ])
}

/// Throughput of an approximate design; zero when it has no valid rates.
fn subopt(r: Result<OptResult>) -> Result<f64> {
    match r {
        Ok(r) => Ok(r.throughput),
        Err(Error::Infeasible(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Battery traces at a fixed jamming power of 0 dBm around the regime flip.
fn fig2(base: &SystemConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let jam_power = 1e-3;
    let designs: Vec<(f64, BatteryCapacity)> = [BatteryCapacity::Infinite, BatteryCapacity::Joules(FINITE_CAPACITY_J)]
        .into_iter()
        .flat_map(|cap| [26.90, 26.95, 27.00].map(|rt| (rt, cap)))
        .collect();
    let decimation = (opts.blocks / 1000).max(1);
    let runs: Vec<Result<Vec<Vec<Value>>>> = designs
        .par_iter()
        .enumerate()
        .map(|(idx, &(rt, cap))| {
            let scn = Scenario::new(base.clone().with_jammer_antennas(8).with_source_power_dbm(30.0).with_battery(cap))?;
            // pick R_s so that this jamming power is exactly the secrecy-optimal one
            let k = scn.constants();
            let tau = k.secrecy_factor / (k.phi_per_watt * jam_power);
            let rates = RatePair::new(rt, rt - tau.ln_1p() / std::f64::consts::LN_2)?;
            let params = SimParams {
                warmup_fraction: 0.0,
                ..SimParams::new(rates, jam_power, opts.blocks, opts.seed)
            }
            .with_stream(idx as u64)
            .with_trace(decimation);
            let run = simulator::run(&scn, &params)?;
            let cap_j = cap.limit();
            Ok(run
                .trace
                .unwrap_or_default()
                .into_iter()
                .map(|t| {
                    vec![
                        Value::Int(idx as u64),
                        rt.into(),
                        cap_j.into(),
                        t.block.into(),
                        Value::Text(t.kind.code().to_string()),
                        t.battery.into(),
                    ]
                })
                .collect())
        })
        .collect();
    let mut table = Table::new(&FIG2_COLUMNS);
    for rows in runs {
        for row in rows? {
            table.push(row);
        }
    }
    Ok(vec![Artifact::new("fig2", table)])
}

fn heatmap(fig: Figure, base: &SystemConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let (n_j, ps) = fig.heatmap().expect("heatmap figure");
    let scn = scenario_at(base, n_j, ps)?;
    let step = opts.heatmap_step;
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("heatmap step must be > 0, got {step}")));
    }
    let n = (40.0 / step + 1e-9).floor() as usize;
    let rows: Vec<Vec<Vec<Value>>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let rt = i as f64 * step;
            (1..i)
                .map(|j| {
                    let rates = RatePair { rt, rs: j as f64 * step };
                    let rep = analysis::throughput(&scn, rates).expect("R_t > R_s");
                    vec![
                        rt.into(),
                        rates.rs.into(),
                        rep.pi.into(),
                        rep.jam_power.into(),
                        rep.p_tx.into(),
                        rep.region.label().into(),
                    ]
                })
                .collect()
        })
        .collect();
    let mut table = Table::new(&HEATMAP_COLUMNS);
    rows.into_iter().flatten().for_each(|r| table.push(r));

    let opt = optimizer::solve(&scn)?;
    let mut best = Table::new(&OPTIMUM_COLUMNS);
    best.push(optimum_row(&opt, &scn)?);
    Ok(vec![Artifact::new(fig.name(), table), Artifact::new(format!("{}_optimum", fig.name()), best)])
}

fn fig4(base: &SystemConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let rows: Vec<Result<Vec<Value>>> = power_axis()
        .into_par_iter()
        .enumerate()
        .map(|(idx, ps)| {
            let scn = scenario_at(base, 1, ps)?;
            let opt = optimizer::solve(&scn)?;
            let asym = optimizer::asymptotic_single_antenna(&scn)?;
            let finite = Scenario::new(scn.config().clone().with_battery(BatteryCapacity::Joules(FINITE_CAPACITY_J)))?;
            let params = SimParams::new(opt.rates, opt.jam_power, opts.blocks, opts.seed).with_stream(idx as u64);
            let sim = simulator::run(&finite, &params)?.summary;
            Ok(vec![
                ps.into(),
                opt.throughput.into(),
                asym.throughput.into(),
                asym.asymptotic_bound.unwrap_or(f64::NAN).into(),
                (opt.rates.rs * sim.p_tx.value).into(),
            ])
        })
        .collect();
    let mut table = Table::new(&FIG4_COLUMNS);
    for r in rows {
        table.push(r?);
    }
    Ok(vec![Artifact::new("fig4", table)])
}

fn fig6a(base: &SystemConfig) -> Result<Vec<Artifact>> {
    let mut table = Table::new(&FIG6A_COLUMNS);
    for ps in power_axis() {
        let scn = scenario_at(base, 8, ps)?;
        let opt = optimizer::solve(&scn)?;
        let asym = optimizer::asymptotic_multi_antenna_high_snr(&scn);
        let approx = match &asym {
            Ok(r) => r.asymptotic_bound.unwrap_or(f64::NAN),
            Err(_) => 0.0,
        };
        table.push(vec![ps.into(), opt.throughput.into(), subopt(asym)?.into(), approx.into()]);
    }
    Ok(vec![Artifact::new("fig6a", table)])
}

fn fig6b(base: &SystemConfig) -> Result<Vec<Artifact>> {
    let mut table = Table::new(&FIG6B_COLUMNS);
    for n_j in 2..=64u32 {
        let scn = scenario_at(base, n_j, 30.0)?;
        let opt = optimizer::solve(&scn)?;
        let upper = optimizer::large_array_bound(scn.constants().rho_d)?;
        let asym = subopt(optimizer::asymptotic_large_nj(&scn))?;
        table.push(vec![n_j.into(), opt.throughput.into(), asym.into(), upper.into()]);
    }
    Ok(vec![Artifact::new("fig6b", table)])
}

/// Builds the tables for one figure. Node geometry, noise and the secrecy
/// constraint come from `base`; N_J and P_s are fixed by the figure.
pub fn figure(fig: Figure, base: &SystemConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    base.validate()?;
    match fig {
        Figure::Fig2 => fig2(base, opts),
        Figure::Fig3a | Figure::Fig3b | Figure::Fig5a | Figure::Fig5b => heatmap(fig, base, opts),
        Figure::Fig4 => fig4(base, opts),
        Figure::Fig6a => fig6a(base),
        Figure::Fig6b => fig6b(base),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scale {
    Linear,
    Db,
    Log,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "db" | "dB" => Ok(Scale::Db),
            "log" => Ok(Scale::Log),
            _ => Err(Error::InvalidArgument(format!("unknown scale {s:?}; expected linear, db or log"))),
        }
    }
}

/// One swept parameter. For linear and dB scales `third` is the step; for
/// the log scale it is the number of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub third: f64,
    pub scale: Scale,
}

impl Sweep {
    /// Parses `start:stop:step` (or `start:stop:count` on a log scale).
    pub fn parse(key: &str, range: &str, scale: Scale) -> Result<Self> {
        let parts: Vec<&str> = range.split(':').collect();
        let bad = || Error::InvalidArgument(format!("sweep range must be start:stop:step, got {range:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
        let sweep = Sweep { key: key.to_string(), start: nums[0], stop: nums[1], third: nums[2], scale };
        sweep.values()?;
        Ok(sweep)
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let Sweep { start, stop, third, scale, .. } = *self;
        if !(start.is_finite() && stop.is_finite() && third.is_finite()) {
            return Err(Error::InvalidArgument("sweep bounds must be finite".into()));
        }
        if scale == Scale::Db && !self.key.ends_with("_dbm") {
            return Err(Error::InvalidArgument(format!("a dB sweep needs a *_dbm key, got {:?}", self.key)));
        }
        let values: Vec<f64> = match scale {
            Scale::Linear | Scale::Db => {
                if !(third > 0.0) || stop < start {
                    return Err(Error::InvalidArgument("sweep needs step > 0 and stop >= start".into()));
                }
                let n = ((stop - start) / third + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * third).collect()
            }
            Scale::Log => {
                let count = third as usize;
                if !(start > 0.0 && stop >= start) || count < 2 || third.fract() != 0.0 {
                    return Err(Error::InvalidArgument(
                        "log sweep needs 0 < start <= stop and an integer count >= 2".into(),
                    ));
                }
                let ratio = (stop / start).ln() / (count - 1) as f64;
                (0..count).map(|i| start * (ratio * i as f64).exp()).collect()
            }
        };
        if values.is_empty() {
            return Err(Error::InvalidArgument("sweep range is empty".into()));
        }
        Ok(values)
    }
}

/// Optimises the design at every point of the sweep.
pub fn run_sweep(base: &SystemConfig, sweep: &Sweep) -> Result<Artifact> {
    let rows: Vec<Result<Vec<Value>>> = sweep
        .values()?
        .into_par_iter()
        .map(|v| {
            let mut cfg = base.clone();
            cfg.set(&sweep.key, &v.to_string())?;
            let scn = Scenario::new(cfg)?;
            let opt = optimizer::solve(&scn)?;
            let rep = opt.report(&scn)?;
            Ok(vec![
                v.into(),
                opt.rates.rt.into(),
                opt.rates.rs.into(),
                opt.jam_power.into(),
                opt.throughput.into(),
                rep.p_tx.into(),
                rep.p_co.into(),
                opt.region.label().into(),
                opt.path.label().into(),
            ])
        })
        .collect();
    let mut table = Table::new(&SWEEP_COLUMNS);
    for r in rows {
        table.push(r?);
    }
    Ok(Artifact::new("sweep", table))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, value, limit, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&VALIDATE_COLUMNS);
        for c in &self.checks {
            t.push(vec![c.name.as_str().into(), c.passed.into(), c.value.into(), c.limit.into(), c.detail.as_str().into()]);
        }
        t
    }
}

/// Z-score limit for the simulation checks.
const SIGMAS: f64 = 4.0;

/// Cross-checks closed forms against simulation and the exact optimiser
/// against the grid search. `corrupt` scales the grid's jamming-cost term
/// by 4 as a negative control; the report must then fail.
pub fn validate(base: &SystemConfig, opts: &RunOptions, corrupt: bool) -> Result<ValidationReport> {
    let scn = Scenario::new(base.clone())?;
    let mut checks = Vec::new();

    let opt = optimizer::solve(&scn)?;
    let mut grid = Grid::new(40.0, 40.0, opts.grid_step)?;
    if corrupt {
        grid = grid.with_cost_scale(4.0);
    }
    let oracle = optimizer::grid_oracle(&scn, grid)?;
    let slack = oracle.grid_slack.unwrap_or(0.0);
    let excess = opt.throughput / oracle.throughput - 1.0;
    checks.push(Check::new(
        "optimum_not_above_grid",
        excess <= 1e-3,
        excess,
        1e-3,
        format!("exact {} vs grid {}", opt.throughput, oracle.throughput),
    ));
    let deficit = oracle.throughput - opt.throughput;
    checks.push(Check::new(
        "optimum_not_below_grid",
        deficit <= slack,
        deficit,
        slack,
        format!("{} at R_t = {}, R_s = {}", opt.path.label(), opt.rates.rt, opt.rates.rs),
    ));
    if !scn.is_single_antenna() {
        let rep = opt.report(&scn)?;
        let gap = (rep.term_a - rep.term_b).abs() / rep.term_a.max(rep.term_b);
        checks.push(Check::new("multi_antenna_on_boundary", gap <= 1e-9, gap, 1e-9, "relative |a - b|"));
    }
    if opt.monotone == Some(false) {
        checks.push(Check::new("solver_equation_monotone", false, 0.0, 0.0, "monotonicity scan failed"));
    }

    // simulate the optimum and the optimum rates with the jamming power
    // halved (more IT blocks, looser secrecy) and doubled
    let designs = [("optimum", opt.jam_power), ("half_power", 0.5 * opt.jam_power), ("double_power", 2.0 * opt.jam_power)];
    let sims: Vec<Result<(simulator::Comparison, simulator::SimSummary)>> = designs
        .par_iter()
        .enumerate()
        .map(|(i, &(_, p_j))| {
            let cmp = simulator::empirical_vs_analytic(&scn, opt.rates, p_j, opts.blocks, opts.seed.wrapping_add(i as u64))?;
            let params = SimParams::new(opt.rates, p_j, opts.blocks.min(100_000), opts.seed).with_stream(1000 + i as u64);
            Ok((cmp, simulator::run(&scn, &params)?.summary))
        })
        .collect();
    for ((name, _), res) in designs.iter().zip(sims) {
        let (cmp, sum) = res?;
        for (what, z) in [("p_tx", cmp.z_p_tx), ("p_co", cmp.z_p_co), ("p_so", cmp.z_p_so)] {
            if z.is_nan() {
                continue;
            }
            checks.push(Check::new(format!("{name}_{what}_sim"), z.abs() < SIGMAS, z, SIGMAS, "z-score vs closed form"));
        }
        let scale = sum.total_harvested.max(f64::MIN_POSITIVE);
        let imbalance = sum.energy_imbalance().abs() / scale;
        checks.push(Check::new(format!("{name}_energy_conserved"), imbalance < 1e-9, imbalance, 1e-9, "relative"));
        checks.push(Check::new(
            format!("{name}_cycle_grammar"),
            sum.cycles.grammar_violations == 0,
            sum.cycles.grammar_violations as f64,
            0.0,
            "D* O* I cycles",
        ));
    }
    Ok(ValidationReport { checks })
}

/// Reproducibility record written next to the CSV outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: SystemConfig,
    pub options: RunOptions,
    pub details: serde_json::Value,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: &SystemConfig, options: RunOptions) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            options,
            details: serde_json::Value::Null,
            outputs: Vec::new(),
        }
    }
}

/// Writes the artifacts and `manifest.json` into `dir`, creating it.
pub fn write_outputs(dir: &Path, artifacts: &[Artifact], mut manifest: Manifest) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for a in artifacts {
        let path = dir.join(a.file_name());
        fs::write(&path, a.table.to_csv())?;
        manifest.outputs.push(a.file_name());
        paths.push(path);
    }
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    fs::write(&path, json + "\n")?;
    paths.push(path);
    Ok(paths)
}

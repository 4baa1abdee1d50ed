//! Block-level Monte Carlo simulation of the PT / IT protocol.
//!
//! Fading is sampled at the SINR level: |h|^2 ~ Exp(1), the jammer's
//! harvested gain ~ Gamma(N_J) and the projected jamming gain at the
//! eavesdropper ~ Gamma(N_J - 1). Channels are independent across blocks.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::analysis;
use crate::config::{BatteryCapacity, RatePair, Scenario};
use crate::error::{Error, Result};
use crate::numerics::{sample_exponential, sample_gamma_integer_shape, stream_rng, SimRng};

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 100;
/// Upper bound on tracked X and Y run lengths; longer runs share the last bin.
pub const MAX_RUN_BIN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryState {
    pub energy: f64,
    pub capacity: BatteryCapacity,
}

impl BatteryState {
    pub fn new(energy: f64, capacity: BatteryCapacity) -> Self {
        BatteryState { energy: energy.min(capacity.limit()), capacity }
    }

    /// Stores `harvested` joules, returning the amount spilled at capacity.
    fn charge(&mut self, harvested: f64) -> f64 {
        let limit = self.capacity.limit();
        let raw = self.energy + harvested;
        if raw > limit {
            self.energy = limit;
            raw - limit
        } else {
            self.energy = raw;
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BlockKind {
    DedicatedPt,
    OpportunisticPt,
    It,
}

impl BlockKind {
    pub fn code(self) -> char {
        match self {
            BlockKind::DedicatedPt => 'D',
            BlockKind::OpportunisticPt => 'O',
            BlockKind::It => 'I',
        }
    }

    pub fn is_pt(self) -> bool {
        !matches!(self, BlockKind::It)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOutcome {
    pub kind: BlockKind,
    pub harvested: f64,
    /// Energy lost to a full battery during this block.
    pub spilled: f64,
    pub consumed: f64,
    /// Destination channel cannot support R_t. Sampled in every block.
    pub connection_outage: bool,
    /// Eavesdropper capacity exceeds R_t - R_s. IT blocks only.
    pub secrecy_outage: bool,
    pub battery_after: f64,
}

/// Per-design sampling constants, built once per run.
#[derive(Debug, Clone)]
pub struct BlockSampler {
    single_antenna: bool,
    n_j: u32,
    rho_d: f64,
    /// psi * rho_d, the jamming-to-noise factor at the destination.
    jam_to_noise: f64,
    phi: f64,
    sinr_threshold: f64,
    secrecy_threshold: f64,
    /// eta P_s T / d_SJ^m; one PT block harvests this times a Gamma(N_J) draw.
    harvest_scale: f64,
    jam_energy: f64,
}

impl BlockSampler {
    pub fn new(scn: &Scenario, rates: RatePair, jam_power: f64) -> Self {
        let k = scn.constants();
        let n_j = scn.jammer_antennas();
        BlockSampler {
            single_antenna: n_j == 1,
            n_j,
            rho_d: k.rho_d,
            jam_to_noise: k.psi(jam_power) * k.rho_d,
            phi: k.phi(jam_power),
            sinr_threshold: rates.sinr_threshold(),
            secrecy_threshold: if rates.rt > rates.rs { rates.secrecy_threshold() } else { 0.0 },
            harvest_scale: k.rho_j / f64::from(n_j),
            jam_energy: scn.jamming_energy(jam_power),
        }
    }

    fn destination_sinr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let signal = self.rho_d * sample_exponential(rng, 1.0);
        if self.single_antenna {
            signal / (1.0 + self.jam_to_noise * sample_exponential(rng, 1.0))
        } else {
            signal
        }
    }

    fn eavesdropper_sinr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let signal = sample_exponential(rng, 1.0);
        let jam = if self.single_antenna {
            sample_exponential(rng, 1.0)
        } else {
            let n = self.n_j - 1;
            sample_gamma_integer_shape(rng, n) / f64::from(n)
        };
        signal / (self.phi * jam)
    }

    /// Advances the battery by one block.
    pub fn step<R: Rng + ?Sized>(&self, battery: &mut BatteryState, rng: &mut R) -> BlockOutcome {
        let enough_energy = battery.energy >= self.jam_energy;
        let connection_outage = self.destination_sinr(rng) < self.sinr_threshold;
        if enough_energy && !connection_outage {
            let secrecy_outage = self.eavesdropper_sinr(rng) > self.secrecy_threshold;
            battery.energy -= self.jam_energy;
            return BlockOutcome {
                kind: BlockKind::It,
                harvested: 0.0,
                spilled: 0.0,
                consumed: self.jam_energy,
                connection_outage,
                secrecy_outage,
                battery_after: battery.energy,
            };
        }
        let harvested = self.harvest_scale * sample_gamma_integer_shape(rng, self.n_j);
        let spilled = battery.charge(harvested);
        BlockOutcome {
            kind: if enough_energy { BlockKind::OpportunisticPt } else { BlockKind::DedicatedPt },
            harvested,
            spilled,
            consumed: 0.0,
            connection_outage,
            secrecy_outage: false,
            battery_after: battery.energy,
        }
    }
}

/// Single-block convenience wrapper around [`BlockSampler::step`].
pub fn step<R: Rng + ?Sized>(
    battery: &mut BatteryState,
    scn: &Scenario,
    rates: RatePair,
    jam_power: f64,
    rng: &mut R,
) -> BlockOutcome {
    BlockSampler::new(scn, rates, jam_power).step(battery, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimParams {
    pub rates: RatePair,
    pub jam_power: f64,
    pub n_blocks: u64,
    pub seed: u64,
    pub stream: u64,
    pub initial_energy: f64,
    /// Keep every n-th block in the trace; 0 disables the trace.
    pub trace_decimation: u64,
    /// Fraction of leading blocks excluded from long-run statistics.
    pub warmup_fraction: f64,
}

impl SimParams {
    pub fn new(rates: RatePair, jam_power: f64, n_blocks: u64, seed: u64) -> Self {
        SimParams {
            rates,
            jam_power,
            n_blocks,
            seed,
            stream: 0,
            initial_energy: 0.0,
            trace_decimation: 0,
            warmup_fraction: 0.01,
        }
    }

    pub fn with_trace(mut self, decimation: u64) -> Self {
        self.trace_decimation = decimation;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 {
            return Err(Error::InvalidArgument("n_blocks must be >= 1".into()));
        }
        if !(self.jam_power >= 0.0 && self.jam_power.is_finite()) {
            return Err(Error::InvalidArgument(format!("jamming power must be >= 0, got {}", self.jam_power)));
        }
        if !(self.initial_energy >= 0.0) {
            return Err(Error::InvalidArgument("initial energy must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(Error::InvalidArgument("warmup fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn warmup_blocks(&self) -> u64 {
        (self.warmup_fraction * self.n_blocks as f64).floor() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub block: u64,
    pub kind: BlockKind,
    pub battery: f64,
    pub harvested: f64,
    pub connection_outage: bool,
    pub secrecy_outage: bool,
}

pub const TRACE_HEADER: &str = "block,kind,battery_j,harvested_j,conn_outage,sec_outage";

pub fn write_trace_csv<W: Write>(mut w: W, trace: &[TraceRecord]) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in trace {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.block,
            r.kind.code(),
            r.battery,
            r.harvested,
            u8::from(r.connection_outage),
            u8::from(r.secrecy_outage)
        )?;
    }
    Ok(())
}

/// Histograms of PT-IT cycles: X dedicated and Y opportunistic PT blocks
/// followed by one IT block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleStats {
    pub dedicated_hist: Vec<u64>,
    pub opportunistic_hist: Vec<u64>,
    /// Counts of the four cycle types, indexed by
    /// `2 * (X > 0) + (Y > 0)`: [X=0,Y=0], [X=0,Y>0], [X>0,Y=0], [X>0,Y>0].
    pub type_counts: [u64; 4],
    /// Cycles whose block order broke the D* O* I pattern.
    pub grammar_violations: u64,
}

impl CycleStats {
    fn new() -> Self {
        CycleStats {
            dedicated_hist: vec![0; MAX_RUN_BIN + 1],
            opportunistic_hist: vec![0; MAX_RUN_BIN + 1],
            type_counts: [0; 4],
            grammar_violations: 0,
        }
    }

    pub fn cycles(&self) -> u64 {
        self.type_counts.iter().sum()
    }
}

#[derive(Debug, Default)]
struct CycleTracker {
    x: usize,
    y: usize,
    broken: bool,
}

impl CycleTracker {
    fn push(&mut self, kind: BlockKind, stats: &mut CycleStats) {
        match kind {
            BlockKind::DedicatedPt => {
                if self.y > 0 {
                    self.broken = true;
                }
                self.x += 1;
            }
            BlockKind::OpportunisticPt => self.y += 1,
            BlockKind::It => {
                stats.dedicated_hist[self.x.min(MAX_RUN_BIN)] += 1;
                stats.opportunistic_hist[self.y.min(MAX_RUN_BIN)] += 1;
                stats.type_counts[2 * usize::from(self.x > 0) + usize::from(self.y > 0)] += 1;
                if self.broken {
                    stats.grammar_violations += 1;
                }
                *self = CycleTracker::default();
            }
        }
    }
}

/// Empirical proportion with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// (value - reference) / std_error; zero when both coincide exactly.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.value - reference;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub n_blocks: u64,
    pub warmup_blocks: u64,
    /// IT and PT blocks after warm-up.
    pub n_it: u64,
    pub n_pt: u64,
    pub n_dedicated: u64,
    pub n_opportunistic: u64,
    pub n_conn_outage: u64,
    pub n_sec_outage: u64,
    /// Long-run fraction of IT blocks, batch-means standard error.
    pub p_tx: Estimate,
    /// Fraction of post-warm-up blocks whose destination channel was in outage.
    pub p_co: Estimate,
    /// Secrecy outage frequency over IT blocks.
    pub p_so: Estimate,
    pub mean_harvested_energy: f64,
    pub mean_harvested_power: f64,
    /// Whole-run energy bookkeeping, warm-up included.
    pub initial_energy: f64,
    pub final_energy: f64,
    pub total_harvested: f64,
    pub total_spilled: f64,
    pub total_consumed: f64,
    pub max_energy_second_half: f64,
    /// Mean battery energy in each of [`BATCHES`] post-warm-up batches.
    pub energy_batch_means: Vec<f64>,
    pub cycles: CycleStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trend {
    /// Least-squares slope of battery energy, joules per block.
    pub slope: f64,
    /// Half-width of the 95% confidence interval on the slope.
    pub half_width: f64,
}

impl Trend {
    pub fn contains_zero(&self) -> bool {
        self.slope.abs() <= self.half_width
    }

    pub fn is_increasing(&self) -> bool {
        self.slope - self.half_width > 0.0
    }
}

impl SimSummary {
    pub fn counted_blocks(&self) -> u64 {
        self.n_it + self.n_pt
    }

    /// Residual of initial + harvested - spilled - consumed - final.
    pub fn energy_imbalance(&self) -> f64 {
        self.initial_energy + self.total_harvested - self.total_spilled - self.total_consumed - self.final_energy
    }

    /// Battery trend from a regression over the batch means; the batches are
    /// long enough that their means are close to independent.
    pub fn battery_trend(&self) -> Trend {
        let y = &self.energy_batch_means;
        let n = y.len() as f64;
        let batch_len = (self.counted_blocks() as f64 / n).max(1.0);
        let x_mean = (n - 1.0) / 2.0;
        let y_mean = y.iter().sum::<f64>() / n;
        let sxx: f64 = (0..y.len()).map(|i| (i as f64 - x_mean).powi(2)).sum();
        let sxy: f64 = y.iter().enumerate().map(|(i, v)| (i as f64 - x_mean) * (v - y_mean)).sum();
        let slope = sxy / sxx;
        let sse: f64 = y
            .iter()
            .enumerate()
            .map(|(i, v)| (v - y_mean - slope * (i as f64 - x_mean)).powi(2))
            .sum();
        let se = (sse / (n - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, n - 2.0).map(|d| d.inverse_cdf(0.975)).unwrap_or(1.96);
        Trend { slope: slope / batch_len, half_width: t * se / batch_len }
    }

    /// Chi-square goodness-of-fit p-value of the opportunistic run lengths
    /// against the geometric pmf p^k (1 - p).
    pub fn opportunistic_geometric_pvalue(&self, p_co: f64) -> Option<f64> {
        geometric_fit_pvalue(&self.cycles.opportunistic_hist, p_co)
    }
}

/// Chi-square test of a histogram of counts `hist[k]` (last bin open-ended)
/// against P{Y = k} = p^k (1 - p). Bins with expected count below 5 are
/// merged into the tail.
pub fn geometric_fit_pvalue(hist: &[u64], p: f64) -> Option<f64> {
    let total: u64 = hist.iter().sum();
    if total == 0 || !(0.0..1.0).contains(&p) {
        return None;
    }
    let n = total as f64;
    let mut chi2 = 0.0;
    let mut bins = 0usize;
    let mut observed_head = 0u64;
    let mut k = 0usize;
    while k + 1 < hist.len() {
        let expected = n * p.powi(k as i32) * (1.0 - p);
        // tail mass beyond this bin must also support a valid bin
        if expected < 5.0 || n * p.powi(k as i32 + 1) < 5.0 {
            break;
        }
        chi2 += (hist[k] as f64 - expected).powi(2) / expected;
        observed_head += hist[k];
        bins += 1;
        k += 1;
    }
    let expected_tail = n * p.powi(k as i32);
    let observed_tail = (total - observed_head) as f64;
    if expected_tail > 0.0 {
        chi2 += (observed_tail - expected_tail).powi(2) / expected_tail;
        bins += 1;
    }
    if bins < 2 {
        return None;
    }
    let dist = ChiSquared::new((bins - 1) as f64).ok()?;
    Some(1.0 - dist.cdf(chi2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub summary: SimSummary,
    pub trace: Option<Vec<TraceRecord>>,
}

fn batch_se(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

fn binomial_se(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Runs one replication. Deterministic in `(scenario, params)`.
pub fn run(scn: &Scenario, params: &SimParams) -> Result<SimRun> {
    params.validate()?;
    let sampler = BlockSampler::new(scn, params.rates, params.jam_power);
    let mut rng: SimRng = stream_rng(params.seed, params.stream);
    let mut battery = BatteryState::new(params.initial_energy, scn.config().battery_capacity);

    let n = params.n_blocks;
    let warmup = params.warmup_blocks();
    let counted = n - warmup;
    let n_batches = (BATCHES as u64).min(counted).max(1);
    let batch_len = counted / n_batches;
    let second_half = n / 2;

    let mut trace = (params.trace_decimation > 0).then(Vec::new);
    let mut cycles = CycleStats::new();
    let mut tracker = CycleTracker::default();

    let (mut n_it, mut n_ded, mut n_opp, mut n_co, mut n_so) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let (mut harvested, mut spilled, mut consumed) = (0.0, 0.0, 0.0);
    let mut counted_harvest = 0.0;
    let mut max_late = 0.0f64;

    let mut batch_it = Vec::with_capacity(n_batches as usize);
    let mut batch_energy = Vec::with_capacity(n_batches as usize);
    let (mut cur_it, mut cur_energy, mut cur_len) = (0u64, 0.0, 0u64);

    let initial_energy = battery.energy;
    for block in 0..n {
        let out = sampler.step(&mut battery, &mut rng);
        harvested += out.harvested;
        spilled += out.spilled;
        consumed += out.consumed;
        if block >= second_half {
            max_late = max_late.max(out.battery_after);
        }
        if let Some(t) = trace.as_mut() {
            if block % params.trace_decimation == 0 {
                t.push(TraceRecord {
                    block,
                    kind: out.kind,
                    battery: out.battery_after,
                    harvested: out.harvested,
                    connection_outage: out.connection_outage,
                    secrecy_outage: out.secrecy_outage,
                });
            }
        }
        if block < warmup {
            continue;
        }
        tracker.push(out.kind, &mut cycles);
        match out.kind {
            BlockKind::It => {
                n_it += 1;
                cur_it += 1;
                n_so += u64::from(out.secrecy_outage);
            }
            BlockKind::DedicatedPt => n_ded += 1,
            BlockKind::OpportunisticPt => n_opp += 1,
        }
        counted_harvest += out.harvested;
        n_co += u64::from(out.connection_outage);
        cur_energy += out.battery_after;
        cur_len += 1;
        // the last batch absorbs the remainder
        if cur_len == batch_len && (batch_it.len() as u64) < n_batches - 1 {
            batch_it.push(cur_it as f64 / cur_len as f64);
            batch_energy.push(cur_energy / cur_len as f64);
            cur_it = 0;
            cur_energy = 0.0;
            cur_len = 0;
        }
    }
    if cur_len > 0 {
        batch_it.push(cur_it as f64 / cur_len as f64);
        batch_energy.push(cur_energy / cur_len as f64);
    }

    let n_pt = n_ded + n_opp;
    let mean_harvested_energy = if n_pt > 0 { counted_harvest / n_pt as f64 } else { 0.0 };
    let summary = SimSummary {
        n_blocks: n,
        warmup_blocks: warmup,
        n_it,
        n_pt,
        n_dedicated: n_ded,
        n_opportunistic: n_opp,
        n_conn_outage: n_co,
        n_sec_outage: n_so,
        p_tx: Estimate { value: n_it as f64 / counted as f64, std_error: batch_se(&batch_it) },
        p_co: Estimate { value: n_co as f64 / counted as f64, std_error: binomial_se(n_co, counted) },
        p_so: Estimate {
            value: if n_it > 0 { n_so as f64 / n_it as f64 } else { f64::NAN },
            std_error: binomial_se(n_so, n_it),
        },
        mean_harvested_energy,
        mean_harvested_power: mean_harvested_energy / scn.config().block_time,
        initial_energy,
        final_energy: battery.energy,
        total_harvested: harvested,
        total_spilled: spilled,
        total_consumed: consumed,
        max_energy_second_half: max_late,
        energy_batch_means: batch_energy,
        cycles,
    };
    Ok(SimRun { summary, trace })
}

/// Independent replications on streams `0..replications`, run in parallel.
pub fn run_replications(scn: &Scenario, params: &SimParams, replications: u64) -> Result<Vec<SimSummary>> {
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let p = SimParams { trace_decimation: 0, ..params.clone() }.with_stream(r);
            run(scn, &p).map(|run| run.summary)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub regime: analysis::Regime,
    pub analytic_p_tx: f64,
    pub simulated_p_tx: Estimate,
    pub z_p_tx: f64,
    pub analytic_p_co: f64,
    pub simulated_p_co: Estimate,
    pub z_p_co: f64,
    pub analytic_p_so: f64,
    /// Secrecy outage frequency among IT blocks.
    pub simulated_p_so: Estimate,
    pub z_p_so: f64,
}

impl Comparison {
    pub fn within(&self, sigmas: f64) -> bool {
        [self.z_p_tx, self.z_p_co, self.z_p_so].iter().all(|z| z.abs() < sigmas)
    }
}

/// Simulates one design and scores it against the closed forms.
pub fn empirical_vs_analytic(
    scn: &Scenario,
    rates: RatePair,
    jam_power: f64,
    n_blocks: u64,
    seed: u64,
) -> Result<Comparison> {
    let s = run(scn, &SimParams::new(rates, jam_power, n_blocks, seed))?.summary;
    let analytic_p_tx = analysis::transmission_probability(scn, rates, jam_power);
    let analytic_p_co = analysis::connection_outage(scn, rates, jam_power);
    let analytic_p_so = analysis::secrecy_outage(scn, rates, jam_power);
    Ok(Comparison {
        regime: analysis::classify_regime(scn, rates, jam_power),
        analytic_p_tx,
        simulated_p_tx: s.p_tx,
        z_p_tx: s.p_tx.z_score(analytic_p_tx),
        analytic_p_co,
        simulated_p_co: s.p_co,
        z_p_co: s.p_co.z_score(analytic_p_co),
        analytic_p_so,
        simulated_p_so: s.p_so,
        z_p_so: if s.n_it > 0 { s.p_so.z_score(analytic_p_so) } else { f64::NAN },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;

    fn scenario(n_j: u32, ps_dbm: f64) -> Scenario {
        Scenario::new(SystemConfig::default().with_jammer_antennas(n_j).with_source_power_dbm(ps_dbm)).unwrap()
    }

    #[test]
    fn empty_battery_forces_dedicated_pt() {
        let s = scenario(8, 30.0);
        let sampler = BlockSampler::new(&s, RatePair::new(1.0, 0.5).unwrap(), 1e-3);
        let mut rng = stream_rng(3, 0);
        for _ in 0..1000 {
            let mut b = BatteryState::new(0.0, BatteryCapacity::Infinite);
            let out = sampler.step(&mut b, &mut rng);
            assert_eq!(out.kind, BlockKind::DedicatedPt);
            assert!(out.harvested > 0.0);
            assert_eq!(out.battery_after, out.harvested);
        }
    }

    #[test]
    fn zero_jamming_power_costs_nothing() {
        let s = scenario(1, 30.0);
        let rates = RatePair::new(0.5, 0.1).unwrap();
        let mut rng = stream_rng(4, 0);
        let mut b = BatteryState::new(0.0, BatteryCapacity::Infinite);
        let mut seen_it = false;
        for _ in 0..100 {
            let out = step(&mut b, &s, rates, 0.0, &mut rng);
            if out.kind == BlockKind::It {
                seen_it = true;
                assert_eq!(out.consumed, 0.0);
                assert!(!out.connection_outage);
                // unjammed, noiseless eavesdropper always decodes
                assert!(out.secrecy_outage);
            }
        }
        assert!(seen_it);
    }

    #[test]
    fn finite_battery_clips() {
        let mut b = BatteryState::new(0.9, BatteryCapacity::Joules(1.0));
        assert_eq!(b.charge(0.3), 0.19999999999999996);
        assert_eq!(b.energy, 1.0);
        let b = BatteryState::new(5.0, BatteryCapacity::Joules(1.0));
        assert_eq!(b.energy, 1.0);
    }

    #[test]
    fn mean_harvest_matches_rho_j() {
        let s = scenario(8, 30.0);
        // jamming power too high to ever transmit, so every block is PT
        let p = SimParams::new(RatePair::new(10.0, 1.0).unwrap(), 1e9, 1_000_000, 11);
        let sum = run(&s, &p).unwrap().summary;
        assert_eq!(sum.n_it, 0);
        let rel = (sum.mean_harvested_energy - 2.56e-7).abs() / 2.56e-7;
        assert!(rel < 0.01, "{}", sum.mean_harvested_energy);
    }

    #[test]
    fn seed_determinism_and_stream_separation() {
        let s = scenario(8, 30.0);
        let p = SimParams::new(RatePair::new(26.0, 15.0).unwrap(), 1e-3, 20_000, 5).with_trace(7);
        let a = run(&s, &p).unwrap();
        let b = run(&s, &p).unwrap();
        assert_eq!(a, b);
        let c = run(&s, &p.clone().with_stream(1)).unwrap();
        assert_ne!(a.summary, c.summary);
    }

    #[test]
    fn conservation_and_grammar() {
        for (n_j, rt, cap) in [
            (8, 26.9, BatteryCapacity::Infinite),
            (8, 27.0, BatteryCapacity::Joules(1e-4)),
            (1, 12.0, BatteryCapacity::Infinite),
        ] {
            let s = Scenario::new(
                SystemConfig::default().with_jammer_antennas(n_j).with_battery(cap),
            )
            .unwrap();
            let sum = run(&s, &SimParams::new(RatePair::new(rt, 1.0).unwrap(), 1e-3, 200_000, 17)).unwrap().summary;
            assert_eq!(sum.n_it + sum.n_pt, sum.n_blocks - sum.warmup_blocks);
            assert_eq!(sum.p_tx.value, sum.n_it as f64 / sum.counted_blocks() as f64);
            let scale = sum.total_harvested.max(1e-30);
            let bound = sum.n_blocks as f64 * f64::EPSILON * scale * 4.0;
            assert!(sum.energy_imbalance().abs() <= bound, "{} > {bound}", sum.energy_imbalance());
            assert_eq!(sum.cycles.grammar_violations, 0);
            if cap.is_infinite() {
                assert_eq!(sum.total_spilled, 0.0);
            }
        }
    }

    #[test]
    fn trace_decimation_and_csv() {
        let s = scenario(8, 30.0);
        let p = SimParams::new(RatePair::new(26.0, 15.0).unwrap(), 1e-3, 1000, 1).with_trace(10);
        let trace = run(&s, &p).unwrap().trace.unwrap();
        assert_eq!(trace.len(), 100);
        assert!(trace.iter().all(|r| r.block % 10 == 0));
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TRACE_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 6);
        assert!(["D", "O", "I"].contains(&first[1]));
    }

    #[test]
    fn rejects_bad_params() {
        let s = scenario(8, 30.0);
        let r = RatePair::new(1.0, 0.0).unwrap();
        assert!(run(&s, &SimParams::new(r, 1e-3, 0, 1)).is_err());
        assert!(run(&s, &SimParams::new(r, -1.0, 10, 1)).is_err());
    }

    #[test]
    fn geometric_fit_accepts_and_rejects() {
        let p: f64 = 0.6;
        let n = 100_000.0;
        let mut hist: Vec<u64> = (0..40).map(|k| (n * p.powi(k) * (1.0 - p)).round() as u64).collect();
        hist.push(0);
        assert!(geometric_fit_pvalue(&hist, p).unwrap() > 0.5);
        assert!(geometric_fit_pvalue(&hist, 0.5).unwrap() < 1e-6);
        assert!(geometric_fit_pvalue(&[0, 0], 0.5).is_none());
    }
}

//! Closed-form outage, transmission-probability and throughput expressions.

use serde::Serialize;

use crate::config::{RatePair, Scenario};
use crate::error::{Error, Result};

/// Relative tolerance for membership of the boundary region D-hat.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeKind {
    EnergyAccumulation,
    EnergyBalanced,
}

/// Long-run battery behaviour. `boundary_margin` is
/// `p_co / (1 - p_co) - P_J T / rho_J`; accumulation iff it is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub kind: RegimeKind,
    pub boundary_margin: f64,
}

impl Regime {
    fn from_terms(jam_cost: f64, outage_odds: f64) -> Self {
        let boundary_margin = outage_odds - jam_cost;
        let kind = if boundary_margin > 0.0 {
            RegimeKind::EnergyAccumulation
        } else {
            RegimeKind::EnergyBalanced
        };
        Regime { kind, boundary_margin }
    }
}

/// Partition of the (R_t, R_s) plane by the ordering of the two terms of the
/// optimal-jamming throughput denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateRegion {
    /// term (a) < term (b): energy accumulation.
    D1,
    /// term (a) = term (b), up to [`BOUNDARY_TOL`].
    Boundary,
    /// term (a) > term (b): energy balanced.
    D2,
}

impl RateRegion {
    pub fn classify(term_a: f64, term_b: f64) -> Self {
        let scale = 1f64.max(term_a).max(term_b);
        if (term_a - term_b).abs() <= BOUNDARY_TOL * scale {
            RateRegion::Boundary
        } else if term_a < term_b {
            RateRegion::D1
        } else {
            RateRegion::D2
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RateRegion::D1 => "D1",
            RateRegion::Boundary => "Dhat",
            RateRegion::D2 => "D2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThroughputReport {
    /// Confidential bits per channel use.
    pub pi: f64,
    pub p_tx: f64,
    pub p_co: f64,
    pub p_so: f64,
    /// Jamming power meeting the secrecy constraint with equality.
    pub jam_power: f64,
    pub regime: Regime,
    pub region: RateRegion,
    /// P_J T / rho_J at the optimal jamming power.
    pub term_a: f64,
    /// p_co / (1 - p_co).
    pub term_b: f64,
}

/// CDF of the destination SINR at `x`.
pub fn gamma_d_cdf(scn: &Scenario, x: f64, jam_power: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("SINR argument must be >= 0, got {x}")));
    }
    let k = scn.constants();
    let tail = (-x / k.rho_d).exp();
    Ok(if scn.is_single_antenna() {
        1.0 - tail / (1.0 + k.psi(jam_power) * x)
    } else {
        1.0 - tail
    })
}

/// `p_co / (1 - p_co)`, evaluated directly so it stays accurate when
/// `p_co` is close to 0 or 1.
pub fn outage_odds(scn: &Scenario, rates: RatePair, jam_power: f64) -> f64 {
    let k = scn.constants();
    let x = rates.sinr_threshold();
    let u = x / k.rho_d;
    if scn.is_single_antenna() {
        u.exp_m1() + u.exp() * k.psi(jam_power) * x
    } else {
        u.exp_m1()
    }
}

pub fn connection_outage(scn: &Scenario, rates: RatePair, jam_power: f64) -> f64 {
    gamma_d_cdf(scn, rates.sinr_threshold(), jam_power).expect("threshold is nonnegative")
}

/// Probability that the eavesdropper's capacity exceeds the rate redundancy.
pub fn secrecy_outage(scn: &Scenario, rates: RatePair, jam_power: f64) -> f64 {
    if rates.rt <= rates.rs {
        return 1.0;
    }
    let tau = rates.secrecy_threshold();
    let phi_tau = scn.constants().phi(jam_power) * tau;
    if scn.is_single_antenna() {
        1.0 / (1.0 + phi_tau)
    } else {
        let n = f64::from(scn.jammer_antennas() - 1);
        (n / (phi_tau + n)).powf(n)
    }
}

/// Smallest jamming power keeping the secrecy outage at or below eps.
pub fn optimal_jamming_power(scn: &Scenario, rates: RatePair) -> Result<f64> {
    if rates.rt <= rates.rs {
        return Err(Error::ZeroSecrecyGap(rates.rt));
    }
    let k = scn.constants();
    Ok(k.secrecy_factor / (rates.secrecy_threshold() * k.phi_per_watt))
}

/// `P_J T / rho_J`: PT blocks needed on average to fund one IT block.
pub fn jamming_cost_ratio(scn: &Scenario, jam_power: f64) -> f64 {
    scn.jamming_energy(jam_power) / scn.constants().rho_j
}

pub fn transmission_probability(scn: &Scenario, rates: RatePair, jam_power: f64) -> f64 {
    let odds = outage_odds(scn, rates, jam_power);
    if !odds.is_finite() {
        return 0.0;
    }
    1.0 / (1.0 + jamming_cost_ratio(scn, jam_power).max(odds))
}

pub fn classify_regime(scn: &Scenario, rates: RatePair, jam_power: f64) -> Regime {
    Regime::from_terms(jamming_cost_ratio(scn, jam_power), outage_odds(scn, rates, jam_power))
}

/// Throughput for an arbitrary jamming power, ignoring the secrecy constraint.
pub fn throughput_at(scn: &Scenario, rates: RatePair, jam_power: f64) -> f64 {
    rates.rs * transmission_probability(scn, rates, jam_power)
}

/// Throughput with the jamming power set to the smallest value meeting the
/// secrecy constraint.
pub fn throughput(scn: &Scenario, rates: RatePair) -> Result<ThroughputReport> {
    let jam_power = optimal_jamming_power(scn, rates)?;
    let term_a = jamming_cost_ratio(scn, jam_power);
    let term_b = outage_odds(scn, rates, jam_power);
    let p_tx = if term_b.is_finite() { 1.0 / (1.0 + term_a.max(term_b)) } else { 0.0 };
    Ok(ThroughputReport {
        pi: rates.rs * p_tx,
        p_tx,
        p_co: connection_outage(scn, rates, jam_power),
        p_so: secrecy_outage(scn, rates, jam_power),
        jam_power,
        regime: Regime::from_terms(term_a, term_b),
        region: RateRegion::classify(term_a, term_b),
        term_a,
        term_b,
    })
}

//! System parameters, unit conversion and the constants derived from them.
//!
//! Everything inside the library is SI: watts, joules, seconds, meters.
//! Decibel-milliwatts only show up when parsing configuration text.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(p_watts: f64) -> f64 {
    10.0 * p_watts.log10() + 30.0
}

/// Jammer battery capacity. `Infinite` is the analytical idealisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatteryCapacity {
    Infinite,
    Joules(f64),
}

impl BatteryCapacity {
    pub fn limit(self) -> f64 {
        match self {
            BatteryCapacity::Infinite => f64::INFINITY,
            BatteryCapacity::Joules(j) => j,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, BatteryCapacity::Infinite)
    }
}

impl fmt::Display for BatteryCapacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatteryCapacity::Infinite => f.write_str("infinite"),
            BatteryCapacity::Joules(j) => write!(f, "{j}"),
        }
    }
}

impl FromStr for BatteryCapacity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" => Ok(BatteryCapacity::Infinite),
            other => other
                .parse::<f64>()
                .map(BatteryCapacity::Joules)
                .map_err(|_| Error::InvalidArgument(format!("bad battery capacity {s:?}"))),
        }
    }
}

/// Physical and protocol parameters of the source / jammer / destination /
/// eavesdropper link. Eavesdropper noise is fixed at zero (worst case) and the
/// eavesdropper has a single antenna.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub path_loss_exponent: f64,
    /// Block duration T in seconds.
    pub block_time: f64,
    /// RF-to-DC conversion efficiency.
    pub conversion_efficiency: f64,
    pub d_sj: f64,
    pub d_sd: f64,
    pub d_jd: f64,
    pub d_se: f64,
    pub d_je: f64,
    /// Source transmit power in watts.
    pub source_power: f64,
    pub jammer_antennas: u32,
    /// Destination noise power in watts.
    pub noise_power: f64,
    /// Secrecy outage constraint.
    pub secrecy_constraint: f64,
    pub battery_capacity: BatteryCapacity,
}

impl Default for SystemConfig {
    /// Collinear reference deployment: m = 3, T = 1 ms, eta = 0.5,
    /// P_s = 30 dBm, sigma_d^2 = -100 dBm, eps = 0.01, eight jammer antennas.
    fn default() -> Self {
        SystemConfig {
            path_loss_exponent: 3.0,
            block_time: 1e-3,
            conversion_efficiency: 0.5,
            d_sj: 25.0,
            d_sd: 50.0,
            d_jd: 25.0,
            d_se: 40.0,
            d_je: 15.0,
            source_power: 1.0,
            jammer_antennas: 8,
            noise_power: dbm_to_watts(-100.0),
            secrecy_constraint: 0.01,
            battery_capacity: BatteryCapacity::Infinite,
        }
    }
}

/// Keys accepted by [`SystemConfig::set`], in file order.
pub const CONFIG_KEYS: &[&str] = &[
    "path_loss_exponent",
    "block_time",
    "conversion_efficiency",
    "d_sj",
    "d_sd",
    "d_jd",
    "d_se",
    "d_je",
    "source_power_dbm",
    "source_power_watts",
    "jammer_antennas",
    "noise_power_dbm",
    "noise_power_watts",
    "secrecy_constraint",
    "battery_capacity",
];

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let v = value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {value:?} as a number")))?;
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{key}: value must be finite")));
    }
    Ok(v)
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("path_loss_exponent", self.path_loss_exponent),
            ("block_time", self.block_time),
            ("d_sj", self.d_sj),
            ("d_sd", self.d_sd),
            ("d_jd", self.d_jd),
            ("d_se", self.d_se),
            ("d_je", self.d_je),
            ("source_power", self.source_power),
            ("noise_power", self.noise_power),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        let eta = self.conversion_efficiency;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidConfig(format!("conversion_efficiency must lie in (0, 1], got {eta}")));
        }
        let eps = self.secrecy_constraint;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidConfig(format!("secrecy_constraint must lie in (0, 1), got {eps}")));
        }
        if self.jammer_antennas == 0 {
            return Err(Error::InvalidConfig("jammer_antennas must be >= 1".into()));
        }
        if let BatteryCapacity::Joules(j) = self.battery_capacity {
            if !(j.is_finite() && j > 0.0) {
                return Err(Error::InvalidConfig(format!("battery_capacity must be > 0 J, got {j}")));
            }
        }
        Ok(())
    }

    /// Sets one parameter from its textual form. Power keys take a `_dbm`
    /// or `_watts` suffix.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "path_loss_exponent" => self.path_loss_exponent = parse_f64(key, value)?,
            "block_time" => self.block_time = parse_f64(key, value)?,
            "conversion_efficiency" => self.conversion_efficiency = parse_f64(key, value)?,
            "d_sj" => self.d_sj = parse_f64(key, value)?,
            "d_sd" => self.d_sd = parse_f64(key, value)?,
            "d_jd" => self.d_jd = parse_f64(key, value)?,
            "d_se" => self.d_se = parse_f64(key, value)?,
            "d_je" => self.d_je = parse_f64(key, value)?,
            "source_power_dbm" => self.source_power = dbm_to_watts(parse_f64(key, value)?),
            "source_power_watts" => self.source_power = parse_f64(key, value)?,
            "noise_power_dbm" => self.noise_power = dbm_to_watts(parse_f64(key, value)?),
            "noise_power_watts" => self.noise_power = parse_f64(key, value)?,
            "secrecy_constraint" => self.secrecy_constraint = parse_f64(key, value)?,
            "jammer_antennas" => {
                self.jammer_antennas = value.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("jammer_antennas: {value:?} is not a positive integer"))
                })?
            }
            "battery_capacity" => self.battery_capacity = value.parse()?,
            _ => return Err(Error::InvalidArgument(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            self.set(key, value).map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
        }
        Ok(())
    }

    /// Parses a config file body over the default parameter set.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = SystemConfig::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`SystemConfig::from_text`]; powers are written in watts.
    pub fn to_text(&self) -> String {
        format!(
            "path_loss_exponent = {}\nblock_time = {}\nconversion_efficiency = {}\n\
             d_sj = {}\nd_sd = {}\nd_jd = {}\nd_se = {}\nd_je = {}\n\
             source_power_watts = {}\njammer_antennas = {}\nnoise_power_watts = {}\n\
             secrecy_constraint = {}\nbattery_capacity = {}\n",
            self.path_loss_exponent,
            self.block_time,
            self.conversion_efficiency,
            self.d_sj,
            self.d_sd,
            self.d_jd,
            self.d_se,
            self.d_je,
            self.source_power,
            self.jammer_antennas,
            self.noise_power,
            self.secrecy_constraint,
            self.battery_capacity,
        )
    }

    pub fn with_source_power_dbm(mut self, p_dbm: f64) -> Self {
        self.source_power = dbm_to_watts(p_dbm);
        self
    }

    pub fn with_jammer_antennas(mut self, n: u32) -> Self {
        self.jammer_antennas = n;
        self
    }

    pub fn with_battery(mut self, capacity: BatteryCapacity) -> Self {
        self.battery_capacity = capacity;
        self
    }

    pub fn derive_constants(&self) -> Result<DerivedConstants> {
        self.validate()?;
        Ok(DerivedConstants::from_config(self))
    }
}

/// `2^r - 1` without cancellation for small `r`.
pub fn pow2_minus_one(r: f64) -> f64 {
    if r < 1.0 {
        (r * std::f64::consts::LN_2).exp_m1()
    } else {
        r.exp2() - 1.0
    }
}

/// Wiretap code rates in bits per channel use: codeword rate `rt` and
/// confidential rate `rs`, with `rt >= rs >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub rt: f64,
    pub rs: f64,
}

impl RatePair {
    pub fn new(rt: f64, rs: f64) -> Result<Self> {
        if !(rt.is_finite() && rs.is_finite()) || rs < 0.0 || rt < rs {
            return Err(Error::InvalidArgument(format!(
                "rates must satisfy R_t >= R_s >= 0, got R_t = {rt}, R_s = {rs}"
            )));
        }
        Ok(RatePair { rt, rs })
    }

    /// Rate redundancy R_t - R_s spent on confusing the eavesdropper.
    pub fn redundancy(&self) -> f64 {
        self.rt - self.rs
    }

    /// Destination SINR threshold 2^R_t - 1.
    pub fn sinr_threshold(&self) -> f64 {
        pow2_minus_one(self.rt)
    }

    /// Eavesdropper SINR threshold 2^(R_t - R_s) - 1.
    pub fn secrecy_threshold(&self) -> f64 {
        pow2_minus_one(self.redundancy())
    }
}

/// Constants computed once per configuration.
///
/// The two jamming-to-signal ratios depend on the jamming power, so they are
/// stored per watt of jamming power; see [`DerivedConstants::phi`] and
/// [`DerivedConstants::psi`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Destination SNR without jamming, P_s / (d_SD^m sigma_d^2).
    pub rho_d: f64,
    /// Mean energy harvested in one power-transfer block, in joules.
    pub rho_j: f64,
    /// Eavesdropper-side jamming ratio per watt: d_SE^m / (d_JE^m P_s).
    pub phi_per_watt: f64,
    /// Destination-side jamming ratio per watt: d_SD^m / (d_JD^m P_s).
    pub psi_per_watt: f64,
    /// phi * tau at which the secrecy outage equals eps:
    /// 1/eps - 1 for one antenna, (N_J-1)(eps^(-1/(N_J-1)) - 1) otherwise.
    pub secrecy_factor: f64,
    pub k1: f64,
    pub k2: f64,
    /// Only defined for multi-antenna jammers.
    pub m: Option<f64>,
}

impl DerivedConstants {
    fn from_config(cfg: &SystemConfig) -> Self {
        let pl = |d: f64| d.powf(cfg.path_loss_exponent);
        let n_j = f64::from(cfg.jammer_antennas);
        let eta = cfg.conversion_efficiency;
        let eps = cfg.secrecy_constraint;
        let inv_eps = 1.0 / eps - 1.0;

        let rho_d = cfg.source_power / (pl(cfg.d_sd) * cfg.noise_power);
        let rho_j = eta * n_j * cfg.source_power * cfg.block_time / pl(cfg.d_sj);
        let je_se = pl(cfg.d_je) / pl(cfg.d_se);
        let k1 = pl(cfg.d_sj) / eta * je_se * inv_eps;
        let k2 = je_se * pl(cfg.d_sd) / pl(cfg.d_jd) * inv_eps;

        let (secrecy_factor, m) = if cfg.jammer_antennas == 1 {
            (inv_eps, None)
        } else {
            let n = n_j - 1.0;
            // (eps^(-1/n) - 1) evaluated without cancellation for large n
            let f = n * (-eps.ln() / n).exp_m1();
            (f, Some(pl(cfg.d_sj) / (n_j * eta) * je_se * f))
        };

        DerivedConstants {
            rho_d,
            rho_j,
            phi_per_watt: pl(cfg.d_se) / (pl(cfg.d_je) * cfg.source_power),
            psi_per_watt: pl(cfg.d_sd) / (pl(cfg.d_jd) * cfg.source_power),
            secrecy_factor,
            k1,
            k2,
            m,
        }
    }

    /// Jamming-to-signal ratio seen by the eavesdropper.
    pub fn phi(&self, jam_power: f64) -> f64 {
        jam_power * self.phi_per_watt
    }

    /// Jamming-to-signal ratio seen by the destination (single-antenna jammer).
    pub fn psi(&self, jam_power: f64) -> f64 {
        jam_power * self.psi_per_watt
    }
}

/// A validated configuration bundled with its derived constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    cfg: SystemConfig,
    constants: DerivedConstants,
}

impl Scenario {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        let constants = cfg.derive_constants()?;
        Ok(Scenario { cfg, constants })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.constants
    }

    pub fn jammer_antennas(&self) -> u32 {
        self.cfg.jammer_antennas
    }

    pub fn is_single_antenna(&self) -> bool {
        self.cfg.jammer_antennas == 1
    }

    /// Energy one IT block costs the jammer at the given jamming power.
    pub fn jamming_energy(&self, jam_power: f64) -> f64 {
        jam_power * self.cfg.block_time
    }

    /// Mean harvested power per PT block, in watts.
    pub fn mean_harvested_power(&self) -> f64 {
        self.constants.rho_j / self.cfg.block_time
    }
}

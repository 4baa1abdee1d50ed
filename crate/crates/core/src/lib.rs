//! Secure communication with a wireless-powered friendly jammer.
//!
//! The source alternates between power-transfer (PT) blocks that charge the
//! jammer's battery and information-transmission (IT) blocks protected by
//! jamming. This crate provides the closed-form outage and throughput
//! analysis, a block-level Monte Carlo simulator of the protocol, and the
//! throughput-optimal choice of wiretap code rates and jamming power under a
//! secrecy outage constraint.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod optimizer;
pub mod simulator;

pub use config::{BatteryCapacity, DerivedConstants, RatePair, Scenario, SystemConfig};
pub use error::{Error, Result};

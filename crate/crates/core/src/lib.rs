//! Link-level simulator and optimizer for pinching-antenna downlinks serving
//! one semantic and one bit user over NOMA.
//!
//! The crate models an adjustable-radiation pinching-antenna array on a
//! single dielectric waveguide: coupled-mode radiation control
//! ([`coupling`]), spherical-wavefront LoS channels with in-guide phase
//! accumulation ([`geometry`]), bit/semantic NOMA rates ([`rates`]), an
//! alternating placement/power optimizer ([`optimizer`]), fixed-antenna and
//! equal-power baselines ([`benchmarks`]), and a seedable Monte Carlo sweep
//! harness with CSV output ([`harness`]).

pub mod benchmarks;
pub mod coupling;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod optimizer;
pub mod rates;

pub use error::{Error, Result};
pub use geometry::{ComplexGain, Position3, SystemParams};

/// dBm to watts: P(W) = 10^((dBm - 30) / 10).
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

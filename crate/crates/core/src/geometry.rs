//! Geometry, spherical-wavefront line-of-sight channels, in-waveguide phase
//! accumulation, and composite effective gains.
//!
//! Conventions: the waveguide runs along the x-axis at height `d` (y = 0,
//! z = d) with its feed at x = 0; users live on the ground plane z = 0 inside
//! x in [0, D], y in [-D/2, D/2]. All quantities are SI (meters, watts,
//! hertz); dBm and millimeters appear only at the configuration boundary.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Complex amplitude gain of a propagation path (dimensionless).
pub type ComplexGain = Complex64;

/// A point in 3-D space, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// A user position on the ground plane (z = 0).
    pub const fn on_ground(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    /// A radiating point on the waveguide (y = 0, z = height).
    pub const fn on_waveguide(x: f64, height: f64) -> Self {
        Self { x, y: 0.0, z: height }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Euclidean distance from the coordinate origin.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Carrier, geometry, and noise constants of one deployment.
#[derive(Debug, Clone)]
pub struct SystemParams {
    /// Carrier frequency f_c (Hz).
    pub carrier_frequency: f64,
    /// Waveguide mounting height d (m).
    pub waveguide_height: f64,
    /// Side length D of the square service region (m).
    pub region_side: f64,
    /// Number of radiating points N.
    pub antenna_count: usize,
    /// Minimum adjacent-antenna spacing (m); at least half a wavelength.
    pub min_spacing: f64,
    /// Noise power sigma^2 (W).
    pub noise_power: f64,
    /// Effective refractive index of the dielectric waveguide (>= 1).
    pub effective_index: f64,
    /// Feed point of the waveguide.
    pub feed_point: Position3,
    /// Total transmit power budget P_max (W).
    pub max_power: f64,
}

impl SystemParams {
    /// 28 GHz evaluation setup: d = 3 m, D = 20 m, N = 3, spacing lambda/2,
    /// sigma^2 = -90 dBm, eta_eff = 1.4, P_max = 10 dBm, feed at the origin
    /// end of the guide.
    pub fn defaults() -> Self {
        let carrier_frequency = 28e9;
        let lambda = SPEED_OF_LIGHT / carrier_frequency;
        Self {
            carrier_frequency,
            waveguide_height: 3.0,
            region_side: 20.0,
            antenna_count: 3,
            min_spacing: lambda / 2.0,
            noise_power: 1e-12,
            effective_index: 1.4,
            feed_point: Position3::on_waveguide(0.0, 3.0),
            max_power: 1e-2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency > 0.0) {
            return Err(Error::InvalidParameter(
                "carrier frequency must be positive".into(),
            ));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::InvalidParameter("noise power must be positive".into()));
        }
        if !(self.effective_index >= 1.0) {
            return Err(Error::InvalidParameter(
                "effective index must be at least 1".into(),
            ));
        }
        if self.antenna_count == 0 {
            return Err(Error::InvalidParameter("antenna count must be positive".into()));
        }
        if !(self.max_power > 0.0) {
            return Err(Error::InvalidParameter("max power must be positive".into()));
        }
        if !(self.region_side > 0.0) {
            return Err(Error::InvalidParameter("region side must be positive".into()));
        }
        if !(self.waveguide_height > 0.0) {
            return Err(Error::InvalidParameter(
                "waveguide height must be positive".into(),
            ));
        }
        let lambda = SPEED_OF_LIGHT / self.carrier_frequency;
        if self.min_spacing < lambda / 2.0 - 1e-15 {
            return Err(Error::InvalidParameter(format!(
                "min spacing {} m is below half a wavelength ({} m)",
                self.min_spacing,
                lambda / 2.0
            )));
        }
        if !self.feed_point.is_finite() {
            return Err(Error::InvalidParameter("feed point must be finite".into()));
        }
        Ok(())
    }

    pub fn with_region_side(mut self, d: f64) -> Self {
        self.region_side = d;
        self
    }

    pub fn with_antenna_count(mut self, n: usize) -> Self {
        self.antenna_count = n;
        self
    }

    pub fn with_max_power(mut self, watts: f64) -> Self {
        self.max_power = watts;
        self
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Free-space wavelength, guided wavelength, and reference path gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavelengths {
    /// Free-space wavelength lambda = c / f_c (m).
    pub lambda: f64,
    /// Guided wavelength lambda_g = lambda / eta_eff (m).
    pub guided: f64,
    /// Path gain eta = lambda^2 / (16 pi^2) at 1 m reference distance.
    pub path_gain: f64,
}

/// Derive the wavelengths and reference path gain from the carrier setup.
pub fn wavelengths(params: &SystemParams) -> Result<Wavelengths> {
    if !(params.carrier_frequency > 0.0) {
        return Err(Error::InvalidParameter(
            "carrier frequency must be positive".into(),
        ));
    }
    if !(params.effective_index >= 1.0) {
        return Err(Error::InvalidParameter(
            "effective index must be at least 1".into(),
        ));
    }
    let lambda = SPEED_OF_LIGHT / params.carrier_frequency;
    Ok(Wavelengths {
        lambda,
        guided: lambda / params.effective_index,
        path_gain: lambda * lambda / (16.0 * std::f64::consts::PI * std::f64::consts::PI),
    })
}

/// Reduce a phase expressed in cycles to radians in [0, 2 pi).
#[inline]
pub(crate) fn cycles_to_phase(cycles: f64) -> f64 {
    let frac = cycles.rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 after rounding for tiny negatives.
    if frac >= 1.0 {
        0.0
    } else {
        TAU * frac
    }
}

/// Spherical-wavefront channel coefficient from one radiating point to a user:
/// (sqrt(eta) / r) * exp(-j 2 pi r / lambda).
pub fn free_space_channel(user: &Position3, antenna: &Position3, lambda: f64) -> Result<ComplexGain> {
    let r = user.distance(antenna);
    if r <= 0.0 {
        return Err(Error::ZeroDistance);
    }
    let amp = lambda / (4.0 * std::f64::consts::PI) / r;
    let phase = cycles_to_phase(r / lambda);
    let (s, c) = phase.sin_cos();
    Ok(Complex64::new(amp * c, -amp * s))
}

/// Phase accumulated inside the guide from the feed to a radiating point,
/// reported modulo 2 pi.
pub fn waveguide_phase(feed: &Position3, antenna: &Position3, lambda_guided: f64) -> f64 {
    cycles_to_phase(feed.distance(antenna) / lambda_guided)
}

/// Per-antenna phase as seen by a user, combining the free-space and the
/// in-guide propagation terms, reduced to [0, 2 pi).
pub fn user_phase(
    user: &Position3,
    antenna: &Position3,
    feed: &Position3,
    lambda: f64,
    lambda_guided: f64,
) -> f64 {
    let cycles = user.distance(antenna) / lambda - feed.distance(antenna) / lambda_guided;
    cycles_to_phase(cycles)
}

/// Composite effective gain of the array towards one user:
/// g = sum_n h_n * beta_n * exp(-j theta_n).
pub fn effective_gain(
    user: &Position3,
    antennas: &[Position3],
    betas: &[f64],
    params: &SystemParams,
) -> Result<ComplexGain> {
    if antennas.len() != betas.len() {
        return Err(Error::InvalidParameter(format!(
            "antenna/beta length mismatch: {} vs {}",
            antennas.len(),
            betas.len()
        )));
    }
    let wl = wavelengths(params)?;
    let sqrt_eta = wl.path_gain.sqrt();
    let mut g = Complex64::new(0.0, 0.0);
    for (antenna, &beta) in antennas.iter().zip(betas) {
        let r = user.distance(antenna);
        if r <= 0.0 {
            return Err(Error::ZeroDistance);
        }
        let guide = params.feed_point.distance(antenna) / wl.guided;
        let phase = cycles_to_phase(r / wl.lambda + guide);
        let (s, c) = phase.sin_cos();
        let amp = beta * sqrt_eta / r;
        g += Complex64::new(amp * c, -amp * s);
    }
    Ok(g)
}

/// Composite gain with no in-guide phase term (fixed-antenna baseline with a
/// common feed): g = sum_n h_n * beta_n.
pub fn effective_gain_free_space(
    user: &Position3,
    antennas: &[Position3],
    betas: &[f64],
    lambda: f64,
) -> Result<ComplexGain> {
    if antennas.len() != betas.len() {
        return Err(Error::InvalidParameter(format!(
            "antenna/beta length mismatch: {} vs {}",
            antennas.len(),
            betas.len()
        )));
    }
    let mut g = Complex64::new(0.0, 0.0);
    for (antenna, &beta) in antennas.iter().zip(betas) {
        g += beta * free_space_channel(user, antenna, lambda)?;
    }
    Ok(g)
}

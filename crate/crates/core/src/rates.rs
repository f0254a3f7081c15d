//! NOMA rate expressions under the bit-to-semantic decoding order and the
//! generalized-logistic semantic similarity model.
//!
//! Unit bandwidth is assumed throughout; bit rates are in bps/Hz and the
//! semantic rate in suts/s/Hz.

use crate::error::{Error, Result};
use crate::geometry::ComplexGain;

/// Scale on which the received SNR enters the logistic similarity fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaScale {
    /// SNR as a plain power ratio.
    #[default]
    Linear,
    /// SNR in dB (10 log10 of the power ratio).
    Decibel,
}

/// Constants of the word-level semantic transmission model: the logistic fit
/// of the similarity curve plus the symbol and information-density counts.
#[derive(Debug, Clone)]
pub struct SemanticParams {
    /// Average semantic symbols transmitted per word (K).
    pub symbols_per_word: u32,
    /// Semantic units per word, I/L.
    pub sut_ratio: f64,
    /// Lower asymptote of the similarity curve.
    pub lower_asymptote: f64,
    /// Upper asymptote of the similarity curve.
    pub upper_asymptote: f64,
    /// Logistic growth rate.
    pub growth_rate: f64,
    /// Logistic midpoint offset.
    pub midpoint_offset: f64,
    /// Scale convention for the SNR argument.
    pub gamma_scale: GammaScale,
}

impl SemanticParams {
    /// K = 5 fit used throughout the evaluation: asymptotes 0.37/0.98,
    /// growth 0.25, midpoint offset -0.7895, linear-scale SNR.
    pub fn defaults() -> Self {
        Self {
            symbols_per_word: 5,
            sut_ratio: 1.0,
            lower_asymptote: 0.37,
            upper_asymptote: 0.98,
            growth_rate: 0.25,
            midpoint_offset: -0.7895,
            gamma_scale: GammaScale::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbols_per_word == 0 {
            return Err(Error::InvalidParameter("symbols per word must be positive".into()));
        }
        if !(self.sut_ratio > 0.0) {
            return Err(Error::InvalidParameter("sut ratio must be positive".into()));
        }
        if !(self.lower_asymptote >= 0.0
            && self.lower_asymptote < self.upper_asymptote
            && self.upper_asymptote <= 1.0)
        {
            return Err(Error::InvalidParameter(
                "asymptotes must satisfy 0 <= A1 < A2 <= 1".into(),
            ));
        }
        if !(self.growth_rate > 0.0) {
            return Err(Error::InvalidParameter("growth rate must be positive".into()));
        }
        Ok(())
    }

    /// Hard ceiling of the semantic rate, (I/L) * A2 / K.
    pub fn rate_ceiling(&self) -> f64 {
        self.sut_ratio * self.upper_asymptote / self.symbols_per_word as f64
    }
}

impl Default for SemanticParams {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Power allocation between the semantic and the bit user; the two
/// coefficients sum to one and the semantic user gets the smaller share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    p_s: f64,
}

impl PowerSplit {
    pub fn new(p_s: f64) -> Result<Self> {
        if !(p_s > 0.0 && p_s <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "semantic power fraction must lie in (0, 0.5], got {p_s}"
            )));
        }
        Ok(Self { p_s })
    }

    pub fn semantic(&self) -> f64 {
        self.p_s
    }

    pub fn bit(&self) -> f64 {
        1.0 - self.p_s
    }
}

#[inline]
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Rate of the bit user, which decodes its signal treating the semantic
/// signal as interference.
pub fn bit_rate(p_s: f64, p_max: f64, g_b: ComplexGain, noise: f64) -> f64 {
    let h = g_b.norm_sqr();
    log2_1p((1.0 - p_s) * p_max * h / (p_s * p_max * h + noise))
}

/// Rate at which the semantic user can decode (and cancel) the bit user's
/// signal; same form as the bit rate with the semantic user's gain.
pub fn sic_rate(p_s: f64, p_max: f64, g_s: ComplexGain, noise: f64) -> f64 {
    bit_rate(p_s, p_max, g_s, noise)
}

/// Post-SIC SNR of the semantic user.
pub fn semantic_snr(p_s: f64, p_max: f64, g_s: ComplexGain, noise: f64) -> f64 {
    p_s * p_max * g_s.norm_sqr() / noise
}

/// Semantic similarity as a function of the received SNR: a generalized
/// logistic bounded in (A1, A2), monotone non-decreasing.
pub fn semantic_similarity(gamma: f64, sp: &SemanticParams) -> f64 {
    let x = match sp.gamma_scale {
        GammaScale::Linear => gamma,
        GammaScale::Decibel => 10.0 * gamma.log10(),
    };
    let span = sp.upper_asymptote - sp.lower_asymptote;
    sp.lower_asymptote + span / (1.0 + (-(sp.growth_rate * x + sp.midpoint_offset)).exp())
}

/// Semantic rate from an already computed SNR: (I/L) / K * eps_K(gamma).
pub fn semantic_rate_from_snr(gamma: f64, sp: &SemanticParams) -> f64 {
    sp.sut_ratio / sp.symbols_per_word as f64 * semantic_similarity(gamma, sp)
}

/// Semantic rate of the interference-free semantic user.
pub fn semantic_rate(p_s: f64, p_max: f64, g_s: ComplexGain, noise: f64, sp: &SemanticParams) -> f64 {
    semantic_rate_from_snr(semantic_snr(p_s, p_max, g_s, noise), sp)
}

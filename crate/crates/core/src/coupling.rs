//! Coupled-mode-theory radiation control: antenna-waveguide spacing to
//! coupling coefficient to per-antenna radiated amplitude ratios, plus the
//! inverse design used by the equal-power baseline.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Coupler geometry and material constants, with the per-antenna spacings.
#[derive(Debug, Clone)]
pub struct CouplingParams {
    /// Coupling constant Omega_0 (1/m) of the waveguide-antenna pair.
    pub omega0: f64,
    /// Cladding decay constant xi (1/m).
    pub decay: f64,
    /// Fixed coupler length l (m).
    pub antenna_length: f64,
    /// Antenna-waveguide spacings S_n (m), one per radiating point.
    pub spacings: Vec<f64>,
    /// Core width (m). Informational; enters no closed form.
    pub core_width: f64,
}

impl CouplingParams {
    /// Reference coupler constants: Omega_0 = 0.33 /mm, xi = 0.24615 /mm,
    /// l = 5 mm, core width 10 mm, no spacings assigned yet.
    pub fn defaults() -> Self {
        Self {
            omega0: 0.33 * 1e3,
            decay: 0.24615 * 1e3,
            antenna_length: 5e-3,
            spacings: Vec::new(),
            core_width: 10e-3,
        }
    }

    pub fn with_spacings(mut self, spacings: Vec<f64>) -> Self {
        self.spacings = spacings;
        self
    }

    /// Same spacing for every coupler.
    pub fn uniform(self, n: usize, spacing: f64) -> Self {
        self.with_spacings(vec![spacing; n])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidParameter("omega0 must be positive".into()));
        }
        if !(self.decay > 0.0) {
            return Err(Error::InvalidParameter("decay must be positive".into()));
        }
        if !(self.antenna_length > 0.0) {
            return Err(Error::InvalidParameter("antenna length must be positive".into()));
        }
        if self.spacings.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::InvalidParameter("spacings must be non-negative".into()));
        }
        Ok(())
    }

    /// kappa(S) * l, the coupled phase argument for one spacing.
    pub fn kappa_l(&self, spacing: f64) -> f64 {
        self.omega0 * (-self.decay * spacing).exp() * self.antenna_length
    }

    /// Spacing beyond which the coupler is effectively decoupled
    /// (kappa(S) * l < 1e-6).
    pub fn decoupled_spacing(&self) -> f64 {
        let kl0 = self.omega0 * self.antenna_length;
        if kl0 <= 1e-6 {
            0.0
        } else {
            (kl0 / 1e-6).ln() / self.decay
        }
    }

    /// Left end of the spacing range on which sin(kappa(S) l) is monotone
    /// decreasing: where kappa l first reaches pi/2 (0 if it never exceeds it).
    pub(crate) fn quarter_wave_spacing(&self) -> f64 {
        let kl0 = self.omega0 * self.antenna_length;
        if kl0 <= FRAC_PI_2 {
            0.0
        } else {
            (kl0 / FRAC_PI_2).ln() / self.decay
        }
    }

    /// Largest radiated amplitude fraction a single coupler can reach.
    pub fn max_sine(&self) -> f64 {
        let kl0 = self.omega0 * self.antenna_length;
        kl0.min(FRAC_PI_2).sin()
    }
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self::defaults()
    }
}

/// How the residual factor of the radiated-amplitude formula is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiationMode {
    /// beta_n = sin(kappa_n l) * prod_{i<n} sqrt(1 - sin^2(kappa_i l)):
    /// each coupler radiates a fraction of the power left in the guide.
    /// Conserves power for any spacing vector.
    #[default]
    Cascaded,
    /// beta_n = sin(kappa_n l) * (sqrt(1 - sin^2(kappa_n l)))^(n-1): the
    /// n-th coupler's own residual factor raised to n-1. Coincides with
    /// the cascaded form when all couplers share one coupling coefficient;
    /// may break power conservation otherwise.
    Literal,
}

/// Per-antenna amplitude ratios and the power fraction left in the guide.
#[derive(Debug, Clone)]
pub struct RadiationProfile {
    pub betas: Vec<f64>,
    /// Fraction of the fed power still guided past the last coupler.
    pub residual: f64,
}

impl RadiationProfile {
    /// Total radiated power fraction sum beta_n^2.
    pub fn total_radiated(&self) -> f64 {
        self.betas.iter().map(|b| b * b).sum()
    }

    /// False when the profile radiates more power than was fed (possible in
    /// literal mode with unequal couplers; never silently clamped).
    pub fn conserves_power(&self) -> bool {
        self.residual >= -1e-9
    }
}

/// Coupling coefficient kappa = Omega_0 * exp(-xi * S).
pub fn coupling_coefficient(spacing: f64, params: &CouplingParams) -> Result<f64> {
    params.validate()?;
    if !(spacing >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be non-negative, got {spacing}"
        )));
    }
    Ok(params.omega0 * (-params.decay * spacing).exp())
}

/// Radiated amplitude ratios for the configured spacings.
pub fn radiation_profile(params: &CouplingParams, mode: RadiationMode) -> Result<RadiationProfile> {
    params.validate()?;
    let n = params.spacings.len();
    let mut betas = Vec::with_capacity(n);
    match mode {
        RadiationMode::Cascaded => {
            // carried amplitude of the guided mode before coupler k
            let mut carried = 1.0_f64;
            for &s in &params.spacings {
                let t = params.kappa_l(s).sin();
                betas.push(t * carried);
                carried *= (1.0 - t * t).max(0.0).sqrt();
            }
            debug_assert!(betas.iter().map(|b| b * b).sum::<f64>() <= 1.0 + 1e-9);
            Ok(RadiationProfile {
                betas,
                residual: carried * carried,
            })
        }
        RadiationMode::Literal => {
            for (k, &s) in params.spacings.iter().enumerate() {
                let t = params.kappa_l(s).sin();
                let pass = (1.0 - t * t).max(0.0).sqrt();
                betas.push(t * pass.powi(k as i32));
            }
            let radiated: f64 = betas.iter().map(|b| b * b).sum();
            Ok(RadiationProfile {
                betas,
                residual: 1.0 - radiated,
            })
        }
    }
}

/// Cascaded betas for a uniform spacing, written into `out` (hot path of the
/// proportional scheme's spacing search).
pub(crate) fn uniform_cascaded_betas(spacing: f64, n: usize, params: &CouplingParams, out: &mut Vec<f64>) {
    out.clear();
    let t = params.kappa_l(spacing).sin();
    let pass = (1.0 - t * t).max(0.0).sqrt();
    let mut carried = 1.0;
    for _ in 0..n {
        out.push(t * carried);
        carried *= pass;
    }
}

/// Find the spacing at which a coupler radiates `target` amplitude given the
/// amplitude still carried by the guide, by bisection on the monotone branch
/// of sin(kappa(S) l).
pub fn invert_beta(target: f64, upstream_residual: f64, params: &CouplingParams) -> Result<f64> {
    params.validate()?;
    if !(0.0..=1.0 + 1e-12).contains(&target) || !(0.0..=1.0 + 1e-12).contains(&upstream_residual) {
        return Err(Error::InvalidParameter(format!(
            "target {target} and upstream residual {upstream_residual} must lie in [0, 1]"
        )));
    }
    let reachable = upstream_residual * params.max_sine();
    if target > reachable * (1.0 + 1e-9) + 1e-300 {
        return Err(Error::Infeasible(format!(
            "target amplitude {target} exceeds reachable {reachable} for upstream residual {upstream_residual}"
        )));
    }

    let s_hi = params.decoupled_spacing();
    let s_lo = params.quarter_wave_spacing();
    let radiated = |s: f64| params.kappa_l(s).sin() * upstream_residual;

    if target >= reachable {
        return Ok(s_lo);
    }
    if target <= radiated(s_hi) {
        // at or below the decoupled floor; includes target = 0
        return Ok(s_hi);
    }

    // sin(kappa(S) l) decreases monotonically on [s_lo, s_hi]
    let (mut lo, mut hi) = (s_lo, s_hi);
    for _ in 0..200 {
        if hi - lo <= 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if radiated(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Spacings that make every coupler of an N-element cascade radiate the same
/// power: stage n must take a 1/(N-n+1) fraction of the power reaching it.
pub fn equal_power_spacings(n: usize, params: &CouplingParams) -> Result<Vec<f64>> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("antenna count must be positive".into()));
    }
    let per_antenna_amp = 1.0 / (n as f64).sqrt();
    let mut spacings = Vec::with_capacity(n);
    let mut upstream = 1.0_f64;
    for stage in 1..=n {
        let required_sine = (1.0 / (n - stage + 1) as f64).sqrt();
        if required_sine > params.max_sine() * (1.0 + 1e-12) {
            return Err(Error::Infeasible(format!(
                "equal power split unreachable: stage {stage} of {n} needs a radiated \
                 amplitude fraction {required_sine:.6} but the coupler peaks at {:.6}",
                params.max_sine()
            )));
        }
        let s = invert_beta(per_antenna_amp, upstream, params)?;
        spacings.push(s);
        let achieved = params.kappa_l(s).sin();
        upstream *= (1.0 - achieved * achieved).max(0.0).sqrt();
    }
    Ok(spacings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kappa_at_zero_spacing_is_omega0() {
        let p = CouplingParams::defaults();
        assert_relative_eq!(coupling_coefficient(0.0, &p).unwrap(), 330.0, max_relative = 1e-15);
    }

    #[test]
    fn kappa_decays_towards_zero() {
        let p = CouplingParams::defaults();
        let k = coupling_coefficient(0.5, &p).unwrap();
        assert!(k > 0.0 && k < 1e-30);
        assert!(
            coupling_coefficient(1e-3, &p).unwrap() > coupling_coefficient(2e-3, &p).unwrap()
        );
    }

    #[test]
    fn kappa_at_one_over_xi() {
        let p = CouplingParams::defaults();
        let s = 1.0 / p.decay;
        assert_relative_eq!(
            coupling_coefficient(s, &p).unwrap(),
            330.0 * (-1.0f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn kappa_rejects_negative_spacing() {
        let p = CouplingParams::defaults();
        assert!(matches!(
            coupling_coefficient(-1e-6, &p),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn single_antenna_modes_agree() {
        let p = CouplingParams::defaults().with_spacings(vec![1e-3]);
        let a = radiation_profile(&p, RadiationMode::Cascaded).unwrap();
        let b = radiation_profile(&p, RadiationMode::Literal).unwrap();
        assert_eq!(a.betas, b.betas);
        assert_relative_eq!(a.betas[0], p.kappa_l(1e-3).sin(), max_relative = 1e-15);
    }

    #[test]
    fn equal_spacings_make_modes_coincide() {
        let p = CouplingParams::defaults().uniform(5, 2.5e-3);
        let a = radiation_profile(&p, RadiationMode::Cascaded).unwrap();
        let b = radiation_profile(&p, RadiationMode::Literal).unwrap();
        for (x, y) in a.betas.iter().zip(&b.betas) {
            assert_relative_eq!(x, y, max_relative = 1e-12);
        }
    }

    #[test]
    fn cascaded_telescoping_equal_split() {
        // spacings chosen so that sin^2(kappa_n l) = 1/(3-n+1): betas all 1/sqrt(3)
        let base = CouplingParams::defaults();
        let mut spacings = Vec::new();
        for n in 1..=3 {
            let target = (1.0 / (3 - n + 1) as f64).sqrt();
            let kl = target.asin();
            spacings.push((base.omega0 * base.antenna_length / kl).ln() / base.decay);
        }
        let p = base.with_spacings(spacings);
        let prof = radiation_profile(&p, RadiationMode::Cascaded).unwrap();
        let expect = 1.0 / 3.0f64.sqrt();
        for b in &prof.betas {
            assert_relative_eq!(*b, expect, max_relative = 1e-12);
        }
        assert!(prof.residual.abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn cascaded_conserves_power_for_any_spacings(
            spacings in proptest::collection::vec(0.0f64..0.02, 1..8)
        ) {
            let p = CouplingParams::defaults().with_spacings(spacings);
            let prof = radiation_profile(&p, RadiationMode::Cascaded).unwrap();
            let total = prof.total_radiated() + prof.residual;
            proptest::prop_assert!((total - 1.0).abs() < 1e-12, "conservation broke: {}", total);
            proptest::prop_assert!(prof.total_radiated() <= 1.0 + 1e-9);
            proptest::prop_assert!(prof.betas.iter().all(|b| (0.0..=1.0).contains(b)));
        }
    }

    #[test]
    fn literal_mode_can_break_conservation_and_is_flagged() {
        // a full-dump first coupler followed by a strong second one: the
        // literal form scales stage 2 by its own residual factor only, so the
        // radiated total exceeds the fed power
        let p = CouplingParams::defaults().with_spacings(vec![2e-4, 3e-3]);
        let prof = radiation_profile(&p, RadiationMode::Literal).unwrap();
        assert!(prof.total_radiated() > 1.0 + 1e-9);
        assert!(!prof.conserves_power());
        let cascaded = radiation_profile(&p, RadiationMode::Cascaded).unwrap();
        assert!(cascaded.conserves_power());
    }

    #[test]
    fn cascaded_monotonicity_in_single_spacing() {
        // On the monotone branch (kappa l <= pi/2), widening one spacing
        // weakly lowers that antenna's beta and raises every later beta.
        let base = CouplingParams::defaults();
        let floor = base.quarter_wave_spacing() + 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = 3 + (rng.random::<f64>() * 3.0) as usize;
            let spacings: Vec<f64> =
                (0..n).map(|_| floor + rng.random::<f64>() * 0.01).collect();
            let k = (rng.random::<f64>() * n as f64) as usize;
            let mut wider = spacings.clone();
            wider[k] += 1e-4 + rng.random::<f64>() * 1e-3;

            let a = radiation_profile(&base.clone().with_spacings(spacings), RadiationMode::Cascaded)
                .unwrap();
            let b = radiation_profile(&base.clone().with_spacings(wider), RadiationMode::Cascaded)
                .unwrap();
            assert!(b.betas[k] <= a.betas[k] + 1e-12);
            for i in (k + 1)..n {
                assert!(b.betas[i] >= a.betas[i] - 1e-12);
            }
        }
    }

    #[test]
    fn invert_beta_round_trip() {
        let p = CouplingParams::defaults();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let upstream = 0.2 + 0.8 * rng.random::<f64>();
            let target = upstream * p.max_sine() * rng.random::<f64>();
            let s = invert_beta(target, upstream, &p).unwrap();
            let forward = p.kappa_l(s).sin() * upstream;
            assert!(
                (forward - target).abs() < 1e-9,
                "round trip off: {forward} vs {target}"
            );
        }
    }

    #[test]
    fn invert_beta_zero_target_decouples() {
        let p = CouplingParams::defaults();
        let s = invert_beta(0.0, 1.0, &p).unwrap();
        assert_relative_eq!(s, p.decoupled_spacing(), max_relative = 1e-12);
    }

    #[test]
    fn invert_beta_max_coupling_at_zero_spacing() {
        // with Omega_0 l <= pi/2 the strongest coupling sits at S = 0
        let p = CouplingParams {
            omega0: 200.0,
            ..CouplingParams::defaults()
        };
        assert!(p.omega0 * p.antenna_length <= std::f64::consts::FRAC_PI_2);
        let target = (p.omega0 * p.antenna_length).sin() * 0.9;
        let s = invert_beta(target, 0.9, &p).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn invert_beta_worked_example() {
        let p = CouplingParams::defaults();
        let s = invert_beta(1.0 / 3.0f64.sqrt(), 1.0, &p).unwrap();
        let forward = p.kappa_l(s).sin();
        assert_relative_eq!(forward, 1.0 / 3.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn invert_beta_rejects_unreachable_target() {
        let p = CouplingParams::defaults();
        assert!(matches!(
            invert_beta(0.9, 0.5, &p),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn equal_power_spacings_reference_constants() {
        let p = CouplingParams::defaults();
        for n in 1..=7 {
            let spacings = equal_power_spacings(n, &p).unwrap();
            let prof =
                radiation_profile(&p.clone().with_spacings(spacings), RadiationMode::Cascaded)
                    .unwrap();
            let expect = 1.0 / (n as f64).sqrt();
            for b in &prof.betas {
                assert!((b - expect).abs() < 1e-8, "n={n}: beta {b} vs {expect}");
            }
            assert!(prof.residual <= 1e-8, "n={n}: residual {}", prof.residual);
        }
    }

    #[test]
    fn equal_power_single_antenna_full_dump() {
        let p = CouplingParams::defaults();
        let spacings = equal_power_spacings(1, &p).unwrap();
        assert_relative_eq!(p.kappa_l(spacings[0]), std::f64::consts::FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn equal_power_stage_fractions() {
        let p = CouplingParams::defaults();
        let spacings = equal_power_spacings(3, &p).unwrap();
        let fractions: Vec<f64> = spacings
            .iter()
            .map(|&s| {
                let t = p.kappa_l(s).sin();
                t * t
            })
            .collect();
        assert_relative_eq!(fractions[0], 1.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(fractions[1], 1.0 / 2.0, epsilon = 1e-9);
        assert_relative_eq!(fractions[2], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn equal_power_infeasible_when_peak_coupling_too_weak() {
        let p = CouplingParams {
            omega0: 200.0, // Omega_0 l = 1.0 < pi/2: the last stage cannot dump fully
            ..CouplingParams::defaults()
        };
        let err = equal_power_spacings(3, &p).unwrap_err();
        match err {
            Error::Infeasible(msg) => assert!(msg.contains("stage 3"), "msg: {msg}"),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }
}

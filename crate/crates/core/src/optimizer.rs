//! Alternating optimization of antenna placement and power allocation:
//! closed-form power split from the QoS and SIC constraints, bisection-based
//! large-scale placement, fine-scale phase alignment, and the outer loop.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{self, ComplexGain, Position3, SystemParams};
use crate::rates::{self, SemanticParams};

/// Numerical floor for the semantic power fraction; the strict positivity
/// constraint turns exact zero into infeasibility.
const POWER_FLOOR: f64 = 1e-9;

/// Knobs of the alternating optimizer.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Minimum bit-user rate (bps/Hz) enforced by both QoS and SIC.
    pub qos_min_rate: f64,
    /// Phase-precision radius for the semantic user (radians).
    pub phase_precision_s: f64,
    /// Phase-precision radius for the bit user (radians).
    pub phase_precision_b: f64,
    /// Fine-scale position step (m); defaults to lambda/10 when unset.
    pub fine_step: Option<f64>,
    /// Stop when the objective improves by less than this (suts/s/Hz).
    pub ao_tolerance: f64,
    pub max_ao_iterations: usize,
    /// Resolution of the placement bisection (m).
    pub bisection_tolerance: f64,
    /// Upper cap on the semantic power fraction.
    pub power_cap: f64,
}

impl SolverOptions {
    pub fn defaults() -> Self {
        Self {
            qos_min_rate: 0.5,
            phase_precision_s: 0.02,
            phase_precision_b: 0.02,
            fine_step: None,
            ao_tolerance: 1e-6,
            max_ao_iterations: 50,
            bisection_tolerance: 1e-6,
            power_cap: 0.5,
        }
    }

    pub fn with_qos(mut self, r: f64) -> Self {
        self.qos_min_rate = r;
        self
    }

    pub fn with_phase_precision(mut self, delta_s: f64, delta_b: f64) -> Self {
        self.phase_precision_s = delta_s;
        self.phase_precision_b = delta_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.qos_min_rate >= 0.0) {
            return Err(Error::InvalidParameter("QoS rate must be non-negative".into()));
        }
        if !(self.phase_precision_s > 0.0 && self.phase_precision_b > 0.0) {
            return Err(Error::InvalidParameter("phase precisions must be positive".into()));
        }
        if !(self.ao_tolerance > 0.0 && self.bisection_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.max_ao_iterations == 0 {
            return Err(Error::InvalidParameter("iteration cap must be positive".into()));
        }
        if !(self.power_cap > 0.0 && self.power_cap <= 0.5) {
            return Err(Error::InvalidParameter("power cap must lie in (0, 0.5]".into()));
        }
        Ok(())
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Result of one optimized (or best-effort) scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Antenna x-coordinates along the waveguide (m).
    pub antenna_xs: Vec<f64>,
    /// Radiated amplitude ratios the solve was run with.
    pub betas: Vec<f64>,
    /// Semantic power fraction p_S (0 when infeasible).
    pub power_split: f64,
    /// Achieved semantic rate (suts/s/Hz).
    pub semantic_rate: f64,
    /// Achieved bit-user rate (bps/Hz).
    pub bit_rate: f64,
    /// Rate at which the semantic user decodes the bit signal (bps/Hz).
    pub sic_rate: f64,
    pub feasible: bool,
    pub iterations: usize,
    /// Objective value after each outer iteration (the leading entry is the
    /// starting layout's objective). Non-decreasing by construction.
    pub objective_trace: Vec<f64>,
}

/// Largest semantic power fraction satisfying one rate constraint
/// R >= qos for channel power h: p <= (P h - tau sigma^2) / (P h (1 + tau)).
#[inline]
fn qos_power_bound(h: f64, p_max: f64, noise: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        1.0
    } else if h <= 0.0 {
        f64::NEG_INFINITY
    } else {
        (p_max * h - tau * noise) / (p_max * h * (1.0 + tau))
    }
}

#[inline]
fn split_from_channel_powers(h_s: f64, h_b: f64, p_max: f64, noise: f64, tau: f64, cap: f64) -> Option<f64> {
    let bound = qos_power_bound(h_b, p_max, noise, tau).min(qos_power_bound(h_s, p_max, noise, tau));
    if bound < POWER_FLOOR {
        None
    } else {
        Some(bound.min(cap))
    }
}

/// Closed-form optimal semantic power fraction at fixed gains:
/// p* = min{bound_B, bound_SIC, 0.5}, or `None` when no positive fraction
/// satisfies both the bit-user QoS and the SIC decodability constraint.
pub fn optimal_power_split(
    g_s: ComplexGain,
    g_b: ComplexGain,
    p_max: f64,
    noise: f64,
    qos_min_rate: f64,
) -> Option<f64> {
    let tau = (2.0f64).powf(qos_min_rate) - 1.0;
    split_from_channel_powers(g_s.norm_sqr(), g_b.norm_sqr(), p_max, noise, tau, 0.5)
}

/// One user's position reduced to the quantities the gain evaluation needs:
/// x-projection and the squared cross-range distance to the waveguide line.
#[derive(Debug, Clone, Copy)]
struct UserPoint {
    x: f64,
    cross2: f64,
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    split: Option<f64>,
    objective: f64,
    g_s: Complex64,
    g_b: Complex64,
}

/// Internal solver state shared by the placement, alignment, and outer loop.
pub(crate) struct Solver<'a> {
    n: usize,
    region: f64,
    spacing: f64,
    inv_lambda: f64,
    inv_lambda_g: f64,
    sqrt_eta: f64,
    feed_x: f64,
    feed_cross2: f64,
    user_s: UserPoint,
    user_b: UserPoint,
    betas: &'a [f64],
    semantic: &'a SemanticParams,
    p_max: f64,
    noise: f64,
    tau: f64,
    cap: f64,
    delta_s: f64,
    delta_b: f64,
    fine_step: f64,
    fine_offsets: usize,
    bisect_tol: f64,
    ao_tol: f64,
    max_iters: usize,
}

impl<'a> Solver<'a> {
    /// Evaluation context with no in-guide phase accumulation (fixed-antenna
    /// baseline): the guided term is dropped from every signal phase.
    pub(crate) fn new_without_guide(
        user_s: &Position3,
        user_b: &Position3,
        params: &SystemParams,
        betas: &'a [f64],
        semantic: &'a SemanticParams,
        options: &SolverOptions,
    ) -> Result<Self> {
        let mut solver = Self::new(user_s, user_b, params, betas, semantic, options)?;
        solver.inv_lambda_g = 0.0;
        Ok(solver)
    }

    pub(crate) fn new(
        user_s: &Position3,
        user_b: &Position3,
        params: &SystemParams,
        betas: &'a [f64],
        semantic: &'a SemanticParams,
        options: &SolverOptions,
    ) -> Result<Self> {
        params.validate()?;
        options.validate()?;
        semantic.validate()?;
        let n = params.antenna_count;
        if betas.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} amplitude ratios, got {}",
                betas.len()
            )));
        }
        if betas.iter().any(|b| !b.is_finite() || !(0.0..=1.0).contains(b)) {
            return Err(Error::InvalidParameter(
                "amplitude ratios must be finite and within [0, 1]".into(),
            ));
        }
        if !user_s.is_finite() || !user_b.is_finite() {
            return Err(Error::InvalidParameter("user positions must be finite".into()));
        }
        let wl = geometry::wavelengths(params)?;
        let span = (n as f64 - 1.0) * params.min_spacing;
        if span > params.region_side {
            return Err(Error::Configuration(format!(
                "region of {} m cannot hold {n} antennas at spacing {} m",
                params.region_side, params.min_spacing
            )));
        }
        let fine_step = options.fine_step.unwrap_or(wl.lambda / 10.0);
        if !(fine_step > 0.0) || fine_step >= params.min_spacing {
            return Err(Error::InvalidParameter(format!(
                "fine step {fine_step} m must be positive and below the antenna spacing"
            )));
        }
        let h = params.waveguide_height;
        let cross2 = |u: &Position3| u.y * u.y + (u.z - h) * (u.z - h);
        let fp = params.feed_point;
        Ok(Self {
            n,
            region: params.region_side,
            spacing: params.min_spacing,
            inv_lambda: 1.0 / wl.lambda,
            inv_lambda_g: 1.0 / wl.guided,
            sqrt_eta: wl.path_gain.sqrt(),
            feed_x: fp.x,
            feed_cross2: fp.y * fp.y + (fp.z - h) * (fp.z - h),
            user_s: UserPoint { x: user_s.x, cross2: cross2(user_s) },
            user_b: UserPoint { x: user_b.x, cross2: cross2(user_b) },
            betas,
            semantic,
            p_max: params.max_power,
            noise: params.noise_power,
            tau: (2.0f64).powf(options.qos_min_rate) - 1.0,
            cap: options.power_cap,
            delta_s: options.phase_precision_s,
            delta_b: options.phase_precision_b,
            fine_step,
            fine_offsets: (wl.guided / (2.0 * fine_step)).ceil() as usize,
            bisect_tol: options.bisection_tolerance,
            ao_tol: options.ao_tolerance,
            max_iters: options.max_ao_iterations,
        })
    }

    /// Composite per-antenna signal phase in [0, 2 pi): free-space plus
    /// in-guide accumulation. Congruent phases add coherently.
    #[inline]
    fn term_phase(&self, user: &UserPoint, x: f64) -> f64 {
        let dx = x - user.x;
        let r = (dx * dx + user.cross2).sqrt();
        let wx = x - self.feed_x;
        let w = (wx * wx + self.feed_cross2).sqrt();
        let cycles = r * self.inv_lambda + w * self.inv_lambda_g;
        let frac = cycles.rem_euclid(1.0);
        if frac >= 1.0 {
            0.0
        } else {
            TAU * frac
        }
    }

    #[inline]
    fn gain(&self, user: &UserPoint, xs: &[f64]) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let dx = x - user.x;
            let r = (dx * dx + user.cross2).sqrt();
            let phase = self.term_phase(user, x);
            let (s, c) = phase.sin_cos();
            let amp = self.betas[i] * self.sqrt_eta / r;
            re += amp * c;
            im -= amp * s;
        }
        Complex64::new(re, im)
    }

    /// Bit-user QoS at a fixed split, in SINR form (no logarithms).
    #[inline]
    fn qos_holds(&self, p: f64, h_b: f64) -> bool {
        (1.0 - p) * self.p_max * h_b >= self.tau * (p * self.p_max * h_b + self.noise)
    }

    fn evaluate(&self, xs: &[f64]) -> Evaluation {
        let g_s = self.gain(&self.user_s, xs);
        let g_b = self.gain(&self.user_b, xs);
        let split = split_from_channel_powers(
            g_s.norm_sqr(),
            g_b.norm_sqr(),
            self.p_max,
            self.noise,
            self.tau,
            self.cap,
        );
        let objective = match split {
            Some(p) => {
                let gamma = p * self.p_max * g_s.norm_sqr() / self.noise;
                rates::semantic_rate_from_snr(gamma, self.semantic)
            }
            None => f64::NEG_INFINITY,
        };
        Evaluation { split, objective, g_s, g_b }
    }

    fn half_span(&self) -> f64 {
        0.5 * (self.n as f64 - 1.0) * self.spacing
    }

    fn clamp_center(&self, c: f64) -> f64 {
        let half = self.half_span();
        c.clamp(half, self.region - half)
    }

    fn centered_layout(&self, c: f64) -> Vec<f64> {
        let start = c - self.half_span();
        (0..self.n).map(|i| start + i as f64 * self.spacing).collect()
    }

    /// Uniform array placement: start the array center at the users' x-axis
    /// midpoint and bisect it towards the semantic user for as long as the
    /// bit-user QoS holds; if the midpoint itself is infeasible, bisect
    /// towards the bit user instead and settle on the first feasible center
    /// (or the bit user's projection, flagged by the caller's evaluation).
    fn placement(&self, current_split: Option<f64>) -> Vec<f64> {
        let feasible_at = |c: f64| -> bool {
            let xs = self.centered_layout(c);
            match current_split {
                Some(p) => {
                    let h_b = self.gain(&self.user_b, &xs).norm_sqr();
                    self.qos_holds(p, h_b)
                }
                None => self.evaluate(&xs).split.is_some(),
            }
        };

        let c0 = self.clamp_center(0.5 * (self.user_s.x + self.user_b.x));
        if feasible_at(c0) {
            let target = self.clamp_center(self.user_s.x);
            if target == c0 || feasible_at(target) {
                return self.centered_layout(target);
            }
            let (mut lo, mut hi) = (c0, target);
            while (hi - lo).abs() > self.bisect_tol {
                let mid = 0.5 * (lo + hi);
                if feasible_at(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            self.centered_layout(lo)
        } else {
            let target = self.clamp_center(self.user_b.x);
            if target == c0 || !feasible_at(target) {
                return self.centered_layout(target);
            }
            let (mut lo, mut hi) = (c0, target);
            while (hi - lo).abs() > self.bisect_tol {
                let mid = 0.5 * (lo + hi);
                if feasible_at(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            self.centered_layout(hi)
        }
    }

    #[inline]
    fn position_admissible(&self, xs: &[f64], idx: usize, x: f64) -> bool {
        if !(0.0..=self.region).contains(&x) {
            return false;
        }
        if idx > 0 && x - xs[idx - 1] < self.spacing - 1e-12 {
            return false;
        }
        if idx + 1 < self.n && xs[idx + 1] - x < self.spacing - 1e-12 {
            return false;
        }
        true
    }

    /// Lexicographic alignment key of a whole layout: total excess phase
    /// dispersion towards the semantic user, then towards the bit user, then
    /// the negated semantic gain. `None` when the layout breaks the bit-user
    /// QoS at the current split.
    fn alignment_key(&self, xs: &[f64], p: f64) -> Option<(f64, f64, f64)> {
        let g_b = self.gain(&self.user_b, xs);
        if !self.qos_holds(p, g_b.norm_sqr()) {
            return None;
        }
        let g_s = self.gain(&self.user_s, xs);
        let wrap = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(TAU);
            d.min(TAU - d)
        };
        let ref_s = self.term_phase(&self.user_s, xs[0]);
        let ref_b = self.term_phase(&self.user_b, xs[0]);
        let mut viol_s = 0.0;
        let mut viol_b = 0.0;
        for &x in &xs[1..] {
            viol_s += (wrap(self.term_phase(&self.user_s, x), ref_s) - self.delta_s).max(0.0);
            viol_b += (wrap(self.term_phase(&self.user_b, x), ref_b) - self.delta_b).max(0.0);
        }
        Some((viol_s, viol_b, -g_s.norm()))
    }

    /// Fine-scale refinement: perturb each antenna over the offset grid,
    /// keeping the offset that best serves phase alignment of the semantic
    /// user, then of the bit user, then the semantic gain itself. Offsets
    /// that break spacing, the region box, or the bit-user QoS are rejected.
    fn align(&self, xs: &[f64], p: f64) -> Vec<f64> {
        let mut layout = xs.to_vec();
        if self.n < 2 {
            return layout;
        }
        for idx in 0..self.n {
            let base = layout[idx];
            let mut best_key = match self.alignment_key(&layout, p) {
                Some(k) => k,
                // current layout breaks QoS at this split; leave it alone
                None => continue,
            };
            let mut best_x = base;
            for k in 1..=self.fine_offsets {
                for sign in [-1.0, 1.0] {
                    let x = base + sign * k as f64 * self.fine_step;
                    if !self.position_admissible(&layout, idx, x) {
                        continue;
                    }
                    layout[idx] = x;
                    if let Some(key) = self.alignment_key(&layout, p) {
                        if key < best_key {
                            best_key = key;
                            best_x = x;
                        }
                    }
                    layout[idx] = base;
                }
            }
            layout[idx] = best_x;
        }
        layout
    }

    pub(crate) fn run(&self) -> Solution {
        let c0 = self.clamp_center(0.5 * (self.user_s.x + self.user_b.x));
        let mut xs = self.centered_layout(c0);
        let mut eval = self.evaluate(&xs);
        let mut trace = vec![eval.objective];
        let mut prev = eval.objective;
        let mut iterations = 0;

        for iter in 1..=self.max_iters {
            iterations = iter;

            let candidate = self.placement(eval.split);
            let cand_eval = self.evaluate(&candidate);
            let accept = cand_eval.objective > eval.objective
                || (eval.objective == f64::NEG_INFINITY
                    && cand_eval.objective == f64::NEG_INFINITY);
            if accept {
                xs = candidate;
                eval = cand_eval;
            }

            if let Some(p) = eval.split {
                if self.n >= 2 {
                    let candidate = self.align(&xs, p);
                    let cand_eval = self.evaluate(&candidate);
                    if cand_eval.objective > eval.objective {
                        xs = candidate;
                        eval = cand_eval;
                    }
                }
            }

            trace.push(eval.objective);
            if eval.objective == f64::NEG_INFINITY {
                break;
            }
            if (eval.objective - prev).abs() < self.ao_tol {
                break;
            }
            prev = eval.objective;
        }

        self.finish(xs, eval, iterations, trace)
    }

    pub(crate) fn solve_fixed_layout(&self, xs: Vec<f64>) -> Solution {
        let eval = self.evaluate(&xs);
        let trace = vec![eval.objective];
        self.finish(xs, eval, 0, trace)
    }

    fn finish(&self, xs: Vec<f64>, eval: Evaluation, iterations: usize, trace: Vec<f64>) -> Solution {
        let p = eval.split.unwrap_or(0.0);
        let r_b = rates::bit_rate(p, self.p_max, eval.g_b, self.noise);
        let r_sic = rates::sic_rate(p, self.p_max, eval.g_s, self.noise);
        let gamma = p * self.p_max * eval.g_s.norm_sqr() / self.noise;
        let r_s = rates::semantic_rate_from_snr(gamma, self.semantic);
        Solution {
            antenna_xs: xs,
            betas: self.betas.to_vec(),
            power_split: p,
            semantic_rate: r_s,
            bit_rate: r_b,
            sic_rate: r_sic,
            feasible: eval.split.is_some(),
            iterations,
            objective_trace: trace,
        }
    }

    /// Upper bound on any achievable objective for this user pair with the
    /// given total radiated amplitude (perfect alignment, closest possible
    /// array, full power cap). Used to prune the proportional spacing search.
    pub(crate) fn objective_ceiling(&self, amplitude_sum: f64) -> f64 {
        let g_max = amplitude_sum * self.sqrt_eta / self.user_s.cross2.sqrt();
        let gamma = self.cap * self.p_max * g_max * g_max / self.noise;
        rates::semantic_rate_from_snr(gamma, self.semantic)
    }
}

/// Large-scale antenna placement at a fixed power split (or, when no valid
/// split is known, at whichever centers admit one).
pub fn large_scale_placement(
    user_s: &Position3,
    user_b: &Position3,
    params: &SystemParams,
    betas: &[f64],
    semantic: &SemanticParams,
    current_split: Option<f64>,
    options: &SolverOptions,
) -> Result<Vec<f64>> {
    let solver = Solver::new(user_s, user_b, params, betas, semantic, options)?;
    Ok(solver.placement(current_split))
}

/// Fine-scale phase alignment of an existing layout at a fixed power split.
/// Never returns a layout with a lower objective than the input.
pub fn phase_align(
    antenna_xs: &[f64],
    user_s: &Position3,
    user_b: &Position3,
    params: &SystemParams,
    betas: &[f64],
    semantic: &SemanticParams,
    p_s: f64,
    options: &SolverOptions,
) -> Result<Vec<f64>> {
    let solver = Solver::new(user_s, user_b, params, betas, semantic, options)?;
    if antenna_xs.len() != params.antenna_count {
        return Err(Error::InvalidParameter(format!(
            "layout holds {} antennas, parameters say {}",
            antenna_xs.len(),
            params.antenna_count
        )));
    }
    if !(p_s > 0.0 && p_s <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "power split must lie in (0, 0.5], got {p_s}"
        )));
    }
    let refined = solver.align(antenna_xs, p_s);
    let before = solver.evaluate(antenna_xs).objective;
    let after = solver.evaluate(&refined).objective;
    Ok(if after > before { refined } else { antenna_xs.to_vec() })
}

/// Alternate between the closed-form power allocation, the large-scale
/// placement, and the fine-scale alignment until the semantic rate stops
/// improving. The objective sequence is non-decreasing; infeasibility is
/// reported through the solution flag with best-effort rates.
pub fn alternating_optimize(
    user_s: &Position3,
    user_b: &Position3,
    params: &SystemParams,
    betas: &[f64],
    semantic: &SemanticParams,
    options: &SolverOptions,
) -> Result<Solution> {
    let solver = Solver::new(user_s, user_b, params, betas, semantic, options)?;
    Ok(solver.run())
}

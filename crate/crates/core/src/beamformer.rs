//! Frequency-dependent array response and the closed-form rainbow beamformer.
//!
//! A joint phase-time array applies to element `n` the phase
//! `(n-1) * (phi - 2*pi*f*tau)`, linear in frequency through the true time
//! delay `tau`. Choosing `tau` and `phi` so that this JPTA phase tracks the
//! steering phase of a pilot arriving with its own angle-dependent Doppler
//! shift yields a beamformer whose gain stays within a vanishing loss of the
//! maximum `N` across the whole field of view: each Doppler-shifted frequency
//! is steered toward exactly the angle that produces that shift.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::geometry::{DopplerModel, SystemConfig};

/// Progressive delay and phase of a joint phase-time array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformerDesign {
    /// Progressive true-time delay per element step, s.
    pub tau: f64,
    /// Progressive phase per element step, rad, normalized to `[0, 2*pi)`.
    pub phi: f64,
}

impl BeamformerDesign {
    /// Build a design, normalizing the phase into `[0, 2*pi)`.
    pub fn new(tau: f64, phi: f64) -> Self {
        BeamformerDesign {
            tau,
            phi: phi.rem_euclid(TAU),
        }
    }

    /// Per-element-step JPTA phase at frequency `f`, reduced mod `2*pi`.
    fn step_phase(&self, f: f64) -> f64 {
        (self.phi - TAU * f * self.tau).rem_euclid(TAU)
    }
}

/// Rainbow design: the progressive delay and phase that satisfy the
/// maximum-gain condition for Doppler-shifted pilots at every angle in the
/// field of view (up to a second-order residual in `sin(theta)`).
///
/// `tau* = f_p / (2 * f_c * alpha)` and `phi* = pi * f_p^2 / (alpha * f_c)`
/// (mod `2*pi`).
pub fn rainbow_design(cfg: &SystemConfig) -> BeamformerDesign {
    let alpha = DopplerModel::from_config(cfg).alpha;
    let tau = cfg.f_p / (2.0 * cfg.f_c * alpha);
    let phi = PI * cfg.f_p * cfg.f_p / (alpha * cfg.f_c);
    BeamformerDesign::new(tau, phi)
}

/// Conventional narrowband beam: no delay, conjugate phase toward `theta0`
/// at the carrier. This is the per-slot beam used by the sweeping baselines.
pub fn conventional_design(theta0: f64) -> BeamformerDesign {
    BeamformerDesign::new(0.0, PI * theta0.sin())
}

/// Frequency-dependent array response of the half-wavelength ULA:
/// element `n` (1-based) is `exp(-j * pi * (f / f_c) * (n - 1) * sin(theta))`.
pub fn steering_vector(f: f64, theta: f64, n: usize, f_c: f64) -> Vec<Complex64> {
    let step = -PI * (f / f_c) * theta.sin();
    (0..n)
        .map(|k| Complex64::from_polar(1.0, step * k as f64))
        .collect()
}

/// JPTA weight vector `w(f, tau, phi)`. The combiner output is `w^H a`, so
/// element `n` of `w^H` carries phase `(n - 1) * (phi - 2*pi*f*tau)`.
pub fn jpta_weights(f: f64, design: &BeamformerDesign, n: usize) -> Vec<Complex64> {
    let step = design.step_phase(f);
    (0..n)
        .map(|k| Complex64::from_polar(1.0, -step * k as f64))
        .collect()
}

/// Combiner output `w^H a` for equal-length weight and response vectors.
pub fn array_output(weights: &[Complex64], response: &[Complex64]) -> Complex64 {
    debug_assert_eq!(weights.len(), response.len());
    weights
        .iter()
        .zip(response)
        .map(|(w, a)| w.conj() * a)
        .sum()
}

/// Total per-element-step phase of `w^H a` at `(f, theta)`: JPTA phase minus
/// steering phase, reduced mod `2*pi`. Gain peaks exactly where this is 0.
fn gain_phase(f: f64, theta: f64, design: &BeamformerDesign, f_c: f64) -> f64 {
    (design.step_phase(f) - PI * (f / f_c) * theta.sin()).rem_euclid(TAU)
}

/// Beamforming gain `G(f, theta, tau, phi) = |w^H a|^2 / N`, in `[0, N]`.
///
/// Evaluated through the Dirichlet-kernel closed form
/// `sin^2(N x / 2) / (N sin^2(x / 2))`; the removable singularity at
/// `x = 0 mod 2*pi` falls back to the direct complex sum.
pub fn bf_gain(f: f64, theta: f64, design: &BeamformerDesign, n: usize, f_c: f64) -> f64 {
    let x = gain_phase(f, theta, design, f_c);
    let half_sin = (x / 2.0).sin();
    if half_sin.abs() < 1e-8 {
        return bf_gain_direct_sum(x, n);
    }
    let num = (n as f64 * x / 2.0).sin();
    num * num / (n as f64 * half_sin * half_sin)
}

/// Direct-sum gain `|sum_k exp(j k x)|^2 / N`, valid for any `x`.
pub fn bf_gain_direct_sum(x: f64, n: usize) -> f64 {
    let sum: Complex64 = (0..n)
        .map(|k| Complex64::from_polar(1.0, x * k as f64))
        .sum();
    sum.norm_sqr() / n as f64
}

/// Deviation from the maximum gain for a Doppler-shifted pilot arriving at
/// `theta`: `|N - G(f_p + f_D(theta), theta, tau, phi)|`.
pub fn gain_loss_exact(theta: f64, cfg: &SystemConfig, design: &BeamformerDesign) -> f64 {
    let model = DopplerModel::from_config(cfg);
    let f = cfg.f_p + model.doppler_from_angle(theta);
    (cfg.n_antennas as f64 - bf_gain(f, theta, design, cfg.n_antennas, cfg.f_c)).abs()
}

/// Second-order closed form of the rainbow design's gain loss:
/// `pi^2 f_p^2 v^2 r_E^2 / (12 f_c^2 c^2 (r_E + a_sat)^2) * N^3 * sin^4(theta)`.
pub fn gain_loss_approx(theta: f64, cfg: &SystemConfig) -> f64 {
    let v = cfg.sat_speed();
    let n = cfg.n_antennas as f64;
    let orbit = cfg.r_earth + cfg.a_sat;
    let s = theta.sin();
    (PI * PI * cfg.f_p * cfg.f_p * v * v * cfg.r_earth * cfg.r_earth)
        / (12.0 * cfg.f_c * cfg.f_c * cfg.c * cfg.c * orbit * orbit)
        * n
        * n
        * n
        * s.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DopplerModel;
    use proptest::prelude::*;

    fn default_cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn steering_single_element() {
        let a = steering_vector(20e9, 0.7, 1, 20e9);
        assert_eq!(a, vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn steering_boresight_all_ones() {
        for f in [19e9, 20e9, 21e9] {
            let a = steering_vector(f, 0.0, 8, 20e9);
            for e in a {
                assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn steering_at_carrier_matches_narrowband() {
        let theta = 0.4f64;
        let a = steering_vector(20e9, theta, 8, 20e9);
        for (k, e) in a.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, -PI * k as f64 * theta.sin());
            assert!((e - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn jpta_identity_weights() {
        let design = BeamformerDesign::new(0.0, 0.0);
        let w = jpta_weights(12e9, &design, 5);
        for e in w {
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn jpta_unit_modulus_and_linear_phase() {
        let design = BeamformerDesign::new(3.2e-7, 1.1);
        let f = 20e9 + 1.7e5;
        let w = jpta_weights(f, &design, 16);
        let step = Complex64::from_polar(1.0, -design.step_phase(f));
        for e in &w {
            assert!((e.norm() - 1.0).abs() < 1e-14);
        }
        for k in 1..w.len() {
            // Consecutive ratio is the constant per-step phasor.
            let ratio = w[k] * w[k - 1].conj();
            assert!((ratio - step).norm() < 1e-12);
        }
    }

    #[test]
    fn gain_is_n_when_condition_holds() {
        // Pick (f, theta), then solve the max-gain condition for phi.
        let f_c = 20e9;
        let f = f_c + 2.3e5;
        let theta = 0.52f64;
        let tau = 1.0e-7;
        let phi = TAU * f * tau + PI * (f / f_c) * theta.sin();
        let design = BeamformerDesign::new(tau, phi);
        let n = 64;
        let g = bf_gain(f, theta, &design, n, f_c);
        assert!((g - n as f64).abs() <= 1e-9 * n as f64, "gain = {g}");
    }

    #[test]
    fn gain_single_element_is_one() {
        let design = BeamformerDesign::new(5e-7, 2.0);
        for theta in [-1.0, 0.0, 0.3] {
            assert!((bf_gain(20.1e9, theta, &design, 1, 20e9) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gain_bounded_by_n() {
        let design = BeamformerDesign::new(2e-7, 0.9);
        for i in 0..500 {
            let theta = -1.4 + 2.8 * i as f64 / 499.0;
            let g = bf_gain(20e9 + 1e5, theta, &design, 32, 20e9);
            assert!((0.0..=32.0 + 1e-9).contains(&g), "gain {g} out of range");
        }
    }

    #[test]
    fn rainbow_design_values() {
        let cfg = default_cfg();
        let design = rainbow_design(&cfg);
        assert!(
            (design.tau - 1.0612412964e-6).abs() < 1e-13,
            "tau = {}",
            design.tau
        );
        // Algebraic identity: f_p / (2 f_c alpha) == c (r_E + a_sat) / (2 f_c v r_E).
        let other = cfg.c * (cfg.r_earth + cfg.a_sat)
            / (2.0 * cfg.f_c * cfg.sat_speed() * cfg.r_earth);
        assert!((design.tau - other).abs() <= 1e-15 * design.tau.abs());
        assert!((0.0..TAU).contains(&design.phi));
    }

    #[test]
    fn rainbow_flat_gain_over_fov() {
        let cfg = default_cfg();
        let model = DopplerModel::from_config(&cfg);
        let design = rainbow_design(&cfg);
        let half = cfg.fov_half_width();
        let mut min_gain = f64::INFINITY;
        for i in 0..1000 {
            let theta = -half + 2.0 * half * i as f64 / 999.0;
            let f = cfg.f_p + model.doppler_from_angle(theta);
            min_gain = min_gain.min(bf_gain(f, theta, &design, cfg.n_antennas, cfg.f_c));
        }
        assert!(min_gain >= 64.0 - 1.3e-4, "min gain {min_gain}");
    }

    #[test]
    fn worst_case_loss_matches_quoted_numbers() {
        // Quoted worst-case losses (exact 1.1672e-4, approx 1.1675e-4) assume
        // an unstated satellite speed; 5% covers the orbital-mechanics spread.
        let cfg = default_cfg();
        let design = rainbow_design(&cfg);
        let edge = cfg.fov_half_width();
        let exact = gain_loss_exact(edge, &cfg, &design);
        let approx = gain_loss_approx(edge, &cfg);
        assert!((exact - 1.1672e-4).abs() <= 0.05 * 1.1672e-4, "exact {exact}");
        assert!(
            (approx - 1.1675e-4).abs() <= 0.05 * 1.1675e-4,
            "approx {approx}"
        );
        assert!((exact - approx).abs() / exact < 0.01);
    }

    #[test]
    fn loss_vanishes_at_boresight() {
        let cfg = default_cfg();
        let design = rainbow_design(&cfg);
        assert!(gain_loss_exact(0.0, &cfg, &design) <= 1e-12);
        assert_eq!(gain_loss_approx(0.0, &cfg), 0.0);
    }

    #[test]
    fn loss_symmetric_in_theta() {
        let cfg = default_cfg();
        let design = rainbow_design(&cfg);
        for theta in [0.2, 0.7, 1.1, cfg.fov_half_width()] {
            let plus = gain_loss_exact(theta, &cfg, &design);
            let minus = gain_loss_exact(-theta, &cfg, &design);
            assert!((plus - minus).abs() < 1e-10, "{plus} vs {minus}");
        }
    }

    #[test]
    fn approx_loss_monotone_in_abs_theta() {
        let cfg = default_cfg();
        let mut last = -1.0;
        for i in 0..=500 {
            let theta = cfg.fov_half_width() * i as f64 / 500.0;
            let loss = gain_loss_approx(theta, &cfg);
            assert!(loss >= last, "loss not monotone at {theta}");
            last = loss;
        }
    }

    #[test]
    fn dirichlet_closed_form_matches_direct_sum() {
        let n = 64;
        for i in 0..2000 {
            let x = -2.0 * TAU + 4.0 * TAU * i as f64 / 1999.0;
            let design = BeamformerDesign::new(0.0, x);
            // With tau = 0 and theta = 0 the gain phase is exactly phi.
            let closed = bf_gain(20e9, 0.0, &design, n, 20e9);
            let direct = bf_gain_direct_sum(design.phi, n);
            let scale = closed.abs().max(1e-3);
            assert!(
                (closed - direct).abs() <= 1e-10 * scale,
                "x = {x}: {closed} vs {direct}"
            );
        }
        // Near-singular arguments exercise the fallback branch.
        for x in [0.0, 1e-12, -1e-12, 1e-9, TAU, TAU + 1e-10] {
            let design = BeamformerDesign::new(0.0, x);
            let g = bf_gain(20e9, 0.0, &design, n, 20e9);
            assert!((g - n as f64).abs() < 1e-6, "x = {x}: gain {g}");
        }
    }

    #[test]
    fn conventional_beam_peaks_at_pointing_angle() {
        let theta0 = 0.35f64;
        let design = conventional_design(theta0);
        let g = bf_gain(20e9, theta0, &design, 64, 20e9);
        assert!((g - 64.0).abs() < 1e-9, "gain {g}");
    }

    #[test]
    fn conventional_3db_width_near_1_6_degrees() {
        let n = 64;
        let design = conventional_design(0.0);
        let half_power = n as f64 / 2.0;
        // Scan outward from boresight for the half-power crossing.
        let mut width = None;
        let step = 0.001f64.to_radians();
        let mut theta = 0.0;
        while theta < 0.2 {
            if bf_gain(20e9, theta, &design, n, 20e9) < half_power {
                width = Some(2.0 * theta.to_degrees());
                break;
            }
            theta += step;
        }
        let w = width.expect("no half-power crossing found");
        assert!((1.4..=1.8).contains(&w), "3 dB width {w} degrees");
    }

    proptest! {
        // Gain equals N exactly when and only when the per-step phase is a
        // multiple of 2*pi.
        #[test]
        fn max_gain_characterization(
            tau in 0.0f64..2e-6,
            phi in 0.0f64..TAU,
            t in -0.9f64..0.9,
            df in -4.0e5f64..4.0e5,
        ) {
            let f_c = 20e9;
            let f = f_c + df;
            let theta = t * std::f64::consts::FRAC_PI_2;
            let design = BeamformerDesign::new(tau, phi);
            let n = 32;
            let x = (design.step_phase(f) - PI * (f / f_c) * theta.sin()).rem_euclid(TAU);
            let x_dist = x.min(TAU - x);
            let g = bf_gain(f, theta, &design, n, f_c);
            let at_max = (g - n as f64).abs() <= 1e-9 * n as f64;
            // Phase at a 2*pi multiple forces the maximum; a phase clearly away
            // from it forces a measurable loss. Randomly drawn phases land in
            // the sliver between the two thresholds with negligible probability.
            if x_dist <= 1e-9 {
                prop_assert!(at_max, "x = {}, gain = {}", x, g);
            }
            if x_dist >= 2e-6 {
                prop_assert!(!at_max, "x = {}, gain = {}", x, g);
            }
        }

        #[test]
        fn gain_within_bounds(
            tau in 0.0f64..2e-6,
            phi in 0.0f64..TAU,
            t in -1.0f64..1.0,
        ) {
            let design = BeamformerDesign::new(tau, phi);
            let g = bf_gain(20e9 + 1.2e5, t * 1.4, &design, 16, 20e9);
            prop_assert!((0.0..=16.0 + 1e-9).contains(&g));
        }
    }
}

//! Measurement synthesis: the beamformed, down-converted, sampled baseband
//! signal received during one pilot slot.
//!
//! After rainbow beamforming, each satellite contributes a single complex
//! tone at its angle-dependent Doppler frequency, scaled by its effective
//! channel (gain times combiner response). Noise is circularly symmetric
//! complex Gaussian, i.i.d. per sample.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;
use thiserror::Error;

use crate::beamformer::{array_output, jpta_weights, steering_vector, BeamformerDesign};
use crate::geometry::{DopplerModel, SystemConfig};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("satellite angle {0} rad lies outside the field of view")]
    AngleOutsideFov(f64),
    #[error("angles, gains and pilots must have equal lengths")]
    LengthMismatch,
}

/// A set of simultaneously transmitting satellites.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Off-boresight angle of each satellite, rad.
    pub angles: Vec<f64>,
    /// Complex channel gain of each satellite.
    pub gains: Vec<Complex64>,
    /// Pilot symbol of each satellite.
    pub pilots: Vec<Complex64>,
    /// Common per-satellite effective SNR, dB.
    pub snr_db: f64,
}

impl Scenario {
    /// Default channel policy: unit-magnitude gains with phases drawn
    /// uniformly from `[0, 2*pi)` and unit pilots, so the effective SNR
    /// definition holds exactly rather than in expectation.
    pub fn with_random_phases<R: Rng>(
        angles: Vec<f64>,
        snr_db: f64,
        cfg: &SystemConfig,
        rng: &mut R,
    ) -> Result<Self, ScenarioError> {
        for &theta in &angles {
            if !cfg.in_fov(theta) {
                return Err(ScenarioError::AngleOutsideFov(theta));
            }
        }
        let gains = angles
            .iter()
            .map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * TAU))
            .collect();
        let pilots = vec![Complex64::new(1.0, 0.0); angles.len()];
        Ok(Scenario {
            angles,
            gains,
            pilots,
            snr_db,
        })
    }

    pub fn num_satellites(&self) -> usize {
        self.angles.len()
    }

    /// Per-sample noise variance implied by the scenario's SNR under the
    /// unit-modulus gain and pilot policy.
    pub fn noise_variance(&self, cfg: &SystemConfig) -> f64 {
        noise_variance_for_snr(
            self.snr_db,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            cfg,
        )
    }
}

/// One slot of sampled baseband measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Complex baseband samples, length `L`.
    pub samples: Vec<Complex64>,
    /// Per-sample noise variance these samples carry.
    pub noise_var: f64,
}

/// Effective channel after beamforming: `g * w^H a`, both evaluated at the
/// satellite's Doppler-shifted pilot frequency.
pub fn effective_channel(
    theta: f64,
    gain: Complex64,
    design: &BeamformerDesign,
    cfg: &SystemConfig,
) -> Complex64 {
    let model = DopplerModel::from_config(cfg);
    let f = cfg.f_p + model.doppler_from_angle(theta);
    let w = jpta_weights(f, design, cfg.n_antennas);
    let a = steering_vector(f, theta, cfg.n_antennas, cfg.f_c);
    gain * array_output(&w, &a)
}

/// Unit-amplitude complex sinusoid at the Doppler frequency of `theta`:
/// element `l` is `exp(j * 2*pi * (f_D / f_s) * l)`.
pub fn sinusoid(theta: f64, cfg: &SystemConfig) -> Vec<Complex64> {
    let model = DopplerModel::from_config(cfg);
    let omega = TAU * model.doppler_from_angle(theta) / cfg.f_s;
    (0..cfg.samples_per_slot)
        .map(|l| Complex64::from_polar(1.0, omega * l as f64))
        .collect()
}

/// Noise variance matching a requested effective SNR:
/// `sigma^2 = |g|^2 |x|^2 N L / 10^(snr_db / 10)`.
pub fn noise_variance_for_snr(
    snr_db: f64,
    gain: Complex64,
    pilot: Complex64,
    cfg: &SystemConfig,
) -> f64 {
    let signal = gain.norm_sqr() * pilot.norm_sqr();
    signal * (cfg.n_antennas * cfg.samples_per_slot) as f64 / 10f64.powf(snr_db / 10.0)
}

/// One circularly symmetric complex Gaussian draw with total variance
/// `sigma2` (half in each quadrature).
fn complex_gaussian<R: Rng>(sigma2: f64, rng: &mut R) -> Complex64 {
    let scale = (sigma2 / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Synthesize one measurement slot: the sum of effective-channel-weighted
/// Doppler tones plus i.i.d. complex Gaussian noise.
pub fn synthesize<R: Rng>(
    scenario: &Scenario,
    design: &BeamformerDesign,
    cfg: &SystemConfig,
    rng: &mut R,
) -> Measurement {
    let sigma2 = scenario.noise_variance(cfg);
    let tones: Vec<(Complex64, Vec<Complex64>)> = scenario
        .angles
        .iter()
        .zip(scenario.gains.iter().zip(&scenario.pilots))
        .map(|(&theta, (&g, &x))| {
            (effective_channel(theta, g, design, cfg) * x, sinusoid(theta, cfg))
        })
        .collect();
    let samples = (0..cfg.samples_per_slot)
        .map(|l| {
            let mut y = Complex64::new(0.0, 0.0);
            for (amp, tone) in &tones {
                y += amp * tone[l];
            }
            if sigma2 > 0.0 {
                y += complex_gaussian(sigma2, rng);
            }
            y
        })
        .collect();
    Measurement {
        samples,
        noise_var: sigma2,
    }
}

/// Average `n_slots` measurements of the same scenario: the tone component is
/// held fixed across slots while the noise is redrawn, so averaging divides
/// the effective noise variance by the slot count.
pub fn synthesize_averaged<R: Rng>(
    scenario: &Scenario,
    design: &BeamformerDesign,
    cfg: &SystemConfig,
    n_slots: usize,
    rng: &mut R,
) -> Measurement {
    assert!(n_slots >= 1, "averaging needs at least one slot");
    let mut acc = synthesize(scenario, design, cfg, rng);
    for _ in 1..n_slots {
        let slot = synthesize(scenario, design, cfg, rng);
        for (a, s) in acc.samples.iter_mut().zip(&slot.samples) {
            *a += s;
        }
    }
    let inv = 1.0 / n_slots as f64;
    for a in acc.samples.iter_mut() {
        *a *= inv;
    }
    acc.noise_var *= inv;
    acc
}

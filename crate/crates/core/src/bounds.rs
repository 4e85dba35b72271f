//! Root Cramér-Rao bound for single-satellite angle estimation.
//!
//! The measurement is a single complex tone with unknown amplitude, phase and
//! frequency in white complex Gaussian noise; the classical frequency bound
//! is `var(f) = 6 f_s^2 / ((2 pi)^2 rho L (L^2 - 1))` with per-sample SNR
//! `rho`. The angle bound follows by the delta method through the sinusoidal
//! Doppler map, dividing by `alpha |cos(theta)|`.

use thiserror::Error;

use crate::beamformer::{bf_gain, rainbow_design};
use crate::geometry::{DopplerModel, SystemConfig};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("angle {0} rad is too close to the horizon for the delta-method bound")]
    DomainError(f64),
}

/// One evaluated point of the bound curve.
#[derive(Debug, Clone, Copy)]
pub struct CrbPoint {
    pub snr_db: f64,
    /// Satellite angle, rad.
    pub theta: f64,
    /// Root Cramér-Rao bound on the angle estimate, rad.
    pub rcrb_rad: f64,
}

/// Root Cramér-Rao bound on the angle of a single satellite at `theta` with
/// effective SNR `snr_db`, under rainbow beamforming.
///
/// The per-sample SNR is recovered from the effective SNR definition through
/// the beamformer's actual gain: `rho = SNR * |w^H a|^2 / (N L)`.
pub fn rcrb_angle(snr_db: f64, theta: f64, cfg: &SystemConfig) -> Result<f64, BoundsError> {
    if theta.cos().abs() < 1e-12 {
        return Err(BoundsError::DomainError(theta));
    }
    let model = DopplerModel::from_config(cfg);
    let design = rainbow_design(cfg);
    let f = cfg.f_p + model.doppler_from_angle(theta);
    let n = cfg.n_antennas as f64;
    let l = cfg.samples_per_slot as f64;
    let gain_eff = n * bf_gain(f, theta, &design, cfg.n_antennas, cfg.f_c); // |w^H a|^2
    let snr = 10f64.powf(snr_db / 10.0);
    let rho = snr * gain_eff / (n * l);
    let var_f = 6.0 * cfg.f_s * cfg.f_s
        / ((2.0 * std::f64::consts::PI).powi(2) * rho * l * (l * l - 1.0));
    Ok(var_f.sqrt() / (model.alpha * theta.cos().abs()))
}

/// Bound curve over an SNR grid at a fixed angle.
pub fn rcrb_curve(
    snr_grid_db: &[f64],
    theta: f64,
    cfg: &SystemConfig,
) -> Result<Vec<CrbPoint>, BoundsError> {
    snr_grid_db
        .iter()
        .map(|&snr_db| {
            Ok(CrbPoint {
                snr_db,
                theta,
                rcrb_rad: rcrb_angle(snr_db, theta, cfg)?,
            })
        })
        .collect()
}

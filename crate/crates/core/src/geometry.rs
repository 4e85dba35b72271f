//! Satellite-user-Earth geometry and the angle-dependent Doppler model.
//!
//! For a circular LEO pass over a user whose array boresight points at zenith,
//! the Doppler shift of a pilot at frequency `f_p` collapses to a sinusoid of
//! the off-boresight angle, `f_D(theta) = -alpha * sin(theta)`. That bijection
//! between angle and Doppler over the field of view is what the rest of the
//! crate exploits. This module holds the system constants, the Doppler scale
//! `alpha`, the raw geometric Doppler chain used as a cross-check, and the
//! inverse map from an estimated Doppler back to an angle.

use thiserror::Error;

/// Standard gravitational parameter of Earth, m^3/s^2.
pub const EARTH_MU: f64 = 3.986_004_418e14;

/// Mean Earth radius, m.
pub const EARTH_RADIUS: f64 = 6_371_000.0;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Relative slack allowed when mapping a noisy Doppler estimate through
/// `arcsin`: inputs up to `(1 + CLAMP_BAND) * alpha` are clamped to the
/// field-of-view edge, anything larger is rejected.
pub const CLAMP_BAND: f64 = 0.01;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("doppler estimate {f_hat} Hz exceeds the physical range +/-{alpha} Hz")]
    OutOfRange { f_hat: f64, alpha: f64 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("minimum elevation must lie in [0, pi/2), got {0} rad")]
    BadElevation(f64),
    #[error("antenna count must be >= 1")]
    NoAntennas,
    #[error("samples per slot must be >= 1")]
    NoSamples,
    #[error("smoothing window {m} must satisfy 1 <= M <= L = {l}")]
    BadSmoothing { m: usize, l: usize },
    #[error("sampling frequency {f_s} Hz violates anti-aliasing bound 2*alpha = {bound} Hz")]
    Aliasing { f_s: f64, bound: f64 },
}

/// Physical and system constants for one simulation setup.
///
/// Angles are radians and SI units throughout; degrees appear only at the
/// CLI/CSV boundary.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    /// Carrier (array design) frequency, Hz.
    pub f_c: f64,
    /// Pilot tone frequency, Hz.
    pub f_p: f64,
    /// Baseband sampling frequency, Hz.
    pub f_s: f64,
    /// Orbital altitude above the surface, m.
    pub a_sat: f64,
    /// Satellite speed override, m/s. `None` derives it from circular-orbit
    /// mechanics at altitude `a_sat`.
    pub v_sat: Option<f64>,
    /// Earth radius, m.
    pub r_earth: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Minimum elevation angle beta, rad. The field of view is
    /// `[-pi/2 + beta, pi/2 - beta]`.
    pub beta: f64,
    /// Antenna elements in the uniform linear array.
    pub n_antennas: usize,
    /// Samples per pilot time slot (L).
    pub samples_per_slot: usize,
    /// Sub-vector length for spatially smoothed covariance (M).
    pub smoothing_window: usize,
    /// Master RNG seed.
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            f_c: 20e9,
            f_p: 20e9,
            f_s: 1e6,
            a_sat: 500e3,
            v_sat: None,
            r_earth: EARTH_RADIUS,
            c: SPEED_OF_LIGHT,
            beta: 10f64.to_radians(),
            n_antennas: 64,
            samples_per_slot: 64,
            smoothing_window: 32,
            seed: 42,
        }
    }
}

impl SystemConfig {
    /// Satellite speed: the explicit override if set, otherwise the circular
    /// orbit value at altitude `a_sat`.
    pub fn sat_speed(&self) -> f64 {
        self.v_sat
            .unwrap_or_else(|| orbital_velocity(self.a_sat, self.r_earth))
    }

    /// Half-width of the field of view, `pi/2 - beta`.
    pub fn fov_half_width(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 - self.beta
    }

    /// True if `theta` lies inside the field of view (inclusive).
    pub fn in_fov(&self, theta: f64) -> bool {
        theta.abs() <= self.fov_half_width() + 1e-12
    }

    /// Check every construction invariant, including the anti-aliasing bound
    /// `f_s > 2 * alpha`.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.f_c <= 0.0 {
            return Err(ConfigError::NonPositive("f_c"));
        }
        if self.f_p <= 0.0 {
            return Err(ConfigError::NonPositive("f_p"));
        }
        if self.f_s <= 0.0 {
            return Err(ConfigError::NonPositive("f_s"));
        }
        if self.a_sat <= 0.0 {
            return Err(ConfigError::NonPositive("a_sat"));
        }
        if self.r_earth <= 0.0 {
            return Err(ConfigError::NonPositive("r_earth"));
        }
        if self.c <= 0.0 {
            return Err(ConfigError::NonPositive("c"));
        }
        if let Some(v) = self.v_sat {
            if v <= 0.0 {
                return Err(ConfigError::NonPositive("v_sat"));
            }
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.beta) {
            return Err(ConfigError::BadElevation(self.beta));
        }
        if self.n_antennas == 0 {
            return Err(ConfigError::NoAntennas);
        }
        if self.samples_per_slot == 0 {
            return Err(ConfigError::NoSamples);
        }
        if self.smoothing_window == 0 || self.smoothing_window > self.samples_per_slot {
            return Err(ConfigError::BadSmoothing {
                m: self.smoothing_window,
                l: self.samples_per_slot,
            });
        }
        let alpha = doppler_scale(self.f_p, self.sat_speed(), self.r_earth, self.a_sat, self.c);
        if self.f_s <= 2.0 * alpha {
            return Err(ConfigError::Aliasing {
                f_s: self.f_s,
                bound: 2.0 * alpha,
            });
        }
        Ok(())
    }
}

/// Speed of a circular orbit at altitude `a_sat`: `sqrt(mu / (r_E + a_sat))`.
pub fn orbital_velocity(a_sat: f64, r_earth: f64) -> f64 {
    (EARTH_MU / (r_earth + a_sat)).sqrt()
}

/// Doppler scale `alpha = f_p * v_sat * r_E / (c * (r_E + a_sat))`, Hz.
///
/// `|f_D(theta)| <= alpha` for every angle, with equality only at the
/// (unreachable) horizon.
pub fn doppler_scale(f_p: f64, v_sat: f64, r_earth: f64, a_sat: f64, c: f64) -> f64 {
    f_p * v_sat * r_earth / (c * (r_earth + a_sat))
}

/// Sinusoidal angle-to-Doppler map and its inverse.
#[derive(Debug, Clone, Copy)]
pub struct DopplerModel {
    /// Doppler scale alpha, Hz.
    pub alpha: f64,
}

impl DopplerModel {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        DopplerModel {
            alpha: doppler_scale(cfg.f_p, cfg.sat_speed(), cfg.r_earth, cfg.a_sat, cfg.c),
        }
    }

    /// Doppler shift seen from a satellite at off-boresight angle `theta`:
    /// `-alpha * sin(theta)`. Positive angles (satellite past zenith, moving
    /// away) give negative shifts.
    pub fn doppler_from_angle(&self, theta: f64) -> f64 {
        -self.alpha * theta.sin()
    }

    /// Invert the Doppler map: `theta = -arcsin(f_hat / alpha)`.
    ///
    /// Noisy estimates slightly past `alpha` (within [`CLAMP_BAND`]) are
    /// clamped to the edge; gross violations are rejected.
    pub fn angle_from_doppler(&self, f_hat: f64) -> Result<f64, GeometryError> {
        let ratio = f_hat / self.alpha;
        if ratio.abs() > 1.0 + CLAMP_BAND {
            return Err(GeometryError::OutOfRange {
                f_hat,
                alpha: self.alpha,
            });
        }
        Ok(-ratio.clamp(-1.0, 1.0).asin())
    }
}

/// Doppler shift from the raw satellite-user-Earth geometry, used as an
/// independent cross-check of the sinusoidal model.
///
/// The Earth-center satellite angle is recovered from the law of sines,
/// `psi = theta + arcsin(r_E * sin(theta) / (r_E + a_sat))`, and the shift is
/// the radial-velocity projection `-(f_p * v_sat / c) * sin(psi - theta)`.
pub fn doppler_from_geometry(theta: f64, cfg: &SystemConfig) -> f64 {
    let psi = theta + (cfg.r_earth * theta.sin() / (cfg.r_earth + cfg.a_sat)).asin();
    -(cfg.f_p * cfg.sat_speed() / cfg.c) * (psi - theta).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn orbital_velocity_at_500km() {
        let v = orbital_velocity(500e3, EARTH_RADIUS);
        assert!(
            (v - 7616.5608).abs() < 1e-3,
            "expected ~7616.56 m/s, got {v}"
        );
    }

    #[test]
    fn orbital_velocity_decreases_with_altitude() {
        let mut last = f64::INFINITY;
        for a in [200e3, 500e3, 2_000e3, 20_000e3, 1e9] {
            let v = orbital_velocity(a, EARTH_RADIUS);
            assert!(v < last, "velocity must fall as altitude grows");
            last = v;
        }
    }

    #[test]
    fn orbital_velocity_sqrt_scaling() {
        // Doubling r_E + a_sat scales velocity by 1/sqrt(2).
        let a1 = 500e3;
        let a2 = 2.0 * (EARTH_RADIUS + a1) - EARTH_RADIUS;
        let ratio = orbital_velocity(a2, EARTH_RADIUS) / orbital_velocity(a1, EARTH_RADIUS);
        assert!((ratio - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn alpha_default_config() {
        let cfg = SystemConfig::default();
        let model = DopplerModel::from_config(&cfg);
        assert!(
            (model.alpha - 471146.3846).abs() < 1e-3,
            "alpha = {}",
            model.alpha
        );
    }

    #[test]
    fn alpha_zero_pilot() {
        assert_eq!(
            doppler_scale(0.0, 7616.6, EARTH_RADIUS, 500e3, SPEED_OF_LIGHT),
            0.0
        );
    }

    #[test]
    fn max_doppler_near_450khz() {
        // Quoted order of magnitude for 20 GHz / 500 km: ~450 kHz at the FOV
        // edge. The exact value depends on the assumed satellite speed.
        let cfg = SystemConfig::default();
        let model = DopplerModel::from_config(&cfg);
        let max_fd = model.alpha * cfg.fov_half_width().sin();
        assert!(
            (max_fd - 450e3).abs() <= 0.1 * 450e3,
            "max |f_D| = {max_fd} Hz not within 10% of 450 kHz"
        );
    }

    #[test]
    fn doppler_boresight_is_zero() {
        let model = DopplerModel { alpha: 4.711e5 };
        assert_eq!(model.doppler_from_angle(0.0), 0.0);
    }

    #[test]
    fn doppler_at_30_degrees() {
        let model = DopplerModel { alpha: 4.711e5 };
        let fd = model.doppler_from_angle(30f64.to_radians());
        assert!((fd + 2.3555e5).abs() < 1e-6, "f_D = {fd}");
    }

    #[test]
    fn doppler_sign_convention() {
        let model = DopplerModel { alpha: 4.711e5 };
        assert!(model.doppler_from_angle(0.3) < 0.0);
        assert!(model.doppler_from_angle(-0.3) > 0.0);
    }

    #[test]
    fn doppler_strictly_decreasing() {
        let model = DopplerModel { alpha: 4.711e5 };
        let mut last = f64::INFINITY;
        for i in 0..=1000 {
            let theta = -FRAC_PI_2 + std::f64::consts::PI * i as f64 / 1000.0;
            let fd = model.doppler_from_angle(theta);
            assert!(fd < last, "not strictly decreasing at theta = {theta}");
            last = fd;
        }
    }

    #[test]
    fn geometric_chain_at_80_degrees() {
        let cfg = SystemConfig::default();
        let fd = doppler_from_geometry(80f64.to_radians(), &cfg);
        assert!((fd + 463_988.612).abs() < 1e-3, "f_D = {fd}");
    }

    #[test]
    fn geometric_equals_sinusoidal_over_fov() {
        let cfg = SystemConfig::default();
        let model = DopplerModel::from_config(&cfg);
        let half = cfg.fov_half_width();
        for i in 0..10_000 {
            let theta = -half + 2.0 * half * i as f64 / 9_999.0;
            let geo = doppler_from_geometry(theta, &cfg);
            let sinus = model.doppler_from_angle(theta);
            assert!(
                (geo - sinus).abs() <= 1e-9 * model.alpha,
                "mismatch at theta = {theta}: {geo} vs {sinus}"
            );
        }
    }

    #[test]
    fn angle_from_doppler_zero() {
        let model = DopplerModel { alpha: 4.711e5 };
        assert_eq!(model.angle_from_doppler(0.0).unwrap(), 0.0);
    }

    #[test]
    fn angle_from_doppler_rejects_gross_overshoot() {
        let model = DopplerModel { alpha: 4.711e5 };
        assert!(model.angle_from_doppler(1.05 * model.alpha).is_err());
    }

    #[test]
    fn angle_from_doppler_clamps_within_band() {
        let model = DopplerModel { alpha: 4.711e5 };
        let theta = model.angle_from_doppler(1.005 * model.alpha).unwrap();
        assert!((theta + FRAC_PI_2).abs() < 1e-12);
        let theta = model.angle_from_doppler(-1.005 * model.alpha).unwrap();
        assert!((theta - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_aliasing_config() {
        let cfg = SystemConfig {
            f_s: 900e3, // below 2 * alpha ~= 942.3 kHz
            ..SystemConfig::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::Aliasing { .. })
        ));
        assert!(SystemConfig::default().validate().is_ok());
    }

    #[test]
    fn validate_rejects_bad_smoothing() {
        let cfg = SystemConfig {
            smoothing_window: 65,
            ..SystemConfig::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::BadSmoothing { .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_identity_on_fov(t in -1.0f64..1.0) {
            let cfg = SystemConfig::default();
            let model = DopplerModel::from_config(&cfg);
            let theta = t * cfg.fov_half_width();
            let back = model
                .angle_from_doppler(model.doppler_from_angle(theta))
                .unwrap();
            prop_assert!((back - theta).abs() <= 1e-12);
        }

        #[test]
        fn doppler_monotone_pairs(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assume!(a != b);
            let model = DopplerModel { alpha: 4.711e5 };
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let t_lo = lo * FRAC_PI_2;
            let t_hi = hi * FRAC_PI_2;
            prop_assert!(model.doppler_from_angle(t_lo) > model.doppler_from_angle(t_hi));
        }
    }
}

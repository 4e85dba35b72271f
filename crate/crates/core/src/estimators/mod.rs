//! One-shot angle estimators.
//!
//! All three estimators work from a single measurement slot: they estimate
//! the Doppler frequency of each satellite tone and invert the sinusoidal
//! Doppler map to recover angles. They differ in how the frequencies are
//! found:
//!
//! * [`fft_estimate`] picks the dominant peaks of a zero-padded magnitude
//!   spectrum; cheapest, quantized to the padded bin grid.
//! * [`mle_estimate`] maximizes the projection of the measurement onto the
//!   span of candidate Doppler tones over an angular grid; most accurate,
//!   cost exponential in the satellite count.
//! * [`root_music_estimate`] eigendecomposes a spatially smoothed covariance
//!   and roots the noise-subspace polynomial; grid-free, polynomial cost.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::linalg::LinalgError;

mod fft;
mod mle;
mod music;

pub use fft::{fft_estimate, fft_estimate_counted};
pub use mle::{mle_estimate, mle_estimate_counted, AngularGrid};
pub use music::{root_music_estimate, root_music_estimate_counted, spatial_smoothed_covariance};

/// Which estimator produced a set of angle estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMethod {
    Fft,
    Mle,
    RootMusic,
    /// Conventional beam-sweeping baseline (power scan over fixed beams).
    ConventionalSweep,
    /// Two-stage coarse/fine beam-sweeping baseline.
    HierarchicalSweep,
}

impl EstimationMethod {
    pub fn label(&self) -> &'static str {
        match self {
            EstimationMethod::Fft => "fft",
            EstimationMethod::Mle => "mle",
            EstimationMethod::RootMusic => "music",
            EstimationMethod::ConventionalSweep => "conventional",
            EstimationMethod::HierarchicalSweep => "hierarchical",
        }
    }
}

/// Non-fatal diagnostics attached to an estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorWarning {
    /// The signal/noise eigenvalue gap collapsed; the subspace split is
    /// unreliable but estimates are still returned.
    DegenerateSubspace { gap: f64 },
}

/// Angle estimates for `K` satellites, sorted by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleEstimates {
    /// Estimated off-boresight angles, rad, ascending.
    pub angles_rad: Vec<f64>,
    /// Estimated Doppler shifts paired with `angles_rad`, Hz.
    pub dopplers_hz: Vec<f64>,
    pub method: EstimationMethod,
    pub warnings: Vec<EstimatorWarning>,
}

impl AngleEstimates {
    /// Assemble estimates from unsorted (angle, doppler) pairs.
    pub fn from_pairs(
        mut pairs: Vec<(f64, f64)>,
        method: EstimationMethod,
        warnings: Vec<EstimatorWarning>,
    ) -> Self {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        AngleEstimates {
            angles_rad: pairs.iter().map(|p| p.0).collect(),
            dopplers_hz: pairs.iter().map(|p| p.1).collect(),
            method,
            warnings,
        }
    }
}

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("spectrum has {found} usable peaks, {requested} requested")]
    NotEnoughPeaks { found: usize, requested: usize },
    #[error("joint grid search over {n_grid}^{k} candidates exceeds the tractability guard")]
    GridTooLarge { n_grid: usize, k: usize },
    #[error("every candidate tone set was numerically singular")]
    SingularProjection,
    #[error("smoothing window m={m} must satisfy k < m <= l (k={k}, l={l})")]
    InvalidWindow { m: usize, l: usize, k: usize },
    #[error("noise-subspace polynomial rooting failed: {0}")]
    RootFindingFailed(#[from] LinalgError),
    #[error("only {found} roots near the unit circle, {requested} requested")]
    RootSelection { found: usize, requested: usize },
    #[error(transparent)]
    AngleMapping(#[from] GeometryError),
}

/// Geometric phase sum `sum_{l=0}^{n-1} exp(j * omega * l)`, evaluated in
/// closed form away from the removable singularity at `omega = 0 mod 2*pi`.
pub(crate) fn geometric_phase_sum(omega: f64, n: usize) -> Complex64 {
    let denom = (omega / 2.0).sin();
    if denom.abs() < 1e-9 {
        return (0..n)
            .map(|l| Complex64::from_polar(1.0, omega * l as f64))
            .sum();
    }
    let ratio = (n as f64 * omega / 2.0).sin() / denom;
    Complex64::from_polar(1.0, omega * (n - 1) as f64 / 2.0) * ratio
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamformer::rainbow_design;
    use crate::geometry::SystemConfig;
    use crate::signal::{synthesize, Measurement, Scenario};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn noiseless_measurement(angles: Vec<f64>, cfg: &SystemConfig) -> Measurement {
        let k = angles.len();
        let scenario = Scenario {
            angles,
            gains: vec![Complex64::new(1.0, 0.0); k],
            pilots: vec![Complex64::new(1.0, 0.0); k],
            snr_db: f64::INFINITY,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        synthesize(&scenario, &rainbow_design(cfg), cfg, &mut rng)
    }

    #[test]
    fn geometric_phase_sum_matches_direct() {
        for &n in &[1usize, 2, 17, 64] {
            for i in 0..200 {
                let omega = -8.0 + 16.0 * i as f64 / 199.0;
                let direct: Complex64 = (0..n)
                    .map(|l| Complex64::from_polar(1.0, omega * l as f64))
                    .sum();
                let closed = geometric_phase_sum(omega, n);
                assert!(
                    (direct - closed).norm() <= 1e-10 * (1.0 + direct.norm()),
                    "n={n} omega={omega}: {closed} vs {direct}"
                );
            }
        }
        // Removable singularity.
        for omega in [0.0, 1e-12, TAU, -TAU] {
            let s = geometric_phase_sum(omega, 64);
            assert!((s - Complex64::new(64.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn estimates_sorted_by_angle() {
        let est = AngleEstimates::from_pairs(
            vec![(0.5, -2.0), (-0.3, 1.0), (0.1, -0.5)],
            EstimationMethod::Fft,
            vec![],
        );
        assert_eq!(est.angles_rad, vec![-0.3, 0.1, 0.5]);
        assert_eq!(est.dopplers_hz, vec![1.0, -0.5, -2.0]);
    }

    // Operation counts must grow with the parameters each method's cost is
    // stated in: pad*L*log for the FFT path, L^3-class for root-MUSIC,
    // N_grid^K for the MLE grid search. Wall-clock plays no part.
    #[test]
    fn op_counts_follow_complexity_ordering() {
        let cfg = SystemConfig::default();
        let y = noiseless_measurement(vec![-0.4], &cfg);

        let (_, fft_ops) = fft_estimate_counted(&y, 1, 4, &cfg).unwrap();
        let (_, music_ops) = root_music_estimate_counted(&y, 1, 32, &cfg).unwrap();
        let grid = AngularGrid::uniform(&cfg, 2048);
        let (_, mle_ops) = mle_estimate_counted(&y, 1, &grid, &cfg).unwrap();
        assert!(
            fft_ops < music_ops && music_ops < mle_ops,
            "ascending complexity violated: fft {fft_ops}, music {music_ops}, mle {mle_ops}"
        );
    }

    #[test]
    fn fft_op_count_grows_linearithmically_in_padded_length() {
        let cfg = SystemConfig::default();
        let y = noiseless_measurement(vec![-0.4], &cfg);
        let (_, base) = fft_estimate_counted(&y, 1, 8, &cfg).unwrap();
        let (_, doubled) = fft_estimate_counted(&y, 1, 16, &cfg).unwrap();
        let ratio = doubled as f64 / base as f64;
        assert!((1.9..2.6).contains(&ratio), "fft growth ratio {ratio}");
    }

    #[test]
    fn music_op_count_grows_cubically_in_slot_length() {
        let small = SystemConfig::default();
        let large = SystemConfig {
            samples_per_slot: 128,
            smoothing_window: 64,
            ..SystemConfig::default()
        };
        let y_small = noiseless_measurement(vec![-0.4], &small);
        let y_large = noiseless_measurement(vec![-0.4], &large);
        let (_, base) = root_music_estimate_counted(&y_small, 1, 32, &small).unwrap();
        let (_, doubled) = root_music_estimate_counted(&y_large, 1, 64, &large).unwrap();
        let ratio = doubled as f64 / base as f64;
        assert!(ratio >= 4.0, "music growth ratio {ratio} not cubic-class");
    }

    #[test]
    fn mle_op_count_grows_with_grid_power_k() {
        let cfg = SystemConfig::default();
        let y1 = noiseless_measurement(vec![-0.4], &cfg);
        let y2 = noiseless_measurement(vec![-0.4, 0.6], &cfg);

        let g1 = AngularGrid::uniform(&cfg, 1024);
        let g2 = AngularGrid::uniform(&cfg, 2048);
        let (_, a) = mle_estimate_counted(&y1, 1, &g1, &cfg).unwrap();
        let (_, b) = mle_estimate_counted(&y1, 1, &g2, &cfg).unwrap();
        let linear = b as f64 / a as f64;
        assert!((1.8..2.2).contains(&linear), "k=1 growth {linear}");

        let g3 = AngularGrid::uniform(&cfg, 256);
        let g4 = AngularGrid::uniform(&cfg, 512);
        let (_, c) = mle_estimate_counted(&y2, 2, &g3, &cfg).unwrap();
        let (_, d) = mle_estimate_counted(&y2, 2, &g4, &cfg).unwrap();
        let quadratic = d as f64 / c as f64;
        assert!((3.2..4.8).contains(&quadratic), "k=2 growth {quadratic}");
    }
}

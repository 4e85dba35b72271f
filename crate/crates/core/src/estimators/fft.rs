//! FFT peak picking over the zero-padded magnitude spectrum.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{AngleEstimates, EstimationMethod, EstimatorError};
use crate::geometry::{DopplerModel, SystemConfig};
use crate::signal::Measurement;

/// Estimate `k` satellite angles from the `k` dominant spectral peaks.
///
/// The measurement is zero-padded to `pad_factor * L` before the transform,
/// shrinking the bin spacing to `f_s / (pad_factor * L)`. Peaks are local
/// maxima of the circular magnitude spectrum, taken greedily by magnitude
/// with an exclusion zone of one unpadded bin around every accepted peak so
/// a single tone's mainlobe cannot claim two of them.
pub fn fft_estimate(
    y: &Measurement,
    k: usize,
    pad_factor: usize,
    cfg: &SystemConfig,
) -> Result<AngleEstimates, EstimatorError> {
    fft_estimate_counted(y, k, pad_factor, cfg).map(|(est, _)| est)
}

/// [`fft_estimate`] plus a count of the dominant-loop operations performed
/// (the delegated transform is tallied at its standard `n log2 n` cost).
pub fn fft_estimate_counted(
    y: &Measurement,
    k: usize,
    pad_factor: usize,
    cfg: &SystemConfig,
) -> Result<(AngleEstimates, u64), EstimatorError> {
    assert!(k >= 1, "need at least one satellite to estimate");
    assert!(pad_factor >= 1, "pad factor must be at least 1");
    let l = y.samples.len();
    let n = pad_factor * l;
    let mut ops: u64 = (n as u64) * (usize::BITS - (n - 1).leading_zeros()) as u64;

    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..l].copy_from_slice(&y.samples);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mag: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();
    ops += n as u64;

    // Circular local maxima, strict against the left neighbor so flat pairs
    // are not double counted.
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = mag[(i + n - 1) % n];
            let next = mag[(i + 1) % n];
            mag[i] > prev && mag[i] >= next
        })
        .collect();
    ops += n as u64;
    peaks.sort_by(|&a, &b| mag[b].partial_cmp(&mag[a]).unwrap());

    let mut accepted: Vec<usize> = Vec::with_capacity(k);
    for &p in &peaks {
        ops += 1;
        let clear = accepted.iter().all(|&q| {
            let d = p.abs_diff(q);
            d.min(n - d) > pad_factor
        });
        if clear {
            accepted.push(p);
            if accepted.len() == k {
                break;
            }
        }
    }
    if accepted.len() < k {
        return Err(EstimatorError::NotEnoughPeaks {
            found: accepted.len(),
            requested: k,
        });
    }

    let model = DopplerModel::from_config(cfg);
    let mut pairs = Vec::with_capacity(k);
    for &bin in &accepted {
        // Wrap the bin index to the signed frequency range (-f_s/2, f_s/2].
        let signed = if bin <= n / 2 {
            bin as f64
        } else {
            bin as f64 - n as f64
        };
        let f_hat = signed * cfg.f_s / n as f64;
        pairs.push((model.angle_from_doppler(f_hat)?, f_hat));
    }
    Ok((
        AngleEstimates::from_pairs(pairs, EstimationMethod::Fft, vec![]),
        ops,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamformer::rainbow_design;
    use crate::signal::{synthesize, Scenario};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    fn noiseless(angles: Vec<f64>, cfg: &SystemConfig) -> Measurement {
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
    fn bin_aligned_tone_recovered_exactly() {
        let cfg = cfg();
        let model = DopplerModel::from_config(&cfg);
        // Doppler exactly on unpadded bin 7: f_D = 7 * f_s / L.
        let f_d = 7.0 * cfg.f_s / 64.0;
        let theta = model.angle_from_doppler(f_d).unwrap();
        let y = noiseless(vec![theta], &cfg);
        let est = fft_estimate(&y, 1, 4, &cfg).unwrap();
        assert!((est.dopplers_hz[0] - f_d).abs() < 1e-9);
        assert!((est.angles_rad[0] - theta).abs() < 1e-12);
    }

    #[test]
    fn boresight_maps_to_zero() {
        let cfg = cfg();
        let y = noiseless(vec![0.0], &cfg);
        let est = fft_estimate(&y, 1, 4, &cfg).unwrap();
        assert_eq!(est.angles_rad, vec![0.0]);
        assert_eq!(est.dopplers_hz, vec![0.0]);
    }

    #[test]
    fn off_bin_error_bounded_by_half_padded_bin() {
        let cfg = cfg();
        let model = DopplerModel::from_config(&cfg);
        let pad = 4;
        let half_bin = cfg.f_s / (2.0 * pad as f64 * 64.0);
        for &theta in &[-1.2, -0.33, 0.011, 0.47, 1.05] {
            let y = noiseless(vec![theta], &cfg);
            let est = fft_estimate(&y, 1, pad, &cfg).unwrap();
            let f_d = model.doppler_from_angle(theta);
            assert!(
                (est.dopplers_hz[0] - f_d).abs() <= half_bin,
                "theta {theta}: {} vs {}",
                est.dopplers_hz[0],
                f_d
            );
        }
    }

    #[test]
    fn two_well_separated_tones() {
        let cfg = cfg();
        let model = DopplerModel::from_config(&cfg);
        let angles = vec![-30f64.to_radians(), 40f64.to_radians()];
        let y = noiseless(angles.clone(), &cfg);
        let est = fft_estimate(&y, 2, 4, &cfg).unwrap();
        let half_bin = cfg.f_s / (2.0 * 4.0 * 64.0);
        for (truth, hat) in angles.iter().zip(&est.angles_rad) {
            let f_true = model.doppler_from_angle(*truth);
            let width = half_bin / (model.alpha * truth.cos());
            assert!((hat - truth).abs() <= width, "truth {truth} got {hat}");
            let _ = f_true;
        }
    }

    #[test]
    fn zero_signal_has_no_peaks() {
        let cfg = cfg();
        let y = Measurement {
            samples: vec![Complex64::new(0.0, 0.0); 64],
            noise_var: 0.0,
        };
        assert!(matches!(
            fft_estimate(&y, 1, 4, &cfg),
            Err(EstimatorError::NotEnoughPeaks { .. })
        ));
    }

    #[test]
    fn exclusion_zone_blocks_mainlobe_shoulder() {
        // A single strong tone: requesting two peaks must not return two
        // estimates within one unpadded bin of each other.
        let cfg = cfg();
        let y = noiseless(vec![0.31], &cfg);
        if let Ok(est) = fft_estimate(&y, 2, 4, &cfg) {
            let df = (est.dopplers_hz[0] - est.dopplers_hz[1]).abs();
            assert!(df > cfg.f_s / 64.0, "peaks {df} Hz apart");
        }
    }
}

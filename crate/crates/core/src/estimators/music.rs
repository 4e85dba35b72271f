//! Root-MUSIC on a spatially smoothed single-snapshot covariance.
//!
//! A single measurement vector gives a rank-1 sample covariance, useless for
//! subspace methods. Smoothing over the `L - M + 1` overlapping length-`M`
//! sub-vectors restores rank, after which the noise subspace of the smoothed
//! covariance defines a conjugate-palindromic polynomial whose near-unit-
//! circle roots sit at the tone frequencies.

use num_complex::Complex64;

use super::{AngleEstimates, EstimationMethod, EstimatorError, EstimatorWarning};
use crate::geometry::{DopplerModel, SystemConfig};
use crate::linalg::{eigh, find_roots};
use crate::signal::Measurement;

/// Two candidate roots closer than this in angle (rad on the unit circle)
/// are treated as numerical copies of the same root.
const ROOT_ANGLE_DEDUPE: f64 = 1e-6;

/// Relative eigenvalue gap below which the signal/noise subspace split is
/// flagged as degenerate.
const DEGENERATE_GAP: f64 = 1e-12;

/// Spatially smoothed covariance: the sum of outer products of all
/// overlapping length-`m` sub-vectors of the measurement.
pub fn spatial_smoothed_covariance(y: &Measurement, m: usize) -> Vec<Vec<Complex64>> {
    let l = y.samples.len();
    assert!(m >= 1 && m <= l, "window must satisfy 1 <= M <= L");
    let mut r = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for start in 0..=(l - m) {
        let sub = &y.samples[start..start + m];
        for (a, ra) in r.iter_mut().enumerate() {
            for (b, rab) in ra.iter_mut().enumerate() {
                *rab += sub[a] * sub[b].conj();
            }
        }
    }
    r
}

/// Estimate `k` satellite angles by rooting the noise-subspace polynomial of
/// the spatially smoothed covariance.
pub fn root_music_estimate(
    y: &Measurement,
    k: usize,
    m: usize,
    cfg: &SystemConfig,
) -> Result<AngleEstimates, EstimatorError> {
    root_music_estimate_counted(y, k, m, cfg).map(|(est, _)| est)
}

/// [`root_music_estimate`] plus a count of dominant-loop operations.
pub fn root_music_estimate_counted(
    y: &Measurement,
    k: usize,
    m: usize,
    cfg: &SystemConfig,
) -> Result<(AngleEstimates, u64), EstimatorError> {
    let l = y.samples.len();
    if k >= m || m > l {
        return Err(EstimatorError::InvalidWindow { m, l, k });
    }
    let mut ops: u64 = 0;

    let r = spatial_smoothed_covariance(y, m);
    ops += ((l - m + 1) * m * m) as u64;

    let eig = eigh(&r);
    ops += (m * m * m) as u64;
    let scale = eig.values[0].max(f64::MIN_POSITIVE);
    let gap = (eig.values[k - 1] - eig.values[k]) / scale;
    let mut warnings = Vec::new();
    if gap < DEGENERATE_GAP {
        warnings.push(EstimatorWarning::DegenerateSubspace { gap });
    }

    // Noise-subspace projector C = E_n E_n^H from the M - K smallest
    // eigenvectors.
    let mut c = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for vec in &eig.vectors[k..] {
        for (a, ca) in c.iter_mut().enumerate() {
            for (b, cab) in ca.iter_mut().enumerate() {
                *cab += vec[a] * vec[b].conj();
            }
        }
    }
    ops += ((m - k) * m * m) as u64;

    // Coefficient of z^(d + M - 1) is the sum of the d-th diagonal of C,
    // d in [-(M-1), M-1]; the result is a degree-2(M-1) polynomial whose
    // evaluation on the unit circle equals a(z)^H C a(z).
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m - 1];
    for (i, ci) in c.iter().enumerate() {
        for (j, cij) in ci.iter().enumerate() {
            coeffs[j + m - 1 - i] += cij;
        }
    }
    ops += (m * m) as u64;

    let roots = find_roots(&coeffs)?;
    ops += (roots.len() * roots.len()) as u64;

    // Rank roots on or inside the unit circle by closeness to it; collapse
    // numerical duplicates of split double roots.
    let mut candidates: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|z| z.norm() > 0.0 && z.norm() <= 1.0 + 1e-9)
        .collect();
    candidates.sort_by(|a, b| {
        let da = (a.norm() - 1.0).abs();
        let db = (b.norm() - 1.0).abs();
        da.partial_cmp(&db).unwrap()
    });
    let mut picked: Vec<Complex64> = Vec::with_capacity(k);
    for z in candidates {
        if picked.len() == k {
            break;
        }
        let duplicate = picked.iter().any(|p| {
            let mut d = (z.arg() - p.arg()).abs();
            if d > std::f64::consts::PI {
                d = std::f64::consts::TAU - d;
            }
            d < ROOT_ANGLE_DEDUPE
        });
        if !duplicate {
            picked.push(z);
        }
    }
    if picked.len() < k {
        return Err(EstimatorError::RootSelection {
            found: picked.len(),
            requested: k,
        });
    }

    let model = DopplerModel::from_config(cfg);
    let mut pairs = Vec::with_capacity(k);
    for z in picked {
        let f_hat = cfg.f_s * z.arg() / std::f64::consts::TAU;
        pairs.push((model.angle_from_doppler(f_hat)?, f_hat));
    }
    Ok((
        AngleEstimates::from_pairs(pairs, EstimationMethod::RootMusic, warnings),
        ops,
    ))
}

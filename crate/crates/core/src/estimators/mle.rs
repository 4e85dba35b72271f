//! Maximum likelihood angle estimation over an angular grid.
//!
//! The estimator maximizes `y^H F (F^H F)^{-1} F^H y`, the energy of the
//! measurement projected onto the span of the candidate Doppler tones. The
//! joint search is exhaustive for one or two satellites; beyond that, cost
//! grows as `N_grid^K`, so a greedy sequential selection with one round of
//! coordinate refinement is used instead.

use num_complex::Complex64;
use std::f64::consts::TAU;

use super::{geometric_phase_sum, AngleEstimates, EstimationMethod, EstimatorError};
use crate::geometry::{DopplerModel, SystemConfig};
use crate::linalg::solve_hermitian;
use crate::signal::Measurement;

/// Candidate tone sets whose Gram matrix condition number exceeds this are
/// skipped as singular projections.
const CONDITION_LIMIT: f64 = 1e12;

/// Exhaustive joint search is refused beyond this many candidate sets.
const JOINT_SEARCH_GUARD: f64 = 1e8;

/// Uniform angular search grid over the field of view.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    /// Grid angles, rad, ascending.
    pub points: Vec<f64>,
}

impl AngularGrid {
    /// `n` uniformly spaced angles on the half-open lattice
    /// `-fov + i * (2 fov / n)`, the same convention as frequency bins.
    /// Round fractions of the field of view land exactly on grid points;
    /// only angles in the final half step below the upper edge are farther
    /// than half a step from the lattice.
    pub fn uniform(cfg: &SystemConfig, n: usize) -> Self {
        assert!(n >= 2, "grid needs at least two points");
        let half = cfg.fov_half_width();
        let step = 2.0 * half / n as f64;
        let points = (0..n).map(|i| -half + step * i as f64).collect();
        AngularGrid { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Spacing between adjacent grid points, rad.
    pub fn step(&self) -> f64 {
        (self.points[self.points.len() - 1] - self.points[0]) / (self.points.len() - 1) as f64
    }
}

/// Maximum likelihood estimate of `k` satellite angles over `grid`.
pub fn mle_estimate(
    y: &Measurement,
    k: usize,
    grid: &AngularGrid,
    cfg: &SystemConfig,
) -> Result<AngleEstimates, EstimatorError> {
    mle_estimate_counted(y, k, grid, cfg).map(|(est, _)| est)
}

/// [`mle_estimate`] plus a count of dominant-loop operations.
pub fn mle_estimate_counted(
    y: &Measurement,
    k: usize,
    grid: &AngularGrid,
    cfg: &SystemConfig,
) -> Result<(AngleEstimates, u64), EstimatorError> {
    assert!(k >= 1, "need at least one satellite to estimate");
    let n_grid = grid.len();
    let l = y.samples.len();
    let model = DopplerModel::from_config(cfg);
    let mut ops: u64 = 0;

    if k <= 2 && (n_grid as f64).powi(k as i32) > JOINT_SEARCH_GUARD {
        return Err(EstimatorError::GridTooLarge { n_grid, k });
    }

    // Per grid point: normalized Doppler phase increment and tone correlation
    // f(theta_i)^H y.
    let omegas: Vec<f64> = grid
        .points
        .iter()
        .map(|&theta| TAU * model.doppler_from_angle(theta) / cfg.f_s)
        .collect();
    let corr: Vec<Complex64> = omegas
        .iter()
        .map(|&omega| {
            ops += l as u64;
            y.samples
                .iter()
                .enumerate()
                .map(|(idx, s)| s * Complex64::from_polar(1.0, -omega * idx as f64))
                .sum()
        })
        .collect();

    let selected: Vec<usize> = match k {
        1 => {
            let best = argmax(corr.iter().map(|c| c.norm_sqr()));
            vec![best]
        }
        2 => {
            let lf = l as f64;
            let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
            let mut feasible = false;
            for i in 0..n_grid {
                for j in (i + 1)..n_grid {
                    ops += 1;
                    let g = geometric_phase_sum(omegas[j] - omegas[i], l);
                    let gn = g.norm();
                    // Gram eigenvalues are L +/- |g|.
                    if lf - gn <= 0.0 || (lf + gn) / (lf - gn) > CONDITION_LIMIT {
                        continue;
                    }
                    feasible = true;
                    let det = lf * lf - gn * gn;
                    let cross = (g * corr[i].conj() * corr[j]).re;
                    let obj =
                        (lf * (corr[i].norm_sqr() + corr[j].norm_sqr()) - 2.0 * cross) / det;
                    if obj > best.0 {
                        best = (obj, i, j);
                    }
                }
            }
            if !feasible {
                return Err(EstimatorError::SingularProjection);
            }
            vec![best.1, best.2]
        }
        _ => greedy_select(k, &omegas, &corr, l, &mut ops)?,
    };

    let pairs = selected
        .iter()
        .map(|&i| {
            let theta = grid.points[i];
            (theta, model.doppler_from_angle(theta))
        })
        .collect();
    Ok((
        AngleEstimates::from_pairs(pairs, EstimationMethod::Mle, vec![]),
        ops,
    ))
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, v) in values.enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    best.1
}

/// Projection objective for the tone set `indices`, or `None` when the Gram
/// matrix is too ill-conditioned to trust.
fn projection_objective(
    indices: &[usize],
    omegas: &[f64],
    corr: &[Complex64],
    l: usize,
    ops: &mut u64,
) -> Option<f64> {
    let t = indices.len();
    *ops += (t * t + t * t * t) as u64;
    let gram: Vec<Vec<Complex64>> = indices
        .iter()
        .map(|&a| {
            indices
                .iter()
                .map(|&b| geometric_phase_sum(omegas[b] - omegas[a], l))
                .collect()
        })
        .collect();
    let rhs: Vec<Complex64> = indices.iter().map(|&a| corr[a]).collect();
    let (u, cond) = solve_hermitian(&gram, &rhs);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return None;
    }
    Some(
        rhs.iter()
            .zip(&u)
            .map(|(b, ui)| (b.conj() * ui).re)
            .sum(),
    )
}

/// Greedy sequential selection followed by one round of coordinate
/// refinement, for joint searches too large to enumerate.
fn greedy_select(
    k: usize,
    omegas: &[f64],
    corr: &[Complex64],
    l: usize,
    ops: &mut u64,
) -> Result<Vec<usize>, EstimatorError> {
    let n_grid = omegas.len();
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n_grid {
            if selected.contains(&i) {
                continue;
            }
            let mut candidate = selected.clone();
            candidate.push(i);
            if let Some(obj) = projection_objective(&candidate, omegas, corr, l, ops) {
                if best.is_none_or(|(b, _)| obj > b) {
                    best = Some((obj, i));
                }
            }
        }
        let (_, idx) = best.ok_or(EstimatorError::SingularProjection)?;
        selected.push(idx);
    }
    // One coordinate-refinement pass: re-optimize each tone holding the
    // others fixed.
    for slot in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n_grid {
            if selected.iter().enumerate().any(|(s, &v)| s != slot && v == i) {
                continue;
            }
            let mut candidate = selected.clone();
            candidate[slot] = i;
            if let Some(obj) = projection_objective(&candidate, omegas, corr, l, ops) {
                if best.is_none_or(|(b, _)| obj > b) {
                    best = Some((obj, i));
                }
            }
        }
        if let Some((_, idx)) = best {
            selected[slot] = idx;
        }
    }
    Ok(selected)
}

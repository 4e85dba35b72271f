//! Time-domain beam-sweeping acquisition baselines.
//!
//! Both baselines spend their time-slot budget scanning narrowband beams
//! across the field of view and read satellite directions off the highest
//! received powers. They are what rainbow beamforming replaces: one slot of
//! rainbow reception covers the angular range these methods need many slots
//! to sweep.

use rand::Rng;

use crate::beamformer::conventional_design;
use crate::estimators::{AngleEstimates, EstimationMethod};
use crate::geometry::{DopplerModel, SystemConfig};
use crate::signal::{synthesize, Scenario};

/// Which stage of a sweep a plan describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStage {
    /// One flat sweep of the whole field of view.
    Single,
    /// First stage of the hierarchical search (coarse grid).
    Coarse,
    /// Second stage of the hierarchical search (fine grid inside a window).
    Fine,
}

/// A set of beam pointing directions for a sweep stage.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    /// Time slots this plan consumes (one per beam).
    pub n_ts: usize,
    /// Beam centers, rad.
    pub beam_centers: Vec<f64>,
    pub stage: SweepStage,
}

/// Uniform sweep: `n_ts` beams with step `(pi - 2*beta) / n_ts`, centered in
/// their segments, covering the field of view.
pub fn sweep_beams(n_ts: usize, cfg: &SystemConfig) -> SweepPlan {
    assert!(n_ts >= 1, "sweep needs at least one slot");
    let span = std::f64::consts::PI - 2.0 * cfg.beta;
    let step = span / n_ts as f64;
    let lo = -std::f64::consts::FRAC_PI_2 + cfg.beta;
    let beam_centers = (1..=n_ts).map(|m| lo + (m as f64 - 0.5) * step).collect();
    SweepPlan {
        n_ts,
        beam_centers,
        stage: SweepStage::Single,
    }
}

/// Received power in one slot when pointing a conventional beam at `center`.
fn slot_power<R: Rng>(
    center: f64,
    scenario: &Scenario,
    cfg: &SystemConfig,
    rng: &mut R,
) -> f64 {
    let design = conventional_design(center);
    let y = synthesize(scenario, &design, cfg, rng);
    y.samples.iter().map(|s| s.norm_sqr()).sum()
}

/// Indices of the `k` largest powers, descending; ties resolved by slot order.
fn top_k_indices(powers: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..powers.len()).collect();
    order.sort_by(|&a, &b| powers[b].partial_cmp(&powers[a]).unwrap().then(a.cmp(&b)));
    order.truncate(k);
    order
}

fn estimates_from_angles(
    angles: Vec<f64>,
    cfg: &SystemConfig,
    method: EstimationMethod,
) -> AngleEstimates {
    let model = DopplerModel::from_config(cfg);
    let pairs = angles
        .into_iter()
        .map(|theta| (theta, model.doppler_from_angle(theta)))
        .collect();
    AngleEstimates::from_pairs(pairs, method, vec![])
}

/// Conventional sweep: scan `n_ts` uniform beams, return the centers of the
/// `k` highest-power slots. Fewer slots than satellites pads the remaining
/// estimates with boresight.
pub fn conventional_sweep<R: Rng>(
    scenario: &Scenario,
    n_ts: usize,
    k: usize,
    cfg: &SystemConfig,
    rng: &mut R,
) -> AngleEstimates {
    let (est, slots) = conventional_sweep_with_slots(scenario, n_ts, k, cfg, rng);
    debug_assert!(slots <= n_ts);
    est
}

/// [`conventional_sweep`] also reporting the slots actually consumed.
pub fn conventional_sweep_with_slots<R: Rng>(
    scenario: &Scenario,
    n_ts: usize,
    k: usize,
    cfg: &SystemConfig,
    rng: &mut R,
) -> (AngleEstimates, usize) {
    assert!(n_ts >= 1 && k >= 1);
    let plan = sweep_beams(n_ts, cfg);
    let mut slots_used = 0usize;
    let powers: Vec<f64> = plan
        .beam_centers
        .iter()
        .map(|&c| {
            slots_used += 1;
            slot_power(c, scenario, cfg, rng)
        })
        .collect();
    let mut angles: Vec<f64> = top_k_indices(&powers, k)
        .into_iter()
        .map(|i| plan.beam_centers[i])
        .collect();
    angles.resize(k, 0.0);
    (
        estimates_from_angles(angles, cfg, EstimationMethod::ConventionalSweep),
        slots_used,
    )
}

/// Two-stage hierarchical sweep: half the budget sweeps the field of view at
/// double step, then the remaining slots are split across the `k` coarse
/// candidates for fine sweeps of their `+/- step` windows.
pub fn hierarchical_sweep<R: Rng>(
    scenario: &Scenario,
    n_ts: usize,
    k: usize,
    cfg: &SystemConfig,
    rng: &mut R,
) -> AngleEstimates {
    let (est, slots) = hierarchical_sweep_with_slots(scenario, n_ts, k, cfg, rng);
    debug_assert!(slots <= n_ts);
    est
}

/// [`hierarchical_sweep`] also reporting the slots actually consumed.
pub fn hierarchical_sweep_with_slots<R: Rng>(
    scenario: &Scenario,
    n_ts: usize,
    k: usize,
    cfg: &SystemConfig,
    rng: &mut R,
) -> (AngleEstimates, usize) {
    assert!(n_ts >= 1 && k >= 1);
    if n_ts < 2 {
        // A single slot cannot run two stages; the estimate degenerates to
        // boresight.
        return (
            estimates_from_angles(vec![0.0; k], cfg, EstimationMethod::HierarchicalSweep),
            0,
        );
    }
    let span = std::f64::consts::PI - 2.0 * cfg.beta;
    let step = span / n_ts as f64;
    let half_fov = cfg.fov_half_width();
    let mut slots_used = 0usize;

    // Stage 1: coarse sweep with step 2 * step over floor(n_ts / 2) slots.
    let n_coarse = n_ts / 2;
    let lo = -half_fov;
    let coarse = SweepPlan {
        n_ts: n_coarse,
        beam_centers: (1..=n_coarse)
            .map(|m| lo + (m as f64 - 0.5) * 2.0 * step)
            .collect(),
        stage: SweepStage::Coarse,
    };
    let coarse_powers: Vec<f64> = coarse
        .beam_centers
        .iter()
        .map(|&c| {
            slots_used += 1;
            slot_power(c, scenario, cfg, rng)
        })
        .collect();
    let mut candidates: Vec<f64> = top_k_indices(&coarse_powers, k)
        .into_iter()
        .map(|i| coarse.beam_centers[i])
        .collect();
    candidates.resize(k, 0.0);

    // Stage 2: floor(n_ts / (2k)) fine slots per candidate over the window
    // [candidate - step, candidate + step], endpoints included.
    let per_candidate = n_ts / (2 * k);
    let angles: Vec<f64> = candidates
        .into_iter()
        .map(|center| {
            if per_candidate == 0 {
                return center;
            }
            let fine = SweepPlan {
                n_ts: per_candidate,
                beam_centers: if per_candidate == 1 {
                    vec![center]
                } else {
                    (0..per_candidate)
                        .map(|i| {
                            let t = i as f64 / (per_candidate - 1) as f64;
                            (center - step + 2.0 * step * t).clamp(-half_fov, half_fov)
                        })
                        .collect()
                },
                stage: SweepStage::Fine,
            };
            let powers: Vec<f64> = fine
                .beam_centers
                .iter()
                .map(|&c| {
                    slots_used += 1;
                    slot_power(c, scenario, cfg, rng)
                })
                .collect();
            fine.beam_centers[top_k_indices(&powers, 1)[0]]
        })
        .collect();
    (
        estimates_from_angles(angles, cfg, EstimationMethod::HierarchicalSweep),
        slots_used,
    )
}

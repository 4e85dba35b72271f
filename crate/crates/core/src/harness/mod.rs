//! Monte Carlo experiment runner: error metrics, seeded trials and CSV
//! emitters for the gain-profile, single-satellite RMSE and multi-satellite
//! sweep-comparison experiments.
//!
//! Determinism contract: every trial derives its own RNG stream from
//! `hash(master_seed, trial_index)`, so per-trial results are independent of
//! execution order, and identical configurations produce byte-identical CSV
//! output. Angles and RMSE values cross the CSV boundary in degrees.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::baselines::{conventional_sweep, hierarchical_sweep};
use crate::beamformer::{
    bf_gain, conventional_design, gain_loss_approx, gain_loss_exact, rainbow_design,
};
use crate::bounds::{rcrb_angle, BoundsError};
use crate::estimators::{
    fft_estimate, mle_estimate, root_music_estimate, AngleEstimates, AngularGrid,
    EstimationMethod, EstimatorError,
};
use crate::geometry::{ConfigError, DopplerModel, SystemConfig};
use crate::signal::{synthesize, synthesize_averaged, Scenario, ScenarioError};

mod config;

pub use config::{apply_config_file, ConfigFileError};

/// Worst admissible per-satellite angle error, rad. Trials whose estimator
/// fails outright are scored at this value per satellite and flagged in the
/// error-count columns.
pub const MAX_ANGLE_ERROR: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("truth and estimate counts differ: {truth} vs {estimate}")]
    LengthMismatch { truth: usize, estimate: usize },
    #[error("experiment spec invalid: {0}")]
    BadSpec(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which experiment an [`ExperimentSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    GainProfile,
    SingleSatRmse,
    MultiSatVsSlots,
}

/// Estimator selection for the rainbow acquisition columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSelection {
    Fft,
    Mle,
    Music,
    All,
}

impl MethodSelection {
    /// Concrete estimators this selection expands to, in fixed order.
    pub fn methods(&self) -> Vec<EstimationMethod> {
        match self {
            MethodSelection::Fft => vec![EstimationMethod::Fft],
            MethodSelection::Mle => vec![EstimationMethod::Mle],
            MethodSelection::Music => vec![EstimationMethod::RootMusic],
            MethodSelection::All => vec![
                EstimationMethod::Fft,
                EstimationMethod::Mle,
                EstimationMethod::RootMusic,
            ],
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "fft" => Some(MethodSelection::Fft),
            "mle" => Some(MethodSelection::Mle),
            "music" => Some(MethodSelection::Music),
            "all" => Some(MethodSelection::All),
            _ => None,
        }
    }
}

/// Everything a Monte Carlo experiment needs beyond the system constants.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Trials per grid point.
    pub trials: usize,
    /// SNR grid for the single-satellite experiment, dB.
    pub snr_grid_db: Vec<f64>,
    /// Slot-budget grid for the multi-satellite experiment.
    pub n_ts_grid: Vec<usize>,
    /// Multi-satellite scenario template angles, degrees.
    pub angles_deg: Vec<f64>,
    /// Single-satellite template angle, degrees.
    pub single_angle_deg: f64,
    /// Fixed effective SNR for the multi-satellite experiment, dB.
    pub snr_db: f64,
    pub master_seed: u64,
    pub method: MethodSelection,
    /// FFT zero-padding factor.
    pub pad_factor: usize,
    /// MLE angular grid size.
    pub n_grid: usize,
}

impl ExperimentSpec {
    pub fn defaults(kind: ExperimentKind, cfg: &SystemConfig) -> Self {
        ExperimentSpec {
            kind,
            trials: 1000,
            snr_grid_db: (0..=6).map(|i| 5.0 * i as f64).collect(),
            n_ts_grid: vec![1, 4, 16, 64, 256, 1024],
            angles_deg: vec![-40.0, 5.0, 50.0],
            single_angle_deg: -45.0,
            snr_db: 15.0,
            master_seed: cfg.seed,
            method: match kind {
                ExperimentKind::MultiSatVsSlots => MethodSelection::Music,
                _ => MethodSelection::All,
            },
            pad_factor: 4,
            n_grid: 2048,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::BadSpec("trials must be >= 1"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(HarnessError::BadSpec("snr grid is empty"));
        }
        if self.n_ts_grid.is_empty() || self.n_ts_grid.contains(&0) {
            return Err(HarnessError::BadSpec("slot grid must be non-empty, all >= 1"));
        }
        if self.pad_factor == 0 {
            return Err(HarnessError::BadSpec("pad factor must be >= 1"));
        }
        if self.n_grid < 2 {
            return Err(HarnessError::BadSpec("mle grid needs at least two points"));
        }
        Ok(())
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-trial seed: two splitmix64 rounds over (master, index).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut state = master;
    let first = splitmix64(&mut state);
    let mut mixed = first ^ index;
    splitmix64(&mut mixed)
}

/// Estimates matched against ground truth.
#[derive(Debug, Clone)]
pub struct AcquisitionResult {
    pub estimates: AngleEstimates,
    /// Matched absolute error per truth angle, rad.
    pub matched_error_rad: Vec<f64>,
    /// Sum of matched errors, rad.
    pub total_error_rad: f64,
}

/// Optimal (minimum total absolute error) bijective matching of estimates to
/// truth angles. Exhaustive over permutations for up to six satellites;
/// beyond that the sorted matching is used, which is optimal for absolute
/// error on a line.
pub fn match_and_score(
    truth: &[f64],
    estimates: &AngleEstimates,
) -> Result<AcquisitionResult, HarnessError> {
    let est = &estimates.angles_rad;
    if truth.len() != est.len() {
        return Err(HarnessError::LengthMismatch {
            truth: truth.len(),
            estimate: est.len(),
        });
    }
    let k = truth.len();
    let assignment: Vec<usize> = if k <= 6 {
        best_permutation(truth, est)
    } else {
        sorted_assignment(truth, est)
    };
    let matched_error_rad: Vec<f64> = truth
        .iter()
        .zip(&assignment)
        .map(|(t, &j)| (est[j] - t).abs())
        .collect();
    let total_error_rad = matched_error_rad.iter().sum();
    Ok(AcquisitionResult {
        estimates: estimates.clone(),
        matched_error_rad,
        total_error_rad,
    })
}

fn best_permutation(truth: &[f64], est: &[f64]) -> Vec<usize> {
    let k = truth.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: (f64, Vec<usize>) = (f64::INFINITY, perm.clone());
    permute(&mut perm, 0, truth, est, &mut best);
    best.1
}

fn permute(
    perm: &mut Vec<usize>,
    depth: usize,
    truth: &[f64],
    est: &[f64],
    best: &mut (f64, Vec<usize>),
) {
    if depth == perm.len() {
        let cost: f64 = truth
            .iter()
            .zip(perm.iter())
            .map(|(t, &j)| (est[j] - t).abs())
            .sum();
        if cost < best.0 {
            *best = (cost, perm.clone());
        }
        return;
    }
    for i in depth..perm.len() {
        perm.swap(depth, i);
        permute(perm, depth + 1, truth, est, best);
        perm.swap(depth, i);
    }
}

fn sorted_assignment(truth: &[f64], est: &[f64]) -> Vec<usize> {
    let mut truth_order: Vec<usize> = (0..truth.len()).collect();
    truth_order.sort_by(|&a, &b| truth[a].partial_cmp(&truth[b]).unwrap());
    let mut est_order: Vec<usize> = (0..est.len()).collect();
    est_order.sort_by(|&a, &b| est[a].partial_cmp(&est[b]).unwrap());
    let mut assignment = vec![0usize; truth.len()];
    for (t_idx, e_idx) in truth_order.into_iter().zip(est_order) {
        assignment[t_idx] = e_idx;
    }
    assignment
}

/// Dispatch one estimator run. The MLE grid is built by the caller once per
/// experiment.
fn run_estimator(
    method: EstimationMethod,
    y: &crate::signal::Measurement,
    k: usize,
    spec: &ExperimentSpec,
    grid: &AngularGrid,
    cfg: &SystemConfig,
) -> Result<AngleEstimates, EstimatorError> {
    match method {
        EstimationMethod::Fft => fft_estimate(y, k, spec.pad_factor, cfg),
        EstimationMethod::Mle => mle_estimate(y, k, grid, cfg),
        EstimationMethod::RootMusic => root_music_estimate(y, k, cfg.smoothing_window, cfg),
        _ => unreachable!("sweep baselines are not dispatched as estimators"),
    }
}

/// One row of the single-satellite RMSE table.
#[derive(Debug, Clone)]
pub struct SingleSatRow {
    pub snr_db: f64,
    /// RMSE per method, degrees, parallel to the table's method list.
    pub rmse_deg: Vec<f64>,
    /// Failed-trial count per method.
    pub error_counts: Vec<usize>,
    pub rcrb_deg: f64,
}

#[derive(Debug, Clone)]
pub struct SingleSatTable {
    pub methods: Vec<EstimationMethod>,
    pub rows: Vec<SingleSatRow>,
}

/// Single-satellite one-shot RMSE versus SNR for each selected method, with
/// the root Cramér-Rao bound as reference column. Emits one CSV row per SNR.
pub fn run_single_sat<W: Write>(
    spec: &ExperimentSpec,
    cfg: &SystemConfig,
    out: &mut W,
) -> Result<SingleSatTable, HarnessError> {
    cfg.validate()?;
    spec.validate()?;
    let truth = spec.single_angle_deg.to_radians();
    if !cfg.in_fov(truth) {
        return Err(HarnessError::BadSpec("satellite angle outside field of view"));
    }
    let methods = spec.method.methods();
    let design = rainbow_design(cfg);
    let grid = AngularGrid::uniform(cfg, spec.n_grid);

    write!(out, "snr_db")?;
    for m in &methods {
        write!(out, ",rmse_{}_deg", m.label())?;
    }
    write!(out, ",rcrb_deg")?;
    for m in &methods {
        write!(out, ",errors_{}", m.label())?;
    }
    writeln!(out)?;

    let mut rows = Vec::with_capacity(spec.snr_grid_db.len());
    for &snr_db in &spec.snr_grid_db {
        let mut sq_sum = vec![0.0f64; methods.len()];
        let mut err_count = vec![0usize; methods.len()];
        for trial in 0..spec.trials {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(spec.master_seed, trial as u64));
            let scenario = Scenario::with_random_phases(vec![truth], snr_db, cfg, &mut rng)?;
            let y = synthesize(&scenario, &design, cfg, &mut rng);
            for (mi, &method) in methods.iter().enumerate() {
                match run_estimator(method, &y, 1, spec, &grid, cfg) {
                    Ok(est) => {
                        let scored = match_and_score(&scenario.angles, &est)?;
                        sq_sum[mi] += scored.total_error_rad * scored.total_error_rad;
                    }
                    Err(_) => {
                        err_count[mi] += 1;
                        sq_sum[mi] += MAX_ANGLE_ERROR * MAX_ANGLE_ERROR;
                    }
                }
            }
        }
        let rmse_deg: Vec<f64> = sq_sum
            .iter()
            .map(|s| (s / spec.trials as f64).sqrt().to_degrees())
            .collect();
        let rcrb_deg = rcrb_angle(snr_db, truth, cfg)?.to_degrees();

        write!(out, "{snr_db}")?;
        for r in &rmse_deg {
            write!(out, ",{r}")?;
        }
        write!(out, ",{rcrb_deg}")?;
        for e in &err_count {
            write!(out, ",{e}")?;
        }
        writeln!(out)?;
        rows.push(SingleSatRow {
            snr_db,
            rmse_deg,
            error_counts: err_count,
            rcrb_deg,
        });
    }
    Ok(SingleSatTable { methods, rows })
}

/// One row of the multi-satellite slot-budget comparison.
#[derive(Debug, Clone)]
pub struct MultiSatRow {
    pub n_ts: usize,
    /// Rainbow total-error RMSE per selected method, degrees.
    pub rainbow_rmse_deg: Vec<f64>,
    pub rainbow_errors: Vec<usize>,
    pub conventional_rmse_deg: f64,
    pub hierarchical_rmse_deg: f64,
}

#[derive(Debug, Clone)]
pub struct MultiSatTable {
    pub methods: Vec<EstimationMethod>,
    pub rows: Vec<MultiSatRow>,
}

/// Multi-satellite acquisition error versus slot budget: rainbow reception
/// with slot averaging against the conventional and hierarchical sweeps. The
/// error metric is the RMSE over trials of the per-trial sum of matched
/// angle errors.
pub fn run_multi_sat<W: Write>(
    spec: &ExperimentSpec,
    cfg: &SystemConfig,
    out: &mut W,
) -> Result<MultiSatTable, HarnessError> {
    cfg.validate()?;
    spec.validate()?;
    let truths: Vec<f64> = spec.angles_deg.iter().map(|a| a.to_radians()).collect();
    if truths.iter().any(|&t| !cfg.in_fov(t)) {
        return Err(HarnessError::BadSpec("satellite angle outside field of view"));
    }
    let k = truths.len();
    if k == 0 {
        return Err(HarnessError::BadSpec("multi-sat scenario needs satellites"));
    }
    let methods = spec.method.methods();
    let design = rainbow_design(cfg);
    let grid = AngularGrid::uniform(cfg, spec.n_grid);

    write!(out, "n_ts")?;
    for m in &methods {
        write!(out, ",rmse_rainbow_{}_deg", m.label())?;
    }
    write!(out, ",rmse_conventional_deg,rmse_hierarchical_deg")?;
    for m in &methods {
        write!(out, ",errors_rainbow_{}", m.label())?;
    }
    writeln!(out)?;

    let mut rows = Vec::with_capacity(spec.n_ts_grid.len());
    for &n_ts in &spec.n_ts_grid {
        let mut rainbow_sq = vec![0.0f64; methods.len()];
        let mut rainbow_err = vec![0usize; methods.len()];
        let mut conventional_sq = 0.0f64;
        let mut hierarchical_sq = 0.0f64;
        for trial in 0..spec.trials {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(spec.master_seed, trial as u64));
            let scenario =
                Scenario::with_random_phases(truths.clone(), spec.snr_db, cfg, &mut rng)?;
            let y = synthesize_averaged(&scenario, &design, cfg, n_ts, &mut rng);
            for (mi, &method) in methods.iter().enumerate() {
                match run_estimator(method, &y, k, spec, &grid, cfg) {
                    Ok(est) => {
                        let scored = match_and_score(&truths, &est)?;
                        rainbow_sq[mi] += scored.total_error_rad * scored.total_error_rad;
                    }
                    Err(_) => {
                        rainbow_err[mi] += 1;
                        let worst = k as f64 * MAX_ANGLE_ERROR;
                        rainbow_sq[mi] += worst * worst;
                    }
                }
            }
            let conv = conventional_sweep(&scenario, n_ts, k, cfg, &mut rng);
            let scored = match_and_score(&truths, &conv)?;
            conventional_sq += scored.total_error_rad * scored.total_error_rad;
            let hier = hierarchical_sweep(&scenario, n_ts, k, cfg, &mut rng);
            let scored = match_and_score(&truths, &hier)?;
            hierarchical_sq += scored.total_error_rad * scored.total_error_rad;
        }
        let rainbow_rmse_deg: Vec<f64> = rainbow_sq
            .iter()
            .map(|s| (s / spec.trials as f64).sqrt().to_degrees())
            .collect();
        let conventional_rmse_deg =
            (conventional_sq / spec.trials as f64).sqrt().to_degrees();
        let hierarchical_rmse_deg =
            (hierarchical_sq / spec.trials as f64).sqrt().to_degrees();

        write!(out, "{n_ts}")?;
        for r in &rainbow_rmse_deg {
            write!(out, ",{r}")?;
        }
        write!(out, ",{conventional_rmse_deg},{hierarchical_rmse_deg}")?;
        for e in &rainbow_err {
            write!(out, ",{e}")?;
        }
        writeln!(out)?;
        rows.push(MultiSatRow {
            n_ts,
            rainbow_rmse_deg,
            rainbow_errors: rainbow_err,
            conventional_rmse_deg,
            hierarchical_rmse_deg,
        });
    }
    Ok(MultiSatTable { methods, rows })
}

/// Gain profile across the field of view: rainbow versus a boresight-pointed
/// conventional beam, with the exact and approximate rainbow gain losses.
pub fn run_gain_profile<W: Write>(
    cfg: &SystemConfig,
    points: usize,
    out: &mut W,
) -> Result<(), HarnessError> {
    cfg.validate()?;
    if points < 2 {
        return Err(HarnessError::BadSpec("gain profile needs at least two points"));
    }
    let model = DopplerModel::from_config(cfg);
    let rainbow = rainbow_design(cfg);
    let conventional = conventional_design(0.0);
    let half = cfg.fov_half_width();
    writeln!(
        out,
        "theta_deg,gain_rainbow,gain_conventional,loss_exact,loss_approx"
    )?;
    for i in 0..points {
        let theta = -half + 2.0 * half * i as f64 / (points - 1) as f64;
        let f = cfg.f_p + model.doppler_from_angle(theta);
        let gain_rainbow = bf_gain(f, theta, &rainbow, cfg.n_antennas, cfg.f_c);
        let gain_conventional = bf_gain(f, theta, &conventional, cfg.n_antennas, cfg.f_c);
        let loss_exact = gain_loss_exact(theta, cfg, &rainbow);
        let loss_approx = gain_loss_approx(theta, cfg);
        writeln!(
            out,
            "{},{gain_rainbow},{gain_conventional},{loss_exact},{loss_approx}",
            theta.to_degrees()
        )?;
    }
    Ok(())
}

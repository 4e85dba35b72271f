//! Flat key=value configuration files.
//!
//! Keys match the `SystemConfig` and `ExperimentSpec` field names exactly;
//! unknown keys are errors. Values use the same units as the fields they
//! set (SI and radians for system constants, degrees and dB for experiment
//! templates). Blank lines and lines starting with `#` are ignored.

use thiserror::Error;

use super::{ExperimentSpec, MethodSelection};
use crate::geometry::SystemConfig;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("line {line}: expected key=value, got {text:?}")]
    BadLine { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: cannot parse {value:?} for key {key:?}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
}

fn parse<T: std::str::FromStr>(
    line: usize,
    key: &str,
    value: &str,
) -> Result<T, ConfigFileError> {
    value.trim().parse().map_err(|_| ConfigFileError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn parse_list<T: std::str::FromStr>(
    line: usize,
    key: &str,
    value: &str,
) -> Result<Vec<T>, ConfigFileError> {
    value
        .split(',')
        .map(|item| parse(line, key, item))
        .collect()
}

/// Apply a key=value config file on top of existing system and experiment
/// settings.
pub fn apply_config_file(
    text: &str,
    cfg: &mut SystemConfig,
    spec: &mut ExperimentSpec,
) -> Result<(), ConfigFileError> {
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigFileError::BadLine {
            line,
            text: trimmed.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            // System constants (SI units, radians).
            "f_c" => cfg.f_c = parse(line, key, value)?,
            "f_p" => cfg.f_p = parse(line, key, value)?,
            "f_s" => cfg.f_s = parse(line, key, value)?,
            "a_sat" => cfg.a_sat = parse(line, key, value)?,
            "v_sat" => cfg.v_sat = Some(parse(line, key, value)?),
            "r_earth" => cfg.r_earth = parse(line, key, value)?,
            "c" => cfg.c = parse(line, key, value)?,
            "beta" => cfg.beta = parse(line, key, value)?,
            "n_antennas" => cfg.n_antennas = parse(line, key, value)?,
            "samples_per_slot" => cfg.samples_per_slot = parse(line, key, value)?,
            "smoothing_window" => cfg.smoothing_window = parse(line, key, value)?,
            "seed" => {
                cfg.seed = parse(line, key, value)?;
                spec.master_seed = cfg.seed;
            }
            // Experiment template (degrees, dB).
            "trials" => spec.trials = parse(line, key, value)?,
            "snr_grid_db" => spec.snr_grid_db = parse_list(line, key, value)?,
            "n_ts_grid" => spec.n_ts_grid = parse_list(line, key, value)?,
            "angles_deg" => spec.angles_deg = parse_list(line, key, value)?,
            "single_angle_deg" => spec.single_angle_deg = parse(line, key, value)?,
            "snr_db" => spec.snr_db = parse(line, key, value)?,
            "master_seed" => spec.master_seed = parse(line, key, value)?,
            "method" => {
                spec.method =
                    MethodSelection::parse(value).ok_or_else(|| ConfigFileError::BadValue {
                        line,
                        key: key.to_string(),
                        value: value.to_string(),
                    })?
            }
            "pad_factor" => spec.pad_factor = parse(line, key, value)?,
            "n_grid" => spec.n_grid = parse(line, key, value)?,
            _ => {
                return Err(ConfigFileError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    Ok(())
}

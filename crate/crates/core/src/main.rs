//! Command-line front end: print the rainbow design, or run the gain-profile,
//! single-satellite and multi-satellite experiments to CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rainbow_acq::beamformer::{gain_loss_approx, gain_loss_exact, rainbow_design};
use rainbow_acq::geometry::{DopplerModel, SystemConfig};
use rainbow_acq::harness::{
    apply_config_file, run_gain_profile, run_multi_sat, run_single_sat, ExperimentKind,
    ExperimentSpec, MethodSelection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fft,
    Mle,
    Music,
    All,
}

impl From<MethodArg> for MethodSelection {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Fft => MethodSelection::Fft,
            MethodArg::Mle => MethodSelection::Mle,
            MethodArg::Music => MethodSelection::Music,
            MethodArg::All => MethodSelection::All,
        }
    }
}

/// One-shot LEO satellite acquisition with Doppler-aware rainbow beamforming.
///
/// Config files are flat `key=value` lines whose keys match the field names
/// of the system and experiment settings. System keys (SI units, radians):
/// f_c, f_p, f_s [Hz]; a_sat, r_earth [m]; v_sat, c [m/s]; beta [rad];
/// n_antennas, samples_per_slot, smoothing_window, seed. Experiment keys
/// (degrees, dB): trials, snr_grid_db, n_ts_grid, angles_deg,
/// single_angle_deg, snr_db, master_seed, method, pad_factor, n_grid.
#[derive(Debug, Parser)]
#[command(name = "rainbow-acq", version, about)]
struct Cli {
    /// Path to a key=value config file applied before any flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master RNG seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Estimator selection for rainbow acquisition.
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the closed-form rainbow beamformer design and its worst-case
    /// gain loss.
    Design,
    /// Write the field-of-view gain profile CSV.
    GainProfile {
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Number of angle samples across the field of view.
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Single-satellite one-shot RMSE versus SNR (CSV per SNR point).
    SingleSat {
        /// Lowest SNR, dB.
        #[arg(long, default_value_t = 0.0)]
        snr_min: f64,
        /// Highest SNR, dB.
        #[arg(long, default_value_t = 30.0)]
        snr_max: f64,
        /// SNR step, dB.
        #[arg(long, default_value_t = 5.0)]
        snr_step: f64,
        /// Monte Carlo trials per SNR point.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Satellite angle, degrees.
        #[arg(long, default_value_t = -45.0)]
        angle_deg: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Multi-satellite acquisition error versus slot budget (CSV per budget).
    MultiSat {
        /// Comma-separated slot budgets.
        #[arg(long, value_delimiter = ',', default_value = "1,4,16,64,256,1024")]
        nts: Vec<usize>,
        /// Monte Carlo trials per budget.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Satellite angles, degrees (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "-40,5,50")]
        angles_deg: Vec<f64>,
        /// Per-satellite effective SNR, dB.
        #[arg(long, default_value_t = 15.0)]
        snr_db: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let kind = match &cli.command {
        Command::Design | Command::GainProfile { .. } => ExperimentKind::GainProfile,
        Command::SingleSat { .. } => ExperimentKind::SingleSatRmse,
        Command::MultiSat { .. } => ExperimentKind::MultiSatVsSlots,
    };
    let mut cfg = SystemConfig::default();
    let mut spec = ExperimentSpec::defaults(kind, &cfg);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        apply_config_file(&text, &mut cfg, &mut spec).map_err(|e| e.to_string())?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        spec.master_seed = seed;
    }
    if let Some(method) = cli.method {
        spec.method = method.into();
    }
    cfg.validate().map_err(|e| e.to_string())?;

    match cli.command {
        Command::Design => {
            print_design(&cfg);
            Ok(())
        }
        Command::GainProfile { out, points } => {
            let mut writer = csv_writer(&out)?;
            run_gain_profile(&cfg, points, &mut writer).map_err(|e| e.to_string())?;
            writer.flush().map_err(|e| e.to_string())?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::SingleSat {
            snr_min,
            snr_max,
            snr_step,
            trials,
            angle_deg,
            out,
        } => {
            if snr_step <= 0.0 || snr_max < snr_min {
                return Err("SNR grid must have positive step and max >= min".into());
            }
            spec.trials = trials;
            spec.single_angle_deg = angle_deg;
            spec.snr_grid_db = {
                let mut grid = Vec::new();
                let mut snr = snr_min;
                while snr <= snr_max + 1e-9 {
                    grid.push(snr);
                    snr += snr_step;
                }
                grid
            };
            let mut writer = csv_writer(&out)?;
            run_single_sat(&spec, &cfg, &mut writer).map_err(|e| e.to_string())?;
            writer.flush().map_err(|e| e.to_string())?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::MultiSat {
            nts,
            trials,
            angles_deg,
            snr_db,
            out,
        } => {
            spec.trials = trials;
            spec.n_ts_grid = nts;
            spec.angles_deg = angles_deg;
            spec.snr_db = snr_db;
            let mut writer = csv_writer(&out)?;
            run_multi_sat(&spec, &cfg, &mut writer).map_err(|e| e.to_string())?;
            writer.flush().map_err(|e| e.to_string())?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn csv_writer(path: &PathBuf) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("cannot create {}: {e}", path.display()))
}

fn print_design(cfg: &SystemConfig) {
    let model = DopplerModel::from_config(cfg);
    let design = rainbow_design(cfg);
    let edge = cfg.fov_half_width();
    println!("satellite speed     : {:.4} m/s", cfg.sat_speed());
    println!("doppler scale alpha : {:.4} Hz", model.alpha);
    println!("max |doppler| in FOV: {:.4} Hz", model.alpha * edge.sin());
    println!("progressive delay   : {:.6e} s", design.tau);
    println!("progressive phase   : {:.12} rad (mod 2*pi)", design.phi);
    println!(
        "worst-case gain loss: {:.6e} exact, {:.6e} approx (of max gain {})",
        gain_loss_exact(edge, cfg, &design),
        gain_loss_approx(edge, cfg),
        cfg.n_antennas
    );
}

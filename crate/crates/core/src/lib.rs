//! One-shot LEO satellite acquisition with Doppler-aware rainbow beamforming.
//!
//! A LEO satellite's Doppler shift is a sinusoidal function of its
//! off-boresight angle, so Doppler and angle are interchangeable over the
//! field of view. A joint phase-time array can be tuned, in closed form, so
//! that its frequency-dependent beam points every Doppler-shifted pilot at
//! exactly the angle that produces that shift: one slot of reception then
//! covers the whole field of view at near-maximum gain, and satellite angles
//! fall out of the received tone frequencies. No beam sweeping required.
//!
//! The crate is organized along that pipeline:
//!
//! * [`geometry`] - system constants and the angle/Doppler bijection.
//! * [`beamformer`] - frequency-dependent array responses, the closed-form
//!   rainbow design and its gain-loss analysis.
//! * [`signal`] - synthesis of the beamformed, sampled pilot measurement.
//! * [`estimators`] - FFT, maximum likelihood and root-MUSIC one-shot angle
//!   estimators.
//! * [`baselines`] - conventional and hierarchical beam-sweeping acquisition
//!   for comparison.
//! * [`bounds`] - root Cramér-Rao reference bound.
//! * [`harness`] - seeded Monte Carlo experiments and CSV emitters.
//! * [`linalg`] - the small dense eigen/rooting kernels the estimators use.

pub mod baselines;
pub mod beamformer;
pub mod bounds;
pub mod estimators;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod signal;

pub use beamformer::{rainbow_design, BeamformerDesign};
pub use estimators::{AngleEstimates, EstimationMethod};
pub use geometry::{DopplerModel, SystemConfig};
pub use signal::{Measurement, Scenario};

//! Wi-Fi sensing laboratory.
//!
//! A bistatic OFDM/OFDMA channel simulator together with the model-based
//! sensing primitives built on top of channel frequency responses (CFR):
//! range, Doppler and angle-of-arrival spectra, a Doppler-vector activity
//! classifier, and a campaign-level cross-validation harness that sweeps
//! OFDMA resource units and channel sampling periods.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: grid, capture schedule and the [`CfrTensor`] container.
//! - [`sim`]: scene geometry, CFR synthesis, hardware impairments, noise and
//!   labelled activity scenes.
//! - [`ofdma`]: the 80 MHz resource-unit layout and RU slicing.
//! - [`dsp`]: phase sanitization, range/Doppler/AoA spectra.
//! - [`classifier`]: pooled-feature softmax classifier.
//! - [`eval`]: splits, metrics, percentile summaries and parameter sweeps.
//! - [`io`]: capture files, run configuration, reports and model files.

pub mod activity;
pub mod classifier;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod io;
pub mod ofdma;
pub mod rng;
pub mod selftest;
pub mod sim;
pub mod tensor;

pub use activity::ActivityClass;
pub use error::{Error, Result};
pub use tensor::{CaptureSchedule, CfrTensor, GridConfig};

pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

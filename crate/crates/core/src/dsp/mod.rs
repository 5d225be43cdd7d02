//! Sensing spectra from CFR tensors: phase sanitization, range profiles,
//! Doppler vectors and angle-of-arrival profiles.

mod aoa;
mod doppler;
mod range;
mod sanitize;

pub use aoa::{angle_grid, aoa_spectrum, beamscan, AoaProfile};
pub use doppler::{
    doppler_spectrum, doppler_vector_stream, sanitized_doppler_stream, Aggregation, DopplerConfig,
    DopplerVector, WindowKind,
};
pub use range::{range_profile, range_spectrum, RangeProfile};
pub use sanitize::{sanitize_phase, Sanitized};

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

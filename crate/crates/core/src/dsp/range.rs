use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::tensor::CfrTensor;
use crate::SPEED_OF_LIGHT;

/// Power delay profile of one CFR snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    /// Power per delay bin; bin `b` is delay `b · delay_bin_width`.
    pub power: Vec<f64>,
    /// Seconds per bin (`1 / bandwidth`).
    pub delay_bin_width: f64,
}

impl RangeProfile {
    pub fn delay(&self, bin: usize) -> f64 {
        bin as f64 * self.delay_bin_width
    }

    /// One-way path length of `bin`, metres.
    pub fn path_length(&self, bin: usize) -> f64 {
        self.delay(bin) * SPEED_OF_LIGHT
    }

    pub fn argmax(&self) -> usize {
        super::argmax(&self.power)
    }
}

/// Range profile of a vector of per-subcarrier CFR values spanning
/// `bandwidth`: `|IDFT(H)|² / N²`, so a unit-gain path on an integer delay
/// bin peaks at exactly 1.
pub fn range_profile(values: &[Complex64], bandwidth: f64) -> Result<RangeProfile> {
    if values.is_empty() {
        return Err(Error::EmptyInput("range profile of zero subcarriers"));
    }
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64 * n as f64);
    Ok(RangeProfile {
        power: buf.iter().map(|v| v.norm_sqr() * scale).collect(),
        delay_bin_width: 1.0 / bandwidth,
    })
}

/// Range profile of `snapshot` seen by `antenna`.
pub fn range_spectrum(cfr: &CfrTensor, snapshot: usize, antenna: usize) -> Result<RangeProfile> {
    if snapshot >= cfr.n_snapshots() || antenna >= cfr.n_antennas() {
        return Err(Error::OutOfRange(format!(
            "snapshot {snapshot} / antenna {antenna} outside {}x{}",
            cfr.n_snapshots(),
            cfr.n_antennas()
        )));
    }
    range_profile(&cfr.antenna_row(snapshot, antenna), cfr.grid().bandwidth)
}

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::tensor::CfrTensor;

/// Per-snapshot receiver timing offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimingOffset {
    /// The same offset on every snapshot, seconds.
    Fixed { offset: f64 },
    /// Independent uniform draws in `[-max, max]` seconds.
    Uniform { max: f64 },
}

impl Default for TimingOffset {
    fn default() -> Self {
        TimingOffset::Fixed { offset: 0.0 }
    }
}

/// Hardware phase impairments. All-zero parameters model ideal hardware.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentParams {
    /// Carrier frequency offset, Hz.
    pub cfo: f64,
    pub timing_offset: TimingOffset,
    /// Standard deviation of the common phase error per snapshot, radians.
    pub common_phase_jitter_std: f64,
}

impl ImpairmentParams {
    pub fn validate(&self) -> Result<()> {
        let timing_ok = match self.timing_offset {
            TimingOffset::Fixed { offset } => offset.is_finite(),
            TimingOffset::Uniform { max } => max.is_finite() && max >= 0.0,
        };
        if !(self.cfo.is_finite()
            && timing_ok
            && self.common_phase_jitter_std.is_finite()
            && self.common_phase_jitter_std >= 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "impairment parameters must be finite and non-negative where applicable: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Applies CFO, common phase jitter and timing offset to every snapshot.
///
/// Snapshot `k` is multiplied by `exp(j(2π·cfo·t_k + φ_k))` with
/// `φ_k ~ N(0, jitter²)` and by the linear ramp `exp(-j 2π f_n T_k)` across
/// subcarrier baseband offsets `f_n`. Magnitudes are untouched.
pub fn apply_impairments(mut cfr: CfrTensor, imp: &ImpairmentParams, seed: u64) -> Result<CfrTensor> {
    imp.validate()?;
    let mut rng = rng_from_seed(seed);
    let grid = *cfr.grid();
    let schedule = *cfr.schedule();
    let n_ant = grid.n_rx_antennas;
    let offsets: Vec<f64> = (0..grid.n_subcarriers)
        .map(|n| grid.subcarrier_offset(n))
        .collect();

    for k in 0..schedule.n_snapshots {
        let jitter = if imp.common_phase_jitter_std > 0.0 {
            imp.common_phase_jitter_std * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        let timing = match imp.timing_offset {
            TimingOffset::Fixed { offset } => offset,
            TimingOffset::Uniform { max } if max > 0.0 => rng.random_range(-max..=max),
            TimingOffset::Uniform { .. } => 0.0,
        };
        let common = 2.0 * PI * imp.cfo * schedule.time(k) + jitter;
        let row = cfr.snapshot_mut(k);
        for (n, f) in offsets.iter().enumerate() {
            let factor = Complex64::cis(common - 2.0 * PI * f * timing);
            for v in &mut row[n * n_ant..(n + 1) * n_ant] {
                *v *= factor;
            }
        }
    }
    Ok(cfr)
}

/// Adds circular complex Gaussian noise at the requested SNR.
///
/// The per-element noise variance is `mean(|H|²) / 10^(snr_db / 10)`.
/// `snr_db = +inf` returns the input unchanged.
pub fn add_noise(mut cfr: CfrTensor, snr_db: f64, seed: u64) -> Result<CfrTensor> {
    if snr_db == f64::INFINITY {
        return Ok(cfr);
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig(format!("snr_db must be finite or +inf, got {snr_db}")));
    }
    let power = cfr.mean_power();
    if power <= 0.0 {
        return Err(Error::UndefinedSnr);
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    let mut rng = rng_from_seed(seed);
    for v in cfr.data_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(sigma * re, sigma * im);
    }
    Ok(cfr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{CaptureSchedule, GridConfig};

    fn random_tensor(n_snap: usize, n_ant: usize, seed: u64) -> CfrTensor {
        let grid = GridConfig::default().with_antennas(n_ant);
        let schedule = CaptureSchedule::new(0.0075, n_snap).unwrap();
        let mut rng = rng_from_seed(seed);
        let data = (0..n_snap * grid.n_subcarriers * n_ant)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CfrTensor::from_vec(data, grid, schedule).unwrap()
    }

    #[test]
    fn ideal_hardware_is_identity() {
        let t = random_tensor(4, 2, 1);
        let out = apply_impairments(t.clone(), &ImpairmentParams::default(), 9).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn impairments_preserve_magnitude() {
        let t = random_tensor(6, 2, 2);
        let imp = ImpairmentParams {
            cfo: 3e3,
            timing_offset: TimingOffset::Uniform { max: 25e-9 },
            common_phase_jitter_std: 0.7,
        };
        let out = apply_impairments(t.clone(), &imp, 5).unwrap();
        assert_eq!(out.shape(), t.shape());
        for (a, b) in out.data().iter().zip(t.data()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-12 * b.norm().max(1e-300));
        }
        let again = apply_impairments(t, &imp, 5).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn timing_ramp_spans_two_pi_over_band() {
        // constant unit tensor: output phase is the ramp itself
        let grid = GridConfig::default();
        let schedule = CaptureSchedule::new(0.0075, 1).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); grid.n_subcarriers];
        let t = CfrTensor::from_vec(ones, grid, schedule).unwrap();
        let imp = ImpairmentParams {
            timing_offset: TimingOffset::Fixed { offset: 12.5e-9 },
            ..Default::default()
        };
        let out = apply_impairments(t, &imp, 0).unwrap();
        let step = (out.get(0, 1, 0) * out.get(0, 0, 0).conj()).arg();
        let span = -step * grid.n_subcarriers as f64;
        assert!((span - 2.0 * PI).abs() < 1e-9, "span {span}");
    }

    #[test]
    fn noise_infinite_snr_is_identity() {
        let t = random_tensor(2, 1, 3);
        assert_eq!(add_noise(t.clone(), f64::INFINITY, 1).unwrap(), t);
    }

    #[test]
    fn noise_hits_target_snr() {
        let grid = GridConfig::default();
        let schedule = CaptureSchedule::new(0.0075, 120).unwrap();
        let n = schedule.n_snapshots * grid.n_subcarriers;
        assert!(n >= 100_000);
        let data: Vec<_> = (0..n).map(|i| Complex64::cis(i as f64 * 0.37)).collect();
        let clean = CfrTensor::from_vec(data, grid, schedule).unwrap();
        let noisy = add_noise(clean.clone(), 20.0, 77).unwrap();
        let noise_power = noisy
            .data()
            .iter()
            .zip(clean.data())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / n as f64;
        let snr = 10.0 * (clean.mean_power() / noise_power).log10();
        assert!((snr - 20.0).abs() < 0.5, "snr {snr}");
        assert_eq!(add_noise(clean, 20.0, 77).unwrap(), noisy);
    }

    #[test]
    fn noise_on_zero_tensor_is_undefined() {
        let grid = GridConfig::default();
        let schedule = CaptureSchedule::new(0.0075, 1).unwrap();
        let t = CfrTensor::zeros(grid, schedule);
        assert!(matches!(add_noise(t, 10.0, 0), Err(Error::UndefinedSnr)));
    }
}

//! CFR phase sanitization.
//!
//! For every (snapshot, antenna) row the phase across subcarriers is
//! modelled as `slope · n + offset` plus propagation structure. The linear
//! part is removed and the row is rotated so its first nonzero subcarrier
//! has zero phase. This cancels timing offsets (linear ramps), CFO and
//! common phase error (constants) exactly.
//!
//! The slope is found in two stages: a coarse estimate from the argument of
//! the summed adjacent-subcarrier products, then a least-squares fit on the
//! unwrapped, coarsely derotated phase. Derotating first makes the unwrap
//! see the same sequence (up to a constant) whatever ramp the hardware
//! added, which keeps the correction exact under impairments.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::CfrTensor;

/// Output of [`sanitize_phase`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sanitized {
    pub cfr: CfrTensor,
    /// (snapshot, antenna) rows that were all-zero and left untouched.
    pub skipped: Vec<(usize, usize)>,
}

fn wrap(phase: f64) -> f64 {
    phase - 2.0 * PI * (phase / (2.0 * PI)).round()
}

/// Reusable scratch space for row sanitization.
#[derive(Debug, Default)]
pub(crate) struct RowSanitizer {
    index: Vec<f64>,
    phase: Vec<f64>,
}

impl RowSanitizer {
    /// Sanitizes one antenna's values across subcarriers in place. Returns
    /// `false` (and leaves the row untouched) if every value is zero.
    pub(crate) fn apply(&mut self, row: &mut [Complex64]) -> bool {
        let Some(first) = row.iter().position(|v| v.norm_sqr() > 0.0) else {
            return false;
        };

        let adjacent: Complex64 = row.windows(2).map(|w| w[1] * w[0].conj()).sum();
        let coarse = if adjacent.norm_sqr() > 0.0 { adjacent.arg() } else { 0.0 };

        self.index.clear();
        self.phase.clear();
        let mut prev: Option<(f64, f64)> = None; // (wrapped, unwrapped)
        for (n, v) in row.iter().enumerate() {
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let p = v.arg() - coarse * n as f64;
            let unwrapped = match prev {
                Some((raw, unw)) => unw + wrap(p - raw),
                None => p,
            };
            prev = Some((p, unwrapped));
            self.index.push(n as f64);
            self.phase.push(unwrapped);
        }

        let count = self.index.len() as f64;
        let fine = if self.index.len() >= 2 {
            let mean_n = self.index.iter().sum::<f64>() / count;
            let mean_p = self.phase.iter().sum::<f64>() / count;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (n, p) in self.index.iter().zip(&self.phase) {
                sxy += (n - mean_n) * (p - mean_p);
                sxx += (n - mean_n) * (n - mean_n);
            }
            sxy / sxx
        } else {
            0.0
        };
        let slope = coarse + fine;

        let reference = row[first];
        let rotation = reference.conj() / reference.norm();
        for (n, v) in row.iter_mut().enumerate() {
            *v *= rotation * Complex64::cis(-slope * (n as f64 - first as f64));
        }
        true
    }

    /// Sanitizes every antenna of a snapshot row laid out subcarrier-major,
    /// antenna-minor. Returns the antennas that were skipped.
    pub(crate) fn apply_snapshot(
        &mut self,
        row: &mut [Complex64],
        n_antennas: usize,
        buf: &mut Vec<Complex64>,
    ) -> Vec<usize> {
        let mut skipped = Vec::new();
        for a in 0..n_antennas {
            buf.clear();
            buf.extend(row.iter().skip(a).step_by(n_antennas));
            if self.apply(buf) {
                for (dst, src) in row.iter_mut().skip(a).step_by(n_antennas).zip(buf.iter()) {
                    *dst = *src;
                }
            } else {
                skipped.push(a);
            }
        }
        skipped
    }
}

/// Removes hardware phase offsets from every (snapshot, antenna) row.
/// Magnitudes are unchanged.
pub fn sanitize_phase(cfr: &CfrTensor) -> Result<Sanitized> {
    if cfr.n_subcarriers() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "phase sanitization needs at least 2 subcarriers, got {}",
            cfr.n_subcarriers()
        )));
    }
    let n_ant = cfr.n_antennas();
    let row_len = cfr.row_len();
    let mut out = cfr.clone();
    let skipped: Vec<Vec<(usize, usize)>> = out
        .data_mut()
        .par_chunks_mut(row_len)
        .enumerate()
        .map_init(
            || (RowSanitizer::default(), Vec::new()),
            |(sanitizer, buf), (k, row)| {
                sanitizer
                    .apply_snapshot(row, n_ant, buf)
                    .into_iter()
                    .map(|a| (k, a))
                    .collect()
            },
        )
        .collect();
    Ok(Sanitized {
        cfr: out,
        skipped: skipped.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::ActivityClass;
    use crate::sim::{
        apply_impairments, generate_activity_scene, synthesize_cfr, ImpairmentParams, TimingOffset,
    };
    use crate::tensor::{CaptureSchedule, GridConfig};

    fn max_rel_diff(a: &CfrTensor, b: &CfrTensor) -> f64 {
        let scale = b.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            / scale
    }

    fn scene_tensor(class: ActivityClass, seed: u64, n_ant: usize) -> CfrTensor {
        let scene = generate_activity_scene(class, 1.0, seed).unwrap();
        let grid = GridConfig::default().with_antennas(n_ant);
        let schedule = CaptureSchedule::new(0.0075, 8).unwrap();
        synthesize_cfr(&scene, &grid, &schedule).unwrap()
    }

    #[test]
    fn idempotent_and_magnitude_preserving() {
        let t = scene_tensor(ActivityClass::Walking, 4, 2);
        let once = sanitize_phase(&t).unwrap().cfr;
        for (a, b) in once.data().iter().zip(t.data()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-12 * b.norm().max(1e-300));
        }
        let twice = sanitize_phase(&once).unwrap().cfr;
        assert!(max_rel_diff(&twice, &once) < 1e-12);
    }

    #[test]
    fn global_phase_is_cancelled() {
        let t = scene_tensor(ActivityClass::InPlace, 2, 1);
        let mut rotated = t.clone();
        let g = Complex64::cis(PI / 3.0);
        rotated.data_mut().iter_mut().for_each(|v| *v *= g);
        let a = sanitize_phase(&t).unwrap().cfr;
        let b = sanitize_phase(&rotated).unwrap().cfr;
        assert!(max_rel_diff(&b, &a) < 1e-12);
    }

    #[test]
    fn cancels_cfo_and_timing_offset() {
        let clean = scene_tensor(ActivityClass::Running, 9, 2);
        let imp = ImpairmentParams {
            cfo: 1e3,
            timing_offset: TimingOffset::Fixed { offset: 12.5e-9 },
            common_phase_jitter_std: 0.0,
        };
        let impaired = apply_impairments(clean.clone(), &imp, 3).unwrap();
        let a = sanitize_phase(&impaired).unwrap().cfr;
        let b = sanitize_phase(&clean).unwrap().cfr;
        assert!(max_rel_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn zero_rows_are_flagged() {
        let grid = GridConfig::default().with_antennas(2);
        let schedule = CaptureSchedule::new(0.0075, 2).unwrap();
        let mut t = CfrTensor::zeros(grid, schedule);
        for n in 0..grid.n_subcarriers {
            t.set(1, n, 0, Complex64::cis(0.01 * n as f64));
        }
        let s = sanitize_phase(&t).unwrap();
        assert_eq!(s.skipped, vec![(0, 0), (0, 1), (1, 1)]);
        assert!(s.cfr.is_finite());
        // pure ramp collapses to a constant zero phase
        for n in 0..grid.n_subcarriers {
            assert!((s.cfr.get(1, n, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn needs_two_subcarriers() {
        let grid = GridConfig {
            n_subcarriers: 1,
            ..GridConfig::default()
        };
        let t = CfrTensor::zeros(grid, CaptureSchedule::new(0.0075, 1).unwrap());
        assert!(sanitize_phase(&t).is_err());
    }
}

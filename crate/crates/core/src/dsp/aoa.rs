use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::CfrTensor;

/// Beamscan power over a grid of arrival angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AoaProfile {
    /// Angles in radians, strictly increasing within [-π/2, π/2].
    pub angles: Vec<f64>,
    pub power: Vec<f64>,
    pub n_antennas: usize,
    pub antenna_spacing: f64,
    pub wavelength: f64,
}

impl AoaProfile {
    pub fn argmax(&self) -> usize {
        super::argmax(&self.power)
    }

    pub fn peak_angle(&self) -> f64 {
        self.angles[self.argmax()]
    }

    /// Width of the contiguous region around the peak that stays within
    /// `drop_db` of it, radians.
    pub fn lobe_width(&self, drop_db: f64) -> f64 {
        let peak = self.argmax();
        let floor = self.power[peak] * 10f64.powf(-drop_db / 10.0);
        let mut lo = peak;
        while lo > 0 && self.power[lo - 1] >= floor {
            lo -= 1;
        }
        let mut hi = peak;
        while hi + 1 < self.power.len() && self.power[hi + 1] >= floor {
            hi += 1;
        }
        self.angles[hi] - self.angles[lo]
    }
}

/// Uniform grid from -90° to +90° inclusive with `step_deg` spacing, radians.
pub fn angle_grid(step_deg: f64) -> Vec<f64> {
    let n = (180.0 / step_deg).round() as usize;
    (0..=n)
        .map(|i| (-90.0 + 180.0 * i as f64 / n as f64).to_radians())
        .collect()
}

/// Delay-and-sum beamscan over a uniform linear array:
/// `|Σ_a x_a · exp(+j 2π (d/λ) a sin θ)|²`.
pub fn beamscan(
    values: &[Complex64],
    antenna_spacing: f64,
    wavelength: f64,
    angles: &[f64],
) -> Result<AoaProfile> {
    if values.len() < 2 {
        return Err(Error::InsufficientAperture {
            n_antennas: values.len(),
        });
    }
    if angles.is_empty()
        || angles.windows(2).any(|w| w[1] <= w[0])
        || angles.iter().any(|a| a.abs() > PI / 2.0 + 1e-12)
    {
        return Err(Error::InvalidConfig(
            "angle grid must be non-empty, strictly increasing and within [-90°, 90°]".into(),
        ));
    }
    let k = 2.0 * PI * antenna_spacing / wavelength;
    let power = angles
        .iter()
        .map(|theta| {
            let step = k * theta.sin();
            values
                .iter()
                .enumerate()
                .map(|(a, v)| v * Complex64::cis(step * a as f64))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    Ok(AoaProfile {
        angles: angles.to_vec(),
        power,
        n_antennas: values.len(),
        antenna_spacing,
        wavelength,
    })
}

/// Angle-of-arrival profile of `snapshot` at `subcarrier`, using that
/// subcarrier's wavelength.
pub fn aoa_spectrum(
    cfr: &CfrTensor,
    snapshot: usize,
    subcarrier: usize,
    angles: &[f64],
) -> Result<AoaProfile> {
    if snapshot >= cfr.n_snapshots() || subcarrier >= cfr.n_subcarriers() {
        return Err(Error::OutOfRange(format!(
            "snapshot {snapshot} / subcarrier {subcarrier} outside {}x{}",
            cfr.n_snapshots(),
            cfr.n_subcarriers()
        )));
    }
    let grid = cfr.grid();
    beamscan(
        cfr.antenna_vector(snapshot, subcarrier),
        grid.antenna_spacing,
        grid.subcarrier_wavelength(subcarrier),
        angles,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::ActivityClass;
    use crate::sim::{synthesize_cfr, Point2, Scene, StaticPath};
    use crate::tensor::{CaptureSchedule, GridConfig};

    fn tensor_at(aoa: f64, n_ant: usize) -> CfrTensor {
        let mut scene = Scene::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), ActivityClass::Empty);
        scene.static_paths.push(StaticPath {
            delay: 20e-9,
            gain: Complex64::new(1.0, 0.0),
            aoa,
        });
        let grid = GridConfig::default().with_antennas(n_ant);
        synthesize_cfr(&scene, &grid, &CaptureSchedule::new(0.0075, 1).unwrap()).unwrap()
    }

    #[test]
    fn broadside_peak() {
        let t = tensor_at(0.0, 4);
        let p = aoa_spectrum(&t, 0, 498, &angle_grid(1.0)).unwrap();
        assert!(p.peak_angle().abs() < 1e-12);
    }

    #[test]
    fn thirty_degree_peak() {
        let t = tensor_at(30f64.to_radians(), 4);
        // half-wavelength spacing gives a quarter-turn between elements
        let v = t.antenna_vector(0, 498);
        let step = (v[1] * v[0].conj()).arg();
        assert!((step.abs() - PI / 2.0).abs() < 0.01);

        let grid = angle_grid(1.0);
        let p = aoa_spectrum(&t, 0, 498, &grid).unwrap();
        let fine = aoa_spectrum(&t, 0, 498, &angle_grid(0.1)).unwrap();
        assert!((fine.peak_angle().to_degrees() - 30.0).abs() < 0.051);
        assert!((p.peak_angle().to_degrees() - 30.0).abs() <= 1.0 + 1e-9);
    }

    #[test]
    fn more_antennas_narrow_the_lobe() {
        let grid = angle_grid(0.1);
        let w4 = aoa_spectrum(&tensor_at(0.2, 4), 0, 100, &grid).unwrap().lobe_width(3.0);
        let w8 = aoa_spectrum(&tensor_at(0.2, 8), 0, 100, &grid).unwrap().lobe_width(3.0);
        assert!(w8 < w4, "{w8} vs {w4}");
    }

    #[test]
    fn single_antenna_has_no_aperture() {
        let t = tensor_at(0.0, 1);
        assert!(matches!(
            aoa_spectrum(&t, 0, 0, &angle_grid(1.0)),
            Err(Error::InsufficientAperture { n_antennas: 1 })
        ));
    }

    #[test]
    fn grid_shape() {
        let g = angle_grid(1.0);
        assert_eq!(g.len(), 181);
        assert!((g[0] + PI / 2.0).abs() < 1e-15 && (g[180] - PI / 2.0).abs() < 1e-15);
        assert!(beamscan(&[Complex64::new(1.0, 0.0); 2], 0.02, 0.05, &[0.1, 0.0]).is_err());
    }
}

//! Channel frequency response container and the grids that index it.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// OFDM subcarrier grid and receive array description.
///
/// Subcarrier `n` sits at baseband offset `n * spacing - bandwidth / 2` from
/// the carrier. The grid is idealized: contiguous tones, no DC or guard nulls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Carrier (channel centre) frequency, Hz.
    pub carrier_freq: f64,
    /// Occupied bandwidth, Hz.
    pub bandwidth: f64,
    pub n_subcarriers: usize,
    pub n_rx_antennas: usize,
    /// Element spacing of the receive uniform linear array, metres.
    pub antenna_spacing: f64,
}

impl Default for GridConfig {
    /// 802.11ax channel 157, RU1-996 (80 MHz, 996 tones), a single receive
    /// antenna and half-wavelength element spacing.
    fn default() -> Self {
        let carrier_freq = 5.785e9;
        GridConfig {
            carrier_freq,
            bandwidth: 80e6,
            n_subcarriers: 996,
            n_rx_antennas: 1,
            antenna_spacing: SPEED_OF_LIGHT / carrier_freq / 2.0,
        }
    }
}

impl GridConfig {
    pub fn new(
        carrier_freq: f64,
        bandwidth: f64,
        n_subcarriers: usize,
        n_rx_antennas: usize,
        antenna_spacing: f64,
    ) -> Result<Self> {
        let grid = GridConfig {
            carrier_freq,
            bandwidth,
            n_subcarriers,
            n_rx_antennas,
            antenna_spacing,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Same grid with `n_rx_antennas` receive elements.
    pub fn with_antennas(mut self, n_rx_antennas: usize) -> Self {
        self.n_rx_antennas = n_rx_antennas;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidGrid(msg));
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return fail(format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if !(self.carrier_freq.is_finite() && self.carrier_freq > self.bandwidth / 2.0) {
            return fail(format!(
                "carrier_freq {} must exceed half the bandwidth {}",
                self.carrier_freq,
                self.bandwidth / 2.0
            ));
        }
        if self.n_subcarriers == 0 {
            return fail("n_subcarriers must be positive".into());
        }
        if self.n_rx_antennas == 0 {
            return fail("n_rx_antennas must be at least 1".into());
        }
        if !(self.antenna_spacing.is_finite() && self.antenna_spacing > 0.0) {
            return fail(format!(
                "antenna_spacing must be positive, got {}",
                self.antenna_spacing
            ));
        }
        Ok(())
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.bandwidth / self.n_subcarriers as f64
    }

    /// Baseband offset of subcarrier `n` from the carrier, Hz.
    pub fn subcarrier_offset(&self, n: usize) -> f64 {
        n as f64 * self.subcarrier_spacing() - self.bandwidth / 2.0
    }

    /// Absolute frequency of subcarrier `n`, Hz.
    pub fn subcarrier_freq(&self, n: usize) -> f64 {
        self.carrier_freq + self.subcarrier_offset(n)
    }

    /// Carrier wavelength, metres.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    pub fn subcarrier_wavelength(&self, n: usize) -> f64 {
        SPEED_OF_LIGHT / self.subcarrier_freq(n)
    }

    /// Grid covering subcarriers `range` of this one. The carrier moves to
    /// the centre of the sub-band so absolute subcarrier frequencies are
    /// preserved.
    pub fn sub_grid(&self, range: Range<usize>) -> Result<GridConfig> {
        if range.start >= range.end || range.end > self.n_subcarriers {
            return Err(Error::OutOfRange(format!(
                "subcarrier range {}..{} outside 0..{}",
                range.start, range.end, self.n_subcarriers
            )));
        }
        let spacing = self.subcarrier_spacing();
        let count = range.end - range.start;
        let bandwidth = count as f64 * spacing;
        let carrier_freq =
            self.carrier_freq + range.start as f64 * spacing - self.bandwidth / 2.0 + bandwidth / 2.0;
        Ok(GridConfig {
            carrier_freq,
            bandwidth,
            n_subcarriers: count,
            ..*self
        })
    }
}

/// Packet timing: snapshot `k` is captured at `start_time + k * inter_packet_period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureSchedule {
    /// Inter-packet period Tc, seconds.
    pub inter_packet_period: f64,
    pub n_snapshots: usize,
    pub start_time: f64,
}

impl CaptureSchedule {
    pub fn new(inter_packet_period: f64, n_snapshots: usize) -> Result<Self> {
        let schedule = CaptureSchedule {
            inter_packet_period,
            n_snapshots,
            start_time: 0.0,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Schedule covering `duration` seconds at period `tc`.
    pub fn for_duration(tc: f64, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "duration must be positive, got {duration}"
            )));
        }
        if !(tc.is_finite() && tc > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "inter_packet_period must be positive, got {tc}"
            )));
        }
        Self::new(tc, (duration / tc).round().max(1.0) as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inter_packet_period.is_finite() && self.inter_packet_period > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "inter_packet_period must be positive, got {}",
                self.inter_packet_period
            )));
        }
        if self.n_snapshots == 0 {
            return Err(Error::InvalidSchedule("n_snapshots must be positive".into()));
        }
        if !self.start_time.is_finite() {
            return Err(Error::InvalidSchedule("start_time must be finite".into()));
        }
        Ok(())
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start_time + k as f64 * self.inter_packet_period
    }

    pub fn duration(&self) -> f64 {
        self.n_snapshots as f64 * self.inter_packet_period
    }
}

/// Complex CFR indexed by (snapshot, subcarrier, receive antenna), stored
/// row-major with the antenna index varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CfrTensor {
    data: Vec<Complex64>,
    grid: GridConfig,
    schedule: CaptureSchedule,
}

impl CfrTensor {
    pub fn zeros(grid: GridConfig, schedule: CaptureSchedule) -> Self {
        let len = schedule.n_snapshots * grid.n_subcarriers * grid.n_rx_antennas;
        CfrTensor {
            data: vec![Complex64::new(0.0, 0.0); len],
            grid,
            schedule,
        }
    }

    pub fn from_vec(
        data: Vec<Complex64>,
        grid: GridConfig,
        schedule: CaptureSchedule,
    ) -> Result<Self> {
        grid.validate()?;
        schedule.validate()?;
        let expected = schedule.n_snapshots * grid.n_subcarriers * grid.n_rx_antennas;
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} values for shape {}x{}x{}",
                data.len(),
                schedule.n_snapshots,
                grid.n_subcarriers,
                grid.n_rx_antennas
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch(format!("non-finite value at flat index {i}")));
        }
        Ok(CfrTensor {
            data,
            grid,
            schedule,
        })
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn schedule(&self) -> &CaptureSchedule {
        &self.schedule
    }

    /// (snapshots, subcarriers, antennas)
    pub fn shape(&self) -> (usize, usize, usize) {
        (
            self.schedule.n_snapshots,
            self.grid.n_subcarriers,
            self.grid.n_rx_antennas,
        )
    }

    pub fn n_snapshots(&self) -> usize {
        self.schedule.n_snapshots
    }

    pub fn n_subcarriers(&self) -> usize {
        self.grid.n_subcarriers
    }

    pub fn n_antennas(&self) -> usize {
        self.grid.n_rx_antennas
    }

    /// Number of values in one snapshot.
    pub fn row_len(&self) -> usize {
        self.grid.n_subcarriers * self.grid.n_rx_antennas
    }

    #[inline]
    pub fn flat_index(&self, snapshot: usize, subcarrier: usize, antenna: usize) -> usize {
        (snapshot * self.grid.n_subcarriers + subcarrier) * self.grid.n_rx_antennas + antenna
    }

    #[inline]
    pub fn get(&self, snapshot: usize, subcarrier: usize, antenna: usize) -> Complex64 {
        self.data[self.flat_index(snapshot, subcarrier, antenna)]
    }

    #[inline]
    pub fn set(&mut self, snapshot: usize, subcarrier: usize, antenna: usize, value: Complex64) {
        let i = self.flat_index(snapshot, subcarrier, antenna);
        self.data[i] = value;
    }

    /// All values of snapshot `k` (subcarrier-major, antenna-minor).
    pub fn snapshot(&self, k: usize) -> &[Complex64] {
        let len = self.row_len();
        &self.data[k * len..(k + 1) * len]
    }

    pub fn snapshot_mut(&mut self, k: usize) -> &mut [Complex64] {
        let len = self.row_len();
        &mut self.data[k * len..(k + 1) * len]
    }

    /// Values of snapshot `k` at one antenna, across subcarriers.
    pub fn antenna_row(&self, k: usize, antenna: usize) -> Vec<Complex64> {
        self.snapshot(k)
            .iter()
            .skip(antenna)
            .step_by(self.grid.n_rx_antennas)
            .copied()
            .collect()
    }

    /// Values of snapshot `k` at one subcarrier, across antennas.
    pub fn antenna_vector(&self, k: usize, subcarrier: usize) -> &[Complex64] {
        let start = self.flat_index(k, subcarrier, 0);
        &self.data[start..start + self.grid.n_rx_antennas]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Mean of |H|^2 over all entries.
    pub fn mean_power(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.data.len() as f64
    }

    /// Snapshots `range` as a new tensor whose schedule starts at the first
    /// selected snapshot's capture time.
    pub fn snapshots(&self, range: Range<usize>) -> Result<CfrTensor> {
        if range.start >= range.end || range.end > self.n_snapshots() {
            return Err(Error::OutOfRange(format!(
                "snapshot range {}..{} outside 0..{}",
                range.start,
                range.end,
                self.n_snapshots()
            )));
        }
        let len = self.row_len();
        let data = self.data[range.start * len..range.end * len].to_vec();
        let schedule = CaptureSchedule {
            inter_packet_period: self.schedule.inter_packet_period,
            n_snapshots: range.end - range.start,
            start_time: self.schedule.time(range.start),
        };
        Ok(CfrTensor {
            data,
            grid: self.grid,
            schedule,
        })
    }

    /// Every `factor`-th snapshot, starting with the first; the period of
    /// the result is `factor` times the original.
    pub fn decimate(&self, factor: usize) -> Result<CfrTensor> {
        if factor == 0 {
            return Err(Error::InvalidConfig("decimation factor must be >= 1".into()));
        }
        let len = self.row_len();
        let n = self.n_snapshots().div_ceil(factor);
        let mut data = Vec::with_capacity(n * len);
        for k in (0..self.n_snapshots()).step_by(factor) {
            data.extend_from_slice(self.snapshot(k));
        }
        let schedule = CaptureSchedule {
            inter_packet_period: self.schedule.inter_packet_period * factor as f64,
            n_snapshots: n,
            start_time: self.schedule.start_time,
        };
        Ok(CfrTensor {
            data,
            grid: self.grid,
            schedule,
        })
    }

    /// Subcarriers `range` of every snapshot, values copied bit-for-bit.
    pub fn subcarriers(&self, range: Range<usize>) -> Result<CfrTensor> {
        let grid = self.grid.sub_grid(range.clone())?;
        let n_ant = self.n_antennas();
        let mut data = Vec::with_capacity(self.n_snapshots() * grid.n_subcarriers * n_ant);
        for k in 0..self.n_snapshots() {
            let row = self.snapshot(k);
            data.extend_from_slice(&row[range.start * n_ant..range.end * n_ant]);
        }
        Ok(CfrTensor {
            data,
            grid,
            schedule: self.schedule,
        })
    }
}

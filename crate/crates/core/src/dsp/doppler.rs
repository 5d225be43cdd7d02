//! Doppler vectors from sliding windows of CFR snapshots.
//!
//! Two routes compute the same spectrum. [`doppler_spectrum`] transforms
//! every (subcarrier, antenna) series of one window with an FFT and
//! averages the powers. The stream functions instead keep a ring of lagged
//! inner products between consecutive snapshot rows; the subcarrier-averaged
//! power of any window is a short sum over those, so each snapshot is
//! touched `W` times rather than each window being transformed in full.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::sanitize::RowSanitizer;
use crate::error::{Error, Result};
use crate::tensor::CfrTensor;

/// Taper applied across the snapshots of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    #[default]
    Hann,
    Rectangular,
}

impl WindowKind {
    /// Symmetric window coefficients of length `len`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::Rectangular => vec![1.0; len],
            WindowKind::Hann if len <= 1 => vec![1.0; len],
            WindowKind::Hann => (0..len)
                .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / (len - 1) as f64).cos()))
                .collect(),
        }
    }
}

/// How per-series spectra are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean of the power spectra over every (subcarrier, antenna) series.
    #[default]
    MeanPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DopplerConfig {
    /// Snapshots per observation window.
    pub window_len: usize,
    /// Zero-padded transform length, also the number of Doppler bins.
    pub fft_len: usize,
    /// Windows advance by this many (effective) snapshots.
    pub stride: usize,
    pub window: WindowKind,
    pub aggregation: Aggregation,
}

impl Default for DopplerConfig {
    fn default() -> Self {
        DopplerConfig {
            window_len: 25,
            fft_len: 64,
            stride: 1,
            window: WindowKind::Hann,
            aggregation: Aggregation::MeanPower,
        }
    }
}

impl DopplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 || self.stride == 0 || self.fft_len < self.window_len {
            return Err(Error::InvalidConfig(format!(
                "doppler config needs window_len >= 1, stride >= 1 and fft_len >= window_len; got \
                 window_len={} fft_len={} stride={}",
                self.window_len, self.fft_len, self.stride
            )));
        }
        Ok(())
    }

    /// Number of windows a `n_snapshots` capture yields at decimation `k`.
    pub fn n_windows(&self, n_snapshots: usize, k: usize) -> usize {
        let n = n_snapshots.div_ceil(k.max(1));
        if n < self.window_len {
            0
        } else {
            (n - self.window_len) / self.stride + 1
        }
    }

    /// Minimum capture length for one window at decimation `k`.
    pub fn min_snapshots(&self, k: usize) -> usize {
        k * (self.window_len - 1) + 1
    }
}

/// Zero-frequency-centred Doppler power spectrum of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerVector {
    /// Power of the mean-removed, windowed series. Index `fft_len / 2` is
    /// zero Doppler; index `i` is `(i - fft_len / 2) * bin_width` Hz.
    pub power: Vec<f64>,
    pub bin_width: f64,
    /// Capture time of the newest snapshot in the window, seconds.
    pub timestamp: f64,
    /// Zero-Doppler power of the removed per-series means (static clutter).
    pub static_power: f64,
}

impl DopplerVector {
    pub fn center(&self) -> usize {
        self.power.len() / 2
    }

    pub fn frequency(&self, index: usize) -> f64 {
        (index as f64 - self.center() as f64) * self.bin_width
    }

    /// Index of the strongest dynamic bin (lowest index on ties).
    pub fn argmax(&self) -> usize {
        super::argmax(&self.power)
    }

    /// Signed offset of the strongest dynamic bin from the centre.
    pub fn peak_offset(&self) -> isize {
        self.argmax() as isize - self.center() as isize
    }

    /// Spectrum including the static clutter in the zero-Doppler bin.
    pub fn total_power(&self) -> Vec<f64> {
        let mut p = self.power.clone();
        let c = self.center();
        p[c] += self.static_power;
        p
    }
}

/// Doppler spectrum of a window of exactly `config.window_len` snapshots
/// spaced `effective_period` apart.
pub fn doppler_spectrum(
    window: &CfrTensor,
    config: &DopplerConfig,
    effective_period: f64,
) -> Result<DopplerVector> {
    config.validate()?;
    check_period(effective_period)?;
    let w = config.window_len;
    let n = window.n_snapshots();
    if n < w {
        return Err(Error::InsufficientData {
            needed: w,
            available: n,
        });
    }
    if n > w {
        return Err(Error::ShapeMismatch(format!(
            "doppler window holds {n} snapshots, expected {w}"
        )));
    }
    let f = config.fft_len;
    let taper = config.window.coefficients(w);
    let taper_sum: f64 = taper.iter().sum();
    let fft = FftPlanner::new().plan_fft_inverse(f);
    let m = window.row_len();

    let mut acc = vec![0.0; f];
    let mut static_acc = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); f];
    for s in 0..m {
        let mean = (0..w).map(|t| window.snapshot(t)[s]).sum::<Complex64>() / w as f64;
        static_acc += mean.norm_sqr();
        for (t, slot) in buf.iter_mut().enumerate() {
            *slot = if t < w {
                (window.snapshot(t)[s] - mean) * taper[t]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fft.process(&mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += v.norm_sqr();
        }
    }

    let c = f / 2;
    let mut power = vec![0.0; f];
    for (i, p) in power.iter_mut().enumerate() {
        let q = (i as isize - c as isize).rem_euclid(f as isize) as usize;
        *p = acc[q] / m as f64;
    }
    Ok(DopplerVector {
        power,
        bin_width: 1.0 / (f as f64 * effective_period),
        timestamp: window.schedule().time(n - 1),
        static_power: taper_sum * taper_sum * static_acc / m as f64,
    })
}

fn check_period(period: f64) -> Result<()> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "effective period must be positive, got {period}"
        )));
    }
    Ok(())
}

/// Streaming accumulator of lagged row inner products.
struct LagGram {
    w: usize,
    f: usize,
    m: usize,
    /// Ring of the last `w` rows, split into real and imaginary parts.
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    /// `lags[t % w][l] = Σ_s x_t[s] · conj(x_{t+l}[s])`.
    lags: Vec<Vec<Complex64>>,
    taper: Vec<f64>,
    taper_sum: f64,
    /// `twiddle[j] = exp(+j 2π j / f)`.
    twiddle: Vec<Complex64>,
    gram: Vec<Complex64>,
    lag_sums: Vec<Complex64>,
}

impl LagGram {
    fn new(config: &DopplerConfig, m: usize) -> Self {
        let w = config.window_len;
        let f = config.fft_len;
        let taper = config.window.coefficients(w);
        LagGram {
            w,
            f,
            m,
            re: vec![vec![0.0; m]; w],
            im: vec![vec![0.0; m]; w],
            lags: vec![vec![Complex64::new(0.0, 0.0); w]; w],
            taper_sum: taper.iter().sum(),
            taper,
            twiddle: (0..f)
                .map(|j| Complex64::cis(2.0 * PI * j as f64 / f as f64))
                .collect(),
            gram: vec![Complex64::new(0.0, 0.0); w * w],
            lag_sums: vec![Complex64::new(0.0, 0.0); w],
        }
    }

    /// Adds row `u`, already stored in ring slot `u % w`.
    fn push(&mut self, u: usize) {
        let w = self.w;
        let slot = u % w;
        for l in 0..w.min(u + 1) {
            let other = (u - l) % w;
            let v = dot_conj(&self.re[other], &self.im[other], &self.re[slot], &self.im[slot]);
            self.lags[other][l] = v;
        }
    }

    /// Spectrum of the window whose first row is `s0`; rows up to
    /// `s0 + w - 1` must have been pushed.
    fn spectrum(&mut self, s0: usize) -> (Vec<f64>, f64) {
        let w = self.w;
        let g = &mut self.gram;
        for i in 0..w {
            for j in i..w {
                let v = self.lags[(s0 + i) % w][j - i];
                g[i * w + j] = v;
                g[j * w + i] = v.conj();
            }
        }
        let wf = w as f64;
        let row_means: Vec<Complex64> = (0..w)
            .map(|i| g[i * w..(i + 1) * w].iter().sum::<Complex64>() / wf)
            .collect();
        let grand = row_means.iter().sum::<Complex64>().re / wf;

        for d in 0..w {
            let mut r = Complex64::new(0.0, 0.0);
            for j in 0..w - d {
                let i = j + d;
                let centred = g[i * w + j] - row_means[i] - row_means[j].conj() + grand;
                r += centred * (self.taper[i] * self.taper[j]);
            }
            self.lag_sums[d] = r;
        }

        let f = self.f;
        let c = f / 2;
        let scale = 1.0 / self.m as f64;
        let power = (0..f)
            .map(|idx| {
                let q = (idx as isize - c as isize).rem_euclid(f as isize) as usize;
                let mut p = self.lag_sums[0].re;
                for d in 1..w {
                    p += 2.0 * (self.lag_sums[d] * self.twiddle[(q * d) % f]).re;
                }
                (p * scale).max(0.0)
            })
            .collect();
        let static_power = self.taper_sum * self.taper_sum * grand * scale;
        (power, static_power.max(0.0))
    }
}

/// `Σ a · conj(b)` over split-complex slices.
fn dot_conj(are: &[f64], aim: &[f64], bre: &[f64], bim: &[f64]) -> Complex64 {
    let mut acc = [0.0f64; 8];
    let chunks = are.len() / 4;
    for c in 0..chunks {
        for k in 0..4 {
            let i = c * 4 + k;
            acc[k] += are[i] * bre[i] + aim[i] * bim[i];
            acc[4 + k] += aim[i] * bre[i] - are[i] * bim[i];
        }
    }
    let mut re = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    let mut im = (acc[4] + acc[5]) + (acc[6] + acc[7]);
    for i in chunks * 4..are.len() {
        re += are[i] * bre[i] + aim[i] * bim[i];
        im += aim[i] * bre[i] - are[i] * bim[i];
    }
    Complex64::new(re, im)
}

/// Drives [`LagGram`] over `n_rows` rows produced by `fill(t, row)`.
fn stream_rows<F>(
    n_rows: usize,
    row_len: usize,
    config: &DopplerConfig,
    effective_period: f64,
    time_of_row: impl Fn(usize) -> f64,
    mut fill: F,
) -> Vec<DopplerVector>
where
    F: FnMut(usize, &mut [Complex64]),
{
    let w = config.window_len;
    let mut engine = LagGram::new(config, row_len);
    let mut row = vec![Complex64::new(0.0, 0.0); row_len];
    let bin_width = 1.0 / (config.fft_len as f64 * effective_period);
    let mut out = Vec::with_capacity(config.n_windows(n_rows, 1));
    for u in 0..n_rows {
        fill(u, &mut row);
        let slot = u % w;
        for (s, v) in row.iter().enumerate() {
            engine.re[slot][s] = v.re;
            engine.im[slot][s] = v.im;
        }
        engine.push(u);
        if u + 1 >= w {
            let s0 = u + 1 - w;
            if s0 % config.stride == 0 {
                let (power, static_power) = engine.spectrum(s0);
                out.push(DopplerVector {
                    power,
                    bin_width,
                    timestamp: time_of_row(u),
                    static_power,
                });
            }
        }
    }
    out
}

fn stream_prelude(cfr: &CfrTensor, config: &DopplerConfig, k: usize) -> Result<usize> {
    config.validate()?;
    if k == 0 {
        return Err(Error::InvalidConfig("sub-sampling factor must be >= 1".into()));
    }
    let n = cfr.n_snapshots();
    if config.n_windows(n, k) == 0 {
        return Err(Error::InsufficientData {
            needed: config.min_snapshots(k),
            available: n,
        });
    }
    Ok(n.div_ceil(k))
}

/// Doppler vectors of every window of `cfr` after keeping every `k`-th
/// snapshot (effective period `k · Tc`).
///
/// Produces `floor((ceil(n / k) - W) / stride) + 1` vectors, equal within
/// rounding to applying [`doppler_spectrum`] to each window.
pub fn doppler_vector_stream(
    cfr: &CfrTensor,
    config: &DopplerConfig,
    k: usize,
) -> Result<Vec<DopplerVector>> {
    let n_rows = stream_prelude(cfr, config, k)?;
    let schedule = *cfr.schedule();
    Ok(stream_rows(
        n_rows,
        cfr.row_len(),
        config,
        schedule.inter_packet_period * k as f64,
        |t| schedule.time(t * k),
        |t, row| row.copy_from_slice(cfr.snapshot(t * k)),
    ))
}

/// Fused sub-band slice, phase sanitization and Doppler stream.
///
/// Bit-identical to slicing `subcarriers`, running
/// [`sanitize_phase`](super::sanitize_phase) and then
/// [`doppler_vector_stream`], without materialising the intermediate
/// tensors.
pub fn sanitized_doppler_stream(
    cfr: &CfrTensor,
    subcarriers: Range<usize>,
    k: usize,
    config: &DopplerConfig,
) -> Result<Vec<DopplerVector>> {
    if subcarriers.end > cfr.n_subcarriers() || subcarriers.len() < 2 {
        return Err(Error::OutOfRange(format!(
            "subcarrier range {}..{} must hold >= 2 of 0..{}",
            subcarriers.start,
            subcarriers.end,
            cfr.n_subcarriers()
        )));
    }
    let n_rows = stream_prelude(cfr, config, k)?;
    let schedule = *cfr.schedule();
    let n_ant = cfr.n_antennas();
    let span = subcarriers.start * n_ant..subcarriers.end * n_ant;
    let mut sanitizer = RowSanitizer::default();
    let mut buf = Vec::new();
    Ok(stream_rows(
        n_rows,
        span.len(),
        config,
        schedule.inter_packet_period * k as f64,
        |t| schedule.time(t * k),
        |t, row| {
            row.copy_from_slice(&cfr.snapshot(t * k)[span.clone()]);
            sanitizer.apply_snapshot(row, n_ant, &mut buf);
        },
    ))
}

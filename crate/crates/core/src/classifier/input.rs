use crate::dsp::DopplerVector;
use crate::error::{Error, Result};

/// Ratio between the mean per-bin total power of a Doppler stack and the
/// reference it is divided by. Typical dynamic bins then land well above 1,
/// where `log(1 + x)` behaves logarithmically.
pub const LOG_HEADROOM: f64 = 1e3;

/// A stack of `n_vectors` Doppler vectors of `fft_len` bins each, divided
/// by a per-input reference power.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierInput {
    n_vectors: usize,
    fft_len: usize,
    data: Vec<f64>,
    /// Reference power the stored values were divided by; zero for an
    /// all-zero stack, which is kept as is.
    scale: f64,
}

impl ClassifierInput {
    /// Builds an input from row-major raw powers, scaled to unit mean.
    pub fn new(n_vectors: usize, fft_len: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_reference(n_vectors, fft_len, data, None)
    }

    /// Like [`new`](Self::new) but divides by `reference` (when given and
    /// positive) instead of the mean of `data`.
    pub fn with_reference(
        n_vectors: usize,
        fft_len: usize,
        mut data: Vec<f64>,
        reference: Option<f64>,
    ) -> Result<Self> {
        if n_vectors == 0 || fft_len == 0 {
            return Err(Error::EmptyInput("classifier input needs rows and bins"));
        }
        if data.len() != n_vectors * fft_len {
            return Err(Error::ShapeMismatch(format!(
                "classifier input of {n_vectors}x{fft_len} given {} values",
                data.len()
            )));
        }
        if data.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidConfig(
                "classifier input values must be finite and non-negative".into(),
            ));
        }
        let scale = match reference {
            Some(r) if r.is_finite() && r > 0.0 => r,
            _ => data.iter().sum::<f64>() / data.len() as f64,
        };
        if scale > 0.0 {
            data.iter_mut().for_each(|v| *v /= scale);
        }
        Ok(ClassifierInput {
            n_vectors,
            fft_len,
            data,
            scale,
        })
    }

    /// Stacks the dynamic power of consecutive Doppler vectors, divided by
    /// their mean per-bin total power (static clutter included). The ratio
    /// of motion to clutter energy thus survives normalization while any
    /// overall gain does not.
    pub fn from_vectors(vectors: &[DopplerVector]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::EmptyInput("classifier input from zero Doppler vectors"));
        };
        let fft_len = first.power.len();
        let mut data = Vec::with_capacity(vectors.len() * fft_len);
        for v in vectors {
            if v.power.len() != fft_len {
                return Err(Error::ShapeMismatch(format!(
                    "Doppler vectors of {} and {fft_len} bins in one input",
                    v.power.len()
                )));
            }
            data.extend_from_slice(&v.power);
        }
        let total: f64 = data.iter().sum::<f64>() + vectors.iter().map(|v| v.static_power).sum::<f64>();
        let reference = total / data.len() as f64 / LOG_HEADROOM;
        Self::with_reference(vectors.len(), fft_len, data, Some(reference))
    }

    pub fn n_vectors(&self) -> usize {
        self.n_vectors
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.fft_len..(i + 1) * self.fft_len]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// Per-bin mean and population standard deviation of `log(1 + x)` over the
/// rows: `[mean_0 .. mean_{F-1}, std_0 .. std_{F-1}]`.
pub fn featurize(input: &ClassifierInput) -> Vec<f64> {
    let f = input.fft_len;
    let n = input.n_vectors as f64;
    let logs: Vec<f64> = input.data.iter().map(|v| v.ln_1p()).collect();
    let mut out = vec![0.0; 2 * f];
    let (mean, spread) = out.split_at_mut(f);
    for row in logs.chunks_exact(f) {
        mean.iter_mut().zip(row).for_each(|(m, x)| *m += x);
    }
    mean.iter_mut().for_each(|m| *m /= n);
    for row in logs.chunks_exact(f) {
        for ((s, x), m) in spread.iter_mut().zip(row).zip(mean.iter()) {
            *s += (x - m) * (x - m);
        }
    }
    spread.iter_mut().for_each(|s| *s = (*s / n).sqrt());
    out
}

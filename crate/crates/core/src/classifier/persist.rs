//! Text model files.
//!
//! ```text
//! WSLB-MODEL 1
//! architecture <string>
//! fft_len <int>
//! n_vectors <int>
//! classes Empty,InPlace,Walking,Running
//! learning_rate <f64>
//! epochs <int>
//! seed <int>
//! init_std <f64>
//! params <count>
//! <one f64 per line: feature means, feature scales, weights, biases>
//! ```
//!
//! Floats are written in shortest round-trip form, so loading a saved
//! model reproduces it bit for bit.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::model::{Hyperparameters, InputShape, Model, ARCHITECTURE};
use crate::activity::ActivityClass;
use crate::error::{Error, Result};

const MAGIC: &str = "WSLB-MODEL";
const VERSION: u32 = 1;

pub fn model_to_string(model: &Model) -> String {
    let classes: Vec<&str> = ActivityClass::ALL.iter().map(|c| c.name()).collect();
    let mut s = String::new();
    let h = &model.hyper;
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "architecture {ARCHITECTURE}");
    let _ = writeln!(s, "fft_len {}", model.shape.fft_len);
    let _ = writeln!(s, "n_vectors {}", model.shape.n_vectors);
    let _ = writeln!(s, "classes {}", classes.join(","));
    let _ = writeln!(s, "learning_rate {}", h.learning_rate);
    let _ = writeln!(s, "epochs {}", h.epochs);
    let _ = writeln!(s, "seed {}", h.seed);
    let _ = writeln!(s, "init_std {}", h.init_std);
    let n = 2 * model.n_features() + model.n_params();
    let _ = writeln!(s, "params {n}");
    for v in model
        .feature_mean
        .iter()
        .chain(&model.feature_scale)
        .chain(&model.weights)
        .chain(&model.bias)
    {
        let _ = writeln!(s, "{v}");
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => Ok((i + 1, l.trim_end_matches('\r'))),
            None => Err(Error::ModelFormat {
                line: 0,
                reason: "unexpected end of file".into(),
            }),
        }
    }

    fn field<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, text) = self.next_line()?;
        let value = text
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| Error::ModelFormat {
                line,
                reason: format!("expected `{key} <value>`, found `{text}`"),
            })?;
        value.parse().map_err(|_| Error::ModelFormat {
            line,
            reason: format!("invalid value for `{key}`: `{value}`"),
        })
    }
}

pub fn model_from_str(text: &str) -> Result<Model> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (line, header) = lines.next_line()?;
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|r| r.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::ModelFormat {
            line,
            reason: format!("expected `{MAGIC} {VERSION}` header"),
        })?;
    if version != VERSION {
        return Err(Error::ModelFormat {
            line,
            reason: format!("unsupported model version {version}"),
        });
    }
    let arch: String = lines.field("architecture")?;
    if arch != ARCHITECTURE {
        return Err(Error::ModelFormat {
            line: 2,
            reason: format!("unknown architecture `{arch}`"),
        });
    }
    let fft_len: usize = lines.field("fft_len")?;
    let n_vectors: usize = lines.field("n_vectors")?;
    let classes: String = lines.field("classes")?;
    let expected: Vec<&str> = ActivityClass::ALL.iter().map(|c| c.name()).collect();
    if classes != expected.join(",") {
        return Err(Error::ModelFormat {
            line: 5,
            reason: format!("class list `{classes}` does not match this build"),
        });
    }
    let hyper = Hyperparameters {
        learning_rate: lines.field("learning_rate")?,
        epochs: lines.field("epochs")?,
        seed: lines.field("seed")?,
        init_std: lines.field("init_std")?,
    };
    let count: usize = lines.field("params")?;
    let shape = InputShape { n_vectors, fft_len };
    let mut model = Model::zeros(shape, hyper);
    let d = model.n_features();
    if count != 2 * d + model.n_params() {
        return Err(Error::ModelFormat {
            line: 10,
            reason: format!("parameter count {count} does not fit fft_len {fft_len}"),
        });
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, text) = lines.next_line()?;
        let v: f64 = text.trim().parse().map_err(|_| Error::ModelFormat {
            line,
            reason: format!("invalid number `{text}`"),
        })?;
        values.push(v);
    }
    if let Some((line, extra)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::ModelFormat {
            line: line + 1,
            reason: format!("unexpected trailing content `{extra}`"),
        });
    }
    let (mean, rest) = values.split_at(d);
    let (scale, rest) = rest.split_at(d);
    let (weights, bias) = rest.split_at(model.weights.len());
    model.feature_mean.copy_from_slice(mean);
    model.feature_scale.copy_from_slice(scale);
    model.weights.copy_from_slice(weights);
    model.bias.copy_from_slice(bias);
    Ok(model)
}

pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    std::fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use super::input::{featurize, ClassifierInput};
use crate::activity::ActivityClass;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

const K: usize = ActivityClass::COUNT;

pub const ARCHITECTURE: &str = "pooled-log-mean-std/standardize/affine/softmax";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Standard deviation of the initial weights.
    pub init_std: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            learning_rate: 0.5,
            epochs: 200,
            seed: 0,
            init_std: 0.01,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0)
            || !(self.init_std.is_finite() && self.init_std >= 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be > 0 and init_std >= 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Expected input dimensions of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputShape {
    pub n_vectors: usize,
    pub fft_len: usize,
}

impl InputShape {
    pub fn n_features(&self) -> usize {
        2 * self.fft_len
    }

    fn check(&self, input: &ClassifierInput) -> Result<()> {
        if input.n_vectors() != self.n_vectors || input.fft_len() != self.fft_len {
            return Err(Error::ShapeMismatch(format!(
                "model expects {}x{} inputs, got {}x{}",
                self.n_vectors,
                self.fft_len,
                input.n_vectors(),
                input.fft_len()
            )));
        }
        Ok(())
    }
}

/// Feature vectors with their labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<ActivityClass>,
}

impl FeatureSet {
    pub fn push(&mut self, features: Vec<f64>, label: ActivityClass) {
        self.features.push(features);
        self.labels.push(label);
    }

    pub fn extend_class(&mut self, features: &[Vec<f64>], label: ActivityClass) {
        for f in features {
            self.push(f.clone(), label);
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn from_inputs(inputs: &[(ClassifierInput, ActivityClass)]) -> Self {
        let mut set = FeatureSet::default();
        for (input, label) in inputs {
            set.push(featurize(input), *label);
        }
        set
    }
}

/// Feature standardization followed by an affine map to class logits.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub shape: InputShape,
    pub hyper: Hyperparameters,
    /// Training-set feature means and standard deviations (zeros replaced
    /// by one).
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    /// Row-major `K × n_features`.
    pub weights: Vec<f64>,
    pub bias: [f64; K],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: ActivityClass,
    pub probabilities: [f64; K],
}

/// Result of [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: Model,
    /// Training loss before the first update and after every epoch.
    pub loss_trace: Vec<f64>,
    /// Validation loss at the same points, if a validation set was given.
    pub val_trace: Vec<f64>,
    /// Number of updates applied to the returned parameters.
    pub best_epoch: usize,
}

pub fn softmax(logits: &[f64; K]) -> [f64; K] {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; K];
    let mut total = 0.0;
    for (o, z) in out.iter_mut().zip(logits) {
        *o = (z - max).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
    out
}

/// `-log softmax(z)[y]`, evaluated stably.
fn cross_entropy(z: &[f64; K], y: usize) -> f64 {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln() - z[y]
}

/// Index of the largest value, lowest index on ties.
fn argmax(values: &[f64; K]) -> usize {
    let mut best = 0;
    for i in 1..K {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

impl Model {
    /// Zero affine parameters and identity standardization.
    pub fn zeros(shape: InputShape, hyper: Hyperparameters) -> Self {
        let d = shape.n_features();
        Model {
            shape,
            hyper,
            feature_mean: vec![0.0; d],
            feature_scale: vec![1.0; d],
            weights: vec![0.0; K * d],
            bias: [0.0; K],
        }
    }

    /// Standardization fitted to `set`, weights drawn from
    /// `N(0, init_std²)` seeded by `hyper.seed`, zero bias.
    pub fn initialize(shape: InputShape, hyper: Hyperparameters, set: &FeatureSet) -> Result<Self> {
        hyper.validate()?;
        let d = shape.n_features();
        if set.is_empty() {
            return Err(Error::EmptyInput("training set"));
        }
        if let Some(f) = set.features.iter().find(|f| f.len() != d) {
            return Err(Error::ShapeMismatch(format!(
                "expected {d} features, got {}",
                f.len()
            )));
        }
        let n = set.len() as f64;
        let mut mean = vec![0.0; d];
        for f in &set.features {
            mean.iter_mut().zip(f).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for f in &set.features {
            for ((v, x), m) in var.iter_mut().zip(f).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = var
            .iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();

        let mut rng = rng_from_seed(hyper.seed);
        let normal = Normal::new(0.0, hyper.init_std)
            .map_err(|e| Error::InvalidConfig(format!("init_std: {e}")))?;
        let weights = (0..K * d).map(|_| rng.sample(normal)).collect();
        Ok(Model {
            shape,
            hyper,
            feature_mean: mean,
            feature_scale: scale,
            weights,
            bias: [0.0; K],
        })
    }

    pub fn n_features(&self) -> usize {
        self.shape.n_features()
    }

    /// Number of trainable parameters (weights and biases).
    pub fn n_params(&self) -> usize {
        self.weights.len() + K
    }

    fn standardize(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(&self.feature_mean)
            .zip(&self.feature_scale)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }

    fn logits_std(&self, x: &[f64]) -> [f64; K] {
        let d = self.n_features();
        let mut z = self.bias;
        for (c, zc) in z.iter_mut().enumerate() {
            let w = &self.weights[c * d..(c + 1) * d];
            *zc += w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        z
    }

    pub fn logits(&self, features: &[f64]) -> Result<[f64; K]> {
        if features.len() != self.n_features() {
            return Err(Error::ShapeMismatch(format!(
                "model expects {} features, got {}",
                self.n_features(),
                features.len()
            )));
        }
        Ok(self.logits_std(&self.standardize(features)))
    }

    pub fn predict_features(&self, features: &[f64]) -> Result<Prediction> {
        let probabilities = softmax(&self.logits(features)?);
        let class = ActivityClass::from_index(argmax(&probabilities)).expect("class index");
        Ok(Prediction {
            class,
            probabilities,
        })
    }

    fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.extend_from_slice(&self.bias);
        p
    }

    fn set_params(&mut self, p: &[f64]) {
        let nw = self.weights.len();
        self.weights.copy_from_slice(&p[..nw]);
        self.bias.copy_from_slice(&p[nw..]);
    }
}

pub fn predict(model: &Model, input: &ClassifierInput) -> Result<Prediction> {
    model.shape.check(input)?;
    model.predict_features(&featurize(input))
}

/// Standardized features and one-hot targets of a set.
struct Batch {
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
}

impl Batch {
    fn new(model: &Model, set: &FeatureSet) -> Result<Self> {
        let d = model.n_features();
        let mut x = Vec::with_capacity(set.len());
        for f in &set.features {
            if f.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "expected {d} features, got {}",
                    f.len()
                )));
            }
            x.push(model.standardize(f));
        }
        Ok(Batch {
            x,
            y: set.labels.iter().map(|c| c.index()).collect(),
        })
    }

    fn loss(&self, model: &Model) -> f64 {
        let total: f64 = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(x, &y)| cross_entropy(&model.logits_std(x), y))
            .sum();
        total / self.x.len() as f64
    }

    /// Mean cross-entropy and its gradient in parameter order
    /// (weights row-major, then biases).
    fn loss_and_grad(&self, model: &Model, grad: &mut [f64]) -> f64 {
        let d = model.n_features();
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut total = 0.0;
        for (x, &y) in self.x.iter().zip(&self.y) {
            let z = model.logits_std(x);
            total += cross_entropy(&z, y);
            let p = softmax(&z);
            for c in 0..K {
                let e = p[c] - if c == y { 1.0 } else { 0.0 };
                let row = &mut grad[c * d..(c + 1) * d];
                for (g, xv) in row.iter_mut().zip(x) {
                    *g += e * xv;
                }
                grad[K * d + c] += e;
            }
        }
        let n = self.x.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        total / n
    }
}

fn check_classes(set: &FeatureSet) -> Result<()> {
    for class in ActivityClass::ALL {
        if !set.labels.contains(&class) {
            return Err(Error::DegenerateDataset(class));
        }
    }
    Ok(())
}

/// Full-batch gradient descent on mean cross-entropy over feature vectors.
///
/// With a validation set, the returned parameters are those with the
/// lowest validation loss seen (earliest on ties); otherwise the final
/// ones.
pub fn train_features(
    shape: InputShape,
    train: &FeatureSet,
    validation: Option<&FeatureSet>,
    hyper: Hyperparameters,
) -> Result<TrainOutcome> {
    check_classes(train)?;
    let mut model = Model::initialize(shape, hyper, train)?;
    let batch = Batch::new(&model, train)?;
    let val = validation.map(|v| Batch::new(&model, v)).transpose()?;
    if val.as_ref().is_some_and(|v| v.x.is_empty()) {
        return Err(Error::EmptyInput("validation set"));
    }

    let mut params = model.params();
    let mut grad = vec![0.0; params.len()];
    let mut loss_trace = Vec::with_capacity(hyper.epochs + 1);
    let mut val_trace = Vec::new();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;

    for epoch in 0..=hyper.epochs {
        let loss = batch.loss_and_grad(&model, &mut grad);
        loss_trace.push(loss);
        if let Some(v) = &val {
            let vl = v.loss(&model);
            val_trace.push(vl);
            if best.as_ref().is_none_or(|(b, _, _)| vl < *b) {
                best = Some((vl, epoch, params.clone()));
            }
        }
        if epoch == hyper.epochs {
            break;
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= hyper.learning_rate * g;
        }
        model.set_params(&params);
    }

    let best_epoch = match best {
        Some((_, epoch, p)) => {
            model.set_params(&p);
            epoch
        }
        None => hyper.epochs,
    };
    Ok(TrainOutcome {
        model,
        loss_trace,
        val_trace,
        best_epoch,
    })
}

/// Featurizes labelled inputs and trains on them.
pub fn train(
    dataset: &[(ClassifierInput, ActivityClass)],
    validation: Option<&[(ClassifierInput, ActivityClass)]>,
    hyper: Hyperparameters,
) -> Result<TrainOutcome> {
    let Some((first, _)) = dataset.first() else {
        return Err(Error::EmptyInput("training set"));
    };
    let shape = InputShape {
        n_vectors: first.n_vectors(),
        fft_len: first.fft_len(),
    };
    for (input, _) in dataset.iter().chain(validation.unwrap_or(&[])) {
        shape.check(input)?;
    }
    let train_set = FeatureSet::from_inputs(dataset);
    let val_set = validation.map(FeatureSet::from_inputs);
    train_features(shape, &train_set, val_set.as_ref(), hyper)
}

/// Analytic versus finite-difference gradients of the mean cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    /// `max |a - n| / max(|a|, |n|, 1e-6)` over parameters.
    pub max_rel_error: f64,
    pub max_abs_analytic: f64,
    pub max_abs_numeric: f64,
}

/// Compares analytic gradients on `samples` against central differences
/// with step `epsilon`.
pub fn gradient_check(model: &Model, samples: &FeatureSet, epsilon: f64) -> Result<GradientCheck> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!(
            "gradient check epsilon must lie in [1e-7, 1e-3], got {epsilon}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput("gradient check samples"));
    }
    let batch = Batch::new(model, samples)?;
    let mut work = model.clone();
    let params = model.params();
    let mut analytic = vec![0.0; params.len()];
    batch.loss_and_grad(model, &mut analytic);

    let mut out = GradientCheck {
        max_rel_error: 0.0,
        max_abs_analytic: 0.0,
        max_abs_numeric: 0.0,
    };
    let mut probe = params.clone();
    for (i, a) in analytic.iter().enumerate() {
        probe[i] = params[i] + epsilon;
        work.set_params(&probe);
        let plus = batch.loss(&work);
        probe[i] = params[i] - epsilon;
        work.set_params(&probe);
        let minus = batch.loss(&work);
        probe[i] = params[i];
        let numeric = (plus - minus) / (2.0 * epsilon);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        out.max_rel_error = out.max_rel_error.max(rel);
        out.max_abs_analytic = out.max_abs_analytic.max(a.abs());
        out.max_abs_numeric = out.max_abs_numeric.max(numeric.abs());
    }
    Ok(out)
}

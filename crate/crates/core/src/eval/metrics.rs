use serde::Serialize;

use crate::activity::ActivityClass;
use crate::error::{Error, Result};

const K: usize = ActivityClass::COUNT;

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; K]; K],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f1: f64,
}

impl ConfusionMatrix {
    pub fn from_predictions(predictions: &[ActivityClass], labels: &[ActivityClass]) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} predictions for {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::EmptyInput("metrics over zero samples"));
        }
        let mut m = ConfusionMatrix::default();
        for (p, l) in predictions.iter().zip(labels) {
            m.record(*l, *p);
        }
        Ok(m)
    }

    pub fn record(&mut self, truth: ActivityClass, predicted: ActivityClass) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let hits: u64 = (0..K).map(|c| self.counts[c][c]).sum();
        hits as f64 / self.total() as f64
    }

    /// Per-class F1; `None` for a class with neither true nor predicted
    /// instances.
    pub fn f1(&self, class: ActivityClass) -> Option<f64> {
        let c = class.index();
        let tp = self.counts[c][c];
        let actual: u64 = self.counts[c].iter().sum();
        let predicted: u64 = self.counts.iter().map(|row| row[c]).sum();
        if actual == 0 && predicted == 0 {
            return None;
        }
        // 2PR/(P+R) written without the 0/0 cases
        Some(2.0 * tp as f64 / (actual + predicted) as f64)
    }

    /// Unweighted mean of the defined per-class F1 scores.
    pub fn macro_f1(&self) -> f64 {
        let scores: Vec<f64> = ActivityClass::ALL.iter().filter_map(|&c| self.f1(c)).collect();
        scores.iter().sum::<f64>() / scores.len() as f64
    }

    /// Accuracy of the derived Empty-versus-occupied decision.
    pub fn binary_accuracy(&self) -> f64 {
        let e = ActivityClass::Empty.index();
        let mut hits = 0;
        for t in 0..K {
            for p in 0..K {
                if (t == e) == (p == e) {
                    hits += self.counts[t][p];
                }
            }
        }
        hits as f64 / self.total() as f64
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            accuracy: self.accuracy(),
            macro_f1: self.macro_f1(),
        }
    }
}

/// Accuracy and macro-averaged F1 of `predictions` against `labels`.
pub fn compute_metrics(predictions: &[ActivityClass], labels: &[ActivityClass]) -> Result<Metrics> {
    Ok(ConfusionMatrix::from_predictions(predictions, labels)?.metrics())
}

/// Like [`compute_metrics`] for class names, rejecting unknown labels.
pub fn compute_metrics_named(predictions: &[&str], labels: &[&str]) -> Result<Metrics> {
    let parse = |v: &[&str]| v.iter().map(|s| s.parse()).collect::<Result<Vec<ActivityClass>>>();
    compute_metrics(&parse(predictions)?, &parse(labels)?)
}

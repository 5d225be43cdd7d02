use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::campaign::Campaign;
use super::metrics::ConfusionMatrix;
use super::splits::{make_splits, EvalSet, CAMPAIGNS_PER_CLASS};
use super::summary::{summarize, Summary};
use crate::activity::ActivityClass;
use crate::classifier::{featurize, train_features, ClassifierInput, FeatureSet, Hyperparameters, InputShape};
use crate::dsp::{sanitized_doppler_stream, DopplerConfig};
use crate::error::{Error, Result};
use crate::ofdma::RuId;

/// Everything downstream of the CFR: Doppler extraction, input stacking,
/// training and the cross-validation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub doppler: DopplerConfig,
    /// Doppler vectors per classifier input at full sampling rate.
    pub n_vectors: usize,
    pub hyper: Hyperparameters,
    pub n_rounds: usize,
    /// Master seed of the evaluation sets.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            doppler: DopplerConfig::default(),
            n_vectors: 256,
            hyper: Hyperparameters::default(),
            n_rounds: 9,
            seed: 0,
        }
    }
}

/// One sweep configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub label: String,
    pub subcarriers: Range<usize>,
    /// Keep every k-th snapshot.
    pub k: usize,
    /// Doppler vectors per classifier input.
    pub n_vectors: usize,
}

impl Variant {
    pub fn ru(ru: RuId, n_vectors: usize) -> Self {
        Variant {
            label: ru.to_string(),
            subcarriers: ru.subcarriers(),
            k: 1,
            n_vectors,
        }
    }

    /// Full-band variant sub-sampled by `k` with `n_vectors` per input.
    pub fn sampling(k: usize, n_vectors: usize) -> Self {
        Variant {
            label: format!("k={k}"),
            subcarriers: RuId::FULL.subcarriers(),
            k,
            n_vectors,
        }
    }

    fn same_work(&self, other: &Variant) -> bool {
        self.subcarriers == other.subcarriers && self.k == other.k && self.n_vectors == other.n_vectors
    }
}

/// `(k, N / k)` for k = 1..=5.
pub fn default_sampling_factors(n_vectors: usize) -> Vec<(usize, usize)> {
    (1..=5).map(|k| (k, n_vectors / k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetOutcome {
    pub set: EvalSet,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
    pub best_epoch: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config_label: String,
    pub sets: Vec<SetOutcome>,
    pub accuracy: Summary,
    pub macro_f1: Summary,
}

impl SweepReport {
    fn new(config_label: String, sets: Vec<SetOutcome>) -> Result<Self> {
        let acc: Vec<f64> = sets.iter().map(|s| s.accuracy).collect();
        let f1: Vec<f64> = sets.iter().map(|s| s.macro_f1).collect();
        Ok(SweepReport {
            config_label,
            accuracy: summarize(&acc)?,
            macro_f1: summarize(&f1)?,
            sets,
        })
    }

    /// Confusion matrix pooled over every evaluation set.
    pub fn pooled_confusion(&self) -> ConfusionMatrix {
        let mut m = ConfusionMatrix::default();
        for s in &self.sets {
            m.merge(&s.confusion);
        }
        m
    }

    /// Empty-versus-occupied accuracy pooled over every evaluation set.
    pub fn binary_accuracy(&self) -> f64 {
        self.pooled_confusion().binary_accuracy()
    }
}

/// Splits a Doppler stream into non-overlapping stacks of `n` vectors and
/// featurizes each; a trailing partial stack is dropped.
fn stack_features(
    campaign: &Campaign,
    tensor: &crate::tensor::CfrTensor,
    variant: &Variant,
    doppler: &DopplerConfig,
) -> Result<Vec<Vec<f64>>> {
    if variant.subcarriers.end > tensor.n_subcarriers() {
        return Err(Error::OutOfRange(format!(
            "{}: subcarriers {}..{} exceed the {} of campaign {}",
            variant.label,
            variant.subcarriers.start,
            variant.subcarriers.end,
            tensor.n_subcarriers(),
            campaign.id
        )));
    }
    let stream = sanitized_doppler_stream(tensor, variant.subcarriers.clone(), variant.k, doppler)?;
    let n = variant.n_vectors;
    if stream.len() < n {
        return Err(Error::InsufficientData {
            needed: n,
            available: stream.len(),
        });
    }
    stream
        .chunks_exact(n)
        .map(|block| ClassifierInput::from_vectors(block).map(|input| featurize(&input)))
        .collect()
}

/// Features indexed `[class][campaign index - 1]`, one entry per input.
type Bank = Vec<Vec<Vec<Vec<f64>>>>;

fn check_campaigns(campaigns: &[Campaign]) -> Result<()> {
    for class in ActivityClass::ALL {
        let mut idx: Vec<usize> = campaigns.iter().filter(|c| c.label == class).map(|c| c.index).collect();
        if idx.len() != CAMPAIGNS_PER_CLASS {
            return Err(Error::UnsupportedProtocol { n_campaigns: idx.len() });
        }
        idx.sort_unstable();
        if idx != (1..=CAMPAIGNS_PER_CLASS).collect::<Vec<_>>() {
            return Err(Error::InvalidConfig(format!(
                "campaigns of {class} must be numbered 1..={CAMPAIGNS_PER_CLASS}, got {idx:?}"
            )));
        }
    }
    Ok(())
}

fn evaluate_set(bank: &Bank, shape: InputShape, set: &EvalSet, hyper: Hyperparameters) -> Result<SetOutcome> {
    let mut train = FeatureSet::default();
    let mut val = FeatureSet::default();
    for class in ActivityClass::ALL {
        let per = &bank[class.index()];
        for &c in &set.train {
            train.extend_class(&per[c - 1], class);
        }
        val.extend_class(&per[set.validation - 1], class);
    }
    let hyper = Hyperparameters { seed: set.seed, ..hyper };
    let outcome = train_features(shape, &train, Some(&val), hyper)?;
    let mut confusion = ConfusionMatrix::default();
    for class in ActivityClass::ALL {
        for f in &bank[class.index()][set.test - 1] {
            confusion.record(class, outcome.model.predict_features(f)?.class);
        }
    }
    Ok(SetOutcome {
        set: *set,
        accuracy: confusion.accuracy(),
        macro_f1: confusion.macro_f1(),
        confusion,
        best_epoch: outcome.best_epoch,
    })
}

/// Evaluates every variant over the 4 × 4 campaigns.
///
/// Campaign tensors are materialised one at a time; the features of all
/// variants are extracted from each in parallel. Variants that differ
/// only in label share their work, so their per-set results are identical.
pub fn sweep_variants(campaigns: &[Campaign], variants: &[Variant], config: &PipelineConfig) -> Result<Vec<SweepReport>> {
    config.doppler.validate()?;
    config.hyper.validate()?;
    check_campaigns(campaigns)?;
    for v in variants {
        if v.n_vectors < 2 {
            return Err(Error::InvalidConfig(format!(
                "{}: inputs need at least 2 Doppler vectors, got {}",
                v.label, v.n_vectors
            )));
        }
        if v.k == 0 {
            return Err(Error::InvalidConfig(format!("{}: sub-sampling factor must be >= 1", v.label)));
        }
    }
    let mut unique: Vec<&Variant> = Vec::new();
    let owner: Vec<usize> = variants
        .iter()
        .map(|v| match unique.iter().position(|u| u.same_work(v)) {
            Some(i) => i,
            None => {
                unique.push(v);
                unique.len() - 1
            }
        })
        .collect();

    let mut banks: Vec<Bank> = vec![vec![vec![Vec::new(); CAMPAIGNS_PER_CLASS]; ActivityClass::COUNT]; unique.len()];
    for campaign in campaigns {
        let features = campaign.with_tensor(|tensor| {
            unique
                .par_iter()
                .map(|v| stack_features(campaign, tensor, v, &config.doppler))
                .collect::<Result<Vec<_>>>()
        })?;
        for (bank, f) in banks.iter_mut().zip(features) {
            bank[campaign.label.index()][campaign.index - 1] = f;
        }
    }

    let sets = make_splits(CAMPAIGNS_PER_CLASS, config.n_rounds, config.seed)?;
    let mut results: Vec<Vec<SetOutcome>> = Vec::with_capacity(unique.len());
    for (v, bank) in unique.iter().zip(&banks) {
        let shape = InputShape {
            n_vectors: v.n_vectors,
            fft_len: config.doppler.fft_len,
        };
        let outcomes = sets
            .par_iter()
            .map(|s| evaluate_set(bank, shape, s, config.hyper))
            .collect::<Result<Vec<_>>>()?;
        results.push(outcomes);
    }
    variants
        .iter()
        .zip(owner)
        .map(|(v, i)| SweepReport::new(v.label.clone(), results[i].clone()))
        .collect()
}

/// One report per resource unit, in the given order.
pub fn sweep_ru(campaigns: &[Campaign], rus: &[RuId], config: &PipelineConfig) -> Result<Vec<SweepReport>> {
    let variants: Vec<Variant> = rus.iter().map(|&ru| Variant::ru(ru, config.n_vectors)).collect();
    sweep_variants(campaigns, &variants, config)
}

/// One report per `(k, N_k)` factor on the full band, in the given order.
pub fn sweep_sampling(campaigns: &[Campaign], factors: &[(usize, usize)], config: &PipelineConfig) -> Result<Vec<SweepReport>> {
    let variants: Vec<Variant> = factors.iter().map(|&(k, n)| Variant::sampling(k, n)).collect();
    sweep_variants(campaigns, &variants, config)
}

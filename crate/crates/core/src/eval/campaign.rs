use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::activity::ActivityClass;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sim::{
    add_noise, apply_impairments, generate_activity_scene, synthesize_cfr, ImpairmentParams,
    TimingOffset,
};
use crate::tensor::{CaptureSchedule, CfrTensor, GridConfig};

/// Everything needed to synthesize one labelled capture besides its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSpec {
    pub grid: GridConfig,
    pub inter_packet_period: f64,
    /// Capture length, seconds.
    pub duration: f64,
    /// `inf` disables noise.
    pub snr_db: f64,
    /// Per-capture CFO drawn uniformly from `[-cfo_max, cfo_max]` Hz.
    pub cfo_max: f64,
    /// Per-snapshot timing offsets drawn uniformly from `[-max, max]` s.
    pub timing_offset_max: f64,
    pub phase_jitter_std: f64,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            grid: GridConfig::default(),
            inter_packet_period: 7.5e-3,
            duration: 120.0,
            snr_db: 20.0,
            cfo_max: 10e3,
            timing_offset_max: 25e-9,
            phase_jitter_std: 0.1,
        }
    }
}

impl SimulationSpec {
    pub fn schedule(&self) -> Result<CaptureSchedule> {
        CaptureSchedule::for_duration(self.inter_packet_period, self.duration)
    }
}

/// Scene, synthesis, random hardware impairments and noise for one capture.
pub fn simulate_capture(class: ActivityClass, spec: &SimulationSpec, seed: u64) -> Result<CfrTensor> {
    let schedule = spec.schedule()?;
    let scene = generate_activity_scene(class, schedule.duration().max(spec.duration), derive_seed(seed, &[0]))?;
    let clean = synthesize_cfr(&scene, &spec.grid, &schedule)?;
    let cfo = if spec.cfo_max > 0.0 {
        rng_from_seed(derive_seed(seed, &[1])).random_range(-spec.cfo_max..=spec.cfo_max)
    } else {
        0.0
    };
    let imp = ImpairmentParams {
        cfo,
        timing_offset: TimingOffset::Uniform {
            max: spec.timing_offset_max,
        },
        common_phase_jitter_std: spec.phase_jitter_std,
    };
    let impaired = apply_impairments(clean, &imp, derive_seed(seed, &[2]))?;
    add_noise(impaired, spec.snr_db, derive_seed(seed, &[3]))
}

/// Seed of campaign `index` (1-based) of `class` under a master seed.
pub fn campaign_seed(master: u64, class: ActivityClass, index: usize) -> u64 {
    derive_seed(master, &[class.index() as u64, index as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub enum CampaignData {
    InMemory(CfrTensor),
    File(PathBuf),
    /// Synthesized on demand from the campaign seed.
    Simulated(SimulationSpec),
}

/// One labelled recording session.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub id: String,
    pub label: ActivityClass,
    /// 1-based position among the campaigns of its class.
    pub index: usize,
    pub seed: u64,
    pub duration: f64,
    pub data: CampaignData,
}

impl Campaign {
    pub fn default_id(label: ActivityClass, index: usize) -> String {
        format!("{}-c{index}", label.name().to_lowercase())
    }

    pub fn simulated(label: ActivityClass, index: usize, seed: u64, spec: SimulationSpec) -> Self {
        Campaign {
            id: Self::default_id(label, index),
            label,
            index,
            seed,
            duration: spec.duration,
            data: CampaignData::Simulated(spec),
        }
    }

    /// Runs `f` on the campaign's tensor, loading or synthesizing it first
    /// if needed.
    pub fn with_tensor<R>(&self, f: impl FnOnce(&CfrTensor) -> Result<R>) -> Result<R> {
        match &self.data {
            CampaignData::InMemory(t) => f(t),
            CampaignData::File(path) => {
                let (t, meta) = crate::io::read_capture(path)?;
                if meta.label != self.label {
                    return Err(Error::InvalidHeader {
                        path: path.clone(),
                        field: "label",
                        reason: format!("file holds {}, campaign expects {}", meta.label, self.label),
                    });
                }
                f(&t)
            }
            CampaignData::Simulated(spec) => f(&simulate_capture(self.label, spec, self.seed)?),
        }
    }
}

/// The 4 × 4 simulated campaign set with seeds derived from `master`.
pub fn simulated_campaigns(spec: &SimulationSpec, master: u64) -> Vec<Campaign> {
    let mut out = Vec::new();
    for class in ActivityClass::ALL {
        for index in 1..=super::CAMPAIGNS_PER_CLASS {
            out.push(Campaign::simulated(class, index, campaign_seed(master, class, index), *spec));
        }
    }
    out
}

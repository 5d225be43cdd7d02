//! TOML run configuration.
//!
//! Every section is optional and falls back to the defaults used
//! throughout the crate; unknown keys anywhere are rejected.
//!
//! ```toml
//! [grid]
//! carrier_freq = 5.785e9
//! bandwidth = 80e6
//! n_subcarriers = 996
//! n_rx_antennas = 1
//! antenna_spacing = 0.02591
//!
//! [schedule]
//! inter_packet_period = 0.0075
//! duration = 120.0
//!
//! [simulation]
//! seed = 1
//! snr_db = 20.0            # `inf` disables noise
//!
//! [eval]
//! rus = ["RU1-996", "RU1-484"]
//! sampling_factors = [[1, 256], [2, 128]]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activity::ActivityClass;
use crate::classifier::Hyperparameters;
use crate::dsp::DopplerConfig;
use crate::error::{Error, Result};
use crate::eval::{campaign_seed, default_sampling_factors, PipelineConfig, SimulationSpec, CAMPAIGNS_PER_CLASS};
use crate::ofdma::RuId;
use crate::tensor::{CaptureSchedule, GridConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    pub inter_packet_period: f64,
    /// Length of every campaign, seconds.
    pub duration: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection {
            inter_packet_period: 7.5e-3,
            duration: 120.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// Master seed; campaign seeds derive from it unless listed explicitly.
    pub seed: u64,
    pub snr_db: f64,
    pub cfo_max: f64,
    pub timing_offset_max: f64,
    pub phase_jitter_std: f64,
    /// Optional explicit seeds, four per class name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub campaign_seeds: Option<BTreeMap<String, Vec<u64>>>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let spec = SimulationSpec::default();
        SimulationSection {
            seed: 1,
            snr_db: spec.snr_db,
            cfo_max: spec.cfo_max,
            timing_offset_max: spec.timing_offset_max,
            phase_jitter_std: spec.phase_jitter_std,
            campaign_seeds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierSection {
    /// Doppler vectors per input at full sampling rate.
    pub n_vectors: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_std: f64,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        let h = Hyperparameters::default();
        ClassifierSection {
            n_vectors: 256,
            learning_rate: h.learning_rate,
            epochs: h.epochs,
            init_std: h.init_std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub seed: u64,
    pub n_rounds: usize,
    pub rus: Vec<RuId>,
    /// `[k, N_k]` pairs.
    pub sampling_factors: Vec<[usize; 2]>,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            seed: 0,
            n_rounds: 9,
            rus: RuId::ALL.to_vec(),
            sampling_factors: default_sampling_factors(256).into_iter().map(|(k, n)| [k, n]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub schedule: ScheduleSection,
    pub simulation: SimulationSection,
    pub doppler: DopplerConfig,
    pub classifier: ClassifierSection,
    pub eval: EvalSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        CaptureSchedule::for_duration(self.schedule.inter_packet_period, self.schedule.duration)?;
        let s = &self.simulation;
        if s.snr_db.is_nan() || s.snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidConfig(format!("simulation.snr_db must be finite or inf, got {}", s.snr_db)));
        }
        for (name, v) in [
            ("cfo_max", s.cfo_max),
            ("timing_offset_max", s.timing_offset_max),
            ("phase_jitter_std", s.phase_jitter_std),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("simulation.{name} must be finite and >= 0, got {v}")));
            }
        }
        if let Some(seeds) = &s.campaign_seeds {
            for (name, list) in seeds {
                name.parse::<ActivityClass>()?;
                if list.len() != CAMPAIGNS_PER_CLASS {
                    return Err(Error::InvalidConfig(format!(
                        "simulation.campaign_seeds.{name} needs {CAMPAIGNS_PER_CLASS} seeds, got {}",
                        list.len()
                    )));
                }
            }
        }
        self.doppler.validate()?;
        self.hyperparameters().validate()?;
        if self.classifier.n_vectors < 2 {
            return Err(Error::InvalidConfig("classifier.n_vectors must be >= 2".into()));
        }
        if self.eval.n_rounds == 0 {
            return Err(Error::InvalidConfig("eval.n_rounds must be >= 1".into()));
        }
        for [k, n] in &self.eval.sampling_factors {
            if *k == 0 || *n < 2 {
                return Err(Error::InvalidConfig(format!(
                    "eval.sampling_factors entry [{k}, {n}] needs k >= 1 and N_k >= 2"
                )));
            }
        }
        Ok(())
    }

    pub fn hyperparameters(&self) -> Hyperparameters {
        Hyperparameters {
            learning_rate: self.classifier.learning_rate,
            epochs: self.classifier.epochs,
            seed: self.eval.seed,
            init_std: self.classifier.init_std,
        }
    }

    pub fn simulation_spec(&self) -> SimulationSpec {
        SimulationSpec {
            grid: self.grid,
            inter_packet_period: self.schedule.inter_packet_period,
            duration: self.schedule.duration,
            snr_db: self.simulation.snr_db,
            cfo_max: self.simulation.cfo_max,
            timing_offset_max: self.simulation.timing_offset_max,
            phase_jitter_std: self.simulation.phase_jitter_std,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            doppler: self.doppler,
            n_vectors: self.classifier.n_vectors,
            hyper: self.hyperparameters(),
            n_rounds: self.eval.n_rounds,
            seed: self.eval.seed,
        }
    }

    /// Seed of campaign `index` (1-based) of `class`.
    pub fn campaign_seed(&self, class: ActivityClass, index: usize) -> u64 {
        let explicit = self.simulation.campaign_seeds.as_ref().and_then(|m| {
            m.iter()
                .find(|(name, _)| name.parse::<ActivityClass>().ok() == Some(class))
                .map(|(_, seeds)| seeds[index - 1])
        });
        explicit.unwrap_or_else(|| campaign_seed(self.simulation.seed, class, index))
    }

    pub fn sampling_factors(&self) -> Vec<(usize, usize)> {
        self.eval.sampling_factors.iter().map(|[k, n]| (*k, *n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.eval.rus.len(), 7);
        assert_eq!(c.sampling_factors()[4], (5, 51));
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.simulation.snr_db = f64::INFINITY;
        c.simulation.campaign_seeds = Some(BTreeMap::from([("Walking".to_string(), vec![9, 8, 7, 6])]));
        c.eval.rus = vec![RuId::new(2, 484).unwrap()];
        let text = c.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.campaign_seed(ActivityClass::Walking, 2), 8);
        assert_eq!(back.campaign_seed(ActivityClass::Empty, 1), campaign_seed(1, ActivityClass::Empty, 1));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            RunConfig::from_toml_str("[grid]\nfoo = 1\n"),
            Err(Error::ConfigParse(_))
        ));
        assert!(RunConfig::from_toml_str("bogus = 3\n").is_err());
        assert!(RunConfig::from_toml_str("[eval]\nrus = [\"RU5-242\"]\n").is_err());
        assert!(RunConfig::from_toml_str("[doppler]\nwindow_len = 80\n").is_err());
        assert!(RunConfig::from_toml_str("[simulation]\ncampaign_seeds = { Jumping = [1, 2, 3, 4] }\n").is_err());
        let c = RunConfig::from_toml_str("[simulation]\nsnr_db = inf\n").unwrap();
        assert_eq!(c.simulation.snr_db, f64::INFINITY);
    }
}

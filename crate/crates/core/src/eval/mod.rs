//! Campaign-level cross-validation: evaluation splits, metrics, percentile
//! summaries and the resource-unit / sampling-period sweeps.

mod campaign;
mod metrics;
mod splits;
mod summary;
mod sweep;

pub use campaign::{campaign_seed, simulate_capture, simulated_campaigns, Campaign, CampaignData, SimulationSpec};
pub use metrics::{compute_metrics, compute_metrics_named, ConfusionMatrix, Metrics};
pub use splits::{make_splits, EvalSet, CAMPAIGNS_PER_CLASS};
pub use summary::{percentile, summarize, Summary};
pub use sweep::{
    default_sampling_factors, sweep_ru, sweep_sampling, sweep_variants, PipelineConfig, SetOutcome, SweepReport,
    Variant,
};

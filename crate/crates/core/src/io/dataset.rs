//! Directories of capture files forming one 4 × 4 campaign set.

use std::fs;
use std::path::{Path, PathBuf};

use crate::activity::ActivityClass;
use crate::error::{Error, Result};
use crate::eval::{simulate_capture, Campaign, CampaignData, CAMPAIGNS_PER_CLASS};
use crate::io::{read_capture_header, write_capture, CaptureMeta, RunConfig};

/// Extension of capture files.
pub const CAPTURE_EXTENSION: &str = "wslb";

/// File name of campaign `index` (1-based) of `label`, e.g. `walking-c2.wslb`.
pub fn capture_file_name(label: ActivityClass, index: usize) -> String {
    format!("{}.{CAPTURE_EXTENSION}", Campaign::default_id(label, index))
}

/// Simulates every campaign of `config` and writes one capture file each
/// into `dir` (created if missing). Returns the paths in class-major order.
///
/// Campaigns are synthesized one at a time so that only one tensor is held
/// in memory.
pub fn simulate_to_dir(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let spec = config.simulation_spec();
    let mut paths = Vec::new();
    for label in ActivityClass::ALL {
        for index in 1..=CAMPAIGNS_PER_CLASS {
            let seed = config.campaign_seed(label, index);
            let tensor = simulate_capture(label, &spec, seed)?;
            let path = dir.join(capture_file_name(label, index));
            write_capture(&path, &tensor, &CaptureMeta { label, seed })?;
            paths.push(path);
        }
    }
    Ok(paths)
}

/// Lists the capture files of `dir`, sorted by file name.
pub fn list_captures(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == CAPTURE_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Builds file-backed campaigns from the capture files in `dir`.
///
/// Files are grouped by the class label in their header; within a class,
/// campaigns are numbered 1..=4 in file-name order. Only headers are read
/// here, payloads are loaded when the campaign is evaluated.
pub fn campaigns_from_dir(dir: &Path) -> Result<Vec<Campaign>> {
    let mut by_class: Vec<Vec<(PathBuf, u64, f64)>> = vec![Vec::new(); ActivityClass::COUNT];
    for path in list_captures(dir)? {
        let header = read_capture_header(&path)?;
        by_class[header.meta.label.index()].push((
            path,
            header.meta.seed,
            header.schedule.duration(),
        ));
    }
    let mut campaigns = Vec::new();
    for (class, files) in ActivityClass::ALL.into_iter().zip(by_class) {
        if files.len() != CAMPAIGNS_PER_CLASS {
            return Err(Error::UnsupportedProtocol {
                n_campaigns: files.len(),
            });
        }
        for (i, (path, seed, duration)) in files.into_iter().enumerate() {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| Campaign::default_id(class, i + 1));
            campaigns.push(Campaign {
                id,
                label: class,
                index: i + 1,
                seed,
                duration,
                data: CampaignData::File(path),
            });
        }
    }
    Ok(campaigns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::GridConfig;

    fn tiny_config() -> RunConfig {
        let mut c = RunConfig::default();
        c.grid = GridConfig {
            bandwidth: 80e6 * 16.0 / 996.0,
            n_subcarriers: 16,
            ..GridConfig::default()
        };
        c.schedule.duration = 0.1;
        c
    }

    #[test]
    fn simulated_directory_round_trips_to_campaigns() {
        let dir = tempfile::tempdir().unwrap();
        let paths = simulate_to_dir(&tiny_config(), dir.path()).unwrap();
        assert_eq!(paths.len(), 16);
        assert!(paths[5].ends_with("inplace-c2.wslb"));
        let campaigns = campaigns_from_dir(dir.path()).unwrap();
        assert_eq!(campaigns.len(), 16);
        let c = &campaigns[6];
        assert_eq!((c.label, c.index, c.id.as_str()), (ActivityClass::InPlace, 3, "inplace-c3"));
        assert_eq!(c.seed, tiny_config().campaign_seed(ActivityClass::InPlace, 3));
        assert!((c.duration - 0.1).abs() < 0.0075);
    }

    #[test]
    fn incomplete_directory_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let paths = simulate_to_dir(&tiny_config(), dir.path()).unwrap();
        fs::remove_file(&paths[0]).unwrap();
        assert!(matches!(
            campaigns_from_dir(dir.path()),
            Err(Error::UnsupportedProtocol { n_campaigns: 3 })
        ));
        assert!(list_captures(&dir.path().join("missing")).is_err());
    }
}

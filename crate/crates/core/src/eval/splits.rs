use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Campaigns per class required by the cross-validation protocol.
pub const CAMPAIGNS_PER_CLASS: usize = 4;

/// One train/validation/test role assignment. Campaign indices run from 1
/// to 4 and apply to every class alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EvalSet {
    /// 1-based round.
    pub round: usize,
    pub train: [usize; 2],
    pub validation: usize,
    pub test: usize,
    /// Training seed; depends only on the master seed and the role tuple.
    pub seed: u64,
}

/// All 4 × 3 (test, validation) assignments, repeated for `n_rounds`
/// rounds: round-major, then test index, then validation index.
pub fn make_splits(n_campaigns: usize, n_rounds: usize, seed: u64) -> Result<Vec<EvalSet>> {
    if n_campaigns != CAMPAIGNS_PER_CLASS {
        return Err(Error::UnsupportedProtocol { n_campaigns });
    }
    if n_rounds == 0 {
        return Err(Error::InvalidConfig("n_rounds must be >= 1".into()));
    }
    let mut sets = Vec::with_capacity(12 * n_rounds);
    for round in 1..=n_rounds {
        for test in 1..=n_campaigns {
            for validation in (1..=n_campaigns).filter(|&v| v != test) {
                let mut train = (1..=n_campaigns).filter(|&c| c != test && c != validation);
                let train = [train.next().unwrap(), train.next().unwrap()];
                sets.push(EvalSet {
                    round,
                    train,
                    validation,
                    test,
                    seed: derive_seed(seed, &[round as u64, test as u64, validation as u64]),
                });
            }
        }
    }
    Ok(sets)
}

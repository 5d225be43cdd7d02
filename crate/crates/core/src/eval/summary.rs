use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Percentile summary of a metric across evaluation sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub p5: f64,
    pub p95: f64,
}

/// Linear-interpolation percentile of sorted data: position `p · (n - 1)`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("summary of zero values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("cannot summarize non-finite values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        median: percentile(&sorted, 0.5),
        p25: percentile(&sorted, 0.25),
        p75: percentile(&sorted, 0.75),
        p5: percentile(&sorted, 0.05),
        p95: percentile(&sorted, 0.95),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn one_to_hundred() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let s = summarize(&v).unwrap();
        assert_eq!((s.median, s.p25, s.p75), (50.5, 25.75, 75.25));
    }

    #[test]
    fn degenerate_inputs() {
        let s = summarize(&[0.8; 7]).unwrap();
        assert!([s.median, s.p25, s.p75, s.p5, s.p95].iter().all(|&v| v == 0.8));
        let s = summarize(&[0.3]).unwrap();
        assert!([s.median, s.p25, s.p75, s.p5, s.p95].iter().all(|&v| v == 0.3));
        assert!(summarize(&[]).is_err());
    }

    proptest! {
        #[test]
        fn percentiles_are_ordered(values in prop::collection::vec(0.0f64..1.0, 1..200)) {
            let s = summarize(&values).unwrap();
            prop_assert!(s.p5 <= s.p25 && s.p25 <= s.median && s.median <= s.p75 && s.p75 <= s.p95);
        }
    }
}

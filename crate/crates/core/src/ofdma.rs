//! 802.11ax OFDMA resource units of an 80 MHz channel.
//!
//! Only the 996-, 484- and 242-tone units are modelled, on an idealized
//! contiguous grid: `RUk-484` covers subcarriers `[(k-1)·498, (k-1)·498 + 484)`
//! and `RUk-242` covers `[(k-1)·249, (k-1)·249 + 242)`, i.e. contiguous blocks
//! at the low edge of each half / quarter of the band.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CfrTensor, GridConfig};
use crate::SPEED_OF_LIGHT;

/// Subcarrier count of the only supported channelization.
pub const CHANNEL_TONES: usize = 996;

/// A resource unit, named `RU{index}-{tones}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RuId {
    index: u8,
    tones: u16,
}

impl RuId {
    pub const FULL: RuId = RuId { index: 1, tones: 996 };

    /// The seven RUs of the 80 MHz channel in layout order.
    pub const ALL: [RuId; 7] = [
        RuId { index: 1, tones: 996 },
        RuId { index: 1, tones: 484 },
        RuId { index: 2, tones: 484 },
        RuId { index: 1, tones: 242 },
        RuId { index: 2, tones: 242 },
        RuId { index: 3, tones: 242 },
        RuId { index: 4, tones: 242 },
    ];

    pub fn new(index: usize, tones: usize) -> Result<Self> {
        let max_index = match tones {
            996 => 1,
            484 => 2,
            242 => 4,
            _ => return Err(Error::UnknownRu(format!("RU{index}-{tones}"))),
        };
        if index == 0 || index > max_index {
            return Err(Error::UnknownRu(format!("RU{index}-{tones}")));
        }
        Ok(RuId {
            index: index as u8,
            tones: tones as u16,
        })
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn tones(self) -> usize {
        self.tones as usize
    }

    /// Subcarrier range within the 996-tone channel.
    pub fn subcarriers(self) -> Range<usize> {
        let stride = match self.tones {
            996 => 0,
            484 => 498,
            _ => 249,
        };
        let start = (self.index() - 1) * stride;
        start..start + self.tones()
    }
}

impl fmt::Display for RuId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RU{}-{}", self.index, self.tones)
    }
}

impl FromStr for RuId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownRu(s.to_string());
        let rest = s.strip_prefix("RU").ok_or_else(bad)?;
        let (index, tones) = rest.split_once('-').ok_or_else(bad)?;
        let index = index.parse().map_err(|_| bad())?;
        let tones = tones.parse().map_err(|_| bad())?;
        RuId::new(index, tones)
    }
}

impl TryFrom<String> for RuId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RuId> for String {
    fn from(ru: RuId) -> String {
        ru.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuEntry {
    pub ru: RuId,
    pub start: usize,
    pub count: usize,
}

impl RuEntry {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuLayout {
    pub channel_bandwidth: f64,
    pub subcarrier_spacing: f64,
    pub entries: Vec<RuEntry>,
}

impl RuLayout {
    pub fn get(&self, ru: RuId) -> Result<&RuEntry> {
        self.entries
            .iter()
            .find(|e| e.ru == ru)
            .ok_or_else(|| Error::UnknownRu(ru.to_string()))
    }

    pub fn ru_bandwidth(&self, ru: RuId) -> Result<f64> {
        Ok(self.get(ru)?.count as f64 * self.subcarrier_spacing)
    }
}

/// The seven-RU layout of a 996-subcarrier grid.
pub fn ru_layout(grid: &GridConfig) -> Result<RuLayout> {
    if grid.n_subcarriers != CHANNEL_TONES {
        return Err(Error::UnsupportedChannelization {
            n_subcarriers: grid.n_subcarriers,
        });
    }
    let entries = RuId::ALL
        .iter()
        .map(|&ru| {
            let r = ru.subcarriers();
            RuEntry {
                ru,
                start: r.start,
                count: r.len(),
            }
        })
        .collect();
    Ok(RuLayout {
        channel_bandwidth: grid.bandwidth,
        subcarrier_spacing: grid.subcarrier_spacing(),
        entries,
    })
}

/// Restricts `cfr` to the subcarriers of `ru`; values are copied unchanged.
pub fn slice_ru(cfr: &CfrTensor, ru: RuId) -> Result<CfrTensor> {
    let layout = ru_layout(cfr.grid())?;
    let entry = layout.get(ru)?;
    cfr.subcarriers(entry.range())
}

/// One-way path-length resolution `c / bandwidth`, metres.
pub fn range_granularity(bandwidth: f64) -> Result<f64> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::NonPositiveBandwidth(bandwidth));
    }
    Ok(SPEED_OF_LIGHT / bandwidth)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::tensor::CaptureSchedule;

    fn indexed_tensor(n_ant: usize) -> CfrTensor {
        let grid = GridConfig::default().with_antennas(n_ant);
        let schedule = CaptureSchedule::new(0.0075, 3).unwrap();
        let data = (0..3 * 996 * n_ant)
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        CfrTensor::from_vec(data, grid, schedule).unwrap()
    }

    #[test]
    fn layout_has_seven_units() {
        let layout = ru_layout(&GridConfig::default()).unwrap();
        let names: Vec<String> = layout.entries.iter().map(|e| e.ru.to_string()).collect();
        assert_eq!(
            names,
            ["RU1-996", "RU1-484", "RU2-484", "RU1-242", "RU2-242", "RU3-242", "RU4-242"]
        );
        let full = layout.get(RuId::FULL).unwrap();
        assert_eq!((full.start, full.count), (0, 996));
        let e = layout.get("RU2-484".parse().unwrap()).unwrap();
        assert_eq!((e.start, e.count), (498, 484));
        let e = layout.get("RU4-242".parse().unwrap()).unwrap();
        assert_eq!((e.start, e.count), (747, 242));
    }

    #[test]
    fn layout_invariants() {
        let grid = GridConfig::default();
        let layout = ru_layout(&grid).unwrap();
        for e in &layout.entries {
            assert!(e.start + e.count <= grid.n_subcarriers);
            let bw = layout.ru_bandwidth(e.ru).unwrap();
            assert!((bw - e.ru.tones() as f64 * grid.subcarrier_spacing()).abs() < 1e-6);
        }
        for tones in [484, 242] {
            let same: Vec<_> = layout.entries.iter().filter(|e| e.ru.tones() == tones).collect();
            for w in same.windows(2) {
                assert!(w[0].start + w[0].count <= w[1].start);
            }
        }
    }

    #[test]
    fn unsupported_grid() {
        let grid = GridConfig {
            n_subcarriers: 484,
            ..GridConfig::default()
        };
        assert!(matches!(
            ru_layout(&grid),
            Err(Error::UnsupportedChannelization { n_subcarriers: 484 })
        ));
    }

    #[test]
    fn ru_names() {
        for ru in RuId::ALL {
            assert_eq!(ru.to_string().parse::<RuId>().unwrap(), ru);
        }
        for bad in ["RU0-242", "RU5-242", "RU3-484", "RU2-996", "RU1-106", "ru1-996", "RU1996"] {
            assert!(bad.parse::<RuId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn full_slice_is_identity() {
        let t = indexed_tensor(2);
        assert_eq!(slice_ru(&t, RuId::FULL).unwrap(), t);
    }

    #[test]
    fn quarter_slice_shape_and_values() {
        let t = indexed_tensor(4);
        let ru3 = slice_ru(&t, RuId::new(3, 242).unwrap()).unwrap();
        assert_eq!(ru3.shape(), (3, 242, 4));
        assert_eq!(ru3.get(1, 0, 2), t.get(1, 498, 2));
        let grid = ru3.grid();
        assert!((grid.bandwidth - 242.0 * t.grid().subcarrier_spacing()).abs() < 1e-6);
    }

    #[test]
    fn adjacent_slices_reassemble_source() {
        let t = indexed_tensor(2);
        let a = slice_ru(&t, RuId::new(1, 242).unwrap()).unwrap();
        let b = slice_ru(&t, RuId::new(2, 242).unwrap()).unwrap();
        for k in 0..3 {
            for n in 0..242 {
                for ant in 0..2 {
                    assert_eq!(a.get(k, n, ant), t.get(k, n, ant));
                    assert_eq!(b.get(k, n, ant), t.get(k, 249 + n, ant));
                }
            }
        }
    }

    #[test]
    fn slicing_composes() {
        let t = indexed_tensor(1);
        let once = slice_ru(&t, RuId::new(3, 242).unwrap()).unwrap();
        let twice = slice_ru(&slice_ru(&t, RuId::FULL).unwrap(), RuId::new(3, 242).unwrap()).unwrap();
        assert_eq!(once, twice);
        let nested = t.subcarriers(100..600).unwrap().subcarriers(50..300).unwrap();
        let direct = t.subcarriers(150..400).unwrap();
        assert_eq!(nested.data(), direct.data());
        assert!((nested.grid().carrier_freq - direct.grid().carrier_freq).abs() < 1e-3);
    }

    #[test]
    fn granularity_values() {
        let g160 = range_granularity(160e6).unwrap();
        assert!((g160 - 1.874).abs() < 1e-3);
        assert!((range_granularity(80e6).unwrap() - 3.747).abs() < 1e-3);
        assert!((range_granularity(20e6).unwrap() - 14.99).abs() < 1e-2);
        assert!(range_granularity(0.0).is_err());
        assert!(range_granularity(-5.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn granularity_halves_when_bandwidth_doubles(b in 1e3f64..1e12) {
            proptest::prop_assert_eq!(
                range_granularity(2.0 * b).unwrap(),
                range_granularity(b).unwrap() / 2.0
            );
        }
    }
}

//! Binary capture files.
//!
//! Layout, all little-endian:
//!
//! | offset | type    | field               |
//! |--------|---------|---------------------|
//! | 0      | [u8; 4] | magic `WSLB`        |
//! | 4      | u16     | format version (1)  |
//! | 6      | u8      | class label index   |
//! | 7      | u8      | reserved, zero      |
//! | 8      | f64     | carrier_freq        |
//! | 16     | f64     | bandwidth           |
//! | 24     | u32     | n_subcarriers       |
//! | 28     | u32     | n_rx_antennas       |
//! | 32     | f64     | antenna_spacing     |
//! | 40     | f64     | inter_packet_period |
//! | 48     | f64     | start_time          |
//! | 56     | u64     | n_snapshots         |
//! | 64     | u64     | seed                |
//! | 72     | f32 × 2 | payload (re, im) in (snapshot, subcarrier, antenna) order |
//!
//! The payload is single precision: a tensor whose values are exactly
//! representable as `f32` survives a write/read round trip bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::activity::ActivityClass;
use crate::error::{Error, Result};
use crate::tensor::{CaptureSchedule, CfrTensor, GridConfig};

pub const MAGIC: [u8; 4] = *b"WSLB";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 72;

/// Per-capture metadata stored alongside the tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaptureMeta {
    pub label: ActivityClass,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureHeader {
    pub grid: GridConfig,
    pub schedule: CaptureSchedule,
    pub meta: CaptureMeta,
}

impl CaptureHeader {
    pub fn payload_len(&self) -> u64 {
        self.schedule.n_snapshots as u64
            * self.grid.n_subcarriers as u64
            * self.grid.n_rx_antennas as u64
            * 8
    }

    pub fn encode(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..4].copy_from_slice(&MAGIC);
        h[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        h[6] = self.meta.label.index() as u8;
        h[8..16].copy_from_slice(&self.grid.carrier_freq.to_le_bytes());
        h[16..24].copy_from_slice(&self.grid.bandwidth.to_le_bytes());
        h[24..28].copy_from_slice(&(self.grid.n_subcarriers as u32).to_le_bytes());
        h[28..32].copy_from_slice(&(self.grid.n_rx_antennas as u32).to_le_bytes());
        h[32..40].copy_from_slice(&self.grid.antenna_spacing.to_le_bytes());
        h[40..48].copy_from_slice(&self.schedule.inter_packet_period.to_le_bytes());
        h[48..56].copy_from_slice(&self.schedule.start_time.to_le_bytes());
        h[56..64].copy_from_slice(&(self.schedule.n_snapshots as u64).to_le_bytes());
        h[64..72].copy_from_slice(&self.meta.seed.to_le_bytes());
        h
    }

    /// Parses and validates a header; `path` only labels errors.
    pub fn decode(bytes: &[u8], path: &Path) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::TruncatedPayload {
                path: path.into(),
                expected: HEADER_LEN as u64,
                found: bytes.len() as u64,
            });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic {
                path: path.into(),
                found: magic,
            });
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                path: path.into(),
                expected: FORMAT_VERSION,
                found: version,
            });
        }
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let invalid = |field: &'static str, reason: String| Error::InvalidHeader {
            path: path.into(),
            field,
            reason,
        };

        let label = ActivityClass::from_index(bytes[6] as usize)
            .ok_or_else(|| invalid("label", format!("unknown class index {}", bytes[6])))?;
        let grid = GridConfig {
            carrier_freq: f64_at(8),
            bandwidth: f64_at(16),
            n_subcarriers: u32_at(24) as usize,
            n_rx_antennas: u32_at(28) as usize,
            antenna_spacing: f64_at(32),
        };
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("carrier_freq", grid.carrier_freq)?;
        positive("bandwidth", grid.bandwidth)?;
        positive("antenna_spacing", grid.antenna_spacing)?;
        if grid.n_subcarriers == 0 {
            return Err(invalid("n_subcarriers", "must be >= 1".into()));
        }
        if grid.n_rx_antennas == 0 {
            return Err(invalid("n_rx_antennas", "must be >= 1".into()));
        }
        grid.validate().map_err(|e| invalid("grid", e.to_string()))?;
        let inter_packet_period = f64_at(40);
        positive("inter_packet_period", inter_packet_period)?;
        let start_time = f64_at(48);
        if !start_time.is_finite() {
            return Err(invalid("start_time", format!("must be finite, got {start_time}")));
        }
        let n_snapshots = u64_at(56);
        if n_snapshots == 0 {
            return Err(invalid("n_snapshots", "must be >= 1".into()));
        }
        Ok(CaptureHeader {
            grid,
            schedule: CaptureSchedule {
                inter_packet_period,
                n_snapshots: n_snapshots as usize,
                start_time,
            },
            meta: CaptureMeta {
                label,
                seed: u64_at(64),
            },
        })
    }
}

/// Serializes a tensor (values rounded to `f32`) with its metadata.
pub fn encode_capture(cfr: &CfrTensor, meta: &CaptureMeta) -> Vec<u8> {
    let header = CaptureHeader {
        grid: *cfr.grid(),
        schedule: *cfr.schedule(),
        meta: *meta,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + cfr.data().len() * 8);
    out.extend_from_slice(&header.encode());
    for v in cfr.data() {
        out.extend_from_slice(&(v.re as f32).to_le_bytes());
        out.extend_from_slice(&(v.im as f32).to_le_bytes());
    }
    out
}

/// Parses a complete capture file image.
pub fn decode_capture(bytes: &[u8], path: &Path) -> Result<(CfrTensor, CaptureMeta)> {
    let header = CaptureHeader::decode(bytes, path)?;
    let expected = header.payload_len();
    let found = (bytes.len() - HEADER_LEN) as u64;
    if found < expected {
        return Err(Error::TruncatedPayload {
            path: path.into(),
            expected,
            found,
        });
    }
    if found > expected {
        return Err(Error::TrailingData {
            path: path.into(),
            expected,
            found,
        });
    }
    let data: Vec<Complex64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| Complex64::new(le_f32(&c[0..4]), le_f32(&c[4..8])))
        .collect();
    let tensor = CfrTensor::from_vec(data, header.grid, header.schedule).map_err(|e| Error::InvalidHeader {
        path: path.into(),
        field: "payload",
        reason: e.to_string(),
    })?;
    Ok((tensor, header.meta))
}

fn le_f32(b: &[u8]) -> f64 {
    f32::from_le_bytes(b.try_into().unwrap()) as f64
}

pub fn write_capture(path: &Path, cfr: &CfrTensor, meta: &CaptureMeta) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    let header = CaptureHeader {
        grid: *cfr.grid(),
        schedule: *cfr.schedule(),
        meta: *meta,
    };
    w.write_all(&header.encode()).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::with_capacity(cfr.row_len() * 8);
    for k in 0..cfr.n_snapshots() {
        buf.clear();
        for v in cfr.snapshot(k) {
            buf.extend_from_slice(&(v.re as f32).to_le_bytes());
            buf.extend_from_slice(&(v.im as f32).to_le_bytes());
        }
        w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_capture(path: &Path) -> Result<(CfrTensor, CaptureMeta)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_capture(&bytes, path)
}

/// Reads and validates only the header.
pub fn read_capture_header(path: &Path) -> Result<CaptureHeader> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut head = Vec::with_capacity(HEADER_LEN);
    (&mut file)
        .take(HEADER_LEN as u64)
        .read_to_end(&mut head)
        .map_err(|e| Error::io(path, e))?;
    CaptureHeader::decode(&head, path)
}

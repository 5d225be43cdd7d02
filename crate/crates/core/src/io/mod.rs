//! Persistence: binary capture files and capture directories, TOML run
//! configuration and sweep reports. Model files live with the classifier.

mod capture;
mod config;
mod dataset;
mod reports;

pub use capture::{
    decode_capture, encode_capture, read_capture, read_capture_header, write_capture, CaptureHeader, CaptureMeta,
    FORMAT_VERSION, HEADER_LEN, MAGIC,
};
pub use dataset::{campaigns_from_dir, capture_file_name, list_captures, simulate_to_dir, CAPTURE_EXTENSION};
pub use config::{ClassifierSection, EvalSection, RunConfig, ScheduleSection, SimulationSection};
pub use reports::{reports_to_csv, reports_to_json, write_reports_csv, write_summary_json, CSV_HEADER};

//! Bistatic multipath channel simulator.
//!
//! Scenes hold a transmitter, a receiver carrying a uniform linear array,
//! a set of static propagation paths and zero or more moving point
//! scatterers. [`synthesize_cfr`] evaluates the single-bounce multipath sum
//! on a subcarrier grid at every capture instant; [`apply_impairments`] and
//! [`add_noise`] layer receiver non-idealities on top.

mod activity;
mod geometry;
mod impair;
mod scene;
mod synth;

pub use activity::{generate_activity_scene, generate_activity_scene_in, RoomLayout, SpeedRange};
pub use geometry::{path_geometry, PathGeometry, Point2};
pub use impair::{add_noise, apply_impairments, ImpairmentParams, TimingOffset};
pub use scene::{MicroMotion, ScattererTrajectory, Scene, StaticPath, Waypoint};
pub use synth::synthesize_cfr;

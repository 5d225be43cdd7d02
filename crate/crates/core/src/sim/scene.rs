use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::Point2;
use crate::activity::ActivityClass;
use crate::error::{Error, Result};

/// A time-invariant propagation path (line of sight or a wall bounce).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticPath {
    /// Propagation delay, seconds.
    pub delay: f64,
    pub gain: Complex64,
    /// Arrival angle at the receive array, radians from broadside.
    pub aoa: f64,
}

/// Sinusoidal displacement superposed on a scatterer's path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroMotion {
    /// Peak displacement, metres.
    pub amplitude: f64,
    /// Oscillation frequency, Hz.
    pub frequency: f64,
    /// Direction of the displacement, radians from the +x axis.
    pub axis: f64,
    pub phase: f64,
}

impl MicroMotion {
    pub fn displacement(&self, t: f64) -> Point2 {
        let s = (2.0 * std::f64::consts::PI * self.frequency * t + self.phase).sin();
        Point2::from_angle(self.axis) * (self.amplitude * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub time: f64,
    pub pos: Point2,
}

/// A point reflector following a piecewise-linear path.
///
/// Before the first waypoint and after the last one the scatterer rests at
/// the respective endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScattererTrajectory {
    /// Waypoints sorted by strictly increasing time.
    pub waypoints: Vec<Waypoint>,
    pub reflectivity: Complex64,
    pub micro_motion: Option<MicroMotion>,
}

impl ScattererTrajectory {
    pub fn stationary(pos: Point2, reflectivity: Complex64) -> Self {
        ScattererTrajectory {
            waypoints: vec![Waypoint { time: 0.0, pos }],
            reflectivity,
            micro_motion: None,
        }
    }

    /// Constant-velocity motion through `start` at time zero.
    pub fn linear(start: Point2, velocity: Point2, until: f64, reflectivity: Complex64) -> Self {
        ScattererTrajectory {
            waypoints: vec![
                Waypoint {
                    time: 0.0,
                    pos: start,
                },
                Waypoint {
                    time: until,
                    pos: start + velocity * until,
                },
            ],
            reflectivity,
            micro_motion: None,
        }
    }

    fn segment(&self, t: f64) -> Option<(Waypoint, Waypoint)> {
        let wp = &self.waypoints;
        if wp.len() < 2 || t <= wp[0].time || t >= wp[wp.len() - 1].time {
            return None;
        }
        // first waypoint strictly after t
        let hi = wp.partition_point(|w| w.time <= t);
        Some((wp[hi - 1], wp[hi]))
    }

    /// Position on the piecewise-linear path, without micro-motion.
    pub fn path_position(&self, t: f64) -> Point2 {
        let wp = &self.waypoints;
        match self.segment(t) {
            Some((a, b)) => {
                let frac = (t - a.time) / (b.time - a.time);
                a.pos + (b.pos - a.pos) * frac
            }
            None if t <= wp[0].time => wp[0].pos,
            None => wp[wp.len() - 1].pos,
        }
    }

    /// Velocity of the piecewise-linear path, without micro-motion.
    pub fn path_velocity(&self, t: f64) -> Point2 {
        match self.segment(t) {
            Some((a, b)) => (b.pos - a.pos) * (1.0 / (b.time - a.time)),
            None => Point2::default(),
        }
    }

    pub fn position(&self, t: f64) -> Point2 {
        let p = self.path_position(t);
        match &self.micro_motion {
            Some(m) => p + m.displacement(t),
            None => p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::InvalidScene("trajectory without waypoints".into()));
        }
        if !(self.reflectivity.is_finite() && self.reflectivity.norm() > 0.0) {
            return Err(Error::InvalidScene(
                "scatterer reflectivity must be finite and nonzero".into(),
            ));
        }
        for w in &self.waypoints {
            if !(w.time.is_finite() && w.pos.is_finite()) {
                return Err(Error::InvalidScene("non-finite waypoint".into()));
            }
        }
        if self.waypoints.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::InvalidScene(
                "waypoint times must be strictly increasing".into(),
            ));
        }
        if let Some(m) = &self.micro_motion {
            if ![m.amplitude, m.frequency, m.axis, m.phase]
                .iter()
                .all(|v| v.is_finite())
            {
                return Err(Error::InvalidScene("non-finite micro-motion".into()));
            }
        }
        Ok(())
    }
}

/// Propagation ground truth for one capture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub tx_pos: Point2,
    pub rx_pos: Point2,
    pub static_paths: Vec<StaticPath>,
    pub scatterers: Vec<ScattererTrajectory>,
    pub label: ActivityClass,
}

impl Scene {
    pub fn new(tx_pos: Point2, rx_pos: Point2, label: ActivityClass) -> Self {
        Scene {
            tx_pos,
            rx_pos,
            static_paths: Vec::new(),
            scatterers: Vec::new(),
            label,
        }
    }

    pub fn link_distance(&self) -> f64 {
        self.tx_pos.distance(self.rx_pos)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tx_pos.is_finite() && self.rx_pos.is_finite()) {
            return Err(Error::InvalidScene("non-finite device position".into()));
        }
        if self.tx_pos == self.rx_pos {
            return Err(Error::InvalidScene("transmitter and receiver coincide".into()));
        }
        for p in &self.static_paths {
            if !(p.delay.is_finite() && p.delay >= 0.0) {
                return Err(Error::InvalidScene(format!(
                    "static path delay must be finite and >= 0, got {}",
                    p.delay
                )));
            }
            if !(p.gain.is_finite() && p.aoa.is_finite()) {
                return Err(Error::InvalidScene("non-finite static path".into()));
            }
        }
        self.scatterers.iter().try_for_each(|s| s.validate())
    }
}

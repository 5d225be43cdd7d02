use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// A point or vector in the horizontal plane, metres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3-D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn unit(self) -> Point2 {
        self * (1.0 / self.norm())
    }

    pub fn from_angle(angle: f64) -> Point2 {
        Point2::new(angle.cos(), angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Length, delay and arrival angle of one propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGeometry {
    pub path_length: f64,
    pub delay: f64,
    /// Arrival angle at the receive array, radians, counter-clockwise from
    /// broadside.
    pub aoa: f64,
}

/// Angle of `source` seen from `rx`, measured counter-clockwise from the
/// broadside direction of the receive array.
///
/// Broadside points from the receiver toward the transmitter and the array
/// elements extend along the clockwise normal, so element `a` sees the
/// extra delay `a * d * sin(aoa) / c`.
pub(crate) fn arrival_angle(tx: Point2, rx: Point2, source: Point2) -> f64 {
    let broadside = (tx - rx).unit();
    let dir = source - rx;
    broadside.cross(dir).atan2(broadside.dot(dir))
}

/// Single-bounce bistatic geometry tx -> scatterer -> rx.
pub fn path_geometry(tx: Point2, rx: Point2, scatterer: Point2) -> Result<PathGeometry> {
    if !(tx.is_finite() && rx.is_finite() && scatterer.is_finite()) {
        return Err(Error::InvalidScene("non-finite position".into()));
    }
    if tx == rx {
        return Err(Error::InvalidScene("transmitter and receiver coincide".into()));
    }
    let to_rx = scatterer.distance(rx);
    if to_rx == 0.0 {
        return Err(Error::DegenerateGeometry {
            x: scatterer.x,
            y: scatterer.y,
        });
    }
    let path_length = tx.distance(scatterer) + to_rx;
    Ok(PathGeometry {
        path_length,
        delay: path_length / SPEED_OF_LIGHT,
        aoa: arrival_angle(tx, rx, scatterer),
    })
}

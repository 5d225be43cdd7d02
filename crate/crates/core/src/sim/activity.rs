//! Labelled activity scenes on a fixed 4 m bistatic link.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::geometry::{arrival_angle, Point2};
use super::scene::{MicroMotion, ScattererTrajectory, Scene, StaticPath, Waypoint};
use crate::activity::ActivityClass;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::SPEED_OF_LIGHT;

/// Inclusive speed bounds of a moving class, m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

impl SpeedRange {
    pub const WALKING: SpeedRange = SpeedRange { min: 1.0, max: 1.8 };
    pub const RUNNING: SpeedRange = SpeedRange { min: 2.2, max: 3.2 };

    pub fn for_class(class: ActivityClass) -> Option<SpeedRange> {
        match class {
            ActivityClass::Walking => Some(Self::WALKING),
            ActivityClass::Running => Some(Self::RUNNING),
            _ => None,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

/// Device placement, walls and the area the subject moves in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomLayout {
    pub tx: Point2,
    pub rx: Point2,
    /// Lower-left and upper-right corners of the walkable area.
    pub area_min: Point2,
    pub area_max: Point2,
    /// Wall lines: x = walls_x.0, x = walls_x.1, y = walls_y.0, y = walls_y.1.
    pub walls_x: (f64, f64),
    pub walls_y: (f64, f64),
    /// Seed of the wall reflections. It belongs to the room, not to a
    /// scene, so every capture in one room shares the same static paths.
    pub wall_seed: u64,
}

impl Default for RoomLayout {
    fn default() -> Self {
        RoomLayout {
            tx: Point2::new(0.0, 0.0),
            rx: Point2::new(4.0, 0.0),
            area_min: Point2::new(-0.5, 0.8),
            area_max: Point2::new(4.5, 4.5),
            walls_x: (-1.5, 5.5),
            walls_y: (-1.2, 5.5),
            wall_seed: 0,
        }
    }
}

impl RoomLayout {
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Point2 {
        Point2::new(
            rng.random_range(self.area_min.x..self.area_max.x),
            rng.random_range(self.area_min.y..self.area_max.y),
        )
    }

    /// Line of sight plus 2-4 first-order wall reflections via image
    /// sources, drawn from `wall_seed`.
    pub fn static_paths(&self) -> Vec<StaticPath> {
        let rng = &mut rng_from_seed(derive_seed(self.wall_seed, &[0]));
        let los = self.tx.distance(self.rx);
        let mut paths = vec![StaticPath {
            delay: los / SPEED_OF_LIGHT,
            gain: Complex64::new(1.0, 0.0),
            aoa: 0.0,
        }];
        let tx = self.tx;
        let mut images = [
            Point2::new(2.0 * self.walls_x.0 - tx.x, tx.y),
            Point2::new(2.0 * self.walls_x.1 - tx.x, tx.y),
            Point2::new(tx.x, 2.0 * self.walls_y.0 - tx.y),
            Point2::new(tx.x, 2.0 * self.walls_y.1 - tx.y),
        ];
        images.shuffle(rng);
        let n_walls = rng.random_range(2..=4);
        for image in &images[..n_walls] {
            let length = image.distance(self.rx);
            let rho = Complex64::from_polar(rng.random_range(0.3..0.6), rng.random_range(0.0..2.0 * PI));
            paths.push(StaticPath {
                delay: length / SPEED_OF_LIGHT,
                gain: rho * (los / length),
                aoa: arrival_angle(self.tx, self.rx, *image),
            });
        }
        paths
    }
}

/// Reflectivity magnitude of the (single, same) subject in every scene.
pub const SUBJECT_REFLECTIVITY: f64 = 0.4;

fn random_reflectivity(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(SUBJECT_REFLECTIVITY, rng.random_range(0.0..2.0 * PI))
}

fn random_micro(
    rng: &mut ChaCha8Rng,
    amplitude: (f64, f64),
    frequency: (f64, f64),
    axis: (f64, f64),
) -> MicroMotion {
    MicroMotion {
        amplitude: rng.random_range(amplitude.0..amplitude.1),
        frequency: rng.random_range(frequency.0..frequency.1),
        axis: rng.random_range(axis.0..axis.1),
        phase: rng.random_range(0.0..2.0 * PI),
    }
}

/// Sway directions of a subject standing in place: towards and away from
/// the link, within 30 degrees of its normal.
const FACING_LINK: (f64, f64) = (PI / 3.0, 2.0 * PI / 3.0);

/// Random-waypoint walk covering at least `[0, duration]`.
///
/// Waypoints and the per-leg uniform draws come from separate streams so
/// two classes generated from the same seed trace the same route, only at
/// different speeds.
fn random_walk(
    layout: &RoomLayout,
    speeds: SpeedRange,
    duration: f64,
    route: &mut ChaCha8Rng,
    pace: &mut ChaCha8Rng,
) -> Vec<Waypoint> {
    let mut pos = layout.random_point(route);
    let mut time = 0.0;
    let mut waypoints = vec![Waypoint { time, pos }];
    while time < duration {
        let next = loop {
            let p = layout.random_point(route);
            if p.distance(pos) >= 0.5 {
                break p;
            }
        };
        let u: f64 = pace.random_range(0.0..=1.0);
        let speed = speeds.min + u * (speeds.max - speeds.min);
        time += next.distance(pos) / speed;
        pos = next;
        waypoints.push(Waypoint { time, pos });
    }
    waypoints
}

/// Scene for one activity class in the default room.
pub fn generate_activity_scene(class: ActivityClass, duration: f64, seed: u64) -> Result<Scene> {
    generate_activity_scene_in(&RoomLayout::default(), class, duration, seed)
}

/// Scene for one activity class in `layout`.
///
/// The static paths depend on the layout only; `seed` drives the subject.
///
/// - `Empty`: static paths only.
/// - `InPlace`: one stationary scatterer swaying slowly towards and away
///   from the link.
/// - `Walking` / `Running`: one scatterer on a random-waypoint route at
///   per-leg speeds drawn from the class range, plus gait micro-motion.
pub fn generate_activity_scene_in(
    layout: &RoomLayout,
    class: ActivityClass,
    duration: f64,
    seed: u64,
) -> Result<Scene> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidScene(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let mut route = rng_from_seed(derive_seed(seed, &[1]));
    let mut pace = rng_from_seed(derive_seed(seed, &[2]));
    let mut body = rng_from_seed(derive_seed(seed, &[3]));

    let mut scene = Scene::new(layout.tx, layout.rx, class);
    scene.static_paths = layout.static_paths();

    let reflectivity = random_reflectivity(&mut body);
    let trajectory = match class {
        ActivityClass::Empty => None,
        ActivityClass::InPlace => Some(ScattererTrajectory {
            waypoints: vec![Waypoint {
                time: 0.0,
                pos: layout.random_point(&mut route),
            }],
            reflectivity,
            micro_motion: Some(random_micro(&mut body, (0.07, 0.10), (0.5, 0.7), FACING_LINK)),
        }),
        ActivityClass::Walking => Some(ScattererTrajectory {
            waypoints: random_walk(layout, SpeedRange::WALKING, duration, &mut route, &mut pace),
            reflectivity,
            micro_motion: Some(random_micro(&mut body, (0.02, 0.04), (1.6, 2.2), (0.0, PI))),
        }),
        ActivityClass::Running => Some(ScattererTrajectory {
            waypoints: random_walk(layout, SpeedRange::RUNNING, duration, &mut route, &mut pace),
            reflectivity,
            micro_motion: Some(random_micro(&mut body, (0.03, 0.06), (2.6, 3.4), (0.0, PI))),
        }),
    };
    scene.scatterers.extend(trajectory);
    scene.validate()?;
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::path_geometry;

    #[test]
    fn empty_room_has_no_scatterers() {
        let s = generate_activity_scene(ActivityClass::Empty, 10.0, 3).unwrap();
        assert!(s.scatterers.is_empty());
        assert!((3..=5).contains(&s.static_paths.len()));
        assert!((s.link_distance() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn in_place_has_zero_mean_velocity() {
        let s = generate_activity_scene(ActivityClass::InPlace, 10.0, 3).unwrap();
        let t = &s.scatterers[0];
        assert_eq!(t.waypoints.len(), 1);
        assert!(t.micro_motion.is_some());
        assert_eq!(t.path_velocity(5.0), Point2::default());
    }

    #[test]
    fn deterministic_given_seed() {
        for class in ActivityClass::ALL {
            let a = generate_activity_scene(class, 30.0, 11).unwrap();
            let b = generate_activity_scene(class, 30.0, 11).unwrap();
            assert_eq!(a, b);
        }
        assert!(generate_activity_scene(ActivityClass::Walking, 0.0, 1).is_err());
    }

    /// Central differences of the path, skipping samples near waypoints.
    fn speed_samples(t: &ScattererTrajectory, duration: f64) -> Vec<f64> {
        let dt = 1e-4;
        let mut out = Vec::new();
        let mut time = 0.01;
        while time < duration {
            let near_corner = t
                .waypoints
                .iter()
                .any(|w| (w.time - time).abs() <= 2.0 * dt);
            if !near_corner {
                let d = t.path_position(time + dt).distance(t.path_position(time - dt));
                out.push(d / (2.0 * dt));
            }
            time += 0.05;
        }
        out
    }

    #[test]
    fn speeds_stay_in_class_range() {
        for class in [ActivityClass::Walking, ActivityClass::Running] {
            let range = SpeedRange::for_class(class).unwrap();
            for seed in 0..100 {
                let s = generate_activity_scene(class, 20.0, seed).unwrap();
                let t = &s.scatterers[0];
                assert!(t.waypoints.last().unwrap().time >= 20.0);
                for v in speed_samples(t, 20.0) {
                    assert!(
                        v >= range.min - 1e-6 && v <= range.max + 1e-6,
                        "{class} seed {seed}: {v}"
                    );
                }
            }
        }
    }

    fn mean_path_rate(scene: &Scene, duration: f64) -> f64 {
        let dt = 0.01;
        let s = &scene.scatterers[0];
        let len = |t: f64| {
            path_geometry(scene.tx_pos, scene.rx_pos, s.position(t))
                .unwrap()
                .path_length
        };
        let steps = (duration / dt) as usize;
        (0..steps)
            .map(|i| (len((i + 1) as f64 * dt) - len(i as f64 * dt)).abs() / dt)
            .sum::<f64>()
            / steps as f64
    }

    #[test]
    fn running_outpaces_walking() {
        for seed in 0..20 {
            let walk = generate_activity_scene(ActivityClass::Walking, 30.0, seed).unwrap();
            let run = generate_activity_scene(ActivityClass::Running, 30.0, seed).unwrap();
            let (w, r) = (mean_path_rate(&walk, 30.0), mean_path_rate(&run, 30.0));
            assert!(r > w, "seed {seed}: running {r} vs walking {w}");
        }
    }

    #[test]
    fn subject_stays_clear_of_devices() {
        let layout = RoomLayout::default();
        for seed in 0..20 {
            let s = generate_activity_scene(ActivityClass::Running, 60.0, seed).unwrap();
            let t = &s.scatterers[0];
            for i in 0..600 {
                let p = t.position(i as f64 * 0.1);
                assert!(p.distance(layout.rx) > 0.3 && p.distance(layout.tx) > 0.3);
            }
        }
    }
}

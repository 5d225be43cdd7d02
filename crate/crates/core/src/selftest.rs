//! Built-in invariant checks, run by `wislab validate`.
//!
//! Each check exercises one contract of the library end to end on small,
//! seeded inputs and reports a one-line detail. The whole suite runs in a
//! few seconds.

use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use crate::activity::ActivityClass;
use crate::classifier::{
    featurize, gradient_check, model_from_str, model_to_string, softmax, ClassifierInput,
    FeatureSet, Hyperparameters, InputShape, Model,
};
use crate::dsp::{
    angle_grid, aoa_spectrum, doppler_spectrum, doppler_vector_stream, range_spectrum,
    sanitize_phase, DopplerConfig,
};
use crate::eval::{make_splits, summarize};
use crate::io::{decode_capture, encode_capture, CaptureMeta, RunConfig};
use crate::ofdma::{range_granularity, ru_layout, RuId};
use crate::rng::rng_from_seed;
use crate::sim::{
    apply_impairments, generate_activity_scene, synthesize_cfr, ImpairmentParams, Point2,
    ScattererTrajectory, Scene, StaticPath, TimingOffset,
};
use crate::tensor::{CaptureSchedule, CfrTensor, GridConfig};
use crate::SPEED_OF_LIGHT;

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantities on success, the violated condition on failure.
    pub detail: String,
    pub elapsed: Duration,
}

type CheckResult = std::result::Result<String, String>;

/// Fails the enclosing check with a formatted message unless `cond` holds.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Converts a library error into a check failure.
fn lib<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

const CHECKS: &[(&str, fn() -> CheckResult)] = &[
    ("range-granularity", check_range_granularity),
    ("ru-layout", check_ru_layout),
    ("range-peak", check_range_peak),
    ("doppler-peak", check_doppler_peak),
    ("doppler-alias", check_doppler_alias),
    ("doppler-static-scene", check_static_scene),
    ("aoa-peak", check_aoa_peak),
    ("sanitize-round-trip", check_sanitize),
    ("splits-108", check_splits),
    ("softmax", check_softmax),
    ("gradient-check", check_gradients),
    ("featurize-permutation", check_featurize),
    ("percentile-order", check_percentiles),
    ("capture-round-trip", check_capture),
    ("model-round-trip", check_model),
    ("config-round-trip", check_config),
];

/// Names of all checks, in execution order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(name, _)| *name).collect()
}

/// Runs every check sequentially.
pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let result = check();
            let elapsed = start.elapsed();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                elapsed,
            }
        })
        .collect()
}

fn link_scene() -> Scene {
    Scene::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), ActivityClass::Empty)
}

fn unit_path(delay: f64, aoa: f64) -> StaticPath {
    StaticPath {
        delay,
        gain: Complex64::new(1.0, 0.0),
        aoa,
    }
}

/// Scatterer receding from the link far out, where the bistatic path rate
/// is nearly constant. Returns the scene and the path rate at `t_mid`.
fn receding_scene(rate: f64, t_mid: f64) -> (Scene, f64) {
    let mut scene = link_scene();
    scene.static_paths.push(unit_path(4.0 / SPEED_OF_LIGHT, 0.0));
    let y0 = 60.0;
    let half = |y: f64| (4.0 + y * y).sqrt();
    let speed = rate / (2.0 * y0 / half(y0));
    scene.scatterers.push(ScattererTrajectory::linear(
        Point2::new(2.0, y0),
        Point2::new(0.0, speed),
        t_mid * 2.0 + 1.0,
        Complex64::new(0.5, 0.0),
    ));
    let y = y0 + speed * t_mid;
    (scene, 2.0 * speed * y / half(y))
}

fn small_grid(n_subcarriers: usize) -> GridConfig {
    GridConfig {
        n_subcarriers,
        ..GridConfig::default()
    }
}

fn check_range_granularity() -> CheckResult {
    let g160 = lib(range_granularity(160e6))?;
    ensure!((1.7..=2.1).contains(&g160), "160 MHz granularity {g160} m outside [1.7, 2.1]");
    for b in [20e6, 40e6, 80e6] {
        let g = lib(range_granularity(b))?;
        ensure!(g * b == g160 * 160e6, "granularity x bandwidth not constant at {b} Hz");
    }
    ensure!(range_granularity(0.0).is_err(), "zero bandwidth accepted");
    Ok(format!("{g160:.4} m at 160 MHz"))
}

fn check_ru_layout() -> CheckResult {
    let layout = lib(ru_layout(&GridConfig::default()))?;
    let mut tones = Vec::new();
    for ru in RuId::ALL {
        let entry = lib(layout.get(ru))?;
        ensure!(entry.range().len() == ru.tones(), "{ru} spans {} tones", entry.range().len());
        tones.push(ru.tones());
    }
    Ok(format!("{} RUs, tones {tones:?}", RuId::ALL.len()))
}

fn check_range_peak() -> CheckResult {
    let grid = GridConfig::default();
    let schedule = lib(CaptureSchedule::new(0.0075, 1))?;
    for bin in [3usize, 17, 40] {
        let mut scene = link_scene();
        scene.static_paths.push(unit_path(bin as f64 / grid.bandwidth, 0.0));
        let t = lib(synthesize_cfr(&scene, &grid, &schedule))?;
        let profile = lib(range_spectrum(&t, 0, 0))?;
        ensure!(profile.argmax() == bin, "delay bin {bin} peaked at {}", profile.argmax());
    }
    Ok("delay bins 3, 17, 40 recovered".into())
}

fn doppler_peak(rate: f64) -> std::result::Result<(isize, f64, f64), String> {
    let config = DopplerConfig::default();
    let tc = 0.0075;
    let schedule = lib(CaptureSchedule::new(tc, config.window_len))?;
    let (scene, rate_mid) = receding_scene(rate, schedule.time(config.window_len / 2));
    let t = lib(synthesize_cfr(&scene, &small_grid(8), &schedule))?;
    let v = lib(doppler_spectrum(&t, &config, tc))?;
    Ok((v.peak_offset(), rate_mid, v.bin_width))
}

fn check_doppler_peak() -> CheckResult {
    let lambda = GridConfig::default().wavelength();
    let (peak, rate, bw) = doppler_peak(1.0)?;
    let expected = (rate / lambda / bw).round() as isize;
    ensure!(peak == expected, "1 m/s peaked at bin {peak}, expected {expected}");
    Ok(format!("1 m/s -> bin {peak:+}"))
}

fn check_doppler_alias() -> CheckResult {
    let lambda = GridConfig::default().wavelength();
    let (peak, rate, bw) = doppler_peak(4.0)?;
    let tc = 0.0075;
    ensure!(rate > lambda / (2.0 * tc), "rate {rate} is not beyond the unambiguous limit");
    let expected = ((rate - lambda / tc) / lambda / bw).round() as isize;
    ensure!(peak == expected, "4 m/s peaked at bin {peak}, expected alias {expected}");
    Ok(format!("4 m/s -> alias bin {peak:+}"))
}

fn check_static_scene() -> CheckResult {
    let scene = lib(generate_activity_scene(ActivityClass::Empty, 1.0, 5))?;
    let schedule = lib(CaptureSchedule::new(0.0075, 40))?;
    let t = lib(synthesize_cfr(&scene, &small_grid(32), &schedule))?;
    let vectors = lib(doppler_vector_stream(&t, &DopplerConfig::default(), 1))?;
    let mut worst = f64::NEG_INFINITY;
    for v in &vectors {
        let centre = v.static_power + v.power[v.center()];
        for (i, p) in v.power.iter().enumerate() {
            if i != v.center() {
                worst = worst.max(10.0 * (p / centre).max(1e-300).log10());
            }
        }
    }
    ensure!(worst <= -40.0, "off-centre power reaches {worst:.1} dB of the centre");
    Ok(format!("worst off-centre bin {worst:.0} dB"))
}

fn check_aoa_peak() -> CheckResult {
    let grid = GridConfig::default().with_antennas(8);
    let schedule = lib(CaptureSchedule::new(0.0075, 1))?;
    let angles = angle_grid(1.0);
    for deg in [-40.0f64, 0.0, 25.0] {
        let mut scene = link_scene();
        scene.static_paths.push(unit_path(20e-9, deg.to_radians()));
        let t = lib(synthesize_cfr(&scene, &grid, &schedule))?;
        let profile = lib(aoa_spectrum(&t, 0, 500, &angles))?;
        let got = profile.peak_angle().to_degrees();
        ensure!((got - deg).abs() < 1e-9, "{deg} deg peaked at {got} deg");
    }
    Ok("-40, 0, 25 deg recovered with 8 antennas".into())
}

fn max_rel_diff(a: &CfrTensor, b: &CfrTensor) -> f64 {
    let scale = b.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

fn check_sanitize() -> CheckResult {
    let mut rng = rng_from_seed(11);
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let class = ActivityClass::ALL[seed as usize % 4];
        let scene = lib(generate_activity_scene(class, 1.0, seed))?;
        let schedule = lib(CaptureSchedule::new(0.0075, 4))?;
        let clean = lib(synthesize_cfr(&scene, &GridConfig::default().with_antennas(2), &schedule))?;
        let imp = ImpairmentParams {
            cfo: rng.random_range(-10e3..=10e3),
            timing_offset: TimingOffset::Uniform { max: 25e-9 },
            common_phase_jitter_std: 0.0,
        };
        let impaired = lib(apply_impairments(clean.clone(), &imp, seed))?;
        let a = lib(sanitize_phase(&impaired))?.cfr;
        let b = lib(sanitize_phase(&clean))?.cfr;
        worst = worst.max(max_rel_diff(&a, &b));
        let again = lib(sanitize_phase(&a))?.cfr;
        ensure!(max_rel_diff(&again, &a) <= 1e-12, "sanitization is not idempotent");
    }
    ensure!(worst <= 1e-6, "impaired and clean differ by {worst:e} after sanitization");
    Ok(format!("max relative difference {worst:.1e}"))
}

fn check_splits() -> CheckResult {
    let sets = lib(make_splits(4, 9, 1))?;
    ensure!(sets.len() == 108, "{} sets", sets.len());
    for c in 1..=4 {
        let n = sets.iter().filter(|s| s.test == c).count();
        ensure!(n == 27, "campaign {c} tested {n} times");
    }
    for s in &sets {
        let mut roles = vec![s.train[0], s.train[1], s.validation, s.test];
        roles.sort_unstable();
        ensure!(roles == [1, 2, 3, 4], "roles overlap in {s:?}");
    }
    Ok("108 sets, each campaign tested 27 times".into())
}

fn check_softmax() -> CheckResult {
    let mut rng = rng_from_seed(3);
    for _ in 0..100 {
        let z: [f64; 4] = std::array::from_fn(|_| rng.random_range(-50.0..50.0));
        let p = softmax(&z);
        let sum: f64 = p.iter().sum();
        ensure!((sum - 1.0).abs() <= 1e-9, "probabilities sum to {sum}");
        ensure!(p.iter().all(|&v| v > 0.0), "non-positive probability in {p:?}");
    }
    Ok("100 random logit vectors".into())
}

fn random_features(rng: &mut rand_chacha::ChaCha8Rng, n_per_class: usize, d: usize) -> FeatureSet {
    let mut set = FeatureSet::default();
    for class in ActivityClass::ALL {
        for _ in 0..n_per_class {
            set.push((0..d).map(|_| rng.random_range(-2.0..2.0)).collect(), class);
        }
    }
    set
}

fn check_gradients() -> CheckResult {
    let shape = InputShape {
        n_vectors: 4,
        fft_len: 3,
    };
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let mut rng = rng_from_seed(seed);
        let set = random_features(&mut rng, 3, shape.n_features());
        let hyper = Hyperparameters {
            seed,
            init_std: 0.5,
            ..Hyperparameters::default()
        };
        let model = lib(Model::initialize(shape, hyper, &set))?;
        let check = lib(gradient_check(&model, &set, 1e-5))?;
        worst = worst.max(check.max_rel_error);
    }
    ensure!(worst <= 1e-4, "relative gradient error {worst:e}");
    Ok(format!("max relative error {worst:.1e} over 10 models"))
}

fn check_featurize() -> CheckResult {
    let mut rng = rng_from_seed(8);
    let (n, f) = (6, 5);
    let data: Vec<f64> = (0..n * f).map(|_| rng.random_range(0.0..10.0)).collect();
    let mut permuted = Vec::with_capacity(data.len());
    for row in [3, 0, 5, 1, 4, 2] {
        permuted.extend_from_slice(&data[row * f..(row + 1) * f]);
    }
    let a = featurize(&lib(ClassifierInput::new(n, f, data))?);
    let b = featurize(&lib(ClassifierInput::new(n, f, permuted))?);
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure!(diff <= 1e-12, "row permutation changed features by {diff:e}");
    ensure!(a.len() == 2 * f, "{} features for {f} bins", a.len());
    Ok(format!("{} features, permutation difference {diff:.0e}", a.len()))
}

fn check_percentiles() -> CheckResult {
    let mut rng = rng_from_seed(21);
    for _ in 0..50 {
        let len = rng.random_range(1..40);
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..1.0)).collect();
        let s = lib(summarize(&values))?;
        ensure!(
            s.p5 <= s.p25 && s.p25 <= s.median && s.median <= s.p75 && s.p75 <= s.p95,
            "unordered summary {s:?}"
        );
    }
    Ok("50 random samples ordered".into())
}

fn check_capture() -> CheckResult {
    let grid = GridConfig::default().with_antennas(2);
    let schedule = lib(CaptureSchedule::new(0.0075, 3))?;
    let mut rng = rng_from_seed(4);
    // f32-representable values survive the 32-bit payload exactly
    let data = (0..3 * grid.n_subcarriers * 2)
        .map(|_| {
            Complex64::new(
                rng.random_range(-1.0f32..1.0) as f64,
                rng.random_range(-1.0f32..1.0) as f64,
            )
        })
        .collect();
    let t = lib(CfrTensor::from_vec(data, grid, schedule))?;
    let meta = CaptureMeta {
        label: ActivityClass::Running,
        seed: 99,
    };
    let bytes = encode_capture(&t, &meta);
    let path = Path::new("<memory>");
    let (back, back_meta) = lib(decode_capture(&bytes, path))?;
    ensure!(back == t && back_meta == meta, "capture changed in a round trip");
    ensure!(
        decode_capture(&bytes[..bytes.len() - 8], path).is_err(),
        "truncated capture accepted"
    );
    Ok(format!("{} bytes round-tripped", bytes.len()))
}

fn check_model() -> CheckResult {
    let shape = InputShape {
        n_vectors: 8,
        fft_len: 4,
    };
    let mut rng = rng_from_seed(6);
    let set = random_features(&mut rng, 2, shape.n_features());
    let model = lib(Model::initialize(shape, Hyperparameters::default(), &set))?;
    let text = model_to_string(&model);
    let back = lib(model_from_str(&text))?;
    ensure!(back == model, "model changed in a round trip");
    Ok(format!("{} parameters round-tripped", model.n_params()))
}

fn check_config() -> CheckResult {
    let config = RunConfig::default();
    let text = lib(config.to_toml_string())?;
    let back = lib(RunConfig::from_toml_str(&text))?;
    ensure!(back == config, "config changed in a round trip");
    ensure!(
        RunConfig::from_toml_str("[grid]\nunknown_key = 1\n").is_err(),
        "unknown key accepted"
    );
    Ok("defaults round-tripped, unknown keys rejected".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let outcomes = run_all();
        assert_eq!(outcomes.len(), check_names().len());
        for o in outcomes {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}

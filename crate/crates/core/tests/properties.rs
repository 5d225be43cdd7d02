//! Property tests of the type and operation invariants.

use std::path::Path;

use proptest::prelude::*;
use wislab::activity::ActivityClass;
use wislab::classifier::{featurize, softmax, ClassifierInput};
use wislab::dsp::{
    angle_grid, aoa_spectrum, doppler_spectrum, doppler_vector_stream, range_spectrum, sanitize_phase, DopplerConfig,
};
use wislab::eval::{compute_metrics, make_splits, summarize};
use wislab::io::{decode_capture, encode_capture, CaptureMeta, RunConfig};
use wislab::ofdma::{ru_layout, slice_ru, RuId};
use wislab::sim::{apply_impairments, generate_activity_scene, synthesize_cfr, ImpairmentParams, TimingOffset};
use wislab::{CaptureSchedule, CfrTensor, Complex64, GridConfig};

const TC: f64 = 7.5e-3;

fn class() -> impl Strategy<Value = ActivityClass> {
    (0usize..4).prop_map(|i| ActivityClass::ALL[i])
}

/// A short simulated capture on a reduced grid.
fn capture(class: ActivityClass, seed: u64, n_subcarriers: usize, n_ant: usize, n_snapshots: usize) -> CfrTensor {
    let grid = GridConfig {
        bandwidth: 80e6 * n_subcarriers as f64 / 996.0,
        n_subcarriers,
        ..GridConfig::default()
    }
    .with_antennas(n_ant);
    let scene = generate_activity_scene(class, n_snapshots as f64 * TC + 1.0, seed).unwrap();
    synthesize_cfr(&scene, &grid, &CaptureSchedule::new(TC, n_snapshots).unwrap()).unwrap()
}

fn f32_exact(t: &CfrTensor) -> CfrTensor {
    let data = t
        .data()
        .iter()
        .map(|v| Complex64::new(f64::from(v.re as f32), f64::from(v.im as f32)))
        .collect();
    CfrTensor::from_vec(data, *t.grid(), *t.schedule()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schedule_times_are_arithmetic(tc in 1e-4f64..0.1, n in 1usize..500, k in 0usize..500) {
        let s = CaptureSchedule::new(tc, n).unwrap();
        prop_assert_eq!(s.time(k), s.start_time + k as f64 * tc);
    }

    #[test]
    fn grid_spacing_times_count_is_bandwidth(b in 1e6f64..2e8, n in 1usize..4096) {
        let g = GridConfig { bandwidth: b, n_subcarriers: n, ..GridConfig::default() };
        let back = g.subcarrier_spacing() * n as f64;
        prop_assert!((back - b).abs() <= b * f64::EPSILON);
    }

    #[test]
    fn synthesized_tensors_are_finite(c in class(), seed in any::<u64>(), n_ant in 1usize..4) {
        let t = capture(c, seed, 24, n_ant, 12);
        prop_assert_eq!(t.shape(), (12, 24, n_ant));
        prop_assert!(t.is_finite());
    }

    #[test]
    fn scene_trajectories_are_continuous(c in class(), seed in any::<u64>()) {
        let scene = generate_activity_scene(c, 8.0, seed).unwrap();
        prop_assert!(scene.static_paths.iter().all(|p| p.delay >= 0.0));
        for s in &scene.scatterers {
            prop_assert!(s.reflectivity.norm() > 0.0);
            for i in 0..800 {
                let t = i as f64 * 0.01;
                let (a, b) = (s.position(t), s.position(t + 1e-6));
                prop_assert!(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt() < 1e-4);
            }
        }
    }

    #[test]
    fn impairments_keep_magnitudes(seed in any::<u64>(), cfo in -2e4f64..2e4, jitter in 0.0f64..0.5) {
        let clean = capture(ActivityClass::Walking, seed, 32, 2, 6);
        let imp = ImpairmentParams {
            cfo,
            timing_offset: TimingOffset::Uniform { max: 50e-9 },
            common_phase_jitter_std: jitter,
        };
        let out = apply_impairments(clean.clone(), &imp, seed).unwrap();
        for (a, b) in out.data().iter().zip(clean.data()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-12 * b.norm().max(1.0));
        }
        prop_assert_eq!(apply_impairments(clean, &imp, seed).unwrap(), out);
    }

    #[test]
    fn sanitization_removes_impairments_and_is_idempotent(
        c in class(), seed in any::<u64>(), cfo in -1e4f64..1e4, jitter in 0.0f64..1.0,
    ) {
        let clean = capture(c, seed, 996, 1, 3);
        let imp = ImpairmentParams {
            cfo,
            timing_offset: TimingOffset::Uniform { max: 25e-9 },
            common_phase_jitter_std: jitter,
        };
        let impaired = apply_impairments(clean.clone(), &imp, seed ^ 1).unwrap();
        let a = sanitize_phase(&impaired).unwrap().cfr;
        let b = sanitize_phase(&clean).unwrap().cfr;
        let scale = b.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.data().iter().zip(b.data()) {
            prop_assert!((x - y).norm() <= 1e-6 * scale);
        }
        let again = sanitize_phase(&a).unwrap().cfr;
        for (x, y) in again.data().iter().zip(a.data()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn ru_slices_are_bit_identical_and_disjoint(seed in any::<u64>()) {
        let grid = GridConfig::default();
        let layout = ru_layout(&grid).unwrap();
        let t = capture(ActivityClass::InPlace, seed, 996, 1, 2);
        for e in &layout.entries {
            prop_assert!(e.range().end <= grid.n_subcarriers);
            let s = slice_ru(&t, e.ru).unwrap();
            for k in 0..2 {
                prop_assert_eq!(s.snapshot(k), &t.snapshot(k)[e.range()]);
            }
            let bw = layout.ru_bandwidth(e.ru).unwrap();
            prop_assert!((bw - e.count as f64 * grid.subcarrier_spacing()).abs() <= bw * 1e-15);
        }
        for tones in [484, 242] {
            let same: Vec<_> = layout.entries.iter().filter(|e| e.count == tones).collect();
            for w in same.windows(2) {
                prop_assert!(w[0].range().end <= w[1].range().start);
            }
        }
    }

    #[test]
    fn ru_names_round_trip(i in 0usize..7) {
        let ru = RuId::ALL[i];
        prop_assert_eq!(ru.to_string().parse::<RuId>().unwrap(), ru);
    }

    #[test]
    fn spectra_are_nonnegative_and_sized(c in class(), seed in any::<u64>(), k in 1usize..4) {
        let t = capture(c, seed, 48, 3, 90);
        let config = DopplerConfig::default();
        let vectors = doppler_vector_stream(&t, &config, k).unwrap();
        prop_assert_eq!(vectors.len(), config.n_windows(90, k));
        for v in &vectors {
            prop_assert_eq!(v.power.len(), config.fft_len);
            prop_assert!(v.power.iter().all(|p| p.is_finite() && *p >= 0.0));
            prop_assert!(v.static_power >= 0.0);
        }
        let r = range_spectrum(&t, 0, 0).unwrap();
        prop_assert_eq!(r.power.len(), 48);
        prop_assert!(r.power.iter().all(|p| *p >= 0.0));
        let grid = angle_grid(2.0);
        prop_assert!(grid.windows(2).all(|w| w[1] > w[0]));
        let a = aoa_spectrum(&t, 0, 10, &grid).unwrap();
        prop_assert!(a.power.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn stream_matches_windowed_spectra(c in class(), seed in any::<u64>(), k in 1usize..3) {
        let t = capture(c, seed, 16, 2, 70);
        let config = DopplerConfig { stride: 3, ..DopplerConfig::default() };
        let stream = doppler_vector_stream(&t, &config, k).unwrap();
        let decimated = t.decimate(k).unwrap();
        for (i, v) in stream.iter().enumerate() {
            let start = i * config.stride;
            let window = decimated.snapshots(start..start + config.window_len).unwrap();
            let direct = doppler_spectrum(&window, &config, TC * k as f64).unwrap();
            let scale = direct.power.iter().cloned().fold(direct.static_power, f64::max);
            for (a, b) in v.power.iter().zip(&direct.power) {
                prop_assert!((a - b).abs() <= 1e-9 * scale);
            }
            prop_assert!((v.static_power - direct.static_power).abs() <= 1e-9 * scale);
            prop_assert_eq!(v.bin_width, direct.bin_width);
        }
    }

    #[test]
    fn softmax_is_a_distribution(z in prop::array::uniform4(-300.0f64..300.0)) {
        let p = softmax(&z);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn features_ignore_row_order(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..1e4, 6), 2..12),
        rotate in 0usize..12,
    ) {
        let n = rows.len();
        let mut shuffled = rows.clone();
        shuffled.rotate_left(rotate % n);
        shuffled.reverse();
        let a = featurize(&ClassifierInput::new(n, 6, rows.concat()).unwrap());
        let b = featurize(&ClassifierInput::new(n, 6, shuffled.concat()).unwrap());
        prop_assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn splits_partition_campaigns(rounds in 1usize..12, seed in any::<u64>()) {
        let sets = make_splits(4, rounds, seed).unwrap();
        prop_assert_eq!(sets.len(), 12 * rounds);
        for s in &sets {
            let mut roles = vec![s.train[0], s.train[1], s.validation, s.test];
            roles.sort_unstable();
            prop_assert_eq!(roles, vec![1, 2, 3, 4]);
        }
        for c in 1..=4 {
            prop_assert_eq!(sets.iter().filter(|s| s.test == c).count(), 3 * rounds);
        }
    }

    #[test]
    fn metrics_lie_in_unit_interval(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..200)) {
        let preds: Vec<_> = pairs.iter().map(|p| ActivityClass::ALL[p.0]).collect();
        let labels: Vec<_> = pairs.iter().map(|p| ActivityClass::ALL[p.1]).collect();
        let m = compute_metrics(&preds, &labels).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.accuracy));
        prop_assert!((0.0..=1.0).contains(&m.macro_f1));
        let perfect = compute_metrics(&labels, &labels).unwrap();
        prop_assert_eq!((perfect.accuracy, perfect.macro_f1), (1.0, 1.0));
    }

    #[test]
    fn percentiles_are_ordered(values in prop::collection::vec(-1e6f64..1e6, 1..300)) {
        let s = summarize(&values).unwrap();
        prop_assert!(s.p5 <= s.p25 && s.p25 <= s.median && s.median <= s.p75 && s.p75 <= s.p95);
    }

    #[test]
    fn capture_round_trip_is_exact(c in class(), seed in any::<u64>(), n_ant in 1usize..3) {
        let t = f32_exact(&capture(c, seed, 20, n_ant, 5));
        let meta = CaptureMeta { label: c, seed };
        let bytes = encode_capture(&t, &meta);
        let (back, back_meta) = decode_capture(&bytes, Path::new("mem")).unwrap();
        prop_assert_eq!(back_meta, meta);
        prop_assert_eq!(back, t);
        prop_assert!(decode_capture(&bytes[..bytes.len() - 1], Path::new("mem")).is_err());
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), snr in -10.0f64..40.0, n in 2usize..512) {
        let mut c = RunConfig::default();
        c.simulation.seed = seed;
        c.simulation.snr_db = snr;
        c.classifier.n_vectors = n;
        let text = c.to_toml_string().unwrap();
        prop_assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    assert!(RunConfig::from_toml_str("[grid]\nbandwdith = 80e6\n").is_err());
    assert!(RunConfig::from_toml_str("[nonsense]\n").is_err());
}

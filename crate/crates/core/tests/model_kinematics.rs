mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use crossroads::kinematics::{
    check_limits, perturb_control, perturb_pose, step, ControlInput, LimitViolation, NoiseConfig,
};
use crossroads::model::{
    road_target, standard_path, IntersectionConfig, Maneuver, Road, VehicleSpec, VehicleState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> IntersectionConfig {
    IntersectionConfig::default()
}

#[test]
fn routing_examples() {
    let c = cfg();
    assert_eq!(road_target(Road(1), Maneuver::GoStraight, &c).unwrap(), Road(3));
    assert_eq!(road_target(Road(1), Maneuver::TurnLeft, &c).unwrap(), Road(2));
    assert_eq!(road_target(Road(2), Maneuver::TurnRight, &c).unwrap(), Road(1));
}

#[test]
fn routing_is_a_bijection_onto_other_roads() {
    let c = cfg();
    for r in common::ROADS {
        let mut targets: Vec<usize> = Maneuver::ALL
            .iter()
            .map(|&m| road_target(Road(r), m, &c).unwrap().0)
            .collect();
        targets.sort_unstable();
        let mut others: Vec<usize> = common::ROADS.iter().copied().filter(|&o| o != r).collect();
        others.sort_unstable();
        assert_eq!(targets, others, "road {r}");
    }
}

/// Arc length of `pose_at` measured by summing chords of a fine
/// subdivision.
fn measured_length(path: &crossroads::model::StandardPath, a: f64, b: f64, n: usize) -> f64 {
    let mut total = 0.0;
    let mut prev = path.pose_at(a);
    for k in 1..=n {
        let p = path.pose_at(a + (b - a) * k as f64 / n as f64);
        total += (p.x - prev.x).hypot(p.y - prev.y);
        prev = p;
    }
    total
}

#[test]
fn path_lengths_match_geometry() {
    let c = cfg();
    let half = c.half_side();
    let off = c.lane_width / 2.0;
    for r in common::ROADS {
        for m in Maneuver::ALL {
            let to = road_target(Road(r), m, &c).unwrap();
            let p = standard_path(Road(r), to, m, &c).unwrap();
            let expected = match m {
                Maneuver::GoStraight => 2.0 * half,
                Maneuver::TurnRight => PI / 2.0 * (half - off),
                Maneuver::TurnLeft => PI / 2.0 * (half + off),
            };
            assert_abs_diff_eq!(p.length(), expected, epsilon = 1e-9);
            assert_abs_diff_eq!(measured_length(&p, 0.0, p.length(), 20_000), expected, epsilon = 1e-6);
        }
    }
}

#[test]
fn straight_crossing_spans_the_area() {
    let c = cfg();
    let p = standard_path(Road(1), Road(3), Maneuver::GoStraight, &c).unwrap();
    assert_abs_diff_eq!(p.length(), 8.0, epsilon = 1e-12);
}

#[test]
fn endpoints_lie_on_lane_centres_at_the_boundary() {
    let c = cfg();
    let area = c.conflict_area();
    for r in common::ROADS {
        for m in Maneuver::ALL {
            let to = road_target(Road(r), m, &c).unwrap();
            let p = standard_path(Road(r), to, m, &c).unwrap();
            let (start, end) = (p.start_pose(), p.end_pose());
            let entry = c.entry_pose(Road(r)).unwrap();
            let exit = c.exit_pose(to).unwrap();
            assert!((start.x - entry.x).abs() < 1e-9 && (start.y - entry.y).abs() < 1e-9);
            assert!((end.x - exit.x).abs() < 1e-9 && (end.y - exit.y).abs() < 1e-9);
            for q in [start, end] {
                let on_x = (q.x.abs() - area.max[0]).abs() < 1e-9;
                let on_y = (q.y.abs() - area.max[1]).abs() < 1e-9;
                assert!(on_x || on_y, "{r} {m}: ({}, {}) not on the boundary", q.x, q.y);
                let lateral = if on_x { q.y.abs() } else { q.x.abs() };
                assert_abs_diff_eq!(lateral, c.lane_width / 2.0, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn samples_are_equally_spaced_in_arc_length() {
    let c = cfg();
    for r in common::ROADS {
        for m in Maneuver::ALL {
            let to = road_target(Road(r), m, &c).unwrap();
            let p = standard_path(Road(r), to, m, &c).unwrap();
            assert!(p.spacing <= c.sample_spacing + 1e-12);
            let s = p.sample_arc_lengths();
            for w in s.windows(2) {
                let d = measured_length(&p, w[0], w[1], 400);
                assert!(((d - p.spacing) / p.spacing).abs() < 1e-6, "{r} {m}: {d}");
            }
            for (j, q) in p.samples.iter().enumerate() {
                let pose = p.pose_at(s[j]);
                assert!((pose.x - q[0]).abs() < 1e-12 && (pose.y - q[1]).abs() < 1e-12);
            }
        }
    }
}

fn spec() -> VehicleSpec {
    VehicleSpec {
        wheelbase: 2.7,
        ..VehicleSpec::default()
    }
}

fn state(v: f64) -> VehicleState {
    VehicleState {
        x: 0.0,
        y: 0.0,
        heading: 0.0,
        speed: v,
    }
}

/// Forward Euler with `n` substeps.
fn euler(s0: &VehicleState, u: &ControlInput, l: f64, h: f64, n: usize) -> [f64; 4] {
    let mut s = [s0.x, s0.y, s0.heading, s0.speed];
    let k = h / n as f64;
    for _ in 0..n {
        let d = [
            s[3] * s[2].cos(),
            s[3] * s[2].sin(),
            s[3] * u.steer.tan() / l,
            u.accel,
        ];
        for i in 0..4 {
            s[i] += k * d[i];
        }
    }
    s
}

#[test]
fn step_matches_fine_euler() {
    let v = spec();
    let s0 = state(5.0);
    let u = ControlInput::new(0.0, 0.2);
    let next = step(&s0, &u, &v, 0.1);
    let coarse = euler(&s0, &u, v.wheelbase, 0.1, 1000);
    let fine = euler(&s0, &u, v.wheelbase, 0.1, 2000);
    // Richardson extrapolation of the first-order scheme.
    let oracle: Vec<f64> = (0..4).map(|i| 2.0 * fine[i] - coarse[i]).collect();
    assert_abs_diff_eq!(next.x, oracle[0], epsilon = 1e-6);
    assert_abs_diff_eq!(next.y, oracle[1], epsilon = 1e-6);
    assert_abs_diff_eq!(next.heading, oracle[2], epsilon = 1e-6);
    assert_abs_diff_eq!(next.speed, oracle[3], epsilon = 1e-9);
}

/// Exact pose after `t` seconds of constant speed and steering.
fn circle(v: f64, steer: f64, l: f64, t: f64) -> [f64; 3] {
    let k = steer.tan() / l;
    let th = v * k * t;
    [th.sin() / k, (1.0 - th.cos()) / k, th]
}

fn error_after(h: f64, total: f64) -> f64 {
    let v = spec();
    let u = ControlInput::new(0.0, 0.3);
    let mut s = state(6.0);
    let n = (total / h).round() as usize;
    for _ in 0..n {
        s = step(&s, &u, &v, h);
    }
    let exact = circle(6.0, 0.3, v.wheelbase, total);
    (s.x - exact[0]).hypot(s.y - exact[1])
}

#[test]
fn integration_is_fourth_order() {
    let e1 = error_after(0.1, 2.0);
    let e2 = error_after(0.05, 2.0);
    assert!(e1 > 0.0);
    assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
}

#[test]
fn straight_motion_keeps_heading() {
    let v = spec();
    let mut s = VehicleState {
        heading: 0.7,
        ..state(8.0)
    };
    for _ in 0..500 {
        s = step(&s, &ControlInput::new(0.5, 0.0), &v, 0.02);
    }
    assert_eq!(s.heading, 0.7);
}

#[test]
fn limit_examples() {
    let v = spec();
    let top = state(v.v_max);
    assert!(check_limits(&ControlInput::new(v.a_max, 0.0), &top, &v).ok());
    let r = check_limits(&ControlInput::new(0.0, v.delta_max + 0.01), &top, &v);
    assert_eq!(r.violations, vec![LimitViolation::Steering]);
    let r = check_limits(&ControlInput::new(v.a_min - 1e-6, 0.0), &top, &v);
    assert_eq!(r.violations, vec![LimitViolation::Acceleration]);
}

#[test]
fn noise_matches_declared_distribution() {
    let noise = NoiseConfig {
        sigma_x: 0.1,
        ..NoiseConfig::noiseless()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let truth = state(3.0);
    let xs: Vec<f64> = (0..n).map(|_| perturb_pose(&truth, &noise, &mut rng).x).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 3.0 * 0.1 / (n as f64).sqrt(), "mean {mean}");
    assert!((var.sqrt() - 0.1).abs() < 0.002, "std {}", var.sqrt());
}

#[test]
fn zero_noise_is_bit_exact() {
    let noise = NoiseConfig::noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = VehicleState {
        x: 1.25,
        y: -3.5,
        heading: 0.3,
        speed: 4.0,
    };
    assert_eq!(perturb_pose(&s, &noise, &mut rng), s);
    let u = ControlInput::new(0.4, -0.1);
    assert_eq!(perturb_control(&u, &noise, &mut rng), u);
}

#[test]
fn noise_streams_are_reproducible() {
    let noise = NoiseConfig::default();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50)
            .map(|_| perturb_control(&ControlInput::default(), &noise, &mut rng))
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}

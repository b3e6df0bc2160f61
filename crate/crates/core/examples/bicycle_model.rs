//! Drive the kinematic bicycle model around a constant-steer circle and
//! compare the turning radius with `L / tan(delta)`.

use crossroads::kinematics::{check_limits, saturate, step, ControlInput};
use crossroads::model::{Pose, VehicleSpec, VehicleState};

fn main() {
    let spec = VehicleSpec::default();
    let h = 0.01;
    for delta in [0.1, 0.3, spec.delta_max] {
        let u = ControlInput::new(0.0, delta);
        let mut s = VehicleState {
            speed: 4.0,
            ..VehicleState::at_rest(Pose::new(0.0, 0.0, 0.0))
        };
        let (mut min_y, mut max_y) = (0.0f64, 0.0f64);
        let period = 2.0 * std::f64::consts::PI * spec.wheelbase / delta.tan() / s.speed;
        for _ in 0..(period / h).ceil() as usize {
            s = step(&s, &u, &spec, h);
            min_y = min_y.min(s.y);
            max_y = max_y.max(s.y);
        }
        println!(
            "delta {delta:.3} rad: radius {:.4} m (expected {:.4} m), back at start within {:.3} m, limits ok: {}",
            (max_y - min_y) / 2.0,
            spec.wheelbase / delta.tan(),
            s.x.hypot(s.y),
            check_limits(&u, &s, &spec).ok()
        );
    }
    let wild = ControlInput::new(9.0, 1.2);
    let tame = saturate(&wild, &spec);
    println!("saturate {wild:?} -> {tame:?}");
}

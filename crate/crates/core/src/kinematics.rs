//! Kinematic bicycle model, actuation limits and the Gaussian
//! localisation / actuation noise used by the closed-loop simulator.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::model::{VehicleSpec, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    /// Longitudinal acceleration (m/s^2).
    pub accel: f64,
    /// Front-wheel steering angle (rad).
    pub steer: f64,
}

impl ControlInput {
    pub fn new(accel: f64, steer: f64) -> Self {
        Self { accel, steer }
    }
}

fn derivative(s: &VehicleState, u: &ControlInput, wheelbase: f64) -> [f64; 4] {
    [
        s.speed * s.heading.cos(),
        s.speed * s.heading.sin(),
        s.speed * u.steer.tan() / wheelbase,
        u.accel,
    ]
}

fn offset(s: &VehicleState, k: &[f64; 4], h: f64) -> VehicleState {
    VehicleState {
        x: s.x + k[0] * h,
        y: s.y + k[1] * h,
        heading: s.heading + k[2] * h,
        speed: s.speed + k[3] * h,
    }
}

/// Advance the bicycle model by `h` seconds with the input held constant
/// (classical fourth-order Runge-Kutta). The resulting speed is clamped to
/// `[0, v_max]`.
pub fn step(state: &VehicleState, u: &ControlInput, spec: &VehicleSpec, h: f64) -> VehicleState {
    debug_assert!(h > 0.0);
    let l = spec.wheelbase;
    let k1 = derivative(state, u, l);
    let k2 = derivative(&offset(state, &k1, h / 2.0), u, l);
    let k3 = derivative(&offset(state, &k2, h / 2.0), u, l);
    let k4 = derivative(&offset(state, &k3, h), u, l);
    let mut next = *state;
    let w = h / 6.0;
    next.x += w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    next.y += w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    next.heading += w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    next.speed += w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]);
    if next.speed < 0.0 || next.speed > spec.v_max {
        log::trace!("speed {:.4} clamped to [0, {}]", next.speed, spec.v_max);
        next.speed = next.speed.clamp(0.0, spec.v_max);
    }
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitViolation {
    Acceleration,
    Speed,
    Steering,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LimitReport {
    pub violations: Vec<LimitViolation>,
}

impl LimitReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Inclusive check of the actuation and speed limits.
pub fn check_limits(u: &ControlInput, state: &VehicleState, spec: &VehicleSpec) -> LimitReport {
    let mut violations = Vec::new();
    if !(u.accel >= spec.a_min && u.accel <= spec.a_max) {
        violations.push(LimitViolation::Acceleration);
    }
    if !(state.speed >= 0.0 && state.speed <= spec.v_max) {
        violations.push(LimitViolation::Speed);
    }
    if !(u.steer.abs() <= spec.delta_max) {
        violations.push(LimitViolation::Steering);
    }
    LimitReport { violations }
}

/// Clamp an input into the actuation envelope.
pub fn saturate(u: &ControlInput, spec: &VehicleSpec) -> ControlInput {
    ControlInput {
        accel: u.accel.clamp(spec.a_min, spec.a_max),
        steer: u.steer.clamp(-spec.delta_max, spec.delta_max),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_theta: f64,
    pub sigma_a: f64,
    pub sigma_delta: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma_x: 0.05,
            sigma_y: 0.05,
            sigma_theta: 0.01,
            sigma_a: 0.1,
            sigma_delta: 0.01,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            sigma_x: 0.0,
            sigma_y: 0.0,
            sigma_theta: 0.0,
            sigma_a: 0.0,
            sigma_delta: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let all = [self.sigma_x, self.sigma_y, self.sigma_theta, self.sigma_a, self.sigma_delta];
        if all.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(crate::Error::Config("noise standard deviations must be >= 0".into()));
        }
        Ok(())
    }
}

fn gaussian<R: Rng + ?Sized>(mean: f64, sigma: f64, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        return mean;
    }
    Normal::new(mean, sigma)
        .expect("sigma validated non-negative and finite")
        .sample(rng)
}

/// Measured pose: the true pose plus independent Gaussian errors on x, y
/// and heading. Speed is passed through.
pub fn perturb_pose<R: Rng + ?Sized>(
    state: &VehicleState,
    noise: &NoiseConfig,
    rng: &mut R,
) -> VehicleState {
    VehicleState {
        x: gaussian(state.x, noise.sigma_x, rng),
        y: gaussian(state.y, noise.sigma_y, rng),
        heading: gaussian(state.heading, noise.sigma_theta, rng),
        speed: state.speed,
    }
}

/// Input actually applied by the actuators.
pub fn perturb_control<R: Rng + ?Sized>(
    u: &ControlInput,
    noise: &NoiseConfig,
    rng: &mut R,
) -> ControlInput {
    ControlInput {
        accel: gaussian(u.accel, noise.sigma_a, rng),
        steer: gaussian(u.steer, noise.sigma_delta, rng),
    }
}

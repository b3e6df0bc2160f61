//! Speed profiles: the constant-rate CA profile and the quintic
//! buffer-area profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::VehicleSpec;

/// `s(t) = (s_t / s_n) v_ref t` over `[0, s_n / v_ref]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub s_t: f64,
    pub s_n: f64,
    pub v_ref: f64,
}

impl SpeedProfile {
    pub fn new(s_t: f64, s_n: f64, v_ref: f64) -> Result<Self> {
        if !(s_t > 0.0 && s_n > 0.0 && v_ref > 0.0) {
            return Err(Error::Config(format!(
                "speed profile needs positive lengths and speed (s_t {s_t}, s_n {s_n}, v_ref {v_ref})"
            )));
        }
        Ok(Self { s_t, s_n, v_ref })
    }

    /// Parameter rate `ds/dt`.
    pub fn rate(&self) -> f64 {
        self.s_t / self.s_n * self.v_ref
    }

    pub fn duration(&self) -> f64 {
        self.s_n / self.v_ref
    }

    pub fn s(&self, t: f64) -> f64 {
        self.rate() * t
    }
}

/// Quintic `s_B(t)` over `[0, t_a]` with prescribed position, speed and
/// acceleration at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BufferProfile {
    pub coeffs: [f64; 6],
    pub t_a: f64,
    pub length: f64,
}

/// Kinematic state along a one-dimensional path.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LongitudinalState {
    pub s: f64,
    pub v: f64,
    pub a: f64,
}

impl BufferProfile {
    /// Closed-form quintic through `start` at `t = 0` and
    /// `(length, end_speed, end_accel)` at `t = t_a`.
    pub fn solve(
        length: f64,
        end_speed: f64,
        end_accel: f64,
        start: LongitudinalState,
        t_a: f64,
    ) -> Result<Self> {
        if !(t_a > 0.0) {
            return Err(Error::BufferInfeasible(format!("t_a = {t_a} must be positive")));
        }
        let (v0, a0) = (start.v, start.a);
        let t = t_a;
        let ds = length - start.s - (v0 * t + a0 * t * t / 2.0);
        let dv = end_speed - (v0 + a0 * t);
        let da = end_accel - a0;
        let c3 = (10.0 * ds - 4.0 * dv * t + da * t * t / 2.0) / t.powi(3);
        let c4 = (-15.0 * ds + 7.0 * dv * t - da * t * t) / t.powi(4);
        let c5 = (6.0 * ds - 3.0 * dv * t + da * t * t / 2.0) / t.powi(5);
        Ok(Self {
            coeffs: [start.s, v0, a0 / 2.0, c3, c4, c5],
            t_a,
            length,
        })
    }

    pub fn state(&self, t: f64) -> LongitudinalState {
        let c = &self.coeffs;
        let t = t.clamp(0.0, self.t_a);
        LongitudinalState {
            s: ((((c[5] * t + c[4]) * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0],
            v: (((5.0 * c[5] * t + 4.0 * c[4]) * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1],
            a: ((20.0 * c[5] * t + 12.0 * c[4]) * t + 6.0 * c[3]) * t + 2.0 * c[2],
        }
    }

    /// First violated limit on a 1 ms grid, if any.
    pub fn check(&self, v: &VehicleSpec) -> Option<String> {
        let n = (self.t_a / 1e-3).ceil() as usize;
        for k in 0..=n {
            let t = self.t_a * k as f64 / n as f64;
            let st = self.state(t);
            if st.v < -1e-9 || st.v > v.v_max + 1e-9 {
                return Some(format!("speed {:.3} at t = {t:.3}", st.v));
            }
            if st.a < v.a_min - 1e-9 || st.a > v.a_max + 1e-9 {
                return Some(format!("acceleration {:.3} at t = {t:.3}", st.a));
            }
        }
        None
    }
}

/// Step of the `t_a` search grid.
pub const T_A_STEP: f64 = 0.1;
const T_A_LIMIT: f64 = 60.0;

/// Quintic for the smallest `t_a` on a 0.1 s grid that keeps speed and
/// acceleration within limits.
pub fn buffer_profile(
    length: f64,
    end_speed: f64,
    end_accel: f64,
    start: LongitudinalState,
    v: &VehicleSpec,
) -> Result<BufferProfile> {
    let steps = (T_A_LIMIT / T_A_STEP) as usize;
    for k in 1..=steps {
        let t_a = k as f64 * T_A_STEP;
        let p = BufferProfile::solve(length, end_speed, end_accel, start, t_a)?;
        if p.check(v).is_none() {
            return Ok(p);
        }
    }
    Err(Error::BufferInfeasible(format!(
        "no t_a <= {T_A_LIMIT} s covers {length} m from v = {} to v = {end_speed}",
        start.v
    )))
}

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::path::{smooth_path, PathSpline, SmoothingConfig};
use super::speed::SpeedProfile;
use crate::error::{Error, Result};
use crate::grid::PoseSource;
use crate::model::{
    road_target, standard_path, IntersectionConfig, Maneuver, Pose, Road, VehicleSpec,
    VehicleState,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceConfig {
    pub d_b: f64,
    pub weights: [f64; 3],
    pub piece_length: f64,
    pub v_ref: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        let s = SmoothingConfig::default();
        Self {
            d_b: s.d_b,
            weights: s.weights,
            piece_length: s.piece_length,
            v_ref: 8.0,
        }
    }
}

impl ReferenceConfig {
    pub fn smoothing(&self) -> SmoothingConfig {
        SmoothingConfig {
            d_b: self.d_b,
            weights: self.weights,
            piece_length: self.piece_length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.smoothing().validate()?;
        if !(self.v_ref > 0.0) {
            return Err(Error::Config("v_ref must be positive".into()));
        }
        Ok(())
    }
}

/// Smoothed path plus constant-rate speed profile for one maneuver.
///
/// The path starts `lead` metres before the conflict area and ends `tail`
/// metres after it, so that the redundancy-inflated footprint is tracked
/// from first to last contact with the area. Time 0 is the start of that
/// lead-in.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub road_from: Road,
    pub road_to: Road,
    pub maneuver: Maneuver,
    pub path: PathSpline,
    pub speed: SpeedProfile,
    pub lead: f64,
    pub tail: f64,
}

impl Trajectory {
    /// Reference for `(from, maneuver)` with lead-in and lead-out equal to
    /// the inflated half-length of `vehicle`.
    pub fn generate(
        from: Road,
        maneuver: Maneuver,
        cfg: &IntersectionConfig,
        vehicle: &VehicleSpec,
        rcfg: &ReferenceConfig,
    ) -> Result<Self> {
        rcfg.validate()?;
        let to = road_target(from, maneuver, cfg)?;
        let ext = vehicle.inflated_half_length();
        let standard = standard_path(from, to, maneuver, cfg)?.extended(ext, ext);
        let path = smooth_path(&standard, &rcfg.smoothing())?;
        let speed = SpeedProfile::new(path.s_t, path.s_n, rcfg.v_ref)?;
        Ok(Self {
            road_from: from,
            road_to: to,
            maneuver,
            path,
            speed,
            lead: ext,
            tail: ext,
        })
    }

    /// Wrap an arbitrary smoothed path.
    pub fn from_path(
        path: PathSpline,
        v_ref: f64,
        road_from: Road,
        road_to: Road,
        maneuver: Maneuver,
    ) -> Result<Self> {
        let speed = SpeedProfile::new(path.s_t, path.s_n, v_ref)?;
        Ok(Self {
            road_from,
            road_to,
            maneuver,
            path,
            speed,
            lead: 0.0,
            tail: 0.0,
        })
    }

    pub fn duration(&self) -> f64 {
        self.speed.duration()
    }

    fn param(&self, t: f64) -> f64 {
        self.speed.s(t.clamp(0.0, self.duration())).min(self.path.s_t)
    }

    /// Pose at relative time `t` (clamped to the window).
    pub fn pose(&self, t: f64) -> Pose {
        let s = self.param(t);
        let p = self.path.position(s);
        Pose::new(p[0], p[1], self.path.heading(s))
    }

    /// Pose at absolute time `t` for a trajectory started at `t_e`.
    pub fn sample_pose(&self, t: f64, t_e: f64) -> Result<Pose> {
        let rel = t - t_e;
        let d = self.duration();
        if !(rel >= -1e-9 && rel <= d + 1e-9) {
            return Err(Error::OutsideWindow { t: rel, duration: d });
        }
        Ok(self.pose(rel))
    }

    pub fn state(&self, t: f64) -> VehicleState {
        let p = self.pose(t);
        VehicleState {
            x: p.x,
            y: p.y,
            heading: p.heading,
            speed: self.ground_speed(t),
        }
    }

    pub fn ground_speed(&self, t: f64) -> f64 {
        self.path.speed_factor(self.param(t)) * self.speed.rate()
    }

    /// Longitudinal acceleration `d|v|/dt`.
    pub fn accel(&self, t: f64) -> f64 {
        let s = self.param(t);
        let d1 = self.path.derivative(s, 1);
        let d2 = self.path.derivative(s, 2);
        let r = self.speed.rate();
        r * r * (d1[0] * d2[0] + d1[1] * d2[1]) / d1[0].hypot(d1[1])
    }

    /// Position, velocity and acceleration vectors at relative time `t`.
    pub fn kinematics(&self, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let s = self.param(t);
        let r = self.speed.rate();
        let p = self.path.position(s);
        let d1 = self.path.derivative(s, 1);
        let d2 = self.path.derivative(s, 2);
        (
            p,
            [d1[0] * r, d1[1] * r],
            [d2[0] * r * r, d2[1] * r * r],
        )
    }

    pub fn curvature(&self, t: f64) -> f64 {
        self.path.curvature(self.param(t))
    }

    /// Speed and acceleration the buffer profile must hand over.
    pub fn entry_speed(&self) -> f64 {
        self.ground_speed(0.0)
    }

    pub fn entry_accel(&self) -> f64 {
        self.accel(0.0)
    }

    /// Relative times at which the vehicle centre crosses into and out of
    /// the conflict area along the line & circle parameterisation.
    pub fn ca_window(&self) -> (f64, f64) {
        let r = self.speed.rate();
        (self.lead / r, (self.path.s_t - self.tail) / r)
    }

    /// Steering angle needed to follow the peak curvature.
    pub fn peak_steering(&self, wheelbase: f64) -> f64 {
        (wheelbase * self.path.max_abs_curvature(50)).atan()
    }

    /// CSV rows `t,s,x,y,theta,v` every `step` seconds, shifted by `t_e`.
    pub fn write_csv<W: Write>(&self, out: W, t_e: f64, step: f64) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "s", "x", "y", "theta", "v"])?;
        let n = (self.duration() / step).ceil().max(1.0) as usize;
        for k in 0..=n {
            let t = (k as f64 * step).min(self.duration());
            let p = self.pose(t);
            w.write_record(
                [t + t_e, self.param(t), p.x, p.y, p.heading, self.ground_speed(t)]
                    .iter()
                    .map(|v| format!("{v:.6}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

impl PoseSource for Trajectory {
    fn duration(&self) -> f64 {
        Trajectory::duration(self)
    }

    fn pose_at(&self, t: f64) -> Pose {
        self.pose(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn traj(from: usize, m: Maneuver) -> Trajectory {
        Trajectory::generate(
            Road(from),
            m,
            &IntersectionConfig::default(),
            &VehicleSpec::default(),
            &ReferenceConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn straight_heading_constant() {
        let t = traj(3, Maneuver::GoStraight);
        // road 3 is west, entering eastbound
        for k in 0..=20 {
            let p = t.pose(t.duration() * k as f64 / 20.0);
            assert_abs_diff_eq!(p.heading, 0.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(t.duration(), 13.0 / 8.0, epsilon = 1e-9);
    }

    #[test]
    fn window_is_enforced() {
        let t = traj(1, Maneuver::TurnLeft);
        assert!(t.sample_pose(4.9, 5.0).is_err());
        let p = t.sample_pose(5.0, 5.0).unwrap();
        assert_abs_diff_eq!(p.x, 4.0 + 2.5, epsilon = 1e-8);
        assert_abs_diff_eq!(p.y, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn handover_state() {
        let t = traj(2, Maneuver::TurnRight);
        assert_abs_diff_eq!(t.entry_speed(), t.speed.rate(), epsilon = 1e-9);
        assert_abs_diff_eq!(t.entry_accel(), 0.0, epsilon = 1e-9);
    }
}

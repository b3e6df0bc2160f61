use serde::{Deserialize, Serialize};

use super::bspline::ControlPointSequence;
use super::obstacles::ObstacleGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    pub omega_acc: f64,
    pub omega_jerk: f64,
    pub omega_c: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            omega_acc: 5.0,
            omega_jerk: 1.0,
            omega_c: 0.1,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<()> {
        if [self.omega_acc, self.omega_jerk, self.omega_c]
            .iter()
            .any(|w| !(*w >= 0.0) || !w.is_finite())
        {
            return Err(Error::Config("cost weights must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Clearance `d_r` and footprint radius `d_f`; the cubic/quadratic switch
/// point equals `d_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionParams {
    pub d_r: f64,
    pub d_f: f64,
}

impl CollisionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_r > 0.0 && self.d_f > 0.0) {
            return Err(Error::Config("d_r and d_f must be positive".into()));
        }
        Ok(())
    }

    pub fn s_f(&self) -> f64 {
        self.d_r
    }

    pub fn radius(&self) -> f64 {
        self.d_r + self.d_f
    }
}

/// Penalty and its derivative with respect to the penetration depth `d`.
pub fn penalty(d: f64, s_f: f64) -> (f64, f64) {
    if d < 0.0 {
        (0.0, 0.0)
    } else if d < s_f {
        (d * d * d, 3.0 * d * d)
    } else {
        (
            3.0 * s_f * d * d - 3.0 * s_f * s_f * d + s_f * s_f * s_f,
            6.0 * s_f * d - 3.0 * s_f * s_f,
        )
    }
}

/// `omega_acc * sum |A_i|^2 + omega_jerk * sum |J_i|^2`, accumulating the
/// gradient into `grad` for free points only.
pub fn smoothness_cost(q: &ControlPointSequence, w: &CostWeights, grad: &mut [[f64; 2]]) -> f64 {
    let p = &q.points;
    let n = p.len();
    let free = q.free_range();
    let dt2 = q.dt * q.dt;
    let dt3 = dt2 * q.dt;
    let mut cost = 0.0;
    let mut add = |stencil: &[f64], scale: f64, weight: f64, i: usize| {
        for d in 0..2 {
            let v: f64 = stencil
                .iter()
                .enumerate()
                .map(|(k, c)| c * p[i + k][d])
                .sum::<f64>()
                / scale;
            cost += weight * v * v;
            for (k, c) in stencil.iter().enumerate() {
                if free.contains(&(i + k)) {
                    grad[i + k][d] += 2.0 * weight * v * c / scale;
                }
            }
        }
    };
    for i in 0..n - 2 {
        add(&[1.0, -2.0, 1.0], dt2, w.omega_acc, i);
    }
    for i in 0..n - 3 {
        add(&[-1.0, 3.0, -3.0, 1.0], dt3, w.omega_jerk, i);
    }
    cost
}

/// `omega_c * sum_i sum_j C_c(d_ij)` over free points, each checked
/// against the cells of the slab at its anchor time.
pub fn collision_cost(
    q: &ControlPointSequence,
    grid: &ObstacleGrid,
    p: &CollisionParams,
    omega_c: f64,
    grad: &mut [[f64; 2]],
) -> f64 {
    let spec = grid.spec();
    let diag = spec.dx.hypot(spec.dy);
    let radius = p.radius();
    let s_f = p.s_f();
    let mut cells = Vec::new();
    let mut cost = 0.0;
    for i in q.free_range() {
        let t = q.t0 + q.anchor_time(i);
        if t < 0.0 {
            continue;
        }
        let jt = spec.slab_of(t);
        let qi = q.points[i];
        grid.near(jt, qi, radius + diag, &mut cells);
        for c in &cells {
            let v = [qi[0] - c[0], qi[1] - c[1]];
            let norm = v[0].hypot(v[1]);
            let (value, slope) = penalty(radius - norm, s_f);
            if value == 0.0 && slope == 0.0 {
                continue;
            }
            cost += omega_c * value;
            let dir = if norm > 0.0 {
                [v[0] / norm, v[1] / norm]
            } else {
                log::debug!("control point {i} sits on an obstacle cell centre");
                [1.0, 0.0]
            };
            grad[i][0] -= omega_c * slope * dir[0];
            grad[i][1] -= omega_c * slope * dir[1];
        }
    }
    cost
}

/// Smoothness plus collision cost and the combined gradient.
pub fn total_cost(
    q: &ControlPointSequence,
    grid: &ObstacleGrid,
    p: &CollisionParams,
    w: &CostWeights,
    grad: &mut [[f64; 2]],
) -> (f64, f64) {
    grad.iter_mut().for_each(|g| *g = [0.0; 2]);
    let s = smoothness_cost(q, w, grad);
    let c = collision_cost(q, grid, p, w.omega_c, grad);
    (s, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn penalty_joins_smoothly() {
        let s = 0.7;
        let (a, da) = penalty(s - 1e-12, s);
        let (b, db) = penalty(s, s);
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        assert_abs_diff_eq!(da, db, epsilon = 1e-9);
        assert_eq!(penalty(-0.1, s), (0.0, 0.0));
    }

    #[test]
    fn collinear_is_free_of_cost() {
        let pts = (0..9).map(|i| [i as f64, 0.5 * i as f64]).collect();
        let q = ControlPointSequence::new(pts, 0.5, 0.0).unwrap();
        let mut g = vec![[0.0; 2]; 9];
        assert_abs_diff_eq!(smoothness_cost(&q, &CostWeights::default(), &mut g), 0.0, epsilon = 1e-18);
        assert!(g.iter().all(|v| v[0].abs() < 1e-12 && v[1].abs() < 1e-12));
    }
}

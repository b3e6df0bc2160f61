//! Uniform cubic B-splines over 2-D control points.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::PoseSource;
use crate::model::Pose;

/// Degree of the spline.
pub const DEGREE: usize = 3;
/// Control points fixed at each end.
pub const CLAMPED: usize = 3;
/// Smallest admissible number of control points.
pub const MIN_POINTS: usize = 2 * CLAMPED + 1;

/// Control points `Q_0..Q_{N-1}` of a uniform cubic B-spline with knot
/// interval `dt`. The curve is defined for `tau` in `[0, (N - 3) dt]`,
/// which maps to absolute time `t0 + tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPointSequence {
    pub points: Vec<[f64; 2]>,
    pub dt: f64,
    pub t0: f64,
}

/// Position, velocity and acceleration at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Motion {
    pub p: [f64; 2],
    pub v: [f64; 2],
    pub a: [f64; 2],
}

impl Motion {
    pub fn speed(&self) -> f64 {
        self.v[0].hypot(self.v[1])
    }

    /// Acceleration component normal to the velocity.
    pub fn lateral_accel(&self) -> f64 {
        let s = self.speed();
        if s < 1e-9 {
            return 0.0;
        }
        (self.v[0] * self.a[1] - self.v[1] * self.a[0]).abs() / s
    }
}

impl ControlPointSequence {
    pub fn new(points: Vec<[f64; 2]>, dt: f64, t0: f64) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::TooFewControlPoints(points.len()));
        }
        if !(dt > 0.0) {
            return Err(Error::Config("knot interval must be positive".into()));
        }
        Ok(Self { points, dt, t0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of the valid parameter span.
    pub fn span(&self) -> f64 {
        (self.points.len() - DEGREE) as f64 * self.dt
    }

    /// Knot vector with `N + 4` uniform knots; the valid span is
    /// `[t_3, t_N]`.
    pub fn knots(&self) -> Vec<f64> {
        (0..self.points.len() + DEGREE + 1)
            .map(|k| self.t0 + (k as f64 - DEGREE as f64) * self.dt)
            .collect()
    }

    pub fn free_range(&self) -> std::ops::Range<usize> {
        CLAMPED..self.points.len() - CLAMPED
    }

    /// Relative time at which `Q_i` carries the largest basis weight.
    pub fn anchor_time(&self, i: usize) -> f64 {
        (i as f64 - 1.0) * self.dt
    }
}

/// Basis weights of the four active control points and their first two
/// derivatives at local coordinate `u` in `[0, 1]`.
fn basis(u: f64) -> [[f64; 4]; 3] {
    let u2 = u * u;
    let u3 = u2 * u;
    let w = 1.0 / 6.0;
    [
        [
            w * (1.0 - u).powi(3),
            w * (3.0 * u3 - 6.0 * u2 + 4.0),
            w * (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0),
            w * u3,
        ],
        [
            -0.5 * (1.0 - u).powi(2),
            0.5 * (3.0 * u2 - 4.0 * u),
            0.5 * (-3.0 * u2 + 2.0 * u + 1.0),
            0.5 * u2,
        ],
        [1.0 - u, 3.0 * u - 2.0, -3.0 * u + 1.0, u],
    ]
}

/// Active segment and local coordinate for relative time `tau`.
fn segment(q: &ControlPointSequence, tau: f64) -> (usize, f64) {
    let last = q.points.len() - DEGREE - 1;
    let x = tau / q.dt;
    let i = (x.floor().max(0.0) as usize).min(last);
    (i, x - i as f64)
}

/// Position, velocity and acceleration at relative time `tau`.
pub fn evaluate_spline(q: &ControlPointSequence, tau: f64) -> Result<Motion> {
    let span = q.span();
    if !(tau >= -1e-9 && tau <= span + 1e-9) {
        return Err(Error::OutsideWindow { t: tau, duration: span });
    }
    Ok(evaluate_clamped(q, tau.clamp(0.0, span)))
}

pub(crate) fn evaluate_clamped(q: &ControlPointSequence, tau: f64) -> Motion {
    let (i, u) = segment(q, tau);
    let b = basis(u);
    let mut m = Motion::default();
    let scale = [1.0, 1.0 / q.dt, 1.0 / (q.dt * q.dt)];
    for k in 0..4 {
        let p = q.points[i + k];
        for d in 0..2 {
            m.p[d] += b[0][k] * p[d] * scale[0];
            m.v[d] += b[1][k] * p[d] * scale[1];
            m.a[d] += b[2][k] * p[d] * scale[2];
        }
    }
    m
}

/// Control-point difference sequences `V`, `A`, `J`.
pub fn spline_kinematics(
    q: &ControlPointSequence,
) -> (Vec<[f64; 2]>, Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let diff = |xs: &[[f64; 2]]| -> Vec<[f64; 2]> {
        xs.windows(2)
            .map(|w| [(w[1][0] - w[0][0]) / q.dt, (w[1][1] - w[0][1]) / q.dt])
            .collect()
    };
    let v = diff(&q.points);
    let a = diff(&v);
    let j = diff(&a);
    (v, a, j)
}

/// Three clamped points around a span end reproducing `(p, v, a)` there.
fn clamp_points(m: &Motion, dt: f64) -> [[f64; 2]; 3] {
    let mut out = [[0.0; 2]; 3];
    for d in 0..2 {
        let q1 = m.p[d] - m.a[d] * dt * dt / 6.0;
        out[0][d] = q1 - m.v[d] * dt + m.a[d] * dt * dt / 2.0;
        out[1][d] = q1;
        out[2][d] = q1 + m.v[d] * dt + m.a[d] * dt * dt / 2.0;
    }
    out
}

/// Something that reports position, velocity and acceleration over a
/// finite window.
pub trait MotionSource {
    fn duration(&self) -> f64;
    fn motion(&self, t: f64) -> Motion;
}

/// Number of control points and knot interval covering `duration` with an
/// interval close to `target_dt`.
pub fn knot_layout(duration: f64, target_dt: f64) -> (usize, f64) {
    let n = ((duration / target_dt).round() as usize + DEGREE).max(MIN_POINTS);
    (n, duration / (n - DEGREE) as f64)
}

/// Least-squares fit to the reference sampled at the knots and three
/// interior points per interval, with the clamped points set from the
/// reference's end states.
pub fn init_control_points<S: MotionSource + ?Sized>(
    reference: &S,
    t0: f64,
    dt: f64,
    n: usize,
) -> Result<ControlPointSequence> {
    if n < MIN_POINTS {
        return Err(Error::TooFewControlPoints(n));
    }
    let span = (n - DEGREE) as f64 * dt;
    let duration = reference.duration();
    if duration + 1e-9 < span {
        return Err(Error::ShortReference { duration, span });
    }
    let start = reference.motion(0.0);
    let end = reference.motion(span);
    let mut points = vec![[0.0; 2]; n];
    points[..3].copy_from_slice(&clamp_points(&start, dt));
    points[n - 3..].copy_from_slice(&clamp_points(&end, dt));

    let free = n - 2 * CLAMPED;
    let per = 4;
    let samples = (n - DEGREE) * per + 1;
    let mut a = DMatrix::zeros(samples, free);
    let mut bx = DVector::zeros(samples);
    let mut by = DVector::zeros(samples);
    for s in 0..samples {
        let tau = span * s as f64 / (samples - 1) as f64;
        let target = reference.motion(tau).p;
        let probe = ControlPointSequence {
            points: points.clone(),
            dt,
            t0,
        };
        let (i, u) = segment(&probe, tau);
        let w = basis(u)[0];
        let (mut rx, mut ry) = (target[0], target[1]);
        for k in 0..4 {
            let idx = i + k;
            if (CLAMPED..n - CLAMPED).contains(&idx) {
                a[(s, idx - CLAMPED)] += w[k];
            } else {
                rx -= w[k] * points[idx][0];
                ry -= w[k] * points[idx][1];
            }
        }
        bx[s] = rx;
        by[s] = ry;
    }
    let svd = a.svd(true, true);
    let sx = svd.solve(&bx, 1e-12).map_err(|e| Error::Optimizer(e.to_string()))?;
    let sy = svd.solve(&by, 1e-12).map_err(|e| Error::Optimizer(e.to_string()))?;
    for k in 0..free {
        points[CLAMPED + k] = [sx[k], sy[k]];
    }
    ControlPointSequence::new(points, dt, t0)
}

impl MotionSource for ControlPointSequence {
    fn duration(&self) -> f64 {
        self.span()
    }

    fn motion(&self, t: f64) -> Motion {
        evaluate_clamped(self, t.clamp(0.0, self.span()))
    }
}

impl PoseSource for ControlPointSequence {
    fn duration(&self) -> f64 {
        self.span()
    }

    fn pose_at(&self, t: f64) -> Pose {
        let m = evaluate_clamped(self, t.clamp(0.0, self.span()));
        let heading = if m.speed() > 1e-9 {
            m.v[1].atan2(m.v[0])
        } else {
            // standing still: keep the direction of the chord ahead
            let q = &self.points;
            let k = segment(self, t.clamp(0.0, self.span())).0;
            (q[k + 2][1] - q[k + 1][1]).atan2(q[k + 2][0] - q[k + 1][0])
        };
        Pose::new(m.p[0], m.p[1], heading)
    }
}

impl MotionSource for crate::reference::Trajectory {
    fn duration(&self) -> f64 {
        crate::reference::Trajectory::duration(self)
    }

    fn motion(&self, t: f64) -> Motion {
        let (p, v, a) = self.kinematics(t);
        Motion { p, v, a }
    }
}

//! Piecewise-quintic path smoothing.
//!
//! `x = f(s)`, `y = g(s)` over the arc length `s` of a line & circle path.
//! The coefficients minimise a weighted sum of squared second to fourth
//! derivatives, subject to fixed end positions, straight tangent entry and
//! exit, C3 joins between pieces and a per-sample deviation bound `d_b`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::qp::{self, QpProblem};
use crate::error::{Error, Result};
use crate::model::StandardPath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingConfig {
    /// Allowed deviation per coordinate at each sample (m).
    pub d_b: f64,
    /// Weights of the squared 2nd, 3rd and 4th derivatives.
    pub weights: [f64; 3],
    /// Target piece length (m).
    pub piece_length: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            d_b: 1.0,
            weights: [1.0, 1.0, 1.0],
            piece_length: 2.0,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_b > 0.0) {
            return Err(Error::Config("d_b must be positive".into()));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) || self.weights.iter().all(|w| *w == 0.0) {
            return Err(Error::Config(
                "smoothing weights must be non-negative and not all zero".into(),
            ));
        }
        if !(self.piece_length > 0.0) {
            return Err(Error::Config("piece_length must be positive".into()));
        }
        Ok(())
    }
}

/// One quintic piece in local coordinate `u = s - s0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub s0: f64,
    pub len: f64,
    pub cx: [f64; 6],
    pub cy: [f64; 6],
}

fn poly_deriv(c: &[f64; 6], u: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for k in (order..6).rev() {
        let mut fact = 1.0;
        for j in 0..order {
            fact *= (k - j) as f64;
        }
        acc = acc * u + fact * c[k];
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSpline {
    pub pieces: Vec<Piece>,
    /// Parameter range `[0, s_t]`.
    pub s_t: f64,
    /// Realized arc length of the curve.
    pub s_n: f64,
    /// Value of the smoothing objective at the solution.
    pub objective: f64,
    /// Largest per-coordinate deviation at the constraint samples.
    pub max_sample_deviation: f64,
    /// Largest per-coordinate deviation on a ten times denser grid
    /// (monitored only).
    pub max_dense_deviation: f64,
    /// Endpoint position residual.
    pub endpoint_residual: f64,
}

impl PathSpline {
    fn locate(&self, s: f64) -> (&Piece, f64) {
        let s = s.clamp(0.0, self.s_t);
        let i = self
            .pieces
            .partition_point(|p| p.s0 + p.len < s)
            .min(self.pieces.len() - 1);
        let p = &self.pieces[i];
        (p, s - p.s0)
    }

    /// `order`-th derivative of `(f, g)` at `s`.
    pub fn derivative(&self, s: f64, order: usize) -> [f64; 2] {
        let (p, u) = self.locate(s);
        [poly_deriv(&p.cx, u, order), poly_deriv(&p.cy, u, order)]
    }

    pub fn position(&self, s: f64) -> [f64; 2] {
        self.derivative(s, 0)
    }

    /// Tangent angle `atan2(g', f')`.
    pub fn heading(&self, s: f64) -> f64 {
        let d = self.derivative(s, 1);
        d[1].atan2(d[0])
    }

    pub fn curvature(&self, s: f64) -> f64 {
        let d1 = self.derivative(s, 1);
        let d2 = self.derivative(s, 2);
        let n = d1[0].hypot(d1[1]);
        (d1[0] * d2[1] - d1[1] * d2[0]) / (n * n * n)
    }

    /// `|h'(s)|`, the ground distance per unit parameter.
    pub fn speed_factor(&self, s: f64) -> f64 {
        let d = self.derivative(s, 1);
        d[0].hypot(d[1])
    }

    pub fn max_abs_curvature(&self, per_piece: usize) -> f64 {
        let n = self.pieces.len() * per_piece;
        (0..=n)
            .map(|k| self.curvature(self.s_t * k as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Gram matrix of `d^order u^a` over `[0, len]`.
fn gram(len: f64, order: usize) -> [[f64; 6]; 6] {
    let mut m = [[0.0; 6]; 6];
    let fall = |k: usize| -> f64 { (0..order).map(|j| (k - j) as f64).product() };
    for a in order..6 {
        for b in order..6 {
            let p = (a + b - 2 * order + 1) as f64;
            m[a][b] = fall(a) * fall(b) * len.powf(p) / p;
        }
    }
    m
}

/// Row of the `order`-th derivative at `u` over the six local coefficients.
fn basis_row(u: f64, order: usize) -> [f64; 6] {
    let mut r = [0.0; 6];
    for (k, slot) in r.iter_mut().enumerate().skip(order) {
        let fact: f64 = (0..order).map(|j| (k - j) as f64).product();
        *slot = fact * u.powi((k - order) as i32);
    }
    r
}

/// Gauss-Legendre arc length of one piece.
fn piece_arc_length(p: &Piece) -> f64 {
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
        (0.906_179_845_938_664, 0.236_926_885_056_189_08),
    ];
    let sub = 8;
    let h = p.len / sub as f64;
    let mut total = 0.0;
    for k in 0..sub {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in NODES {
            let u = mid + x * h / 2.0;
            total += w * h / 2.0 * poly_deriv(&p.cx, u, 1).hypot(poly_deriv(&p.cy, u, 1));
        }
    }
    total
}

struct Layout {
    breaks: Vec<f64>,
}

impl Layout {
    fn new(total: f64, piece_length: f64) -> Self {
        let n = (total / piece_length).round().max(1.0) as usize;
        Self {
            breaks: (0..=n).map(|k| total * k as f64 / n as f64).collect(),
        }
    }

    fn pieces(&self) -> usize {
        self.breaks.len() - 1
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = self.pieces();
        let i = self.breaks.partition_point(|&b| b <= s).saturating_sub(1).min(n - 1);
        (i, s - self.breaks[i])
    }
}

/// One coordinate of the smoothing problem.
fn solve_axis(
    layout: &Layout,
    cfg: &SmoothingConfig,
    s_samples: &[f64],
    targets: &[f64],
    end_values: [f64; 2],
    end_slopes: [f64; 2],
) -> Result<(Vec<[f64; 6]>, f64)> {
    let np = layout.pieces();
    let n = 6 * np;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..np {
        let len = layout.breaks[i + 1] - layout.breaks[i];
        for (w, order) in cfg.weights.iter().zip(2..=4) {
            if *w == 0.0 {
                continue;
            }
            let g = gram(len, order);
            for a in 0..6 {
                for b in 0..6 {
                    h[(6 * i + a, 6 * i + b)] += 2.0 * w * g[a][b];
                }
            }
        }
    }

    let mut eq_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    let last_len = layout.breaks[np] - layout.breaks[np - 1];
    let end = 6 * (np - 1);
    for (order, rhs) in [(0, end_values[0]), (1, end_slopes[0]), (2, 0.0)] {
        let r = basis_row(0.0, order);
        eq_rows.push(((0..6).map(|k| (k, r[k])).collect(), rhs));
    }
    for (order, rhs) in [(0, end_values[1]), (1, end_slopes[1]), (2, 0.0)] {
        let r = basis_row(last_len, order);
        eq_rows.push(((0..6).map(|k| (end + k, r[k])).collect(), rhs));
    }
    for i in 0..np - 1 {
        let len = layout.breaks[i + 1] - layout.breaks[i];
        for order in 0..4 {
            let left = basis_row(len, order);
            let right = basis_row(0.0, order);
            let mut row: Vec<(usize, f64)> = (0..6).map(|k| (6 * i + k, left[k])).collect();
            row.extend((0..6).map(|k| (6 * (i + 1) + k, -right[k])));
            eq_rows.push((row, 0.0));
        }
    }
    let mut a_eq = DMatrix::zeros(eq_rows.len(), n);
    let mut b_eq = DVector::zeros(eq_rows.len());
    for (r, (row, rhs)) in eq_rows.iter().enumerate() {
        for &(c, v) in row {
            a_eq[(r, c)] = v;
        }
        b_eq[r] = *rhs;
    }

    let m = s_samples.len();
    let mut g = DMatrix::zeros(m, n);
    for (j, &s) in s_samples.iter().enumerate() {
        let (i, u) = layout.locate(s);
        let r = basis_row(u, 0);
        for k in 0..6 {
            g[(j, 6 * i + k)] = r[k];
        }
    }
    let t = DVector::from_column_slice(targets);
    let problem = QpProblem {
        h,
        q: DVector::zeros(n),
        a_eq,
        b_eq,
        g,
        lo: t.add_scalar(-cfg.d_b),
        hi: t.add_scalar(cfg.d_b),
        start_target: t,
    };
    let sol = qp::solve(&problem)?;
    let objective = 0.5 * sol.x.dot(&(&problem.h * &sol.x));
    let coeffs = (0..np)
        .map(|i| {
            let mut c = [0.0; 6];
            c.copy_from_slice(sol.x.rows(6 * i, 6).as_slice());
            c
        })
        .collect();
    Ok((coeffs, objective))
}

/// Solve the smoothing problem over a line & circle path.
pub fn smooth_path(standard: &StandardPath, cfg: &SmoothingConfig) -> Result<PathSpline> {
    cfg.validate()?;
    let s_t = standard.length();
    let layout = Layout::new(s_t, cfg.piece_length);
    let s_samples = standard.sample_arc_lengths();
    let xs: Vec<f64> = standard.samples.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = standard.samples.iter().map(|p| p[1]).collect();
    let start = standard.start_pose();
    let end = standard.end_pose();
    let (dir0, dir1) = (start.direction(), end.direction());

    let (cx, ox) = solve_axis(
        &layout,
        cfg,
        &s_samples,
        &xs,
        [start.x, end.x],
        [dir0[0], dir1[0]],
    )?;
    let (cy, oy) = solve_axis(
        &layout,
        cfg,
        &s_samples,
        &ys,
        [start.y, end.y],
        [dir0[1], dir1[1]],
    )?;
    let pieces: Vec<Piece> = (0..layout.pieces())
        .map(|i| Piece {
            s0: layout.breaks[i],
            len: layout.breaks[i + 1] - layout.breaks[i],
            cx: cx[i],
            cy: cy[i],
        })
        .collect();
    let s_n = pieces.iter().map(piece_arc_length).sum();
    let mut spline = PathSpline {
        pieces,
        s_t,
        s_n,
        objective: ox + oy,
        max_sample_deviation: 0.0,
        max_dense_deviation: 0.0,
        endpoint_residual: 0.0,
    };
    let dev = |sp: &PathSpline, s: f64, target: [f64; 2]| {
        let p = sp.position(s);
        (p[0] - target[0]).abs().max((p[1] - target[1]).abs())
    };
    spline.max_sample_deviation = s_samples
        .iter()
        .zip(&standard.samples)
        .map(|(&s, &q)| dev(&spline, s, q))
        .fold(0.0, f64::max);
    let dense = 10 * (s_samples.len() - 1);
    spline.max_dense_deviation = (0..=dense)
        .map(|k| {
            let s = s_t * k as f64 / dense as f64;
            let q = standard.pose_at(s);
            dev(&spline, s, [q.x, q.y])
        })
        .fold(0.0, f64::max);
    spline.endpoint_residual =
        dev(&spline, 0.0, [start.x, start.y]).max(dev(&spline, s_t, [end.x, end.y]));
    if spline.max_sample_deviation > cfg.d_b + 1e-7 {
        return Err(Error::Infeasible(format!(
            "solution deviates {:.6} m at a sample (bound {})",
            spline.max_sample_deviation, cfg.d_b
        )));
    }
    if spline.max_dense_deviation > cfg.d_b {
        log::debug!(
            "deviation between samples reaches {:.4} m (bound {} enforced at samples only)",
            spline.max_dense_deviation,
            cfg.d_b
        );
    }
    Ok(spline)
}

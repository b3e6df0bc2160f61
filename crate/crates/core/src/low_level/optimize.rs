use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use argmin::core::observers::{Observe, ObserverMode};
use argmin::core::{CostFunction, Executor, Gradient, IterState, State, KV};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use serde::{Deserialize, Serialize};

use super::bspline::{evaluate_clamped, init_control_points, knot_layout, ControlPointSequence, MotionSource};
use super::cost::{total_cost, CollisionParams, CostWeights};
use super::obstacles::ObstacleGrid;
use crate::error::{Error, Result};
use crate::grid::{sweep_occupancy, OccupancySet, SweepShape};
use crate::model::VehicleSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowLevelConfig {
    /// Target knot interval; the actual one divides the reference evenly.
    pub knot_interval: f64,
    pub weights: CostWeights,
    pub d_r: f64,
    /// Defaults to the half-diagonal of the vehicle body.
    pub d_f: Option<f64>,
    pub max_iters: u64,
    pub grad_tolerance: f64,
    pub memory: usize,
    pub max_reweights: usize,
    /// Lateral acceleration bound is the larger of this floor and
    /// `lateral_factor` times the initial fit's peak.
    pub lateral_floor: f64,
    pub lateral_factor: f64,
}

impl Default for LowLevelConfig {
    fn default() -> Self {
        Self {
            knot_interval: 1.0,
            weights: CostWeights::default(),
            d_r: 0.5,
            d_f: None,
            max_iters: 200,
            grad_tolerance: 1e-4,
            memory: 8,
            max_reweights: 3,
            lateral_floor: 4.0,
            lateral_factor: 1.25,
        }
    }
}

impl LowLevelConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if !(self.knot_interval > 0.0) || !(self.grad_tolerance > 0.0) || self.memory == 0 {
            return Err(Error::Config(
                "knot_interval, grad_tolerance and memory must be positive".into(),
            ));
        }
        if !(self.lateral_floor >= 0.0 && self.lateral_factor >= 1.0) {
            return Err(Error::Config("lateral bound must be >= 0 with factor >= 1".into()));
        }
        self.collision(&VehicleSpec::default()).validate()
    }

    pub fn collision(&self, vehicle: &VehicleSpec) -> CollisionParams {
        CollisionParams {
            d_r: self.d_r,
            d_f: self.d_f.unwrap_or_else(|| vehicle.half_diagonal()),
        }
    }
}

/// One accepted quasi-Newton iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterRecord {
    pub run: usize,
    pub iter: u64,
    pub cost: f64,
    pub smoothness: f64,
    pub collision: f64,
    pub grad_norm: f64,
}

/// Result of the hard post-check on a candidate spline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    /// Swept cells shared with real obstacles.
    pub obstacle_hits: usize,
    /// Swept cells outside the granted tunnel.
    pub outside_tunnel: usize,
    pub max_speed: f64,
    pub max_lateral_accel: f64,
    pub speed_ok: bool,
    pub lateral_ok: bool,
}

impl CheckReport {
    pub fn collision_free(&self) -> bool {
        self.obstacle_hits == 0 && self.outside_tunnel == 0
    }

    pub fn feasible(&self) -> bool {
        self.speed_ok && self.lateral_ok
    }

    fn rank(&self) -> (bool, bool, usize) {
        (
            !self.collision_free(),
            !self.feasible(),
            self.obstacle_hits + self.outside_tunnel,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RefineStatus {
    CollisionFree,
    /// No collision-free spline after every re-weighting; the caller is
    /// expected to stop the vehicle.
    Colliding,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub control_points: ControlPointSequence,
    pub status: RefineStatus,
    pub check: CheckReport,
    pub weights: CostWeights,
    pub reweights: usize,
    pub iterations: u64,
    pub log: Vec<IterRecord>,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub elapsed_ms: f64,
}

/// What the post-check compares a spline against.
#[derive(Debug, Clone, Copy)]
pub struct PostCheck<'a> {
    pub vehicle: &'a VehicleSpec,
    pub tunnel: Option<&'a OccupancySet>,
    pub lateral_bound: f64,
}

/// Cost over the free control points, expressed in variables
/// `y = scale * x` so that the smoothness Hessian has a unit-order diagonal.
#[derive(Clone, Copy)]
struct Problem<'a> {
    base: &'a ControlPointSequence,
    grid: &'a ObstacleGrid,
    params: CollisionParams,
    weights: CostWeights,
    scale: f64,
}

impl Problem<'_> {
    fn new<'a>(
        base: &'a ControlPointSequence,
        grid: &'a ObstacleGrid,
        params: &CollisionParams,
        weights: &CostWeights,
    ) -> Problem<'a> {
        let (dt2, dt3) = (base.dt * base.dt, base.dt.powi(3));
        let diag = 2.0 * (6.0 * weights.omega_acc / (dt2 * dt2) + 20.0 * weights.omega_jerk / (dt3 * dt3));
        Problem {
            base,
            grid,
            params: *params,
            weights: *weights,
            scale: diag.sqrt().max(1.0),
        }
    }

    fn to_vars(&self, q: &ControlPointSequence) -> Vec<f64> {
        q.free_range()
            .flat_map(|i| q.points[i])
            .map(|v| v * self.scale)
            .collect()
    }

    fn with_free(&self, y: &[f64]) -> ControlPointSequence {
        let mut q = self.base.clone();
        for (k, i) in q.free_range().enumerate() {
            q.points[i] = [y[2 * k] / self.scale, y[2 * k + 1] / self.scale];
        }
        q
    }

    /// Smoothness and collision terms plus the gradient with respect to the
    /// control points themselves.
    fn eval(&self, y: &[f64]) -> (f64, f64, Vec<f64>) {
        let q = self.with_free(y);
        let mut g = vec![[0.0; 2]; q.len()];
        let (s, c) = total_cost(&q, self.grid, &self.params, &self.weights, &mut g);
        log::trace!("cost {s:.6e} + {c:.6e} at |y| {:.6e}", y.iter().map(|v| v * v).sum::<f64>().sqrt());
        (s, c, q.free_range().flat_map(|i| g[i]).collect())
    }
}

fn non_finite() -> argmin::core::Error {
    argmin::core::Error::msg("non-finite cost")
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, y: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let (s, c, _) = self.eval(y);
        if (s + c).is_finite() {
            Ok(s + c)
        } else {
            Err(non_finite())
        }
    }
}

impl Gradient for Problem<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, y: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let g: Vec<f64> = self.eval(y).2.into_iter().map(|v| v / self.scale).collect();
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(non_finite())
        }
    }
}

type Iterate = IterState<Vec<f64>, Vec<f64>, (), (), (), f64>;

#[derive(Default)]
struct Recorder(Arc<Mutex<Vec<(u64, Vec<f64>)>>>);

impl Observe<Iterate> for Recorder {
    fn observe_iter(&mut self, state: &Iterate, _kv: &KV) -> std::result::Result<(), argmin::core::Error> {
        if let Some(p) = state.get_param() {
            self.0.lock().expect("recorder lock").push((state.get_iter(), p.clone()));
        }
        Ok(())
    }
}

/// One limited-memory quasi-Newton run over the free control points.
/// Returns the minimiser and the log of accepted iterates.
pub fn minimize(
    q0: &ControlPointSequence,
    grid: &ObstacleGrid,
    weights: &CostWeights,
    params: &CollisionParams,
    cfg: &LowLevelConfig,
    run: usize,
) -> Result<(ControlPointSequence, Vec<IterRecord>)> {
    let problem = Problem::new(q0, grid, params, weights);
    let x0 = problem.to_vars(q0);
    let mut log = Vec::new();
    let push = |log: &mut Vec<IterRecord>, iter: u64, x: &[f64]| {
        let (s, c, g) = problem.eval(x);
        log.push(IterRecord {
            run,
            iter,
            cost: s + c,
            smoothness: s,
            collision: c,
            grad_norm: g.iter().map(|v| v * v).sum::<f64>().sqrt(),
        });
    };
    push(&mut log, 0, &x0);
    if log[0].grad_norm < cfg.grad_tolerance {
        return Ok((q0.clone(), log));
    }
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), cfg.memory)
        .with_tolerance_grad(cfg.grad_tolerance)
        .and_then(|s| s.with_tolerance_cost(0.0))
        .map_err(|e| Error::Optimizer(e.to_string()))?;
    let recorder = Recorder::default();
    let trace = recorder.0.clone();
    let result = match Executor::new(problem, solver)
        .configure(|state| state.param(x0.clone()).max_iters(cfg.max_iters))
        .add_observer(recorder, ObserverMode::Always)
        .run()
    {
        Ok(r) => r,
        Err(e) => {
            // keep the last accepted iterate
            log::warn!("run {run} aborted: {e}");
            let last = trace.lock().expect("recorder lock").last().map(|(_, x)| x.clone());
            for (iter, x) in trace.lock().expect("recorder lock").iter() {
                push(&mut log, iter + 1, x);
            }
            return Ok((problem.with_free(&last.unwrap_or(x0)), log));
        }
    };
    for (iter, x) in trace.lock().expect("recorder lock").iter() {
        push(&mut log, iter + 1, x);
    }
    let best = result
        .state()
        .get_best_param()
        .cloned()
        .unwrap_or(x0);
    log::debug!(
        "run {run}: {} iterations, {:?}",
        result.state().get_iter(),
        result.state().get_termination_reason()
    );
    Ok((problem.with_free(&best), log))
}

/// Peak speed and lateral acceleration sampled densely along `q`.
pub fn spline_limits(q: &ControlPointSequence) -> (f64, f64) {
    let n = (q.len() - 3) * 20;
    (0..=n)
        .map(|k| evaluate_clamped(q, q.span() * k as f64 / n as f64))
        .fold((0.0, 0.0), |(v, a), m| (f64::max(v, m.speed()), f64::max(a, m.lateral_accel())))
}

/// Sweep the inflated footprint along `q` and compare it with the real
/// obstacles and the tunnel; check speed and lateral acceleration.
pub fn post_check(q: &ControlPointSequence, grid: &ObstacleGrid, check: &PostCheck) -> CheckReport {
    let spec = *grid.spec();
    let (max_speed, max_lat) = spline_limits(q);
    let hull_speed = q
        .points
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]) / q.dt)
        .fold(0.0, f64::max);
    let shape = SweepShape {
        half_length: check.vehicle.inflated_half_length(),
        half_width: check.vehicle.inflated_half_width(),
        v_bound: hull_speed.max(1e-3),
    };
    let shift = (q.t0 / spec.dt + 1e-9).floor().max(0.0) as u32;
    let (hits, outside) = match sweep_occupancy(q, &shape, &spec, shift) {
        Ok(occ) => {
            let mut hits = 0;
            let mut outside = 0;
            for (jt, slab) in occ.slabs() {
                if let Some(o) = grid.real.slab(jt) {
                    hits += slab.common(o);
                }
                if let Some(t) = check.tunnel {
                    let mut out = slab.clone();
                    if let Some(ts) = t.slab(jt) {
                        out.subtract(ts);
                    }
                    outside += out.len();
                }
            }
            (hits, outside)
        }
        Err(e) => {
            log::debug!("post-check sweep failed: {e}");
            (usize::MAX / 4, usize::MAX / 4)
        }
    };
    CheckReport {
        obstacle_hits: hits,
        outside_tunnel: outside,
        max_speed,
        max_lateral_accel: max_lat,
        speed_ok: max_speed <= check.vehicle.v_max + 1e-9,
        lateral_ok: max_lat <= check.lateral_bound + 1e-9,
    }
}

/// Minimise, post-check, and re-weight on failure: collision multiplies
/// `omega_c` by ten, a speed or lateral-acceleration violation multiplies
/// `omega_acc` by ten. The best candidate seen is returned.
pub fn optimize(
    q0: &ControlPointSequence,
    grid: &ObstacleGrid,
    params: &CollisionParams,
    cfg: &LowLevelConfig,
    check: &PostCheck,
) -> Result<Refinement> {
    cfg.validate()?;
    params.validate()?;
    let started = Instant::now();
    let mut weights = cfg.weights;
    let mut current = q0.clone();
    let mut log = Vec::new();
    let mut best: Option<(ControlPointSequence, CheckReport, CostWeights, f64)> = None;
    let mut reweights = 0;
    loop {
        let (q, run_log) = minimize(&current, grid, &weights, params, cfg, reweights)?;
        let final_cost = run_log.last().map_or(0.0, |r| r.cost);
        log.extend(run_log);
        let report = post_check(&q, grid, check);
        let better = best.as_ref().is_none_or(|b| report.rank() < b.1.rank());
        let done = report.collision_free() && report.feasible();
        let (collides, infeasible) = (!report.collision_free(), !report.feasible());
        if better {
            best = Some((q.clone(), report, weights, final_cost));
        }
        if done || reweights >= cfg.max_reweights {
            break;
        }
        if collides {
            weights.omega_c *= 10.0;
        }
        if infeasible {
            weights.omega_acc *= 10.0;
        }
        reweights += 1;
        current = q;
    }
    let (control_points, check, weights, final_cost) = best.expect("at least one run");
    let status = if check.collision_free() {
        RefineStatus::CollisionFree
    } else {
        RefineStatus::Colliding
    };
    Ok(Refinement {
        control_points,
        status,
        check,
        weights,
        reweights,
        iterations: log.iter().filter(|r| r.iter > 0).count() as u64,
        initial_cost: log.first().map_or(0.0, |r| r.cost),
        final_cost,
        log,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Fit a spline to `reference` started at `t0` and refine it against
/// `grid`, keeping it inside `tunnel` when given.
pub fn refine<S: MotionSource + ?Sized>(
    reference: &S,
    t0: f64,
    grid: &ObstacleGrid,
    tunnel: Option<&OccupancySet>,
    vehicle: &VehicleSpec,
    cfg: &LowLevelConfig,
) -> Result<Refinement> {
    cfg.validate()?;
    let (n, dt) = knot_layout(reference.duration(), cfg.knot_interval);
    let q0 = init_control_points(reference, t0, dt, n)?;
    let lateral_bound = cfg.lateral_floor.max(cfg.lateral_factor * spline_limits(&q0).1);
    let check = PostCheck {
        vehicle,
        tunnel,
        lateral_bound,
    };
    optimize(&q0, grid, &cfg.collision(vehicle), cfg, &check)
}

impl ControlPointSequence {
    /// CSV rows `t,x,y,theta,v,kappa` every `step` seconds in absolute time.
    pub fn write_csv<W: Write>(&self, out: W, step: f64) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "y", "theta", "v", "kappa"])?;
        let n = (self.span() / step).ceil().max(1.0) as usize;
        for k in 0..=n {
            let tau = (k as f64 * step).min(self.span());
            let m = evaluate_clamped(self, tau);
            let v = m.speed();
            let kappa = if v > 1e-9 {
                (m.v[0] * m.a[1] - m.v[1] * m.a[0]) / (v * v * v)
            } else {
                0.0
            };
            let theta = crate::grid::PoseSource::pose_at(self, tau).heading;
            w.write_record(
                [self.t0 + tau, m.p[0], m.p[1], theta, v, kappa]
                    .iter()
                    .map(|x| format!("{x:.6}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

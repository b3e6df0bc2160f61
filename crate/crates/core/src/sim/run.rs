use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{Scenario, Strategy, TrackerConfig};
use crate::error::Result;
use crate::grid::{sweep_occupancy, FootprintBox, OccupancySet, PoseSource, SweepShape};
use crate::high_level::{cs_baseline, run as schedule, Allocation, Schedule};
use crate::kinematics::{perturb_control, perturb_pose, saturate, step, ControlInput, NoiseConfig};
use crate::low_level::{refine, ft_virtual_obstacles, Motion, MotionSource, ObstacleGrid, RefineStatus, Refinement};
use crate::model::{wrap_angle, MotionRequest, Pose, VehicleSpec, VehicleState};
use crate::reference::BufferProfile;

/// One integration step of an executed trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub accel: f64,
    pub steer: f64,
    pub ref_x: f64,
    pub ref_y: f64,
}

#[derive(Debug, Clone)]
pub struct VehicleRun {
    pub vehicle: u32,
    pub samples: Vec<Sample>,
    /// Largest distance between executed and desired position.
    pub max_tracking_error: f64,
    pub refinement: Option<Refinement>,
    /// The vehicle was held before the conflict area.
    pub stopped: bool,
    /// Body cells swept while the allocation window is open.
    pub executed: OccupancySet,
    /// Executed body cells outside the vehicle's own allocation.
    pub redundancy_breaches: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Metrics {
    pub strategy: String,
    pub vehicles: usize,
    pub scheduled: usize,
    pub total_passing_time: f64,
    pub makespan: f64,
    pub mean_wait: f64,
    pub max_wait: f64,
    pub max_head_wait: f64,
    pub rounds: usize,
    pub round_ms_mean: f64,
    pub round_ms_max: f64,
    pub schedule_ms: f64,
    pub low_level_runs: usize,
    pub low_level_ms_max: f64,
    pub peak_queue: usize,
    pub collisions: usize,
    pub incidents: usize,
    pub redundancy_breaches: usize,
    pub max_tracking_error: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub strategy: Strategy,
    pub requests: Vec<MotionRequest>,
    pub schedule: Schedule,
    pub vehicles: Vec<VehicleRun>,
    /// Vehicle pairs whose executed footprints share a block.
    pub collision_pairs: Vec<(u32, u32)>,
    pub metrics: Metrics,
}

impl RunResult {
    /// All requests scheduled and no executed overlap.
    pub fn success(&self) -> bool {
        self.metrics.collisions == 0 && self.metrics.scheduled == self.metrics.vehicles
    }
}

/// Schedule `requests` with `strategy`. The collision-set baseline serves
/// vehicles in the order chosen by the proposed planner.
pub fn plan(scenario: &Scenario, strategy: Strategy, requests: &[MotionRequest]) -> Result<(Schedule, f64)> {
    let lib = scenario.library()?;
    let started = Instant::now();
    let proposed = schedule(&lib, &scenario.planner, requests)?;
    let out = match strategy {
        Strategy::Proposed => proposed,
        Strategy::Cs => cs_baseline(&lib, requests, &proposed.order())?,
    };
    Ok((out, started.elapsed().as_secs_f64() * 1e3))
}

/// Desired motion: speed adjustment along the approach lane, then the
/// reference (or its refinement) through the conflict area.
struct Plan<'a> {
    depart: f64,
    t_e: f64,
    buffer: BufferProfile,
    entry: Pose,
    adjust: f64,
    crossing: &'a dyn MotionSource,
}

impl Plan<'_> {
    fn end(&self) -> f64 {
        self.t_e + self.crossing.duration()
    }

    fn motion(&self, t: f64) -> Motion {
        if t < self.t_e {
            let s = self.buffer.state((t - self.depart).max(0.0));
            let d = self.entry.direction();
            let back = self.adjust - s.s;
            Motion {
                p: [self.entry.x - back * d[0], self.entry.y - back * d[1]],
                v: [s.v * d[0], s.v * d[1]],
                a: [s.a * d[0], s.a * d[1]],
            }
        } else {
            self.crossing.motion(t - self.t_e)
        }
    }
}

fn track(
    plan: &Plan,
    vehicle: &VehicleSpec,
    tracker: &TrackerConfig,
    noise: &NoiseConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Sample> {
    let start = plan.motion(plan.depart);
    let mut state = VehicleState {
        x: start.p[0],
        y: start.p[1],
        heading: plan.entry.heading,
        speed: start.v[0].hypot(start.v[1]),
    };
    let h = tracker.step;
    let n = ((plan.end() - plan.depart) / h).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut heading_d = plan.entry.heading;
    for k in 0..=n {
        let t = (plan.depart + k as f64 * h).min(plan.end());
        let d = plan.motion(t);
        let speed_d = d.v[0].hypot(d.v[1]);
        if speed_d > 1e-6 {
            heading_d = d.v[1].atan2(d.v[0]);
        }
        let (sn, cs) = heading_d.sin_cos();
        let m = perturb_pose(&state, noise, rng);
        let e = [m.x - d.p[0], m.y - d.p[1]];
        let e_s = -(e[0] * cs + e[1] * sn);
        let e_y = -e[0] * sn + e[1] * cs;
        let e_th = wrap_angle(m.heading - heading_d);
        let a_long = d.a[0] * cs + d.a[1] * sn;
        let kappa_d = if speed_d > 1e-6 {
            (d.v[0] * d.a[1] - d.v[1] * d.a[0]) / speed_d.powi(3)
        } else {
            0.0
        };
        let v_eff = m.speed.max(tracker.min_speed);
        let kappa = kappa_d
            - tracker.omega * tracker.omega * e_y / (v_eff * v_eff)
            - 2.0 * tracker.zeta * tracker.omega * e_th / v_eff;
        let u = saturate(
            &ControlInput::new(
                a_long + tracker.k_s * e_s + tracker.k_v * (speed_d - m.speed),
                (vehicle.wheelbase * kappa).atan(),
            ),
            vehicle,
        );
        out.push(Sample {
            t,
            x: state.x,
            y: state.y,
            heading: state.heading,
            speed: state.speed,
            accel: u.accel,
            steer: u.steer,
            ref_x: d.p[0],
            ref_y: d.p[1],
        });
        if k < n {
            let applied = perturb_control(&u, noise, rng);
            let dt = (plan.depart + (k + 1) as f64 * h).min(plan.end()) - t;
            if dt > 0.0 {
                state = step(&state, &applied, vehicle, dt);
            }
        }
    }
    out
}

/// Piecewise-linear pose interpolation over executed samples.
struct Executed<'a> {
    samples: &'a [Sample],
    t0: f64,
}

impl PoseSource for Executed<'_> {
    fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t - self.t0)
    }

    fn pose_at(&self, t: f64) -> Pose {
        let t = t + self.t0;
        let i = self.samples.partition_point(|s| s.t <= t).clamp(1, self.samples.len().max(2) - 1);
        let (a, b) = (&self.samples[i - 1], &self.samples[i.min(self.samples.len() - 1)]);
        let w = if b.t > a.t { ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0) } else { 0.0 };
        Pose::new(
            a.x + w * (b.x - a.x),
            a.y + w * (b.y - a.y),
            a.heading + w * wrap_angle(b.heading - a.heading),
        )
    }
}

/// Body cells swept while the vehicle holds its allocation.
fn executed_occupancy(samples: &[Sample], alloc: &Allocation, vehicle: &VehicleSpec) -> Result<OccupancySet> {
    let spec = *alloc.occupancy.spec();
    let inside: Vec<Sample> = samples
        .iter()
        .copied()
        .filter(|s| s.t >= alloc.t_e - 1e-9)
        .collect();
    if inside.len() < 2 {
        return Ok(OccupancySet::new(&spec).with_owner(alloc.vehicle()));
    }
    let shape = SweepShape {
        half_length: vehicle.length / 2.0,
        half_width: vehicle.width / 2.0,
        v_bound: inside.iter().map(|s| s.speed).fold(0.5, f64::max) * 1.2,
    };
    let src = Executed {
        samples: &inside,
        t0: alloc.t_e,
    };
    Ok(sweep_occupancy(&src, &shape, &spec, alloc.slot)?.with_owner(alloc.vehicle()))
}

fn obstacle_grid(scenario: &Scenario, schedule: &Schedule) -> Result<Option<ObstacleGrid>> {
    if scenario.obstacles.is_empty() {
        return Ok(None);
    }
    let spec = scenario.grid_spec()?;
    let slabs = schedule
        .allocations
        .iter()
        .map(Allocation::max_jt)
        .max()
        .unwrap_or(1);
    let corridor = super::corridor::CorridorScenario {
        obstacles: scenario.obstacles.clone(),
        ..Default::default()
    };
    Ok(Some(corridor.obstacle_grid(&spec, slabs)))
}

/// Refine every allocation whose blocks meet an obstacle. Returns
/// `(refinement, elapsed ms)` per allocation index.
fn refine_blocked(
    scenario: &Scenario,
    schedule: &Schedule,
    grid: &ObstacleGrid,
) -> Result<Vec<Option<(Refinement, f64)>>> {
    let job = |i: usize| -> Result<Option<(Refinement, f64)>> {
        let alloc = &schedule.allocations[i];
        let blocked = alloc
            .occupancy
            .slabs()
            .any(|(jt, s)| grid.real.slab(jt).is_some_and(|o| o.intersects(s)));
        if !blocked {
            return Ok(None);
        }
        let tunnel = &schedule.tunnels[i].cells;
        let mut local = grid.clone();
        local.virtual_cells = ft_virtual_obstacles(tunnel);
        let started = Instant::now();
        let r = refine(
            alloc.trajectory.as_ref(),
            alloc.t_e,
            &local,
            Some(tunnel),
            &scenario.vehicle,
            &scenario.low_level,
        )?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        log::info!(
            "vehicle {} refined: {:?} ({} obstacle cells, {} outside tunnel) in {ms:.1} ms",
            alloc.vehicle(),
            r.status,
            r.check.obstacle_hits,
            r.check.outside_tunnel
        );
        Ok(Some((r, ms)))
    };
    let n = schedule.allocations.len();
    if scenario.planner.parallel {
        (0..n).into_par_iter().map(job).collect()
    } else {
        (0..n).map(job).collect()
    }
}

/// Plan, refine where obstacles block a reference, execute every vehicle
/// with the noisy bicycle model and check executed footprints.
pub fn run_experiment(scenario: &Scenario, strategy: Strategy) -> Result<RunResult> {
    scenario.validate()?;
    let requests = scenario.requests()?;
    let (schedule, schedule_ms) = plan(scenario, strategy, &requests)?;
    let grid = obstacle_grid(scenario, &schedule)?;
    let refinements = match &grid {
        Some(g) => refine_blocked(scenario, &schedule, g)?,
        None => vec![None; schedule.allocations.len()],
    };
    let adjust = scenario.intersection.adjust_length();
    let mut vehicles = Vec::with_capacity(schedule.allocations.len());
    let mut low_level_ms = Vec::new();
    for (alloc, refined) in schedule.allocations.iter().zip(refinements) {
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed ^ scenario.noise.seed);
        rng.set_stream(alloc.vehicle() as u64);
        let (refinement, stopped) = match refined {
            Some((r, ms)) => {
                low_level_ms.push(ms);
                let stop = r.status == RefineStatus::Colliding;
                (Some(r), stop)
            }
            None => (None, false),
        };
        let spec = *alloc.occupancy.spec();
        if stopped {
            log::warn!("vehicle {} held before the conflict area", alloc.vehicle());
            vehicles.push(VehicleRun {
                vehicle: alloc.vehicle(),
                samples: Vec::new(),
                max_tracking_error: 0.0,
                refinement,
                stopped,
                executed: OccupancySet::new(&spec).with_owner(alloc.vehicle()),
                redundancy_breaches: 0,
            });
            continue;
        }
        let crossing: &dyn MotionSource = match &refinement {
            Some(r) => &r.control_points,
            None => alloc.trajectory.as_ref(),
        };
        let plan = Plan {
            depart: alloc.depart,
            t_e: alloc.t_e,
            buffer: alloc.buffer,
            entry: alloc.trajectory.pose(0.0),
            adjust,
            crossing,
        };
        let samples = track(&plan, &scenario.vehicle, &scenario.tracker, &scenario.noise, &mut rng);
        let max_tracking_error = samples
            .iter()
            .map(|s| (s.x - s.ref_x).hypot(s.y - s.ref_y))
            .fold(0.0, f64::max);
        let executed = executed_occupancy(&samples, alloc, &scenario.vehicle)?;
        let own = if refinement.is_some() {
            &schedule.tunnels[vehicles.len()].cells
        } else {
            &alloc.occupancy
        };
        let redundancy_breaches = executed
            .slabs()
            .map(|(jt, s)| {
                let mut out = s.clone();
                if let Some(o) = own.slab(jt) {
                    out.subtract(o);
                }
                out.len()
            })
            .sum();
        vehicles.push(VehicleRun {
            vehicle: alloc.vehicle(),
            samples,
            max_tracking_error,
            refinement,
            stopped,
            executed,
            redundancy_breaches,
        });
    }
    let mut collision_pairs = Vec::new();
    for (i, a) in vehicles.iter().enumerate() {
        for b in &vehicles[i + 1..] {
            if !a.executed.disjoint(&b.executed)? {
                collision_pairs.push((a.vehicle, b.vehicle));
            }
        }
    }
    let metrics = summarize(
        strategy,
        &requests,
        &schedule,
        &vehicles,
        &collision_pairs,
        schedule_ms,
        &low_level_ms,
    );
    Ok(RunResult {
        strategy,
        requests,
        schedule,
        vehicles,
        collision_pairs,
        metrics,
    })
}

fn summarize(
    strategy: Strategy,
    requests: &[MotionRequest],
    schedule: &Schedule,
    vehicles: &[VehicleRun],
    collisions: &[(u32, u32)],
    schedule_ms: f64,
    low_level_ms: &[f64],
) -> Metrics {
    let waits: Vec<f64> = schedule
        .allocations
        .iter()
        .map(|a| a.depart - a.request.arrival_time)
        .collect();
    let n = waits.len().max(1) as f64;
    let rounds = schedule.round_ms.len();
    Metrics {
        strategy: strategy.to_string(),
        vehicles: requests.len(),
        scheduled: schedule.allocations.len(),
        total_passing_time: schedule.total_passing_time(),
        makespan: schedule.makespan(),
        mean_wait: waits.iter().sum::<f64>() / n,
        max_wait: waits.iter().copied().fold(0.0, f64::max),
        max_head_wait: schedule.max_head_wait(),
        rounds,
        round_ms_mean: schedule.round_ms.iter().sum::<f64>() / rounds.max(1) as f64,
        round_ms_max: schedule.round_ms.iter().copied().fold(0.0, f64::max),
        schedule_ms,
        low_level_runs: low_level_ms.len(),
        low_level_ms_max: low_level_ms.iter().copied().fold(0.0, f64::max),
        peak_queue: schedule.queue_trace.iter().map(|q| q.1).max().unwrap_or(0),
        collisions: collisions.len(),
        incidents: vehicles.iter().filter(|v| v.stopped).count(),
        redundancy_breaches: vehicles.iter().map(|v| v.redundancy_breaches).sum(),
        max_tracking_error: vehicles.iter().map(|v| v.max_tracking_error).fold(0.0, f64::max),
    }
}

/// Footprint of a sample for plotting and checks.
pub fn body_box(s: &Sample, vehicle: &VehicleSpec) -> FootprintBox {
    FootprintBox::body(Pose::new(s.x, s.y, s.heading), vehicle)
}

use std::collections::VecDeque;
use std::time::Instant;

use rayon::prelude::*;

use super::library::{LibraryEntry, ReferenceLibrary};
use super::priority::{priority, QueueStats};
use super::tunnel::feasible_tunnel;
use super::{Allocation, FeasibleTunnel, PlannerConfig, Schedule, ScoreBreakdown};
use crate::error::{Error, Result};
use crate::grid::OccupancySet;
use crate::model::MotionRequest;
use crate::reference::{buffer_profile, BufferProfile, LongitudinalState};

/// Search window for vehicles that arrive moving and cannot wait.
const MOVING_SEARCH_SLOTS: u32 = 600;

/// Smallest slot `k >= floor_slot` at which `entry`'s base occupancy,
/// shifted by `k`, is disjoint from `a_pre`. Returns the slot and the
/// shifted set.
pub fn earliest_entry(
    entry: &LibraryEntry,
    a_pre: &OccupancySet,
    floor_slot: u32,
) -> (u32, OccupancySet) {
    let mut k = floor_slot;
    while !entry.occupancy.disjoint_shifted(k, a_pre) {
        k += 1;
    }
    (k, entry.occupancy.translate(k as i64))
}

fn ceil_slot(t: f64, dt: f64) -> u32 {
    (t / dt - 1e-9).ceil().max(0.0) as u32
}

struct Candidate {
    road: usize,
    slot: u32,
    floor_slot: u32,
    buffer: BufferProfile,
    score: ScoreBreakdown,
}

/// Single-writer scheduling state: allocated blocks, per-road queues and
/// the scheduling clock.
pub struct Planner<'a> {
    lib: &'a ReferenceLibrary,
    cfg: PlannerConfig,
    a_pre: OccupancySet,
    clock: f64,
    queues: Vec<VecDeque<MotionRequest>>,
    head_since: Vec<f64>,
    last_slot: Vec<Option<u32>>,
    max_committed: f64,
    out: Schedule,
}

impl<'a> Planner<'a> {
    pub fn new(lib: &'a ReferenceLibrary, cfg: PlannerConfig) -> Result<Self> {
        cfg.validate()?;
        let roads = lib.intersection.roads;
        Ok(Self {
            lib,
            cfg,
            a_pre: OccupancySet::new(&lib.grid),
            clock: 0.0,
            queues: vec![VecDeque::new(); roads],
            head_since: vec![0.0; roads],
            last_slot: vec![None; roads],
            max_committed: f64::NEG_INFINITY,
            out: Schedule::empty(),
        })
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn set_clock(&mut self, t: f64) {
        self.clock = self.clock.max(t);
    }

    pub fn a_pre(&self) -> &OccupancySet {
        &self.a_pre
    }

    pub fn round(&self) -> usize {
        self.out.allocations.len()
    }

    pub fn queued(&self) -> usize {
        self.queues.iter().map(VecDeque::len).sum()
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.out.allocations
    }

    pub fn tunnels(&self) -> &[FeasibleTunnel] {
        &self.out.tunnels
    }

    pub fn enqueue(&mut self, req: MotionRequest) -> Result<()> {
        let r = req.road_from.index();
        if r >= self.queues.len() {
            return Err(Error::RoadOutOfRange {
                road: req.road_from.0,
                roads: self.queues.len(),
            });
        }
        if self.queues[r].is_empty() {
            self.head_since[r] = req.arrival_time.max(self.clock);
        }
        self.queues[r].push_back(req);
        Ok(())
    }

    fn queue_stats(&self, r: usize) -> QueueStats {
        QueueStats {
            waits: self.queues[r]
                .iter()
                .map(|q| (self.clock - q.arrival_time).max(0.0))
                .collect(),
            arrival_rate: self.cfg.arrival_rate,
        }
    }

    /// Lowest slot admissible for `req` at the current clock.
    pub fn floor_slot(&self, req: &MotionRequest) -> Result<u32> {
        let entry = self.lib.get(req.road_from, req.maneuver)?;
        let dt = self.lib.grid.dt;
        let t = if req.initial_speed > 0.0 {
            let moving = self.moving_buffer_min(req, entry)?;
            (req.arrival_time + moving).max(self.clock)
        } else {
            req.arrival_time.max(self.clock) + entry.t_a_min()
        };
        let mut k = ceil_slot(t, dt);
        if let Some(prev) = self.last_slot[req.road_from.index()] {
            k = k.max(prev);
        }
        Ok(k)
    }

    fn moving_buffer_min(&self, req: &MotionRequest, entry: &LibraryEntry) -> Result<f64> {
        let traj = &entry.trajectory;
        let start = LongitudinalState {
            s: 0.0,
            v: req.initial_speed,
            a: 0.0,
        };
        buffer_profile(
            self.lib.intersection.adjust_length(),
            traj.entry_speed(),
            traj.entry_accel(),
            start,
            &self.lib.vehicle,
        )
        .map(|b| b.t_a)
    }

    fn evaluate(&self, r: usize) -> Result<Candidate> {
        let req = &self.queues[r][0];
        let entry = self.lib.get(req.road_from, req.maneuver)?;
        let floor_slot = self.floor_slot(req)?;
        let dt = self.lib.grid.dt;
        let (slot, buffer) = if req.initial_speed > 0.0 {
            self.moving_slot(req, entry, floor_slot)?
        } else {
            let (slot, _) = earliest_entry(entry, &self.a_pre, floor_slot);
            (slot, entry.standing_buffer)
        };
        let tentative = entry.occupancy.translate(slot as i64);
        let score = priority(&tentative, &self.a_pre, &self.queue_stats(r), &self.cfg.weights);
        log::trace!(
            "round {} road {} vehicle {}: slot {slot} (floor {floor_slot}, t_e {:.2}) score {:.3}",
            self.round() + 1,
            r + 1,
            req.vehicle,
            slot as f64 * dt,
            score.score()
        );
        Ok(Candidate {
            road: r,
            slot,
            floor_slot,
            buffer,
            score,
        })
    }

    /// Earliest disjoint slot whose buffer duration `t_e - arrival` is
    /// kinematically feasible for a vehicle that cannot stop and wait.
    fn moving_slot(
        &self,
        req: &MotionRequest,
        entry: &LibraryEntry,
        floor_slot: u32,
    ) -> Result<(u32, BufferProfile)> {
        let dt = self.lib.grid.dt;
        let traj = &entry.trajectory;
        let start = LongitudinalState {
            s: 0.0,
            v: req.initial_speed,
            a: 0.0,
        };
        let mut k = floor_slot;
        for _ in 0..MOVING_SEARCH_SLOTS {
            let (slot, _) = earliest_entry(entry, &self.a_pre, k);
            let t_a = slot as f64 * dt - req.arrival_time;
            let b = BufferProfile::solve(
                self.lib.intersection.adjust_length(),
                traj.entry_speed(),
                traj.entry_accel(),
                start,
                t_a,
            )?;
            if b.check(&self.lib.vehicle).is_none() {
                return Ok((slot, b));
            }
            k = slot + 1;
        }
        Err(Error::Unreachable(req.vehicle))
    }

    /// One round: score every queue head, allocate the best, grant its
    /// tunnel and fold it into the allocated set.
    pub fn schedule_round(&mut self) -> Result<&Allocation> {
        let started = Instant::now();
        let roads: Vec<usize> = (0..self.queues.len())
            .filter(|&r| !self.queues[r].is_empty())
            .collect();
        if roads.is_empty() {
            return Err(Error::Config("no queued vehicle to schedule".into()));
        }
        self.out.queue_trace.push((self.clock, self.queued()));
        let evals: Vec<Result<Candidate>> = if self.cfg.parallel {
            roads.par_iter().map(|&r| self.evaluate(r)).collect()
        } else {
            roads.iter().map(|&r| self.evaluate(r)).collect()
        };
        let mut best: Option<Candidate> = None;
        for c in evals {
            let c = c?;
            if best.as_ref().is_none_or(|b| c.score.score() < b.score.score()) {
                best = Some(c);
            }
        }
        let best = best.expect("at least one candidate");
        let r = best.road;
        let req = self.queues[r].pop_front().expect("non-empty queue");
        let entry = self.lib.get(req.road_from, req.maneuver)?;
        let dt = self.lib.grid.dt;
        let t_e = best.slot as f64 * dt;
        let alloc = Allocation {
            occupancy: entry
                .occupancy
                .translate(best.slot as i64)
                .with_owner(req.vehicle),
            trajectory: entry.trajectory.clone(),
            depart: t_e - best.buffer.t_a,
            buffer: best.buffer,
            slot: best.slot,
            t_e,
            score: best.score,
            round: self.out.allocations.len() + 1,
            clock: self.clock,
            floor_slot: best.floor_slot,
            request: req,
        };
        debug_assert!(alloc.occupancy.disjoint(&self.a_pre).unwrap_or(false));
        let tunnel = feasible_tunnel(&alloc, self.cfg.tunnel_margin, &self.a_pre);
        self.a_pre.union_with(&tunnel.cells)?;
        self.out
            .head_wait
            .push((alloc.vehicle(), self.clock - self.head_since[r]));
        self.head_since[r] = self.clock;
        self.last_slot[r] = Some(best.slot);
        self.max_committed = self.max_committed.max(t_e);
        self.out.tunnels.push(tunnel);
        self.out.allocations.push(alloc);
        self.out
            .round_ms
            .push(started.elapsed().as_secs_f64() * 1e3);
        Ok(self.out.allocations.last().expect("just pushed"))
    }

    /// Whether the commit horizon allows another round now.
    pub fn may_schedule(&self) -> bool {
        self.queued() > 0 && self.max_committed <= self.clock + self.cfg.commit_horizon
    }

    /// Time at which the commit horizon next opens.
    pub fn horizon_opens(&self) -> f64 {
        self.max_committed - self.cfg.commit_horizon
    }

    pub fn finish(self) -> Schedule {
        self.out
    }
}

/// Event loop: admit arrivals as the clock advances and run rounds while
/// the commit horizon allows, until every request is allocated.
pub fn run(
    lib: &ReferenceLibrary,
    cfg: &PlannerConfig,
    requests: &[MotionRequest],
) -> Result<Schedule> {
    let mut pending: Vec<MotionRequest> = requests.to_vec();
    pending.sort_by(|a, b| {
        a.arrival_time
            .total_cmp(&b.arrival_time)
            .then(a.vehicle.cmp(&b.vehicle))
    });
    let mut pending: VecDeque<MotionRequest> = pending.into();
    let mut planner = Planner::new(lib, *cfg)?;
    loop {
        while pending
            .front()
            .is_some_and(|r| r.arrival_time <= planner.clock())
        {
            let req = pending.pop_front().expect("front checked");
            planner.enqueue(req)?;
        }
        if planner.may_schedule() {
            planner.schedule_round()?;
            continue;
        }
        let next_arrival = pending.front().map(|r| r.arrival_time);
        let next = match (next_arrival, planner.queued() > 0) {
            (None, false) => break,
            (Some(a), false) => a,
            (None, true) => planner.horizon_opens(),
            (Some(a), true) => a.min(planner.horizon_opens()),
        };
        planner.set_clock(next);
    }
    Ok(planner.finish())
}

impl ReferenceLibrary {
    /// Schedule `requests` with the proposed strategy.
    pub fn schedule(&self, cfg: &PlannerConfig, requests: &[MotionRequest]) -> Result<Schedule> {
        run(self, cfg, requests)
    }
}

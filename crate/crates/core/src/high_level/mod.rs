//! Centralised space-time scheduler and the collision-set baseline.

mod cs;
mod library;
pub mod optimum;
mod planner;
mod priority;
mod tunnel;

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::OccupancySet;
use crate::model::MotionRequest;
use crate::reference::{BufferProfile, Trajectory};

pub use cs::cs_baseline;
pub use library::{LibraryEntry, ReferenceLibrary};
pub use planner::{earliest_entry, run, Planner};
pub use priority::{priority, QueueStats};
pub use tunnel::feasible_tunnel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorityWeights {
    pub omega_d: f64,
    pub omega_w: f64,
    pub omega_sta: f64,
}

impl Default for PriorityWeights {
    fn default() -> Self {
        Self {
            omega_d: 1.0,
            omega_w: 0.5,
            omega_sta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub weights: PriorityWeights,
    /// Average arrival rate per road used by the queue-stability term.
    pub arrival_rate: f64,
    /// Rounds are only executed while the latest granted entry time lies
    /// within this many seconds of the scheduling clock.
    pub commit_horizon: f64,
    /// Extra ring of cells granted around each allocation.
    pub tunnel_margin: u32,
    /// Evaluate the per-road candidates on the rayon pool.
    pub parallel: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            weights: PriorityWeights::default(),
            arrival_rate: 0.8,
            commit_horizon: 3.0,
            tunnel_margin: 0,
            parallel: false,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        if [w.omega_d, w.omega_w, w.omega_sta, self.arrival_rate]
            .iter()
            .any(|v| !(*v >= 0.0))
        {
            return Err(Error::Config("priority weights and arrival rate must be >= 0".into()));
        }
        if !(self.commit_horizon >= 0.0) {
            return Err(Error::Config("commit_horizon must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ScoreBreakdown {
    pub p_d: f64,
    pub p_w: f64,
    pub p_sta: f64,
}

impl ScoreBreakdown {
    /// `P_d - P_w - P_sta`; lower is scheduled first.
    pub fn score(&self) -> f64 {
        self.p_d - self.p_w - self.p_sta
    }
}

#[derive(Debug, Clone)]
pub struct Allocation {
    pub request: MotionRequest,
    /// Entry slot `k`, `t_e = k * dt`.
    pub slot: u32,
    pub t_e: f64,
    pub occupancy: OccupancySet,
    pub trajectory: Arc<Trajectory>,
    pub buffer: BufferProfile,
    /// Time the vehicle leaves the waiting area.
    pub depart: f64,
    pub score: ScoreBreakdown,
    pub round: usize,
    /// Scheduling clock of the round that produced the allocation.
    pub clock: f64,
    /// Lowest slot the vehicle was allowed to take in that round.
    pub floor_slot: u32,
}

impl Allocation {
    pub fn vehicle(&self) -> u32 {
        self.request.vehicle
    }

    pub fn exit_time(&self) -> f64 {
        self.t_e + self.trajectory.duration()
    }

    pub fn max_jt(&self) -> u32 {
        self.occupancy.max_jt().unwrap_or(self.slot)
    }
}

/// Space-time corridor granted to one vehicle.
#[derive(Debug, Clone)]
pub struct FeasibleTunnel {
    pub vehicle: u32,
    pub t_e: f64,
    pub slot: u32,
    pub cells: OccupancySet,
}

impl FeasibleTunnel {
    /// Per-slab cell lists, one CSV row per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        self.cells.write_csv(out)
    }
}

/// Outcome of a full scheduling run.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub allocations: Vec<Allocation>,
    pub tunnels: Vec<FeasibleTunnel>,
    /// Wall-clock time per round (ms).
    pub round_ms: Vec<f64>,
    /// `(clock, total queued vehicles)` before each round.
    pub queue_trace: Vec<(f64, usize)>,
    /// Per vehicle id: time spent at the head of its queue.
    pub head_wait: Vec<(u32, f64)>,
}

impl Schedule {
    pub fn empty() -> Self {
        Self {
            allocations: Vec::new(),
            tunnels: Vec::new(),
            round_ms: Vec::new(),
            queue_trace: Vec::new(),
            head_wait: Vec::new(),
        }
    }

    /// Latest exit minus earliest arrival.
    pub fn total_passing_time(&self) -> f64 {
        let first = self
            .allocations
            .iter()
            .map(|a| a.request.arrival_time)
            .fold(f64::INFINITY, f64::min);
        let last = self
            .allocations
            .iter()
            .map(Allocation::exit_time)
            .fold(f64::NEG_INFINITY, f64::max);
        if self.allocations.is_empty() {
            0.0
        } else {
            last - first
        }
    }

    /// `max j_t * dt` over all allocations.
    pub fn makespan(&self) -> f64 {
        self.allocations
            .iter()
            .map(|a| a.max_jt() as f64 * a.occupancy.spec().dt)
            .fold(0.0, f64::max)
    }

    pub fn max_head_wait(&self) -> f64 {
        self.head_wait.iter().map(|w| w.1).fold(0.0, f64::max)
    }

    /// Vehicle ids in allocation order.
    pub fn order(&self) -> Vec<u32> {
        self.allocations.iter().map(Allocation::vehicle).collect()
    }

    /// Brute-force check that no two allocations share a block.
    pub fn pairwise_disjoint(&self) -> Result<bool> {
        for (i, a) in self.allocations.iter().enumerate() {
            for b in &self.allocations[i + 1..] {
                if !a.occupancy.disjoint(&b.occupancy)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// One row per allocation.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "vehicle", "road_from", "maneuver", "road_to", "arrival", "depart", "t_e", "exit",
            "max_jt", "p_d", "p_w", "p_sta", "score", "round",
        ])?;
        for a in &self.allocations {
            let r = &a.request;
            let f = |v: f64| format!("{v:.6}");
            w.write_record([
                r.vehicle.to_string(),
                r.road_from.to_string(),
                r.maneuver.to_string(),
                r.road_to.to_string(),
                f(r.arrival_time),
                f(a.depart),
                f(a.t_e),
                f(a.exit_time()),
                a.max_jt().to_string(),
                f(a.score.p_d),
                f(a.score.p_w),
                f(a.score.p_sta),
                f(a.score.score()),
                a.round.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

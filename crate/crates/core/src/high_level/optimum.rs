//! Exhaustive min-makespan search for small instances, used to measure the
//! gap of the sequential planner.

use super::library::ReferenceLibrary;
use super::Schedule;
use crate::error::{Error, Result};
use crate::grid::OccupancySet;
use crate::model::MotionRequest;

/// Largest instance the exhaustive search accepts.
pub const MAX_VEHICLES: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumReport {
    /// `max j_t * dt` of the sequential schedule.
    pub sequential: f64,
    /// Best `max j_t * dt` over all entry-slot assignments.
    pub optimal: f64,
    /// Entry slot per request (input order) of the optimum.
    pub slots: Vec<u32>,
}

impl OptimumReport {
    pub fn gap(&self) -> f64 {
        self.sequential - self.optimal
    }
}

struct Search<'a> {
    bases: Vec<&'a OccupancySet>,
    floors: Vec<u32>,
    /// Index of the previous vehicle on the same road, if any.
    leader: Vec<Option<usize>>,
    best: u32,
    best_slots: Option<Vec<u32>>,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, placed: &OccupancySet, slots: &mut Vec<u32>, span: u32) {
        if i == self.bases.len() {
            if span < self.best {
                self.best = span;
                self.best_slots = Some(slots.clone());
            }
            return;
        }
        let base = self.bases[i];
        let top = base.max_jt().unwrap_or(0);
        let mut k = self.floors[i];
        if let Some(l) = self.leader[i] {
            k = k.max(slots[l]);
        }
        while top + k < self.best {
            if base.disjoint_shifted(k, placed) {
                let mut next = placed.clone();
                next.union_with(&base.translate(k as i64))
                    .expect("same grid");
                slots.push(k);
                self.dfs(i + 1, &next, slots, span.max(top + k));
                slots.pop();
            }
            k += 1;
        }
    }
}

/// Exhaustive search over entry slots of every vehicle (release times are
/// respected, same-road vehicles keep their arrival order), seeded with the
/// sequential schedule as the incumbent.
pub fn exhaustive_optimum(
    lib: &ReferenceLibrary,
    requests: &[MotionRequest],
    sequential: &Schedule,
) -> Result<OptimumReport> {
    if requests.len() > MAX_VEHICLES {
        return Err(Error::Config(format!(
            "exhaustive search limited to {MAX_VEHICLES} vehicles, got {}",
            requests.len()
        )));
    }
    let dt = lib.grid.dt;
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by(|&a, &b| {
        requests[a]
            .arrival_time
            .total_cmp(&requests[b].arrival_time)
            .then(requests[a].vehicle.cmp(&requests[b].vehicle))
    });
    let mut bases = Vec::new();
    let mut floors = Vec::new();
    let mut leader = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let r = &requests[i];
        let e = lib.get(r.road_from, r.maneuver)?;
        bases.push(&e.occupancy);
        floors.push(((r.arrival_time + e.t_a_min()) / dt - 1e-9).ceil().max(0.0) as u32);
        leader.push(
            order[..pos]
                .iter()
                .rposition(|&j| requests[j].road_from == r.road_from),
        );
    }
    let incumbent = sequential
        .allocations
        .iter()
        .map(|a| a.max_jt())
        .max()
        .unwrap_or(0);
    let mut search = Search {
        bases,
        floors,
        leader,
        best: incumbent + 1,
        best_slots: None,
    };
    search.dfs(0, &OccupancySet::new(&lib.grid), &mut Vec::new(), 0);
    let sorted_slots = search.best_slots.unwrap_or_default();
    let mut slots = vec![0; requests.len()];
    for (pos, &i) in order.iter().enumerate() {
        if let Some(&k) = sorted_slots.get(pos) {
            slots[i] = k;
        }
    }
    Ok(OptimumReport {
        sequential: incumbent as f64 * dt,
        optimal: search.best as f64 * dt,
        slots,
    })
}

use std::collections::HashMap;

use super::library::ReferenceLibrary;
use super::{Allocation, FeasibleTunnel, Schedule, ScoreBreakdown};
use crate::error::{Error, Result};
use crate::model::MotionRequest;

fn ceil_slot(t: f64, dt: f64) -> u32 {
    (t / dt - 1e-9).ceil().max(0.0) as u32
}

/// Collision-set baseline: the whole conflict area is one exclusive
/// resource, so each vehicle's blocks start only after the previous
/// vehicle's last slab. Vehicles are served in `order` (normally the order
/// chosen by the proposed planner).
pub fn cs_baseline(
    lib: &ReferenceLibrary,
    requests: &[MotionRequest],
    order: &[u32],
) -> Result<Schedule> {
    let by_id: HashMap<u32, &MotionRequest> = requests.iter().map(|r| (r.vehicle, r)).collect();
    let dt = lib.grid.dt;
    let mut out = Schedule::empty();
    let mut last_jt: Option<u32> = None;
    let mut last_slot_on_road: HashMap<usize, u32> = HashMap::new();
    for (i, id) in order.iter().enumerate() {
        let req = *by_id
            .get(id)
            .ok_or_else(|| Error::Config(format!("vehicle {id} missing from requests")))?;
        if req.initial_speed > 0.0 {
            log::warn!("collision-set baseline treats vehicle {id} as starting from rest");
        }
        let entry = lib.get(req.road_from, req.maneuver)?;
        let base_lo = entry.occupancy.min_jt().unwrap_or(1);
        let floor = ceil_slot(req.arrival_time + entry.t_a_min(), dt);
        let mut k = floor;
        if let Some(prev) = last_slot_on_road.get(&req.road_from.index()) {
            k = k.max(*prev);
        }
        if let Some(end) = last_jt {
            // first slab base_lo + k must exceed the previous last slab
            k = k.max((end + 1).saturating_sub(base_lo));
        }
        let t_e = k as f64 * dt;
        let occupancy = entry.occupancy.translate(k as i64).with_owner(req.vehicle);
        last_jt = occupancy.max_jt().or(last_jt);
        last_slot_on_road.insert(req.road_from.index(), k);
        out.tunnels.push(FeasibleTunnel {
            vehicle: req.vehicle,
            t_e,
            slot: k,
            cells: occupancy.clone(),
        });
        out.allocations.push(Allocation {
            request: req.clone(),
            slot: k,
            t_e,
            occupancy,
            trajectory: entry.trajectory.clone(),
            buffer: entry.standing_buffer,
            depart: t_e - entry.t_a_min(),
            score: ScoreBreakdown::default(),
            round: i + 1,
            clock: req.arrival_time,
            floor_slot: floor,
        });
    }
    Ok(out)
}

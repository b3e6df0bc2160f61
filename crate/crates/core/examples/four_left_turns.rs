//! Four vehicles turning left from the four roads at the same instant:
//! every pair of paths crosses, so they are admitted one after another and
//! each allocation touches its predecessor on the time axis.

use crossroads::grid::GridSpec;
use crossroads::high_level::{self, PlannerConfig, ReferenceLibrary};
use crossroads::model::{IntersectionConfig, Maneuver, MotionRequest, Road, VehicleSpec};
use crossroads::reference::ReferenceConfig;

fn main() -> crossroads::Result<()> {
    let cfg = IntersectionConfig::default();
    let grid = GridSpec::covering(cfg.conflict_area(), 0.2, 0.2, 0.2)?;
    let lib = ReferenceLibrary::build(
        &cfg,
        &VehicleSpec::default(),
        &ReferenceConfig::default(),
        &grid,
    )?;
    let requests = (1..=4)
        .map(|r| MotionRequest::new(r as u32, Road(r), Maneuver::TurnLeft, 0.0, &cfg))
        .collect::<crossroads::Result<Vec<_>>>()?;
    let schedule = high_level::run(&lib, &PlannerConfig::default(), &requests)?;
    println!("vehicle road  t_e    exit   slabs       earlier-slot-free");
    for a in &schedule.allocations {
        let entry = lib.get(a.request.road_from, a.request.maneuver)?;
        let earlier_free = a.slot > a.floor_slot
            && entry
                .occupancy
                .disjoint_shifted(a.slot - 1, &a_pre_without(&schedule, a.vehicle(), &grid));
        println!(
            "{:>7} {:>4} {:>5.2} {:>6.2}   {:>3}..{:<3}   {}",
            a.vehicle(),
            a.request.road_from.to_string(),
            a.t_e,
            a.exit_time(),
            a.occupancy.min_jt().unwrap_or(0),
            a.max_jt(),
            earlier_free
        );
    }
    println!("pairwise disjoint: {}", schedule.pairwise_disjoint()?);
    println!("makespan: {:.2} s", schedule.makespan());
    Ok(())
}

/// Blocks held by every vehicle allocated before `id`.
fn a_pre_without(
    schedule: &high_level::Schedule,
    id: u32,
    grid: &GridSpec,
) -> crossroads::grid::OccupancySet {
    let mut set = crossroads::grid::OccupancySet::new(grid);
    for a in schedule.allocations.iter().take_while(|a| a.vehicle() != id) {
        set.union_with(&a.occupancy).expect("same grid");
    }
    set
}

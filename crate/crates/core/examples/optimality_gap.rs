//! Sequential planner makespan against the exhaustive optimum for four
//! simultaneous left turns.

use crossroads::high_level::optimum::exhaustive_optimum;
use crossroads::model::{Maneuver, MotionRequest, Road};
use crossroads::sim::Scenario;

fn main() -> crossroads::Result<()> {
    let s = Scenario::default();
    let lib = s.library()?;
    let requests = (1..=4)
        .map(|r| MotionRequest::new(r as u32, Road(r), Maneuver::TurnLeft, 0.0, &s.intersection))
        .collect::<crossroads::Result<Vec<_>>>()?;
    let schedule = lib.schedule(&s.planner, &requests)?;
    for a in &schedule.allocations {
        println!("vehicle {} from road {} enters at {:.2} s", a.vehicle(), a.request.road_from, a.t_e);
    }
    let rep = exhaustive_optimum(&lib, &requests, &schedule)?;
    println!(
        "makespan {:.2} s, optimum {:.2} s (slots {:?}), gap {:.2} s",
        rep.sequential,
        rep.optimal,
        rep.slots,
        rep.gap()
    );
    Ok(())
}

//! Waiting-time term on the symmetric scenario: straight traffic on roads
//! 1 and 3, left-turners on roads 2 and 4.

use crossroads::high_level::{PlannerConfig, PriorityWeights};
use crossroads::model::{Maneuver, MotionRequest, Road};
use crossroads::sim::Scenario;

fn main() -> crossroads::Result<()> {
    let scenario = Scenario::default();
    let lib = scenario.library()?;
    let per_road = 12;
    let gap = 1.0 / scenario.planner.arrival_rate;
    let mut requests = Vec::new();
    for k in 0..per_road {
        for (road, m) in [
            (1, Maneuver::GoStraight),
            (2, Maneuver::TurnLeft),
            (3, Maneuver::GoStraight),
            (4, Maneuver::TurnLeft),
        ] {
            let id = requests.len() as u32 + 1;
            requests.push(MotionRequest::new(id, Road(road), m, k as f64 * gap, &scenario.intersection)?);
        }
    }
    for omega_w in [0.5, 0.0] {
        let cfg = PlannerConfig {
            weights: PriorityWeights {
                omega_w,
                ..PriorityWeights::default()
            },
            ..scenario.planner
        };
        let s = lib.schedule(&cfg, &requests)?;
        println!(
            "omega_w = {omega_w:.1}: max head-of-queue wait {:6.2} s, total passing time {:6.2} s",
            s.max_head_wait(),
            s.total_passing_time()
        );
    }
    Ok(())
}

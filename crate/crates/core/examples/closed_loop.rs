//! Closed-loop run of a random flow: schedule, track with the noisy bicycle
//! model and check executed footprints.

use crossroads::sim::{run_experiment, Scenario, Strategy};

fn main() -> crossroads::Result<()> {
    env_logger::init();
    let scenario = Scenario {
        seed: 11,
        ..Scenario::default()
    };
    let r = run_experiment(&scenario, Strategy::Proposed)?;
    let m = &r.metrics;
    println!("vehicles            {} ({} scheduled)", m.vehicles, m.scheduled);
    println!("total passing time  {:.2} s", m.total_passing_time);
    println!("mean / max wait     {:.2} / {:.2} s", m.mean_wait, m.max_wait);
    println!("round time          {:.3} ms mean, {:.3} ms max", m.round_ms_mean, m.round_ms_max);
    println!("tracking error      {:.3} m", m.max_tracking_error);
    println!("redundancy breaches {}", m.redundancy_breaches);
    println!("collisions          {}", m.collisions);
    Ok(())
}

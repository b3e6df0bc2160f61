//! Refine a straight reference around an unexpected obstacle inside its
//! granted tunnel.

use crossroads::sim::CorridorScenario;

fn main() -> crossroads::Result<()> {
    env_logger::init();
    let scenario = CorridorScenario::default();
    let out = scenario.run()?;
    let r = &out.refinement;
    println!("status          {:?}", r.status);
    println!("control points  {} (dt {:.3} s)", r.control_points.len(), r.control_points.dt);
    println!("iterations      {} over {} re-weightings", r.iterations, r.reweights);
    println!("cost            {:.4} -> {:.4}", r.initial_cost, r.final_cost);
    println!("obstacle hits   {}", r.check.obstacle_hits);
    println!("outside tunnel  {}", r.check.outside_tunnel);
    println!("peak speed      {:.3} m/s", r.check.max_speed);
    println!("peak lateral    {:.3} m/s^2", r.check.max_lateral_accel);
    println!("time            {:.1} ms", r.elapsed_ms);
    for p in &r.control_points.points {
        println!("  Q = ({:7.3}, {:6.3})", p[0], p[1]);
    }
    Ok(())
}

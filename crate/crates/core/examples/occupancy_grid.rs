//! Space-time blocks swept by a left turn, and how shifting its entry time
//! separates it from a crossing straight.

use crossroads::grid::{disjoint, trajectory_occupancy, GridSpec};
use crossroads::model::{IntersectionConfig, Maneuver, Road, VehicleSpec};
use crossroads::reference::{ReferenceConfig, Trajectory};

fn main() -> crossroads::Result<()> {
    let cfg = IntersectionConfig::default();
    let v = VehicleSpec::default();
    let rc = ReferenceConfig::default();
    let grid = GridSpec::covering(cfg.conflict_area(), 0.2, 0.2, 0.2)?;
    let left = Trajectory::generate(Road(2), Maneuver::TurnLeft, &cfg, &v, &rc)?;
    let straight = Trajectory::generate(Road(1), Maneuver::GoStraight, &cfg, &v, &rc)?;
    let a = trajectory_occupancy(&left, &v, &grid, 0.0)?;
    let b = trajectory_occupancy(&straight, &v, &grid, 0.0)?;
    println!("grid {} x {} cells, dt {} s", grid.nx, grid.ny, grid.dt);
    println!("left turn: {} blocks over slabs {:?}..={:?}", a.len(), a.min_jt(), a.max_jt());
    for (jt, slab) in a.slabs() {
        println!("  slab {jt:3}: {:4} cells", slab.len());
    }
    let k = (0..)
        .find(|&k| b.disjoint_shifted(k, &a))
        .expect("a late enough slot exists");
    println!("straight from road 1 conflicts until it is delayed by {k} slabs ({:.1} s)", k as f64 * grid.dt);
    assert!(disjoint(&a, &b.translate(k as i64))?);
    Ok(())
}

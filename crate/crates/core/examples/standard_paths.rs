//! Line & circle paths, their smoothed versions and the buffer hand-over
//! for all twelve maneuvers of the four-road crossing.

use crossroads::model::{standard_path, IntersectionConfig, Maneuver, Road, VehicleSpec};
use crossroads::reference::{buffer_profile, LongitudinalState, ReferenceConfig, Trajectory};

fn main() -> crossroads::Result<()> {
    let cfg = IntersectionConfig::default();
    let vehicle = VehicleSpec::default();
    let rcfg = ReferenceConfig::default();
    println!(
        "{:>4} {:>9} {:>4} {:>8} {:>8} {:>8} {:>9} {:>9} {:>7} {:>6}",
        "from", "maneuver", "to", "s_ca", "s_t", "s_n", "dev_samp", "dev_dense", "delta", "t_a"
    );
    for r in 1..=cfg.roads {
        for m in Maneuver::ALL {
            let from = Road(r);
            let traj = Trajectory::generate(from, m, &cfg, &vehicle, &rcfg)?;
            let ca = standard_path(from, traj.road_to, m, &cfg)?;
            let buffer = buffer_profile(
                cfg.adjust_length(),
                traj.entry_speed(),
                traj.entry_accel(),
                LongitudinalState::default(),
                &vehicle,
            )?;
            println!(
                "{:>4} {:>9} {:>4} {:>8.3} {:>8.3} {:>8.3} {:>9.4} {:>9.4} {:>7.4} {:>6.1}",
                from.to_string(),
                m.to_string(),
                traj.road_to.to_string(),
                ca.length(),
                traj.path.s_t,
                traj.path.s_n,
                traj.path.max_sample_deviation,
                traj.path.max_dense_deviation,
                traj.peak_steering(vehicle.wheelbase),
                buffer.t_a,
            );
        }
    }
    Ok(())
}

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{trajectory_occupancy, GridSpec, OccupancySet};
use crate::model::{IntersectionConfig, Maneuver, Road, VehicleSpec};
use crate::reference::{
    buffer_profile, BufferProfile, LongitudinalState, ReferenceConfig, Trajectory,
};

/// Cached reference data for one `(road, maneuver)` pair.
#[derive(Debug, Clone)]
pub struct LibraryEntry {
    pub trajectory: Arc<Trajectory>,
    /// Occupancy for an entry at `t = 0` (slab 1 onwards).
    pub occupancy: OccupancySet,
    /// Fastest buffer profile from standstill.
    pub standing_buffer: BufferProfile,
}

impl LibraryEntry {
    pub fn t_a_min(&self) -> f64 {
        self.standing_buffer.t_a
    }
}

/// Reference trajectories and their base occupancies for every maneuver,
/// computed once per scenario.
#[derive(Debug, Clone)]
pub struct ReferenceLibrary {
    pub intersection: IntersectionConfig,
    pub vehicle: VehicleSpec,
    pub reference: ReferenceConfig,
    pub grid: GridSpec,
    entries: BTreeMap<(Road, Maneuver), LibraryEntry>,
}

impl ReferenceLibrary {
    pub fn build(
        intersection: &IntersectionConfig,
        vehicle: &VehicleSpec,
        reference: &ReferenceConfig,
        grid: &GridSpec,
    ) -> Result<Self> {
        intersection.validate()?;
        vehicle.validate()?;
        grid.validate()?;
        let mut entries = BTreeMap::new();
        for r in 1..=intersection.roads {
            for m in Maneuver::ALL {
                let traj = Trajectory::generate(Road(r), m, intersection, vehicle, reference)?;
                let occupancy = trajectory_occupancy(&traj, vehicle, grid, 0.0)?;
                let standing_buffer = buffer_profile(
                    intersection.adjust_length(),
                    traj.entry_speed(),
                    traj.entry_accel(),
                    LongitudinalState::default(),
                    vehicle,
                )?;
                entries.insert(
                    (Road(r), m),
                    LibraryEntry {
                        trajectory: Arc::new(traj),
                        occupancy,
                        standing_buffer,
                    },
                );
            }
        }
        Ok(Self {
            intersection: intersection.clone(),
            vehicle: *vehicle,
            reference: *reference,
            grid: *grid,
            entries,
        })
    }

    pub fn get(&self, road: Road, maneuver: Maneuver) -> Result<&LibraryEntry> {
        self.entries.get(&(road, maneuver)).ok_or(Error::RoadOutOfRange {
            road: road.0,
            roads: self.intersection.roads,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Road, Maneuver), &LibraryEntry)> {
        self.entries.iter()
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{sweep_occupancy, FootprintBox, GridSpec, OccupancySet, PoseSource, SweepShape};
use crate::low_level::{
    refine, CostWeights, LowLevelConfig, Motion, MotionSource, ObstacleGrid, Refinement,
};
use crate::model::{Pose, Rect, VehicleSpec};

/// Constant-velocity straight-line motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraightMotion {
    pub start: [f64; 2],
    pub heading: f64,
    pub speed: f64,
    pub duration: f64,
}

impl MotionSource for StraightMotion {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn motion(&self, t: f64) -> Motion {
        let t = t.clamp(0.0, self.duration);
        let (s, c) = self.heading.sin_cos();
        Motion {
            p: [self.start[0] + c * self.speed * t, self.start[1] + s * self.speed * t],
            v: [c * self.speed, s * self.speed],
            a: [0.0; 2],
        }
    }
}

impl PoseSource for StraightMotion {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn pose_at(&self, t: f64) -> Pose {
        let p = self.motion(t).p;
        Pose::new(p[0], p[1], self.heading)
    }
}

/// Rectangular obstacle present during `[from, until]` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleBox {
    pub center: [f64; 2],
    pub half_length: f64,
    pub half_width: f64,
    #[serde(default)]
    pub heading: f64,
    #[serde(default)]
    pub from: f64,
    pub until: Option<f64>,
}

/// A single vehicle on a straight road meeting an unexpected obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorridorScenario {
    pub vehicle: VehicleSpec,
    pub reference: StraightMotion,
    pub area: Rect,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    /// Rings of cells granted around the reference occupancy.
    pub tunnel_margin: u32,
    pub obstacles: Vec<ObstacleBox>,
    pub low_level: LowLevelConfig,
}

impl Default for CorridorScenario {
    /// 4.72 m x 1.88 m vehicle at 3 m/s for 12 s past a 1 m box sitting
    /// 0.3 m off the lane centre.
    fn default() -> Self {
        Self {
            vehicle: VehicleSpec {
                length: 4.72,
                width: 1.88,
                wheelbase: 2.8,
                ..VehicleSpec::default()
            },
            reference: StraightMotion {
                start: [0.0, 0.0],
                heading: 0.0,
                speed: 3.0,
                duration: 12.0,
            },
            area: Rect {
                min: [-6.0, -6.0],
                max: [42.0, 6.0],
            },
            dx: 0.2,
            dy: 0.2,
            dt: 0.2,
            tunnel_margin: 12,
            obstacles: vec![ObstacleBox {
                center: [18.0, 0.3],
                half_length: 0.5,
                half_width: 0.5,
                heading: 0.0,
                from: 0.0,
                until: None,
            }],
            low_level: LowLevelConfig {
                knot_interval: 1.0,
                weights: CostWeights {
                    omega_acc: 0.1,
                    omega_jerk: 5.0,
                    omega_c: 1.0,
                },
                d_r: 0.94,
                d_f: Some(2.5),
                ..LowLevelConfig::default()
            },
        }
    }
}

/// Everything produced by [`CorridorScenario::run`].
#[derive(Debug, Clone)]
pub struct CorridorOutcome {
    pub grid: ObstacleGrid,
    pub reference_occupancy: OccupancySet,
    pub tunnel: OccupancySet,
    pub refinement: Refinement,
}

impl CorridorScenario {
    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::covering(self.area, self.dx, self.dy, self.dt)
    }

    /// Obstacle cells for slabs `1..=slabs`.
    pub fn obstacle_grid(&self, spec: &GridSpec, slabs: u32) -> ObstacleGrid {
        let mut grid = ObstacleGrid::new(spec);
        for o in &self.obstacles {
            let first = spec.slab_of(o.from.max(0.0));
            let last = o.until.map_or(slabs, |u| spec.slab_of(u).min(slabs));
            let b = FootprintBox {
                center: o.center,
                heading: o.heading,
                half_length: o.half_length,
                half_width: o.half_width,
            };
            grid.add_box(&b, first, last);
        }
        grid
    }

    pub fn run(&self) -> Result<CorridorOutcome> {
        self.vehicle.validate()?;
        if !(self.reference.speed > 0.0 && self.reference.duration > 0.0) {
            return Err(Error::Config("reference speed and duration must be positive".into()));
        }
        let spec = self.grid_spec()?;
        let shape = SweepShape {
            v_bound: self.reference.speed,
            ..SweepShape::inflated(&self.vehicle)
        };
        let reference_occupancy = sweep_occupancy(&self.reference, &shape, &spec, 0)?;
        let tunnel = reference_occupancy.dilated(self.tunnel_margin);
        let slabs = reference_occupancy.max_jt().unwrap_or(1);
        let mut grid = self.obstacle_grid(&spec, slabs);
        grid.virtual_cells = crate::low_level::ft_virtual_obstacles(&tunnel);
        let refinement = refine(
            &self.reference,
            0.0,
            &grid,
            Some(&tunnel),
            &self.vehicle,
            &self.low_level,
        )?;
        Ok(CorridorOutcome {
            grid,
            reference_occupancy,
            tunnel,
            refinement,
        })
    }
}

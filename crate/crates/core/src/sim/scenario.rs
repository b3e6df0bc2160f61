use std::path::Path;

use serde::{Deserialize, Serialize};

use super::corridor::ObstacleBox;
use super::flow::FlowMix;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::high_level::{PlannerConfig, ReferenceLibrary};
use crate::kinematics::NoiseConfig;
use crate::low_level::LowLevelConfig;
use crate::model::{IntersectionConfig, Maneuver, MotionRequest, Road, VehicleSpec};
use crate::reference::ReferenceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Proposed,
    Cs,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Strategy::Proposed),
            "cs" => Ok(Strategy::Cs),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Proposed => "proposed",
            Strategy::Cs => "cs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dx: 0.2,
            dy: 0.2,
            dt: 0.2,
        }
    }
}

/// One explicitly listed vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestSpec {
    pub road: usize,
    pub maneuver: Maneuver,
    pub arrival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    pub mix: FlowMix,
    pub vehicles: usize,
    /// Poisson arrival rate per road (vehicles / s).
    pub rate: f64,
    /// Replaces the random flow when non-empty.
    pub requests: Vec<RequestSpec>,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            mix: FlowMix::flow1(),
            vehicles: 20,
            rate: 0.8,
            requests: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Integration step (s).
    pub step: f64,
    pub k_s: f64,
    pub k_v: f64,
    /// Lateral error natural frequency (rad/s) and damping.
    pub omega: f64,
    pub zeta: f64,
    /// Speed floor used when converting lateral errors to curvature.
    pub min_speed: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            step: 0.02,
            k_s: 4.0,
            k_v: 4.0,
            omega: 3.0,
            zeta: 1.0,
            min_speed: 1.0,
        }
    }
}

/// Complete description of one experiment, loadable from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub strategy: Strategy,
    pub intersection: IntersectionConfig,
    pub vehicle: VehicleSpec,
    pub reference: ReferenceConfig,
    pub grid: GridConfig,
    pub planner: PlannerConfig,
    pub low_level: LowLevelConfig,
    pub noise: NoiseConfig,
    pub tracker: TrackerConfig,
    pub traffic: TrafficConfig,
    /// Unexpected obstacles in intersection coordinates.
    pub obstacles: Vec<ObstacleBox>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "default".into(),
            seed: 0,
            strategy: Strategy::Proposed,
            intersection: IntersectionConfig::default(),
            vehicle: VehicleSpec::default(),
            reference: ReferenceConfig::default(),
            grid: GridConfig::default(),
            planner: PlannerConfig::default(),
            low_level: LowLevelConfig::default(),
            noise: NoiseConfig::default(),
            tracker: TrackerConfig::default(),
            traffic: TrafficConfig::default(),
            obstacles: Vec::new(),
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.intersection.validate()?;
        self.vehicle.validate()?;
        self.reference.validate()?;
        self.planner.validate()?;
        self.low_level.validate()?;
        self.noise.validate()?;
        self.traffic.mix.validate()?;
        let t = &self.tracker;
        if !(t.step > 0.0 && t.min_speed > 0.0) {
            return Err(Error::Config("tracker step and min_speed must be positive".into()));
        }
        if !(self.traffic.rate > 0.0) {
            return Err(Error::Config("traffic rate must be positive".into()));
        }
        for r in &self.traffic.requests {
            if r.road == 0 || r.road > self.intersection.roads {
                return Err(Error::RoadOutOfRange {
                    road: r.road,
                    roads: self.intersection.roads,
                });
            }
        }
        self.grid_spec().map(|_| ())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::covering(
            self.intersection.conflict_area(),
            self.grid.dx,
            self.grid.dy,
            self.grid.dt,
        )
    }

    pub fn library(&self) -> Result<ReferenceLibrary> {
        ReferenceLibrary::build(
            &self.intersection,
            &self.vehicle,
            &self.reference,
            &self.grid_spec()?,
        )
    }

    /// Explicit requests if listed, otherwise a random flow from `seed`.
    pub fn requests(&self) -> Result<Vec<MotionRequest>> {
        if self.traffic.requests.is_empty() {
            return super::flow::generate_flow(
                &self.traffic.mix,
                self.traffic.vehicles,
                self.traffic.rate,
                &self.intersection,
                self.seed,
            );
        }
        self.traffic
            .requests
            .iter()
            .enumerate()
            .map(|(i, r)| {
                MotionRequest::new(
                    i as u32 + 1,
                    Road(r.road),
                    r.maneuver,
                    r.arrival,
                    &self.intersection,
                )
            })
            .collect()
    }
}

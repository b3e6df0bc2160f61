//! Scenarios, closed-loop simulation, metrics and export.

mod corridor;
mod export;
mod flow;
mod run;
mod scenario;

pub use corridor::{CorridorOutcome, CorridorScenario, ObstacleBox, StraightMotion};
pub use export::{export, read_allocations_csv, AcceptanceReport};
pub use flow::{generate_flow, FlowMix};
pub use run::{body_box, plan, run_experiment, Metrics, RunResult, Sample, VehicleRun};
pub use scenario::{GridConfig, RequestSpec, Scenario, Strategy, TrackerConfig, TrafficConfig};

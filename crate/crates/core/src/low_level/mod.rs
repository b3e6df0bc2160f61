//! Gradient-based refinement of a reference trajectory inside its granted
//! tunnel, around obstacles that were not known at scheduling time.

mod bspline;
mod cost;
mod obstacles;
mod optimize;

pub use bspline::{
    evaluate_spline, init_control_points, knot_layout, spline_kinematics, ControlPointSequence,
    Motion, MotionSource, CLAMPED, DEGREE, MIN_POINTS,
};
pub use cost::{collision_cost, penalty, smoothness_cost, total_cost, CollisionParams, CostWeights};
pub use obstacles::{ft_virtual_obstacles, ObstacleGrid};
pub use optimize::{
    minimize, optimize, post_check, refine, spline_limits, CheckReport, IterRecord, LowLevelConfig,
    PostCheck, RefineStatus, Refinement,
};

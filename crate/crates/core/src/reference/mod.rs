//! Reference trajectories: smoothed path, speed profiles and the combined
//! time-parameterised trajectory.

pub mod path;
pub mod qp;
pub mod speed;
pub mod trajectory;

pub use path::{smooth_path, PathSpline, SmoothingConfig};
pub use speed::{buffer_profile, BufferProfile, LongitudinalState, SpeedProfile};
pub use trajectory::{ReferenceConfig, Trajectory};

//! Bi-level coordination of connected autonomous vehicles at a
//! non-signalized four-way intersection.

pub mod error;
pub mod grid;
pub mod high_level;
pub mod kinematics;
pub mod low_level;
pub mod model;
pub mod reference;
pub mod sim;

pub use error::{Error, Result};

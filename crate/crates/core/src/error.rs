use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("road {road} out of range 1..={roads}")]
    RoadOutOfRange { road: usize, roads: usize },

    #[error("{0} roads are not supported without a routing table")]
    UnsupportedRoadCount(usize),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("path smoothing infeasible: {0}")]
    Infeasible(String),

    #[error("quadratic solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("time {t} outside trajectory window [0, {duration}]")]
    OutsideWindow { t: f64, duration: f64 },

    #[error("point ({x:.3}, {y:.3}) lies outside the gridded area")]
    OutOfArea { x: f64, y: f64 },

    #[error("footprint leaves the gridded area at relative time {t:.3} s")]
    LeavesArea { t: f64 },

    #[error("occupancy sets built on different grids")]
    GridMismatch,

    #[error("need at least 7 control points, got {0}")]
    TooFewControlPoints(usize),

    #[error("reference duration {duration:.3} s is shorter than the spline span {span:.3} s")]
    ShortReference { duration: f64, span: f64 },

    #[error("buffer profile infeasible: {0}")]
    BufferInfeasible(String),

    #[error("vehicle {0} cannot reach the conflict area at any admissible entry time")]
    Unreachable(u32),

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error at {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("scenario parse error: {0}")]
    Scenario(#[from] toml::de::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}

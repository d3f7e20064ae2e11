use thiserror::Error;

use crate::observability::{SensorId, TargetId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sensor set is empty")]
    EmptySensorSet,

    #[error("sensor {sensor} coincides with target {target}")]
    CoincidentPositions { sensor: SensorId, target: TargetId },

    #[error("matrix is identically zero")]
    DegenerateMatrix,

    #[error("measure needs the control input of target {0}")]
    ControlRequired(TargetId),

    #[error("control of target {target} has norm {norm} above u_max {u_max}")]
    ControlExceedsLimit { target: TargetId, norm: f64, u_max: f64 },

    #[error("unknown sensor {0}")]
    UnknownSensor(SensorId),

    #[error("unknown target {0}")]
    UnknownTarget(TargetId),

    #[error("no targets to assign")]
    EmptyTargets,

    #[error("need at least {needed} sensors, have {available}")]
    InsufficientSensors { available: usize, needed: usize },

    #[error("brute force would enumerate {cases} assignments, cap is {cap}")]
    InstanceTooLarge { cases: u128, cap: u128 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Observability-driven sensor-to-target assignment for range-only tracking.
//!
//! A target at `p` seen by sensors at `p_sᵢ` has observability matrix
//! `O(p)` with rows `(p − p_sᵢ)ᵀ`. Scalar measures of `O` (inverse condition
//! number and its lower bound, trace, rank, log-det of `OᵀO`) score sensor
//! groups; [`assignment`] picks non-overlapping groups that maximize the
//! summed score, and [`sim`] closes the loop with an EKF per target.

pub mod assignment;
pub mod error;
pub mod matkernel;
pub mod observability;
pub mod score;
pub mod setfunc;
pub mod sim;
pub mod tracking;

pub use assignment::{Assignment, PairTriple};
pub use error::{Error, Result};
pub use matkernel::{Sym2, TallMatrix, Vec2};
pub use observability::{Measure, MeasureKind, Sensor, SensorId, TargetId, TargetState};
pub use score::Score;
pub use setfunc::ValueOracle;
pub use tracking::TrackState;

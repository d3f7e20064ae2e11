//! Observability matrices of a range-only sensor network and the measures
//! computed from them.
//!
//! For a target at `p` observed by sensors `s_1 < … < s_N`, the relative-state
//! matrix `O(p)` stacks the rows `p − p_{s_i}`. When the target's control `u`
//! is known, the full matrix `O(p, u)` appends `u` as one more row. Control
//! rows are in meters per second with a one-second step, so they share units
//! with the position rows.
//!
//! Every measure is computed on the 2×2 Gram `OᵀO`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{self, gram, gram_det, gram_eigenvalues, TallMatrix, Vec2, ABS_FLOOR};
use crate::score::Score;

/// Relative eigenvalue tolerance for the rank measure.
pub const RANK_REL_TOL: f64 = 1e-9;

/// `det ≤ DET_REL_FLOOR · max(tr², ABS_FLOOR)` is treated as singular.
pub const DET_REL_FLOOR: f64 = 1e-12;

/// Slack allowed on `‖u‖ ≤ u_max` before a control is rejected.
const CONTROL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SensorId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TargetId(pub u32);

impl fmt::Display for SensorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensor {
    pub id: SensorId,
    pub position: Vec2,
}

impl Sensor {
    pub fn new(id: u32, x: f64, y: f64) -> Self {
        Sensor { id: SensorId(id), position: Vec2::new(x, y) }
    }
}

/// What the assignment layer knows about a target at one instant.
///
/// `control` is only consulted by measures on the full matrix `O(p, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub id: TargetId,
    pub position: Vec2,
    pub u_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<Vec2>,
}

impl TargetState {
    pub fn new(id: u32, x: f64, y: f64, u_max: f64) -> Self {
        TargetState { id: TargetId(id), position: Vec2::new(x, y), u_max, control: None }
    }

    pub fn with_control(mut self, control: Vec2) -> Self {
        self.control = Some(control);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// `σ_min(O(p)) / sqrt(σ_max(O(p))² + u_max²)`; needs no control.
    InvCondLowerBound,
    /// `σ_min / σ_max` of the selected matrix.
    InvCondExact,
    Trace,
    Rank,
    LogDet,
}

/// A measure together with the matrix it is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Measure {
    pub kind: MeasureKind,
    /// Evaluate on `Oᵀ(p,u) O(p,u)` instead of `Oᵀ(p) O(p)`. Ignored by
    /// [`MeasureKind::InvCondLowerBound`].
    pub full_matrix: bool,
}

impl Measure {
    pub const fn relative(kind: MeasureKind) -> Self {
        Measure { kind, full_matrix: false }
    }

    pub const fn full(kind: MeasureKind) -> Self {
        Measure { kind, full_matrix: true }
    }

    pub fn needs_control(&self) -> bool {
        self.full_matrix && self.kind != MeasureKind::InvCondLowerBound
    }

    /// Trace and rank are monotone submodular on either matrix.
    pub fn is_monotone_submodular(&self) -> bool {
        matches!(self.kind, MeasureKind::Trace | MeasureKind::Rank)
    }
}

/// `O(p)`: one row `p_target − p_sensor` per sensor, in the given order.
pub fn relative_state_matrix(sensors: &[Sensor], target: &TargetState) -> Result<TallMatrix> {
    if sensors.is_empty() {
        return Err(Error::EmptySensorSet);
    }
    sensors
        .iter()
        .map(|s| {
            let row = target.position - s.position;
            if row.is_zero() {
                Err(Error::CoincidentPositions { sensor: s.id, target: target.id })
            } else {
                Ok(row)
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(TallMatrix::new)
}

/// `O(p, u)`: the relative rows followed by the control row.
pub fn full_observability_matrix(rel: &TallMatrix, control: Vec2) -> TallMatrix {
    let mut full = rel.clone();
    full.push(control);
    full
}

/// Inverse condition number `σ_min / σ_max` in `[0, 1]`.
pub fn inv_condition_number(m: &TallMatrix) -> Result<f64> {
    let (lo, hi) = gram_eigenvalues(m);
    if hi <= 0.0 {
        return Err(Error::DegenerateMatrix);
    }
    Ok((lo / hi).sqrt())
}

/// Lower bound on the inverse condition number of `O(p, u)` over every control
/// with `‖u‖ ≤ u_max`, using only `O(p)`.
pub fn inv_cond_lower_bound(rel: &TallMatrix, u_max: f64) -> Result<f64> {
    if rel.is_empty() {
        return Err(Error::EmptySensorSet);
    }
    let (lo, hi) = gram_eigenvalues(rel);
    let denom = hi + u_max * u_max;
    if denom <= 0.0 {
        return Err(Error::DegenerateMatrix);
    }
    Ok((lo / denom).sqrt())
}

fn checked_control(target: &TargetState) -> Result<Vec2> {
    let u = target.control.ok_or(Error::ControlRequired(target.id))?;
    let norm = u.norm();
    if norm > target.u_max * (1.0 + CONTROL_SLACK) + CONTROL_SLACK {
        return Err(Error::ControlExceedsLimit { target: target.id, norm, u_max: target.u_max });
    }
    Ok(u)
}

fn log_det(m: &TallMatrix) -> Score {
    let tr = gram(m).trace();
    let det = gram_det(m);
    if det <= DET_REL_FLOOR * (tr * tr).max(ABS_FLOOR) {
        Score::NEG_INF
    } else {
        Score::finite(det.ln())
    }
}

/// ω(sensors, target). The empty set scores zero under every measure.
pub fn measure_value(measure: Measure, sensors: &[Sensor], target: &TargetState) -> Result<Score> {
    if sensors.is_empty() {
        if measure.needs_control() {
            checked_control(target)?;
        }
        return Ok(Score::ZERO);
    }
    let rel = relative_state_matrix(sensors, target)?;
    if measure.kind == MeasureKind::InvCondLowerBound {
        return inv_cond_lower_bound(&rel, target.u_max).map(Score::finite);
    }
    let m = if measure.full_matrix { full_observability_matrix(&rel, checked_control(target)?) } else { rel };
    let value = match measure.kind {
        MeasureKind::InvCondLowerBound => unreachable!(),
        MeasureKind::InvCondExact => Score::finite(inv_condition_number(&m)?),
        MeasureKind::Trace => Score::finite(gram(&m).trace()),
        MeasureKind::Rank => Score::finite(matkernel::numerical_rank(gram(&m), RANK_REL_TOL) as f64),
        MeasureKind::LogDet => log_det(&m),
    };
    Ok(value)
}

//! Sensor-to-target assignment under the partition constraint: every sensor
//! serves at most one target.
//!
//! * [`greedy_general`]: locally greedy welfare maximization, ½-approximate
//!   for monotone submodular measures.
//! * [`greedy_pairs`]: repeated best-triple selection giving each target
//!   exactly two sensors, ⅓-approximate for any nonnegative measure.
//! * [`brute_force_pairs`] / [`brute_force_general`]: exhaustive optima.
//! * [`relaxed_pairs_mwpbm`]: pairs may share sensors across targets; its
//!   optimum upper-bounds the non-overlapping one.

mod exact;
mod greedy;
pub mod lap;

use std::collections::BTreeSet;

use serde::Serialize;

pub use exact::{
    brute_force_general, brute_force_pairs, pair_assignment_count, partition_count, relaxed_pairs_mwpbm,
    RelaxedMatching, DEFAULT_BRUTE_FORCE_CAP,
};
pub use greedy::{greedy_general, greedy_pairs, greedy_pairs_with_picks};

use crate::error::Result;
use crate::observability::{SensorId, TargetId};
use crate::score::Score;
use crate::setfunc::ValueOracle;

/// One `(sensor_a, sensor_b, target)` choice with `sensor_a < sensor_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTriple {
    pub sensor_a: SensorId,
    pub sensor_b: SensorId,
    pub target: TargetId,
    pub value: Score,
}

/// Per-target sensor groups and their summed value.
///
/// Groups are listed in ascending target order and every target of the
/// instance appears, possibly with an empty group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    groups: Vec<(TargetId, Vec<SensorId>)>,
    values: Vec<Score>,
    objective: Score,
}

impl Assignment {
    /// Builds an assignment from groups whose values are already known.
    pub(crate) fn from_parts(mut entries: Vec<(TargetId, Vec<SensorId>, Score)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut groups = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (t, mut sensors, v) in entries {
            sensors.sort_unstable();
            groups.push((t, sensors));
            values.push(v);
        }
        let objective = values.iter().copied().sum();
        Assignment { groups, values, objective }
    }

    /// Evaluates explicit groups through the oracle.
    pub fn evaluate(oracle: &ValueOracle, groups: Vec<(TargetId, Vec<SensorId>)>) -> Result<Self> {
        let entries =
            groups.into_iter().map(|(t, s)| oracle.value(&s, t).map(|v| (t, s, v))).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(entries))
    }

    pub fn groups(&self) -> &[(TargetId, Vec<SensorId>)] {
        &self.groups
    }

    pub fn values(&self) -> &[Score] {
        &self.values
    }

    pub fn objective(&self) -> Score {
        self.objective
    }

    /// True when some group is singular under the measure.
    pub fn is_contaminated(&self) -> bool {
        self.objective.is_contaminated()
    }

    pub fn sensors_of(&self, target: TargetId) -> &[SensorId] {
        self.groups.iter().find(|(t, _)| *t == target).map(|(_, s)| s.as_slice()).unwrap_or(&[])
    }

    pub fn value_of(&self, target: TargetId) -> Option<Score> {
        self.groups.iter().position(|(t, _)| *t == target).map(|i| self.values[i])
    }

    pub fn target_of(&self, sensor: SensorId) -> Option<TargetId> {
        self.groups.iter().find(|(_, s)| s.contains(&sensor)).map(|(t, _)| *t)
    }

    pub fn assigned_count(&self) -> usize {
        self.groups.iter().map(|(_, s)| s.len()).sum()
    }

    /// Every sensor appears in at most one group and groups are ascending.
    pub fn is_partition(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.groups.iter().all(|(_, s)| s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|id| seen.insert(*id)))
    }

    pub fn unassigned(&self, all: &[SensorId]) -> Vec<SensorId> {
        all.iter().copied().filter(|s| self.target_of(*s).is_none()).collect()
    }

    /// Re-derives the objective from the oracle.
    pub fn recompute_objective(&self, oracle: &ValueOracle) -> Result<Score> {
        let mut total = Score::ZERO;
        for (t, s) in &self.groups {
            total = total + oracle.value(s, *t)?;
        }
        Ok(total)
    }
}

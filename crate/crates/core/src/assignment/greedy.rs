use crate::error::{Error, Result};
use crate::observability::SensorId;
use crate::score::Score;
use crate::setfunc::ValueOracle;

use super::{Assignment, PairTriple};

/// Locally greedy assignment for the general (any group size) problem.
///
/// Sensors are visited in ascending id order. Each goes to the target with the
/// largest marginal gain `ω(σ(t) ∪ {s}, t) − ω(σ(t), t)`, lowest target id on
/// ties, and stays unassigned when even the best gain is negative.
pub fn greedy_general(oracle: &ValueOracle) -> Result<Assignment> {
    let targets = oracle.target_ids();
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let mut groups: Vec<Vec<SensorId>> = vec![Vec::new(); targets.len()];
    let mut values = targets.iter().map(|&t| oracle.value(&[], t)).collect::<Result<Vec<_>>>()?;

    for s in oracle.sensor_ids() {
        let mut best: Option<(usize, Score, Score)> = None;
        for (k, &t) in targets.iter().enumerate() {
            let mut candidate = groups[k].clone();
            candidate.push(s);
            let v = oracle.value(&candidate, t)?;
            let gain = v - values[k];
            if best.is_none_or(|(_, g, _)| gain > g) {
                best = Some((k, gain, v));
            }
        }
        if let Some((k, gain, v)) = best {
            if gain >= Score::ZERO {
                groups[k].push(s);
                values[k] = v;
            }
        }
    }

    Ok(Assignment::from_parts(targets.into_iter().zip(groups).zip(values).map(|((t, g), v)| (t, g, v)).collect()))
}

/// Greedy non-overlapping pair assignment.
///
/// Runs one round per target. Each round scans every remaining
/// `(s_i, s_j, t_l)` with `i < j` in lexicographic order, keeps the first
/// maximum, and retires both sensors and the target. Needs `N ≥ 2L`.
pub fn greedy_pairs(oracle: &ValueOracle) -> Result<Assignment> {
    greedy_pairs_with_picks(oracle).map(|(a, _)| a)
}

/// [`greedy_pairs`] that also returns the triples in the order they were picked.
pub fn greedy_pairs_with_picks(oracle: &ValueOracle) -> Result<(Assignment, Vec<PairTriple>)> {
    let mut sensors = oracle.sensor_ids();
    let mut targets = oracle.target_ids();
    if sensors.len() < 2 * targets.len() {
        return Err(Error::InsufficientSensors { available: sensors.len(), needed: 2 * targets.len() });
    }

    let mut picks = Vec::with_capacity(targets.len());
    while !targets.is_empty() {
        let mut best: Option<(usize, usize, usize, Score)> = None;
        for i in 0..sensors.len() {
            for j in i + 1..sensors.len() {
                for (l, &t) in targets.iter().enumerate() {
                    let v = oracle.pair_value(sensors[i], sensors[j], t)?;
                    if best.is_none_or(|(.., b)| v > b) {
                        best = Some((i, j, l, v));
                    }
                }
            }
        }
        let (i, j, l, value) = best.expect("at least one pair and one target remain");
        picks.push(PairTriple { sensor_a: sensors[i], sensor_b: sensors[j], target: targets[l], value });
        // j > i, so removing j first keeps i valid.
        sensors.remove(j);
        sensors.remove(i);
        targets.remove(l);
    }

    let assignment =
        Assignment::from_parts(picks.iter().map(|p| (p.target, vec![p.sensor_a, p.sensor_b], p.value)).collect());
    Ok((assignment, picks))
}

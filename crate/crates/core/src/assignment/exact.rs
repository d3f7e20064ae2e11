use crate::error::{Error, Result};
use crate::observability::{SensorId, TargetId};
use crate::score::Score;
use crate::setfunc::ValueOracle;

use super::lap;
use super::{Assignment, PairTriple};

/// Enumeration cap for the exhaustive solvers.
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 100_000_000;

fn choose2(n: usize) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

/// `∏_{l<L} C(N − 2l, 2)`: non-overlapping pair assignments for labelled
/// targets. Zero when `N < 2L`.
pub fn pair_assignment_count(n_sensors: usize, n_targets: usize) -> u128 {
    if n_sensors < 2 * n_targets {
        return 0;
    }
    (0..n_targets).fold(1u128, |acc, l| acc.saturating_mul(choose2(n_sensors - 2 * l)))
}

/// `(L + 1)^N`: every sensor picks a target or stays idle.
pub fn partition_count(n_sensors: usize, n_targets: usize) -> u128 {
    (0..n_sensors).fold(1u128, |acc, _| acc.saturating_mul(n_targets as u128 + 1))
}

/// Exact optimum of the non-overlapping pair problem by enumeration.
///
/// Targets are filled in ascending id order, each from the lexicographically
/// ordered pairs of still-free sensors. The first maximum found wins, so ties
/// resolve to the lexicographically smallest encoding.
pub fn brute_force_pairs(oracle: &ValueOracle, cap: u128) -> Result<Assignment> {
    let sensors = oracle.sensor_ids();
    let targets = oracle.target_ids();
    let n = sensors.len();
    if n < 2 * targets.len() {
        return Err(Error::InsufficientSensors { available: n, needed: 2 * targets.len() });
    }
    let cases = pair_assignment_count(n, targets.len());
    if cases > cap {
        return Err(Error::InstanceTooLarge { cases, cap });
    }

    // table[l][i][j] = ω(s_i, s_j, t_l) for i < j
    let mut table = vec![vec![vec![Score::ZERO; n]; n]; targets.len()];
    for (l, &t) in targets.iter().enumerate() {
        for i in 0..n {
            for j in i + 1..n {
                table[l][i][j] = oracle.pair_value(sensors[i], sensors[j], t)?;
            }
        }
    }

    struct Search<'a> {
        table: &'a [Vec<Vec<Score>>],
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
        best: Option<(Score, Vec<(usize, usize)>)>,
    }

    impl Search<'_> {
        fn descend(&mut self, l: usize, acc: Score) {
            if l == self.table.len() {
                if self.best.as_ref().is_none_or(|(b, _)| acc > *b) {
                    self.best = Some((acc, self.current.clone()));
                }
                return;
            }
            let n = self.used.len();
            for i in 0..n {
                if self.used[i] {
                    continue;
                }
                self.used[i] = true;
                for j in i + 1..n {
                    if self.used[j] {
                        continue;
                    }
                    self.used[j] = true;
                    self.current.push((i, j));
                    self.descend(l + 1, acc + self.table[l][i][j]);
                    self.current.pop();
                    self.used[j] = false;
                }
                self.used[i] = false;
            }
        }
    }

    let mut search = Search { table: &table, used: vec![false; n], current: Vec::new(), best: None };
    search.descend(0, Score::ZERO);
    let (_, pairs) = search.best.unwrap_or_default();
    Ok(Assignment::from_parts(
        targets
            .iter()
            .zip(pairs)
            .enumerate()
            .map(|(l, (&t, (i, j)))| (t, vec![sensors[i], sensors[j]], table[l][i][j]))
            .collect(),
    ))
}

/// Exact optimum of the general problem by enumerating all `(L + 1)^N`
/// sensor-to-target maps (including "unassigned").
pub fn brute_force_general(oracle: &ValueOracle, cap: u128) -> Result<Assignment> {
    let sensors = oracle.sensor_ids();
    let targets = oracle.target_ids();
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let cases = partition_count(sensors.len(), targets.len());
    if cases > cap {
        return Err(Error::InstanceTooLarge { cases, cap });
    }

    let options = targets.len() + 1;
    let mut choice = vec![0usize; sensors.len()];
    let mut best: Option<(Score, Vec<usize>)> = None;
    for _ in 0..cases {
        let mut groups: Vec<Vec<SensorId>> = vec![Vec::new(); targets.len()];
        for (k, &c) in choice.iter().enumerate() {
            if c > 0 {
                groups[c - 1].push(sensors[k]);
            }
        }
        let mut total = Score::ZERO;
        for (g, &t) in groups.iter().zip(&targets) {
            total = total + oracle.value(g, t)?;
        }
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, choice.clone()));
        }
        // Odometer with the last sensor varying fastest.
        for digit in choice.iter_mut().rev() {
            *digit += 1;
            if *digit < options {
                break;
            }
            *digit = 0;
        }
    }

    let (_, choice) = best.expect("at least one map is enumerated");
    let mut groups: Vec<(TargetId, Vec<SensorId>)> = targets.iter().map(|&t| (t, Vec::new())).collect();
    for (k, &c) in choice.iter().enumerate() {
        if c > 0 {
            groups[c - 1].1.push(sensors[k]);
        }
    }
    Assignment::evaluate(oracle, groups)
}

/// Optimum of the relaxed pair problem, where distinct targets need distinct
/// pairs but a sensor may serve several targets.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedMatching {
    pub upper_bound: Score,
    /// One triple per target, ascending by target id.
    pub triples: Vec<PairTriple>,
}

/// Solves the relaxed pair problem as a maximum-weight bipartite matching
/// between targets and all `C(N, 2)` sensor pairs that saturates the targets.
pub fn relaxed_pairs_mwpbm(oracle: &ValueOracle) -> Result<RelaxedMatching> {
    let sensors = oracle.sensor_ids();
    let targets = oracle.target_ids();
    let n = sensors.len();
    let pair_count = choose2(n);
    if n < 2 || pair_count < targets.len() as u128 {
        let needed = (2..).find(|&k| choose2(k) >= targets.len() as u128).unwrap_or(2);
        return Err(Error::InsufficientSensors { available: n, needed });
    }

    let pairs: Vec<(SensorId, SensorId)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (sensors[i], sensors[j])).collect();
    let mut weights = Vec::with_capacity(targets.len());
    for &t in &targets {
        let row = pairs.iter().map(|&(a, b)| oracle.pair_value(a, b, t)).collect::<Result<Vec<_>>>()?;
        weights.push(row);
    }
    let costs: Vec<Vec<Score>> = weights.iter().map(|row| row.iter().map(|&w| -w).collect()).collect();
    let cols = lap::solve_min(&costs);

    let triples: Vec<PairTriple> = targets
        .iter()
        .zip(&cols)
        .enumerate()
        .map(|(l, (&t, &c))| PairTriple { sensor_a: pairs[c].0, sensor_b: pairs[c].1, target: t, value: weights[l][c] })
        .collect();
    let upper_bound = triples.iter().map(|p| p.value).sum();
    Ok(RelaxedMatching { upper_bound, triples })
}

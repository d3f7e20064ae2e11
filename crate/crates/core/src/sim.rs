//! Scenarios, the per-timestep assign → move → sense → filter loop, and the
//! batch experiments built on it.
//!
//! Everything is driven by explicit seeds. Experiments derive one RNG stream
//! per trial from `(master_seed, trial_key)` so trials can run in parallel
//! without changing results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{
    brute_force_pairs, greedy_general, greedy_pairs, pair_assignment_count, relaxed_pairs_mwpbm, Assignment,
};
use crate::error::{Error, Result};
use crate::matkernel::{Sym2, Vec2};
use crate::observability::{Measure, MeasureKind, Sensor, SensorId, TargetId, TargetState};
use crate::score::Score;
use crate::setfunc::ValueOracle;
use crate::tracking::{ekf_predict, ekf_update, half_squared_range, Measurement, TrackState};

/// How a target moves. Every step the target heads for its next reference
/// point with speed clipped to `u_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Motion {
    Stationary,
    /// Reference point advances by `angular_rate · dt` radians per step,
    /// starting from the target's bearing about `center`.
    Circle {
        center: Vec2,
        radius: f64,
        angular_rate: f64,
    },
    /// Visits the points in order; with `cyclic` it starts over at the end.
    Waypoints {
        points: Vec<Vec2>,
        #[serde(default)]
        cyclic: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub id: TargetId,
    pub initial: Vec2,
    pub u_max: f64,
    pub motion: Motion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn square(size: f64) -> Self {
        Bounds { min: Vec2::ZERO, max: Vec2::new(size, size) }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }
}

/// Filter and sensing noise. The defaults make desk-scale runs converge
/// within about a hundred steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Variance of the half-squared-range measurement noise (m⁴).
    pub measurement_var: f64,
    /// Initial covariance is `initial_cov · I`.
    pub initial_cov: f64,
    /// Per-axis variance of the initial estimate's offset from the truth.
    pub initial_mean_var: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams { measurement_var: 1.0, initial_cov: 4.0, initial_mean_var: 2.0 }
    }
}

fn default_dt() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub sensors: Vec<Sensor>,
    pub targets: Vec<TargetSpec>,
    pub bounds: Bounds,
    pub horizon: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub seed: u64,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidScenario(msg.into())
}

impl Scenario {
    /// Checks every scenario invariant; messages name the offending field.
    pub fn validate(&self) -> Result<()> {
        let b = &self.bounds;
        if !(b.min.is_finite() && b.max.is_finite() && b.min.x < b.max.x && b.min.y < b.max.y) {
            return Err(invalid("bounds: min must be finite and strictly below max"));
        }
        if self.horizon < 1 {
            return Err(invalid("horizon: must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt: must be positive"));
        }
        let n = &self.noise;
        if !(n.measurement_var > 0.0 && n.initial_cov > 0.0 && n.initial_mean_var >= 0.0) {
            return Err(invalid("noise: variances must be positive"));
        }
        if self.sensors.is_empty() {
            return Err(invalid("sensors: at least one sensor is required"));
        }
        if self.targets.is_empty() {
            return Err(invalid("targets: at least one target is required"));
        }
        for (i, s) in self.sensors.iter().enumerate() {
            if !s.position.is_finite() || !b.contains(s.position) {
                return Err(invalid(format!("sensors[{i}].position: outside bounds")));
            }
            for other in &self.sensors[..i] {
                if other.id == s.id {
                    return Err(invalid(format!("sensors[{i}].id: duplicate id {}", s.id.0)));
                }
                if other.position == s.position {
                    return Err(invalid(format!("sensors[{i}].position: coincides with sensor {}", other.id.0)));
                }
            }
        }
        for (i, t) in self.targets.iter().enumerate() {
            if self.targets[..i].iter().any(|o| o.id == t.id) {
                return Err(invalid(format!("targets[{i}].id: duplicate id {}", t.id.0)));
            }
            if !t.initial.is_finite() || !b.contains(t.initial) {
                return Err(invalid(format!("targets[{i}].initial: outside bounds")));
            }
            if !(t.u_max >= 0.0 && t.u_max.is_finite()) {
                return Err(invalid(format!("targets[{i}].u_max: must be finite and nonnegative")));
            }
            match &t.motion {
                Motion::Stationary => {}
                Motion::Circle { center, radius, angular_rate } => {
                    let r = Vec2::new(*radius, *radius);
                    if !(*radius > 0.0 && angular_rate.is_finite())
                        || !b.contains(*center - r)
                        || !b.contains(*center + r)
                    {
                        return Err(invalid(format!("targets[{i}].motion: circle must lie inside bounds")));
                    }
                }
                Motion::Waypoints { points, .. } => {
                    if points.is_empty() || !points.iter().all(|p| p.is_finite() && b.contains(*p)) {
                        return Err(invalid(format!("targets[{i}].motion: waypoints must be inside bounds")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sensor_ids(&self) -> Vec<SensorId> {
        self.sensors.iter().map(|s| s.id).collect()
    }
}

/// SplitMix64 finalizer; derives independent child seeds.
pub fn split_seed(master: u64, key: u64) -> u64 {
    let mut z = master ^ key.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn uniform_point(rng: &mut ChaCha8Rng, b: &Bounds) -> Vec2 {
    Vec2::new(rng.random_range(b.min.x..=b.max.x), rng.random_range(b.min.y..=b.max.y))
}

/// Uniform random sensors and stationary targets inside `bounds`.
///
/// Points that exactly coincide with an earlier sensor or target are
/// re-sampled.
pub fn random_scenario(n_sensors: usize, n_targets: usize, bounds: Bounds, u_max: f64, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken: Vec<Vec2> = Vec::with_capacity(n_sensors + n_targets);
    let mut fresh = |rng: &mut ChaCha8Rng| loop {
        let p = uniform_point(rng, &bounds);
        if !taken.contains(&p) {
            taken.push(p);
            return p;
        }
    };
    let sensors = (0..n_sensors).map(|i| Sensor { id: SensorId(i as u32), position: fresh(&mut rng) }).collect();
    let targets = (0..n_targets)
        .map(|i| TargetSpec { id: TargetId(i as u32), initial: fresh(&mut rng), u_max, motion: Motion::Stationary })
        .collect();
    Scenario { sensors, targets, bounds, horizon: 100, dt: 1.0, noise: NoiseParams::default(), seed }
}

/// True position and motion bookkeeping for one target.
#[derive(Debug, Clone)]
struct TargetTruth {
    spec: TargetSpec,
    position: Vec2,
    step: usize,
    waypoint: usize,
    phase: f64,
}

impl TargetTruth {
    fn new(spec: &TargetSpec) -> Self {
        let phase = match &spec.motion {
            Motion::Circle { center, .. } => {
                let d = spec.initial - *center;
                d.y.atan2(d.x)
            }
            _ => 0.0,
        };
        TargetTruth { spec: spec.clone(), position: spec.initial, step: 0, waypoint: 0, phase }
    }

    fn reference(&self, dt: f64) -> Vec2 {
        match &self.spec.motion {
            Motion::Stationary => self.position,
            Motion::Circle { center, radius, angular_rate } => {
                let theta = self.phase + angular_rate * dt * (self.step + 1) as f64;
                *center + Vec2::new(theta.cos(), theta.sin()) * *radius
            }
            Motion::Waypoints { points, .. } => points[self.waypoint.min(points.len() - 1)],
        }
    }

    /// Velocity applied over the next step, with `‖u‖ ≤ u_max`.
    fn control(&self, dt: f64) -> Vec2 {
        ((self.reference(dt) - self.position) * (1.0 / dt)).clamp_norm(self.spec.u_max)
    }

    fn advance(&mut self, dt: f64) {
        let u = self.control(dt);
        let reference = self.reference(dt);
        self.position = self.position + u * dt;
        if let Motion::Waypoints { points, cyclic } = &self.spec.motion {
            if (reference - self.position).norm() <= 1e-12 {
                self.waypoint += 1;
                if *cyclic && self.waypoint >= points.len() {
                    self.waypoint = 0;
                }
            }
        }
        self.step += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    GreedyGeneral,
    GreedyPairs,
}

impl Solver {
    pub fn solve(&self, oracle: &ValueOracle) -> Result<Assignment> {
        match self {
            Solver::GreedyGeneral => greedy_general(oracle),
            Solver::GreedyPairs => greedy_pairs(oracle),
        }
    }

    /// Rejects instances the solver cannot handle before any work is done.
    pub fn check(&self, n_sensors: usize, n_targets: usize) -> Result<()> {
        match self {
            Solver::GreedyPairs if n_sensors < 2 * n_targets => {
                Err(Error::InsufficientSensors { available: n_sensors, needed: 2 * n_targets })
            }
            _ if n_targets == 0 => Err(Error::EmptyTargets),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    /// 1-based timestep.
    pub step: usize,
    pub target: TargetId,
    pub truth: Vec2,
    pub estimate: TrackState,
    pub assigned: Vec<SensorId>,
    /// ω of the assigned group, evaluated on the estimate used for assignment.
    pub measure_value: Score,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialRecord {
    pub target: TargetId,
    pub truth: Vec2,
    pub estimate: TrackState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunLog {
    pub initial: Vec<InitialRecord>,
    /// `horizon × L` records, step-major, ascending target id within a step.
    pub records: Vec<StepRecord>,
    /// Assignment objective per step.
    pub objectives: Vec<Score>,
}

impl RunLog {
    pub fn last_step(&self) -> impl Iterator<Item = &StepRecord> {
        let last = self.records.last().map(|r| r.step);
        self.records.iter().filter(move |r| Some(r.step) == last)
    }

    pub fn records_for(&self, target: TargetId) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(move |r| r.target == target)
    }
}

/// Simulates the scenario with assignments recomputed every step from the
/// current estimates.
pub fn run(scenario: &Scenario, solver: Solver, measure: Measure) -> Result<RunLog> {
    scenario.validate()?;
    solver.check(scenario.sensors.len(), scenario.targets.len())?;

    let dt = scenario.dt;
    let noise = scenario.noise;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let offset = Normal::new(0.0, noise.initial_mean_var.sqrt()).expect("finite variance");
    let sensing = Normal::new(0.0, noise.measurement_var.sqrt()).expect("finite variance");

    let mut specs = scenario.targets.clone();
    specs.sort_by_key(|t| t.id);
    let mut sensors = scenario.sensors.clone();
    sensors.sort_by_key(|s| s.id);

    let mut truths: Vec<TargetTruth> = specs.iter().map(TargetTruth::new).collect();
    let mut estimates: Vec<TrackState> = truths
        .iter()
        .map(|t| {
            let jitter = Vec2::new(offset.sample(&mut rng), offset.sample(&mut rng));
            TrackState::new(t.position + jitter, Sym2::scaled_identity(noise.initial_cov))
        })
        .collect();
    let initial = truths
        .iter()
        .zip(&estimates)
        .map(|(t, e)| InitialRecord { target: t.spec.id, truth: t.position, estimate: *e })
        .collect();

    let mut records = Vec::with_capacity(scenario.horizon * specs.len());
    let mut objectives = Vec::with_capacity(scenario.horizon);
    for step in 1..=scenario.horizon {
        let believed: Vec<TargetState> = truths
            .iter()
            .zip(&estimates)
            .map(|(t, e)| TargetState {
                id: t.spec.id,
                position: e.mean,
                u_max: t.spec.u_max,
                control: measure.needs_control().then(|| t.control(dt)),
            })
            .collect();
        let oracle = ValueOracle::new(measure, sensors.clone(), believed)?;
        let assignment = solver.solve(&oracle)?;
        objectives.push(assignment.objective());

        for ((truth, estimate), spec) in truths.iter_mut().zip(estimates.iter_mut()).zip(&specs) {
            truth.advance(dt);
            let assigned = assignment.sensors_of(spec.id).to_vec();
            let measurements: Vec<Measurement> = assigned
                .iter()
                .map(|id| {
                    let s = sensors.iter().find(|s| s.id == *id).expect("assigned sensor exists");
                    Measurement {
                        sensor: *id,
                        value: half_squared_range(s.position, truth.position) + sensing.sample(&mut rng),
                        noise_var: noise.measurement_var,
                    }
                })
                .collect();
            let predicted = ekf_predict(estimate, spec.u_max, dt);
            *estimate = ekf_update(&predicted, &measurements, &sensors)?;
            records.push(StepRecord {
                step,
                target: spec.id,
                truth: truth.position,
                estimate: *estimate,
                assigned,
                measure_value: assignment.value_of(spec.id).unwrap_or(Score::ZERO),
            });
        }
    }
    Ok(RunLog { initial, records, objectives })
}

/// One row of the even-assignment experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenRow {
    pub n_sensors: usize,
    pub n_targets: usize,
    pub trials: usize,
    /// `N / L`.
    pub reference: f64,
    /// Sensors per target, averaged over all targets and trials.
    pub mean_count: f64,
    /// Per target index, the count averaged over trials.
    pub per_target_mean: Vec<f64>,
    /// `max_l |per_target_mean[l] − N/L|`.
    pub max_target_deviation: f64,
    /// `max` over trials and targets of `|count − N/L|`.
    pub max_trial_deviation: f64,
}

/// The world used by the random-placement experiments.
pub const EXPERIMENT_BOUNDS: f64 = 100.0;

/// Counts sensors per target under greedy general assignment with the trace
/// measure on random placements.
pub fn experiment_even_assignment(
    n_targets: usize,
    n_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<EvenRow>> {
    if n_targets == 0 {
        return Err(Error::EmptyTargets);
    }
    n_values
        .iter()
        .map(|&n| {
            let counts = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let trial_seed = split_seed(split_seed(seed, n as u64), trial as u64);
                    let scenario = random_scenario(n, n_targets, Bounds::square(EXPERIMENT_BOUNDS), 1.0, trial_seed);
                    let oracle = oracle_at_truth(&scenario, Measure::relative(MeasureKind::Trace))?;
                    let a = greedy_general(&oracle)?;
                    Ok(a.groups().iter().map(|(_, s)| s.len()).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            let reference = n as f64 / n_targets as f64;
            let denom = trials.max(1) as f64;
            let per_target_mean: Vec<f64> =
                (0..n_targets).map(|l| counts.iter().map(|c| c[l] as f64).sum::<f64>() / denom).collect();
            let mean_count = per_target_mean.iter().sum::<f64>() / n_targets as f64;
            let max_target_deviation = per_target_mean.iter().map(|m| (m - reference).abs()).fold(0.0, f64::max);
            let max_trial_deviation =
                counts.iter().flatten().map(|&c| (c as f64 - reference).abs()).fold(0.0, f64::max);
            Ok(EvenRow {
                n_sensors: n,
                n_targets,
                trials,
                reference,
                mean_count,
                per_target_mean,
                max_target_deviation,
                max_trial_deviation,
            })
        })
        .collect()
}

/// Builds an oracle that evaluates targets at their true initial positions.
pub fn oracle_at_truth(scenario: &Scenario, measure: Measure) -> Result<ValueOracle> {
    let targets = scenario
        .targets
        .iter()
        .map(|t| TargetState { id: t.id, position: t.initial, u_max: t.u_max, control: None })
        .collect();
    ValueOracle::new(measure, scenario.sensors.clone(), targets)
}

/// One trial of the ratio experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTrial {
    pub n_targets: usize,
    pub n_sensors: usize,
    pub trial: usize,
    pub greedy: Score,
    /// `None` when brute force exceeds the enumeration cap.
    pub opt: Option<Score>,
    pub mwpbm: Score,
    /// Oracle queries made by the greedy solver alone.
    pub greedy_queries: u64,
}

impl RatioTrial {
    pub fn greedy_over_opt(&self) -> Option<f64> {
        self.opt.and_then(|o| Some(self.greedy.value()? / o.value()?))
    }

    pub fn greedy_over_mwpbm(&self) -> Option<f64> {
        Some(self.greedy.value()? / self.mwpbm.value()?)
    }
}

/// Per-`L` averages of a ratio experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSummary {
    pub n_targets: usize,
    pub n_sensors: usize,
    pub trials: usize,
    pub mean_greedy: f64,
    pub mean_opt: Option<f64>,
    pub mean_mwpbm: f64,
    /// Mean of per-trial `ω(GREEDY)/ω(OPT)`.
    pub mean_ratio_opt: Option<f64>,
    /// Mean of per-trial `ω(GREEDY)/ω(MWPBM)`.
    pub mean_ratio_mwpbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub trials: Vec<RatioTrial>,
    pub summary: Vec<RatioSummary>,
}

/// Greedy vs. brute force vs. relaxed matching with `N = 2L` random sensors.
pub fn experiment_ratio(
    l_values: &[usize],
    trials: usize,
    measure: Measure,
    u_max: f64,
    seed: u64,
    brute_force_cap: u128,
) -> Result<RatioTable> {
    let mut all = Vec::new();
    let mut summary = Vec::new();
    for &l in l_values {
        let n = 2 * l;
        let rows = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let trial_seed = split_seed(split_seed(seed, l as u64), trial as u64);
                let scenario = random_scenario(n, l, Bounds::square(EXPERIMENT_BOUNDS), u_max, trial_seed);
                let oracle = oracle_at_truth(&scenario, measure)?;
                let greedy = greedy_pairs(&oracle)?.objective();
                let greedy_queries = oracle.queries();
                let mwpbm = relaxed_pairs_mwpbm(&oracle)?.upper_bound;
                let opt = if pair_assignment_count(n, l) <= brute_force_cap {
                    Some(brute_force_pairs(&oracle, brute_force_cap)?.objective())
                } else {
                    None
                };
                Ok(RatioTrial { n_targets: l, n_sensors: n, trial, greedy, opt, mwpbm, greedy_queries })
            })
            .collect::<Result<Vec<_>>>()?;
        summary.push(summarize(l, n, &rows));
        all.extend(rows);
    }
    Ok(RatioTable { trials: all, summary })
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v?;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

fn summarize(l: usize, n: usize, rows: &[RatioTrial]) -> RatioSummary {
    RatioSummary {
        n_targets: l,
        n_sensors: n,
        trials: rows.len(),
        mean_greedy: mean(rows.iter().map(|r| Some(r.greedy.to_f64()))).unwrap_or(f64::NAN),
        mean_opt: mean(rows.iter().map(|r| r.opt.map(|o| o.to_f64()))),
        mean_mwpbm: mean(rows.iter().map(|r| Some(r.mwpbm.to_f64()))).unwrap_or(f64::NAN),
        mean_ratio_opt: mean(rows.iter().map(RatioTrial::greedy_over_opt)),
        mean_ratio_mwpbm: mean(rows.iter().map(RatioTrial::greedy_over_mwpbm)).unwrap_or(f64::NAN),
    }
}

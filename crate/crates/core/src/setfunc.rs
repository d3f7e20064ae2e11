//! Set-function view of a measure: ω(subset, target) over a fixed sensor and
//! target population, plus an empirical lattice checker for monotonicity and
//! submodularity.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::observability::{measure_value, Measure, Sensor, SensorId, TargetId, TargetState};
use crate::score::Score;

/// Absolute slack before a lattice comparison counts as a violation.
pub const LATTICE_TOL: f64 = 1e-9;

/// Memoizing evaluator of ω(subset, target).
///
/// Subsets are canonicalized (sorted, deduplicated) before lookup, so any
/// permutation of the same sensors hits the same cache entry. Not `Sync`;
/// build one oracle per thread.
#[derive(Debug)]
pub struct ValueOracle {
    measure: Measure,
    sensors: Vec<Sensor>,
    targets: Vec<TargetState>,
    cache: RefCell<HashMap<(TargetId, Vec<SensorId>), Score>>,
    queries: Cell<u64>,
    evaluations: Cell<u64>,
}

impl ValueOracle {
    pub fn new(measure: Measure, mut sensors: Vec<Sensor>, mut targets: Vec<TargetState>) -> Result<Self> {
        sensors.sort_by_key(|s| s.id);
        targets.sort_by_key(|t| t.id);
        if let Some(w) = sensors.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidScenario(format!("duplicate sensor id {}", w[0].id)));
        }
        if let Some(w) = targets.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidScenario(format!("duplicate target id {}", w[0].id)));
        }
        Ok(ValueOracle {
            measure,
            sensors,
            targets,
            cache: RefCell::new(HashMap::new()),
            queries: Cell::new(0),
            evaluations: Cell::new(0),
        })
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.sensors
    }

    pub fn targets(&self) -> &[TargetState] {
        &self.targets
    }

    pub fn sensor_ids(&self) -> Vec<SensorId> {
        self.sensors.iter().map(|s| s.id).collect()
    }

    pub fn target_ids(&self) -> Vec<TargetId> {
        self.targets.iter().map(|t| t.id).collect()
    }

    pub fn sensor(&self, id: SensorId) -> Result<&Sensor> {
        self.sensors.binary_search_by_key(&id, |s| s.id).map(|i| &self.sensors[i]).map_err(|_| Error::UnknownSensor(id))
    }

    pub fn target(&self, id: TargetId) -> Result<&TargetState> {
        self.targets.binary_search_by_key(&id, |t| t.id).map(|i| &self.targets[i]).map_err(|_| Error::UnknownTarget(id))
    }

    /// Number of `value` calls, cached or not.
    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    /// Number of measure evaluations (cache misses).
    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    pub fn reset_counters(&self) {
        self.queries.set(0);
        self.evaluations.set(0);
    }

    pub fn value(&self, subset: &[SensorId], target: TargetId) -> Result<Score> {
        self.queries.set(self.queries.get() + 1);
        let mut key = subset.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&v) = self.cache.borrow().get(&(target, key.clone())) {
            return Ok(v);
        }
        let t = self.target(target)?;
        let members = key.iter().map(|&id| self.sensor(id).copied()).collect::<Result<Vec<_>>>()?;
        let v = measure_value(self.measure, &members, t)?;
        self.evaluations.set(self.evaluations.get() + 1);
        self.cache.borrow_mut().insert((target, key), v);
        Ok(v)
    }

    pub fn pair_value(&self, a: SensorId, b: SensorId, target: TargetId) -> Result<Score> {
        self.value(&[a, b], target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LatticeReport {
    /// Chains examined, including skipped ones.
    pub samples: u64,
    /// Chains where some value was singular and no comparison was made.
    pub skipped: u64,
    pub monotone_violations: u64,
    pub submodular_violations: u64,
    /// Largest amount by which either property failed; zero when none did.
    pub worst_violation: f64,
}

impl LatticeReport {
    pub fn is_clean(&self) -> bool {
        self.monotone_violations == 0 && self.submodular_violations == 0
    }

    /// Compares one chain `A ⊆ B`, `r ∉ B`.
    fn record(
        &mut self,
        oracle: &ValueOracle,
        target: TargetId,
        a: &[SensorId],
        b: &[SensorId],
        r: SensorId,
    ) -> Result<()> {
        self.samples += 1;
        let with = |set: &[SensorId]| {
            let mut v = set.to_vec();
            v.push(r);
            v
        };
        let fa = oracle.value(a, target)?;
        let far = oracle.value(&with(a), target)?;
        let fb = oracle.value(b, target)?;
        let fbr = oracle.value(&with(b), target)?;
        if ![fa, far, fb, fbr].iter().all(Score::is_finite) {
            self.skipped += 1;
            return Ok(());
        }
        let (fa, far, fb, fbr) = (fa.finite, far.finite, fb.finite, fbr.finite);

        let drop = (fa - far).max(fb - fbr);
        if drop > LATTICE_TOL {
            self.monotone_violations += 1;
            self.worst_violation = self.worst_violation.max(drop);
        }
        let excess = (fbr - fb) - (far - fa);
        if excess > LATTICE_TOL {
            self.submodular_violations += 1;
            self.worst_violation = self.worst_violation.max(excess);
        }
        Ok(())
    }
}

/// Samples `sample_count` random chains `A ⊆ B ⊆ S \ {r}` for one target.
///
/// `r` is uniform over the sensors, every other sensor joins `B` with
/// probability ½, and every member of `B` joins `A` with probability ½.
pub fn check_lattice(
    oracle: &ValueOracle,
    target: TargetId,
    sample_count: u64,
    rng_seed: u64,
) -> Result<LatticeReport> {
    oracle.target(target)?;
    let ids = oracle.sensor_ids();
    let mut report = LatticeReport::default();
    let Some(_) = ids.first() else {
        return Ok(report);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..sample_count {
        let r = *ids.choose(&mut rng).expect("nonempty");
        let b: Vec<SensorId> = ids.iter().copied().filter(|&s| s != r && rng.random_bool(0.5)).collect();
        let a: Vec<SensorId> = b.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        report.record(oracle, target, &a, &b, r)?;
    }
    Ok(report)
}

/// Largest sensor count accepted by [`check_lattice_exhaustive`].
pub const EXHAUSTIVE_LATTICE_MAX: usize = 12;

/// Visits every chain `A ⊆ B ⊆ S \ {r}`: `N · 3^(N−1)` of them.
pub fn check_lattice_exhaustive(oracle: &ValueOracle, target: TargetId) -> Result<LatticeReport> {
    oracle.target(target)?;
    let ids = oracle.sensor_ids();
    if ids.len() > EXHAUSTIVE_LATTICE_MAX {
        return Err(Error::InstanceTooLarge {
            cases: ids.len() as u128 * 3u128.pow(ids.len() as u32 - 1),
            cap: EXHAUSTIVE_LATTICE_MAX as u128 * 3u128.pow(EXHAUSTIVE_LATTICE_MAX as u32 - 1),
        });
    }
    let mut report = LatticeReport::default();
    for &r in &ids {
        let rest: Vec<SensorId> = ids.iter().copied().filter(|&s| s != r).collect();
        // Each remaining sensor is outside B, in B \ A, or in A.
        let chains = 3u64.pow(rest.len() as u32);
        for code in 0..chains {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            let mut c = code;
            for &s in &rest {
                match c % 3 {
                    1 => b.push(s),
                    2 => {
                        a.push(s);
                        b.push(s);
                    }
                    _ => {}
                }
                c /= 3;
            }
            report.record(oracle, target, &a, &b, r)?;
        }
    }
    Ok(report)
}

use std::path::PathBuf;

use obsassign::matkernel::Vec2;
use obsassign::sim::{
    experiment_even_assignment, experiment_ratio, random_scenario, run, split_seed, Bounds, Motion, NoiseParams,
    Scenario, Solver, TargetSpec,
};
use obsassign::tracking::mean_error;
use obsassign::{Measure, MeasureKind, Sensor, TargetId};

fn fig2() -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/fig2.json");
    let scenario: Scenario = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    scenario.validate().unwrap();
    scenario
}

#[test]
fn bundled_scenario_shape() {
    let s = fig2();
    assert_eq!(s.sensors.len(), 8);
    assert_eq!(s.targets.len(), 3);
    assert_eq!(s.horizon, 100);
    assert!(s.targets.iter().all(|t| t.u_max == 1.0 && matches!(t.motion, Motion::Circle { .. })));
}

#[test]
fn runs_are_bit_identical() {
    let s = fig2();
    for solver in [Solver::GreedyGeneral, Solver::GreedyPairs] {
        let m = Measure::relative(MeasureKind::Trace);
        assert_eq!(run(&s, solver, m).unwrap(), run(&s, solver, m).unwrap());
    }
}

#[test]
fn logged_runs_respect_constraints() {
    let s = fig2();
    for (solver, kind) in [
        (Solver::GreedyGeneral, MeasureKind::Trace),
        (Solver::GreedyPairs, MeasureKind::InvCondLowerBound),
        (Solver::GreedyPairs, MeasureKind::LogDet),
    ] {
        let log = run(&s, solver, Measure::relative(kind)).unwrap();
        assert_eq!(log.records.len(), 300);
        assert_eq!(log.objectives.len(), 100);
        for step in 1..=100 {
            let rows: Vec<_> = log.records.iter().filter(|r| r.step == step).collect();
            assert_eq!(rows.len(), 3);
            let mut used: Vec<_> = rows.iter().flat_map(|r| r.assigned.iter().copied()).collect();
            let total = used.len();
            used.sort_unstable();
            used.dedup();
            assert_eq!(used.len(), total, "sensor reused at step {step}");
            if solver == Solver::GreedyPairs {
                assert!(rows.iter().all(|r| r.assigned.len() == 2));
            }
        }
        for t in 0..3 {
            let mut prev = log.initial[t].truth;
            for r in log.records_for(TargetId(t as u32)) {
                assert!((r.truth - prev).norm() <= 1.0 + 1e-12);
                assert!(r.estimate.is_psd());
                prev = r.truth;
            }
        }
    }
}

#[test]
fn full_matrix_measures_run_with_planned_control() {
    let log = run(&fig2(), Solver::GreedyPairs, Measure::full(MeasureKind::InvCondExact)).unwrap();
    assert_eq!(log.records.len(), 300);
}

#[test]
fn stationary_targets_converge_monotonically() {
    let sensors = vec![
        Sensor::new(0, 0.0, 0.0),
        Sensor::new(1, 10.0, 0.0),
        Sensor::new(2, 0.0, 10.0),
        Sensor::new(3, 10.0, 10.0),
    ];
    let targets = vec![
        TargetSpec { id: TargetId(0), initial: Vec2::new(3.0, 4.0), u_max: 0.1, motion: Motion::Stationary },
        TargetSpec { id: TargetId(1), initial: Vec2::new(7.0, 6.5), u_max: 0.1, motion: Motion::Stationary },
    ];
    let scenario = Scenario {
        sensors,
        targets,
        bounds: Bounds::square(10.0),
        horizon: 40,
        dt: 1.0,
        noise: NoiseParams { measurement_var: 1e-12, initial_cov: 4.0, initial_mean_var: 2.0 },
        seed: 3,
    };
    let log = run(&scenario, Solver::GreedyPairs, Measure::relative(MeasureKind::InvCondLowerBound)).unwrap();
    for t in 0..2 {
        let errs: Vec<f64> = log.records_for(TargetId(t)).map(|r| mean_error(&r.estimate, r.truth)).collect();
        for w in errs[2..].windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "target {t}: {errs:?}");
        }
        assert!(*errs.last().unwrap() < 1e-3, "target {t}: {errs:?}");
    }
}

#[test]
fn random_positions_center_on_the_box() {
    let s = random_scenario(10_000, 1, Bounds::square(100.0), 1.0, 77);
    let n = s.sensors.len() as f64;
    let se = 100.0 / 12f64.sqrt() / n.sqrt();
    let mean = s.sensors.iter().fold(Vec2::ZERO, |acc, x| acc + x.position) * (1.0 / n);
    assert!((mean.x - 50.0).abs() <= 2.0 * se, "{mean:?}");
    assert!((mean.y - 50.0).abs() <= 2.0 * se, "{mean:?}");
}

#[test]
fn even_assignment_edge_cases() {
    let rows = experiment_even_assignment(1, &[7], 5, 1).unwrap();
    assert_eq!(rows[0].mean_count, 7.0);
    assert_eq!(rows[0].max_trial_deviation, 0.0);

    let rows = experiment_even_assignment(4, &[4], 5, 1).unwrap();
    assert!(rows[0].per_target_mean.iter().sum::<f64>() <= 4.0 + 1e-12);
}

#[test]
fn ratio_experiment_orders_objectives() {
    let m = Measure::relative(MeasureKind::InvCondLowerBound);
    let table = experiment_ratio(&[1, 2, 3], 10, m, 1.0, 4, 100_000_000).unwrap();
    assert_eq!(table.trials.len(), 30);
    for t in &table.trials {
        let opt = t.opt.unwrap();
        assert!(t.greedy <= opt && opt <= t.mwpbm);
        if t.n_targets == 1 {
            assert_eq!(t.greedy, opt);
            assert_eq!(opt, t.mwpbm);
        }
    }
    let capped = experiment_ratio(&[3], 2, m, 1.0, 4, 10).unwrap();
    assert!(capped.trials.iter().all(|t| t.opt.is_none()));
    assert_eq!(capped.summary[0].mean_ratio_opt, None);
}

#[test]
fn experiments_do_not_depend_on_thread_count() {
    let m = Measure::relative(MeasureKind::LogDet);
    let a = experiment_ratio(&[2, 3], 8, m, 1.0, 9, 100_000_000).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| experiment_ratio(&[2, 3], 8, m, 1.0, 9, 100_000_000).unwrap());
    assert_eq!(a, b);
    assert_ne!(split_seed(9, 2), split_seed(9, 3));
}

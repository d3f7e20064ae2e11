use obsassign::matkernel::{eig_sym2, Sym2, Vec2};
use obsassign::tracking::{ekf_predict, ekf_update, half_squared_range, mean_error, Measurement, TrackState, PSD_TOL};
use obsassign::{Sensor, SensorId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn exact(sensors: &[Sensor], truth: Vec2, noise_var: f64) -> Vec<Measurement> {
    sensors
        .iter()
        .map(|s| Measurement { sensor: s.id, value: half_squared_range(s.position, truth), noise_var })
        .collect()
}

fn psd() -> impl Strategy<Value = Sym2> {
    (0.01f64..10.0, 0.01f64..10.0, -1.0f64..1.0).prop_map(|(a, b, rho)| Sym2::new(a, 0.99 * rho * (a * b).sqrt(), b))
}

fn point() -> impl Strategy<Value = Vec2> {
    (0.0f64..20.0, 0.0f64..20.0).prop_map(|(x, y)| Vec2::new(x, y))
}

proptest! {
    #[test]
    fn covariance_stays_psd(
        cov in psd(),
        mean in point(),
        truth in point(),
        sensors in prop::collection::vec(point(), 0..5),
        noise_var in 1e-6f64..10.0,
        u_max in 0.0f64..3.0,
    ) {
        let sensors: Vec<Sensor> = sensors.iter().enumerate().map(|(i, p)| Sensor::new(i as u32, p.x, p.y)).collect();
        let mut state = TrackState::new(mean, cov);
        for _ in 0..10 {
            state = ekf_predict(&state, u_max, 1.0);
            prop_assert!(state.is_psd());
            state = ekf_update(&state, &exact(&sensors, truth, noise_var), &sensors).unwrap();
            prop_assert!(state.is_psd(), "{:?} eig {:?}", state.covariance, eig_sym2(state.covariance));
            prop_assert!(eig_sym2(state.covariance).0 >= -PSD_TOL);
        }
    }

    #[test]
    fn duplicated_measurement_never_adds_uncertainty(cov in psd(), mean in point(), s in point(), noise_var in 0.01f64..10.0) {
        prop_assume!((mean - s).norm() > 1e-3);
        let sensors = [Sensor::new(0, s.x, s.y)];
        let state = TrackState::new(mean, cov);
        let one = exact(&sensors, mean + Vec2::new(0.3, -0.2), noise_var);
        let two = [one[0], one[0]];
        let single = ekf_update(&state, &one, &sensors).unwrap().covariance;
        let double = ekf_update(&state, &two, &sensors).unwrap().covariance;
        // single − double must be PSD.
        let diff = single - double;
        let (lo, _) = eig_sym2(diff);
        prop_assert!(lo >= -1e-9 * single.trace(), "{diff:?}");
        let (s_lo, s_hi) = eig_sym2(single);
        let (d_lo, d_hi) = eig_sym2(double);
        prop_assert!(d_lo <= s_lo + 1e-9 * s_hi && d_hi <= s_hi + 1e-9 * s_hi);
    }
}

#[test]
fn repeated_updates_converge_on_stationary_target() {
    let sensors = [Sensor::new(0, 0.0, 0.0), Sensor::new(1, 10.0, 0.0), Sensor::new(2, 0.0, 10.0)];
    let truth = Vec2::new(4.0, 3.0);
    for pair in [[0usize, 1], [0, 2], [1, 2]] {
        let used = [sensors[pair[0]], sensors[pair[1]]];
        let mut state = TrackState::new(truth + Vec2::new(1.5, -1.0), Sym2::scaled_identity(4.0));
        // A small speed bound keeps the gain from collapsing after the first
        // linearized step.
        for _ in 0..50 {
            state = ekf_update(&ekf_predict(&state, 0.1, 1.0), &exact(&used, truth, 1e-8), &used).unwrap();
        }
        assert!(mean_error(&state, truth) < 1e-6, "pair {pair:?}: {}", mean_error(&state, truth));
    }
}

#[test]
fn exact_measurements_usually_improve_the_estimate() {
    let sensors = [Sensor::new(0, 0.0, 0.0), Sensor::new(1, 10.0, 0.0)];
    let offset = Normal::new(0.0, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let trials = 1000;
    let mut improved = 0;
    for _ in 0..trials {
        let truth = Vec2::new(5.0, 5.0);
        let prior = TrackState::new(
            truth + Vec2::new(offset.sample(&mut rng), offset.sample(&mut rng)),
            Sym2::scaled_identity(0.25),
        );
        let post = ekf_update(&prior, &exact(&sensors, truth, 1e-4), &sensors).unwrap();
        if mean_error(&post, truth) < mean_error(&prior, truth) {
            improved += 1;
        }
    }
    assert!(improved as f64 >= 0.95 * trials as f64, "{improved}/{trials}");
}

#[test]
fn tangent_direction_barely_shrinks_with_one_sensor() {
    let sensor = Sensor::new(0, 0.0, 0.0);
    let mean = Vec2::new(6.0, 8.0);
    let state = TrackState::new(mean, Sym2::IDENTITY);
    let meas = [Measurement { sensor: SensorId(0), value: half_squared_range(mean, sensor.position), noise_var: 1e-6 }];
    let post = ekf_update(&state, &meas, &[sensor]).unwrap();
    let (lo, hi) = eig_sym2(post.covariance);
    assert!(hi > 0.99 && hi <= 1.0 + 1e-12, "tangent eigenvalue {hi}");
    assert!(lo < 1e-6);
}

//! Position-only extended Kalman filter over half-squared-range measurements
//! `z = ½‖p_sensor − p_target‖²`.
//!
//! The measurement Jacobian row of sensor `i` is `(p − p_sᵢ)ᵀ`, the same row
//! the sensor contributes to `O(p)`.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{eig_sym2, Sym2, Vec2};
use crate::observability::{Sensor, SensorId};

/// Eigenvalues of a covariance above `-PSD_TOL` are rounding noise.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackState {
    pub mean: Vec2,
    pub covariance: Sym2,
}

impl TrackState {
    pub fn new(mean: Vec2, covariance: Sym2) -> Self {
        TrackState { mean, covariance }
    }

    pub fn is_psd(&self) -> bool {
        self.covariance.is_finite() && eig_sym2(self.covariance).0 >= -PSD_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub sensor: SensorId,
    /// Half the squared range, in m².
    pub value: f64,
    pub noise_var: f64,
}

/// Half-squared range between two points.
pub fn half_squared_range(a: Vec2, b: Vec2) -> f64 {
    0.5 * (a - b).norm_sq()
}

/// Random-walk prediction: the unknown control is zero-mean with per-axis
/// variance `(u_max·dt)²`.
pub fn ekf_predict(state: &TrackState, u_max: f64, dt: f64) -> TrackState {
    let q = (u_max * dt).powi(2);
    TrackState { mean: state.mean, covariance: state.covariance + Sym2::scaled_identity(q) }
}

fn to_matrix(s: Sym2) -> Matrix2<f64> {
    Matrix2::new(s.a11, s.a12, s.a12, s.a22)
}

/// Symmetrizes and clamps rounding-level negative eigenvalues.
fn to_psd_sym2(m: &Matrix2<f64>) -> Sym2 {
    let s = Sym2::new(m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let (lo, _) = eig_sym2(s);
    if (-PSD_TOL..0.0).contains(&lo) {
        Sym2::new(s.a11 - lo, s.a12, s.a22 - lo)
    } else {
        s
    }
}

/// One stacked EKF update with every measurement of the timestep.
///
/// Covariance uses the Joseph form `(I − KH) P (I − KH)ᵀ + K R Kᵀ`. An empty
/// measurement list returns the state unchanged.
pub fn ekf_update(state: &TrackState, measurements: &[Measurement], sensors: &[Sensor]) -> Result<TrackState> {
    if measurements.is_empty() {
        return Ok(*state);
    }
    let m = measurements.len();
    let mut h = DMatrix::<f64>::zeros(m, 2);
    let mut innovation = DVector::<f64>::zeros(m);
    let mut r = DMatrix::<f64>::zeros(m, m);
    for (k, meas) in measurements.iter().enumerate() {
        let sensor = sensors.iter().find(|s| s.id == meas.sensor).ok_or(Error::UnknownSensor(meas.sensor))?;
        let row = state.mean - sensor.position;
        h[(k, 0)] = row.x;
        h[(k, 1)] = row.y;
        innovation[k] = meas.value - half_squared_range(state.mean, sensor.position);
        r[(k, k)] = meas.noise_var;
    }

    let p = DMatrix::from_column_slice(2, 2, to_matrix(state.covariance).as_slice());
    let pht = &p * h.transpose();
    let s = &h * &pht + &r;
    let s_inv =
        s.cholesky().map(|c| c.inverse()).expect("innovation covariance is positive definite when noise_var > 0");
    let gain = &pht * s_inv;

    let correction = &gain * innovation;
    let mean = state.mean + Vec2::new(correction[0], correction[1]);

    let i_kh = DMatrix::<f64>::identity(2, 2) - &gain * &h;
    let joseph = &i_kh * &p * i_kh.transpose() + &gain * &r * gain.transpose();
    let cov = Matrix2::new(joseph[(0, 0)], joseph[(0, 1)], joseph[(1, 0)], joseph[(1, 1)]);
    Ok(TrackState { mean, covariance: to_psd_sym2(&cov) })
}

/// Euclidean distance between the estimate and the truth.
pub fn mean_error(state: &TrackState, truth: Vec2) -> f64 {
    (state.mean - truth).norm()
}

pub fn cov_trace(state: &TrackState) -> f64 {
    state.covariance.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn predict_adds_process_noise() {
        let s = TrackState::new(Vec2::ZERO, Sym2::IDENTITY);
        assert_eq!(ekf_predict(&s, 0.0, 1.0), s);

        let s = TrackState::new(Vec2::new(1.0, 2.0), Sym2::IDENTITY);
        let p = ekf_predict(&s, 1.0, 1.0);
        assert_eq!(p.mean, s.mean);
        assert_eq!(p.covariance, Sym2::scaled_identity(2.0));
        assert!(cov_trace(&ekf_predict(&s, 0.1, 0.5)) > cov_trace(&s));
    }

    #[test]
    fn update_without_measurements_is_identity() {
        let s = TrackState::new(Vec2::new(3.0, 1.0), Sym2::new(2.0, 0.1, 1.0));
        assert_eq!(ekf_update(&s, &[], &[]).unwrap(), s);
    }

    #[test]
    fn update_rejects_unknown_sensor() {
        let s = TrackState::new(Vec2::new(3.0, 1.0), Sym2::IDENTITY);
        let meas = [Measurement { sensor: SensorId(9), value: 1.0, noise_var: 1.0 }];
        assert_eq!(ekf_update(&s, &meas, &[Sensor::new(0, 0.0, 0.0)]), Err(Error::UnknownSensor(SensorId(9))));
    }

    #[test]
    fn single_sensor_leaves_tangent_direction_unconstrained() {
        let sensor = Sensor::new(0, 0.0, 0.0);
        let s = TrackState::new(Vec2::new(3.0, 4.0), Sym2::IDENTITY);
        let truth = Vec2::new(3.0, 4.0);
        let meas =
            [Measurement { sensor: sensor.id, value: half_squared_range(truth, sensor.position), noise_var: 1e-4 }];
        let post = ekf_update(&s, &meas, &[sensor]).unwrap();
        let tangent = Vec2::new(-4.0, 3.0) * (1.0 / 5.0);
        let radial = Vec2::new(3.0, 4.0) * (1.0 / 5.0);
        let tangent_var = post.covariance.quad(tangent);
        assert!(tangent_var > 0.99, "tangent variance {tangent_var}");
        assert!(post.covariance.quad(radial) < 1e-4);
    }

    #[test]
    fn mean_error_examples() {
        let s = TrackState::new(Vec2::ZERO, Sym2::IDENTITY);
        assert_eq!(mean_error(&s, Vec2::ZERO), 0.0);
        assert_eq!(mean_error(&s, Vec2::new(3.0, 4.0)), 5.0);
        let shift = Vec2::new(-7.5, 2.25);
        let moved = TrackState::new(s.mean + shift, s.covariance);
        assert_relative_eq!(mean_error(&moved, Vec2::new(3.0, 4.0) + shift), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn cov_trace_examples() {
        assert_eq!(cov_trace(&TrackState::new(Vec2::ZERO, Sym2::IDENTITY)), 2.0);
        assert_eq!(cov_trace(&TrackState::new(Vec2::ZERO, Sym2::ZERO)), 0.0);
        assert_eq!(cov_trace(&TrackState::new(Vec2::ZERO, Sym2::new(1.0, 0.0, 3.0))), 4.0);
    }
}

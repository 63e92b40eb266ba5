//! Unit quaternion utilities: scalar-first storage, Hamilton product, and the
//! exponential map used for attitude integration.

use crate::ad::Real;
use nalgebra::{Matrix3, Vector3, Vector4};

/// Threshold on the rotation angle below which the exponential map switches to
/// its second-order Taylor expansion.
pub const SMALL_ANGLE_EPS: f64 = 1e-8;

/// Identity quaternion `(1, 0, 0, 0)`.
pub fn quat_identity<T: Real>() -> Vector4<T> {
    Vector4::new(T::one(), T::zero(), T::zero(), T::zero())
}

/// Hamilton product `q1 * q2` (scalar-first).
pub fn quat_mul<T: Real>(q1: &Vector4<T>, q2: &Vector4<T>) -> Vector4<T> {
    let (w1, x1, y1, z1) = (q1[0], q1[1], q1[2], q1[3]);
    let (w2, x2, y2, z2) = (q2[0], q2[1], q2[2], q2[3]);
    Vector4::new(
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    )
}

pub fn quat_norm<T: Real>(q: &Vector4<T>) -> T {
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt()
}

pub fn quat_normalize<T: Real>(q: &Vector4<T>) -> Vector4<T> {
    let n = quat_norm(q);
    Vector4::new(q[0] / n, q[1] / n, q[2] / n, q[3] / n)
}

/// Exponential map taking a rotation vector (angular velocity times time step)
/// to a unit quaternion.
///
/// Below [`SMALL_ANGLE_EPS`] the trigonometric terms are replaced by their
/// second-order Taylor expansions, which keeps the map finite and smooth at zero.
pub fn quat_exp<T: Real>(phi: &Vector3<T>) -> Vector4<T> {
    let theta_sq = phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2];
    let theta = theta_sq.sqrt();
    let half = T::from_f64(0.5);
    let (w, k) = if theta.value() < SMALL_ANGLE_EPS {
        // cos(t/2) ~ 1 - t^2/8, sin(t/2)/t ~ 1/2 - t^2/48
        (
            T::one() - theta_sq * T::from_f64(0.125),
            half - theta_sq * T::from_f64(1.0 / 48.0),
        )
    } else {
        let half_theta = theta * half;
        ((half_theta).cos(), (half_theta).sin() / theta)
    };
    Vector4::new(w, phi[0] * k, phi[1] * k, phi[2] * k)
}

/// Rotation matrix of a quaternion. The quaternion is normalized internally, so
/// the result is a proper rotation for any nonzero input.
pub fn quat_to_rotation<T: Real>(q: &Vector4<T>) -> Matrix3<T> {
    let qn = quat_normalize(q);
    let (w, x, y, z) = (qn[0], qn[1], qn[2], qn[3]);
    let two = T::from_f64(2.0);
    let one = T::one();
    Matrix3::new(
        one - two * (y * y + z * z),
        two * (x * y - w * z),
        two * (x * z + w * y),
        two * (x * y + w * z),
        one - two * (x * x + z * z),
        two * (y * z - w * x),
        two * (x * z - w * y),
        two * (y * z + w * x),
        one - two * (x * x + y * y),
    )
}

/// Integrate a unit quaternion under a world-frame angular velocity for `dt`
/// seconds: `Exp(omega * dt) * q`, renormalized.
pub fn quat_exp_integrate(
    quat: &Vector4<f64>,
    omega: &Vector3<f64>,
    dt: f64,
) -> Vector4<f64> {
    let phi = omega * dt;
    let q_next = quat_mul(&quat_exp(&phi), quat);
    quat_normalize(&q_next)
}

/// Quaternion from yaw-pitch-roll angles (radians).
///
/// Yaw is positive nose-left (about world z up), pitch positive nose-up, roll
/// positive right-wing-down, applied in that order to the body frame
/// (x forward, y left, z up).
pub fn quat_from_ypr(yaw: f64, pitch: f64, roll: f64) -> Vector4<f64> {
    let qz = quat_exp(&Vector3::new(0.0, 0.0, yaw));
    let qy = quat_exp(&Vector3::new(0.0, -pitch, 0.0));
    let qx = quat_exp(&Vector3::new(roll, 0.0, 0.0));
    quat_normalize(&quat_mul(&quat_mul(&qz, &qy), &qx))
}

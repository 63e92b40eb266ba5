//! Small generic helpers over 3-vectors and 3x3 matrices.
//!
//! nalgebra's own methods for these mostly require `RealField`; the versions here
//! only need the [`Real`](crate::ad::Real) arithmetic surface so they work with
//! dual numbers.

use crate::ad::Real;
use nalgebra::{Matrix3, Vector3};

#[inline]
pub fn cross3<T: Real>(a: &Vector3<T>, b: &Vector3<T>) -> Vector3<T> {
    Vector3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

#[inline]
pub fn dot3<T: Real>(a: &Vector3<T>, b: &Vector3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3<T: Real>(v: &Vector3<T>) -> T {
    dot3(v, v).sqrt()
}

/// Skew-symmetric matrix `[v]_x` such that `[v]_x w = v x w`.
#[inline]
pub fn skew3<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    let z = T::zero();
    Matrix3::new(z, -v[2], v[1], v[2], z, -v[0], -v[1], v[0], z)
}

#[inline]
pub fn vec3_to<T: Real>(v: &Vector3<f64>) -> Vector3<T> {
    Vector3::new(T::from_f64(v[0]), T::from_f64(v[1]), T::from_f64(v[2]))
}

#[inline]
pub fn mat3_to<T: Real>(m: &Matrix3<f64>) -> Matrix3<T> {
    Matrix3::from_fn(|i, j| T::from_f64(m[(i, j)]))
}

/// Rotation about the x axis.
pub fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Rotation about the y axis.
pub fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Rotation about the z axis.
pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rodrigues rotation about a unit axis.
pub fn rot_axis_angle(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let k = skew3(axis);
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

//! Small fixed-size vector helpers, generic over [`Real`].

use crate::dual::Real;

pub type Vec3 = [f64; 3];
/// `m[i][a]` = derivative of component `i` along axis `a`.
pub type Mat3 = [[f64; 3]; 3];

#[inline]
pub fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm2<T: Real>(a: &[T; 3]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `a + s b`
#[inline]
pub fn axpy(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Frobenius norm squared.
#[inline]
pub fn mat_norm2(m: &Mat3) -> f64 {
    m.iter().flatten().map(|x| x * x).sum()
}

/// Column `a` of a Jacobian, i.e. the partial derivative along axis `a`.
#[inline]
pub fn column<T: Real>(m: &[[T; 3]; 3], a: usize) -> [T; 3] {
    [m[0][a], m[1][a], m[2][a]]
}

/// Rotation matrix about the unit axis `k` by angle `angle` (Rodrigues).
pub fn rotation(k: &Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [
            t * k[0] * k[0] + c,
            t * k[0] * k[1] - s * k[2],
            t * k[0] * k[2] + s * k[1],
        ],
        [
            t * k[0] * k[1] + s * k[2],
            t * k[1] * k[1] + c,
            t * k[1] * k[2] - s * k[0],
        ],
        [
            t * k[0] * k[2] - s * k[1],
            t * k[1] * k[2] + s * k[0],
            t * k[2] * k[2] + c,
        ],
    ]
}

#[inline]
pub fn mat_vec(r: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&r[0], v), dot(&r[1], v), dot(&r[2], v)]
}

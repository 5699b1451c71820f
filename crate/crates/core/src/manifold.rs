//! The constraint manifold `N = {(n, m) in S^2 x S^2 : n . m = 0}`.

use crate::error::{Error, Result};
use crate::field::DirectorPairField;
use crate::io::rng::SplitMix64;
use crate::vec3::{axpy, cross, dot, norm, scale, Mat3, Vec3};

/// Smallest admissible |n| before normalisation.
pub const MIN_NORM: f64 = 0.5;
/// Smallest admissible Gram-Schmidt remainder of m.
pub const MIN_REMAINDER: f64 = 0.1;
/// Distance from `N` tolerated by [`tangent_project`] and the densities.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

/// Retraction onto `N`: normalise n, remove the n-component of m, normalise m.
pub fn retract(n_raw: &Vec3, m_raw: &Vec3) -> Result<(Vec3, Vec3)> {
    let nn = norm(n_raw);
    if !(nn >= MIN_NORM) {
        return Err(Error::DegenerateInput(format!("|n| = {nn:e}")));
    }
    let n = scale(n_raw, 1.0 / nn);
    let rem = axpy(m_raw, -dot(m_raw, &n), &n);
    let rn = norm(&rem);
    if !(rn >= MIN_REMAINDER) {
        return Err(Error::DegenerateInput(format!("m remainder {rn:e}")));
    }
    let m = scale(&rem, 1.0 / rn);
    // second Gram-Schmidt pass removes the rounding left by the first
    let m = axpy(&m, -dot(&m, &n), &n);
    let m = scale(&m, 1.0 / norm(&m));
    Ok((n, m))
}

/// Retract every node in place.
pub fn retract_field(field: &mut DirectorPairField) -> Result<()> {
    for (n, m) in field.n.iter_mut().zip(field.m.iter_mut()) {
        let (a, b) = retract(n, m)?;
        *n = a;
        *m = b;
    }
    Ok(())
}

/// Maxima over nodes of `| |n|-1 |`, `| |m|-1 |` and `|n . m|`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstraintResiduals {
    pub norm_err_n: f64,
    pub norm_err_m: f64,
    pub dot: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.norm_err_n.max(self.norm_err_m).max(self.dot)
    }
}

pub fn constraint_residuals(field: &DirectorPairField) -> ConstraintResiduals {
    field
        .n
        .iter()
        .zip(&field.m)
        .fold(ConstraintResiduals::default(), |acc, (n, m)| ConstraintResiduals {
            norm_err_n: acc.norm_err_n.max((norm(n) - 1.0).abs()),
            norm_err_m: acc.norm_err_m.max((norm(m) - 1.0).abs()),
            dot: acc.dot.max(dot(n, m).abs()),
        })
}

/// Pointwise distance-from-`N` measure used by preconditions.
pub fn off_manifold(n: &Vec3, m: &Vec3) -> f64 {
    (norm(n) - 1.0).abs().max((norm(m) - 1.0).abs()).max(dot(n, m).abs())
}

/// Tangent part of a force pair together with its Lagrange multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentSplit {
    pub fn_tan: Vec3,
    pub fm_tan: Vec3,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
}

/// Split `(Fn, Fm)` as `(Fn_tan + l1 n + mu m, Fm_tan + l2 m + mu n)` with the
/// tangent parts orthogonal to the normal space of `N` at `(n, m)`.
pub fn tangent_project(n: &Vec3, m: &Vec3, f_n: &Vec3, f_m: &Vec3) -> Result<TangentSplit> {
    let off = off_manifold(n, m);
    if !(off <= ON_MANIFOLD_TOL) {
        return Err(Error::ConstraintViolated(off));
    }
    Ok(tangent_project_unchecked(n, m, f_n, f_m))
}

#[inline]
pub fn tangent_project_unchecked(n: &Vec3, m: &Vec3, f_n: &Vec3, f_m: &Vec3) -> TangentSplit {
    let lambda1 = dot(f_n, n);
    let lambda2 = dot(f_m, m);
    let mu = 0.5 * (dot(f_n, m) + dot(f_m, n));
    let fn_tan = axpy(&axpy(f_n, -lambda1, n), -mu, m);
    let fm_tan = axpy(&axpy(f_m, -lambda2, m), -mu, n);
    TangentSplit {
        fn_tan,
        fm_tan,
        lambda1,
        lambda2,
        mu,
    }
}

/// Random point of the constraint set with Jacobians tangent to it: the
/// columns are `w_a x n`, `w_a x m` for independent gaussian `w_a`.
pub fn random_tangent_sample(rng: &mut SplitMix64) -> (Vec3, Vec3, Mat3, Mat3) {
    let (n, m) = loop {
        let a = rng.gaussian3();
        let b = rng.gaussian3();
        if let Ok(p) = retract(&a, &b) {
            break p;
        }
    };
    let mut dn = [[0.0; 3]; 3];
    let mut dm = [[0.0; 3]; 3];
    for a in 0..3 {
        let w = rng.gaussian3();
        let cn = cross(&w, &n);
        let cm = cross(&w, &m);
        for i in 0..3 {
            dn[i][a] = cn[i];
            dm[i][a] = cm[i];
        }
    }
    (n, m, dn, dm)
}

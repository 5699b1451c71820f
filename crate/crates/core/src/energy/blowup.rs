//! Constant-coefficient quadratic form obtained by blowing up the modified
//! density at a point `(p, q)` of the manifold.

use nalgebra::{SMatrix, SymmetricEigen};

use super::density::density_terms;
use super::FrankConstants;
use crate::vec3::{Mat3, Vec3};

/// `e(xi) = sum A[i][j][a][b] xi[i][a] xi[j][b]` over gradients `xi` of the
/// tangent coordinates `U = (u1, u2, v1)` at `p = e3`, `q = e1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub a: [[[[f64; 3]; 3]; 3]; 3],
    pub p: Vec3,
    pub q: Vec3,
}

impl QuadraticForm {
    pub fn energy(&self, xi: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        s += self.a[i][j][a][b] * xi[i][a] * xi[j][b];
                    }
                }
            }
        }
        s
    }

    /// Symmetrised 9 x 9 matrix indexed by `3 i + a`.
    pub fn matrix(&self) -> SMatrix<f64, 9, 9> {
        SMatrix::<f64, 9, 9>::from_fn(|r, c| {
            let (i, a) = (r / 3, r % 3);
            let (j, b) = (c / 3, c % 3);
            0.5 * (self.a[i][j][a][b] + self.a[j][i][b][a])
        })
    }

    pub fn symmetrized(&self) -> QuadraticForm {
        let m = self.matrix();
        let mut a = [[[[0.0; 3]; 3]; 3]; 3];
        for r in 0..9 {
            for c in 0..9 {
                a[r / 3][c / 3][r % 3][c % 3] = m[(r, c)];
            }
        }
        QuadraticForm {
            a,
            p: self.p,
            q: self.q,
        }
    }
}

/// Blow-up energy density as a function of `xi`: the modified density at
/// `(p, q)` with Jacobians `grad u`, `grad v` where `u = (U1, U2, 0)` and
/// `v = (0, U3, -U1)`.
fn blowup_density(k: &FrankConstants, p: &Vec3, q: &Vec3, xi: &Mat3) -> f64 {
    let mut du = [[0.0; 3]; 3];
    let mut dv = [[0.0; 3]; 3];
    for a in 0..3 {
        du[0][a] = xi[0][a];
        du[1][a] = xi[1][a];
        dv[1][a] = xi[2][a];
        dv[2][a] = -xi[0][a];
    }
    density_terms(p, q, &du, &dv, k).modified(k)
}

/// Assemble the coefficients by polarisation. Cross coefficients are stored
/// once, on the entry with the smaller flattened index.
pub fn blowup_form(k: &FrankConstants) -> QuadraticForm {
    let p = [0.0, 0.0, 1.0];
    let q = [1.0, 0.0, 0.0];
    let unit = |r: usize| {
        let mut xi = [[0.0; 3]; 3];
        xi[r / 3][r % 3] = 1.0;
        xi
    };
    let diag: Vec<f64> = (0..9).map(|r| blowup_density(k, &p, &q, &unit(r))).collect();
    let mut a = [[[[0.0; 3]; 3]; 3]; 3];
    for r in 0..9 {
        a[r / 3][r / 3][r % 3][r % 3] = diag[r];
        for c in r + 1..9 {
            let mut xi = unit(r);
            xi[c / 3][c % 3] = 1.0;
            let cross = blowup_density(k, &p, &q, &xi) - diag[r] - diag[c];
            a[r / 3][c / 3][r % 3][c % 3] = cross;
        }
    }
    QuadraticForm { a, p, q }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipticity {
    pub lambda_min: f64,
    /// `alpha3 / 2`.
    pub threshold: f64,
    pub passes: bool,
}

/// Smallest eigenvalue of the symmetrised form against `alpha3 / 2`.
pub fn ellipticity_margin(form: &QuadraticForm, k: &FrankConstants) -> Ellipticity {
    let eig = SymmetricEigen::new(form.matrix());
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let threshold = 0.5 * k.alpha3();
    Ellipticity {
        lambda_min,
        threshold,
        passes: lambda_min >= threshold - 1e-10,
    }
}

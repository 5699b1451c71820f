//! Ericksen stress and the velocity-side differential operators.

use rayon::prelude::*;

use crate::field::{DirectorPairField, VectorField2D};
use crate::stencil::{first_derivative, jacobian_at, second_derivative};

pub type Tensor2 = [[f64; 2]; 2];

/// `sigma_ij = <d_i n, d_j n> + <d_i m, d_j m>` at every node.
pub fn ericksen_stress(directors: &DirectorPairField) -> Vec<Tensor2> {
    let grid = &directors.grid;
    (0..grid.node_count())
        .into_par_iter()
        .map(|idx| {
            let dn = jacobian_at(&directors.n, grid, idx);
            let dm = jacobian_at(&directors.m, grid, idx);
            let mut s = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] = (0..3).map(|c| dn[c][i] * dn[c][j] + dm[c][i] * dm[c][j]).sum();
                }
            }
            s
        })
        .collect()
}

/// Row divergence `(div sigma)_i = sum_j d_j sigma_ij`.
pub fn stress_divergence(directors: &DirectorPairField, sigma: &[Tensor2]) -> Vec<[f64; 2]> {
    let grid = &directors.grid;
    (0..grid.node_count())
        .into_par_iter()
        .map(|idx| {
            let mut out = [0.0; 2];
            for j in 0..2 {
                for &(k, w) in first_derivative(grid, idx, j).iter() {
                    out[0] += w * sigma[k][0][j];
                    out[1] += w * sigma[k][1][j];
                }
            }
            out
        })
        .collect()
}

/// Velocity gradient at one node: `g[i][a] = d_a u_i`.
#[inline]
pub fn velocity_gradient_at(u: &VectorField2D, idx: usize) -> Tensor2 {
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for &(k, w) in first_derivative(&u.grid, idx, a).iter() {
            g[0][a] += w * u.values[k][0];
            g[1][a] += w * u.values[k][1];
        }
    }
    g
}

#[inline]
pub fn velocity_laplacian_at(u: &VectorField2D, idx: usize) -> [f64; 2] {
    let mut out = [0.0; 2];
    for a in 0..2 {
        for &(k, w) in second_derivative(&u.grid, idx, a).iter() {
            out[0] += w * u.values[k][0];
            out[1] += w * u.values[k][1];
        }
    }
    out
}

//! Second-order finite-difference operators on collocated grids.
//!
//! Interior and periodic nodes use central differences. Nodes on a
//! dirichlet face use the one-sided second-order stencils
//! `(-3 f0 + 4 f1 - f2) / 2h` for first and `(2 f0 - 5 f1 + 4 f2 - f3) / h^2`
//! for second derivatives.

use crate::field::{Jacobian, VectorField2D};
use crate::grid::GridSpec;
use crate::vec3::{Mat3, Vec3};

/// Up to three `(node, weight)` pairs of a first-derivative stencil.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    pub len: usize,
    pub taps: [(usize, f64); 4],
}

impl Stencil {
    pub fn iter(&self) -> impl Iterator<Item = &(usize, f64)> {
        self.taps[..self.len].iter()
    }

    #[inline]
    pub fn apply(&self, f: &[f64]) -> f64 {
        self.iter().map(|&(j, w)| w * f[j]).sum()
    }

    #[inline]
    pub fn apply3(&self, f: &[Vec3]) -> Vec3 {
        let mut out = [0.0; 3];
        for &(j, w) in self.iter() {
            for c in 0..3 {
                out[c] += w * f[j][c];
            }
        }
        out
    }
}

/// First-derivative stencil at `idx` along `axis`.
#[inline]
pub fn first_derivative(grid: &GridSpec, idx: usize, axis: usize) -> Stencil {
    let inv = 1.0 / (2.0 * grid.h(axis));
    let mut taps = [(idx, 0.0); 4];
    match (grid.shift(idx, axis, -1), grid.shift(idx, axis, 1)) {
        (Some(l), Some(r)) => {
            taps[0] = (l, -inv);
            taps[1] = (r, inv);
            Stencil { len: 2, taps }
        }
        (None, Some(r)) => {
            let r2 = grid.shift(idx, axis, 2).expect("grid has >= 4 cells");
            taps[0] = (idx, -3.0 * inv);
            taps[1] = (r, 4.0 * inv);
            taps[2] = (r2, -inv);
            Stencil { len: 3, taps }
        }
        (Some(l), None) => {
            let l2 = grid.shift(idx, axis, -2).expect("grid has >= 4 cells");
            taps[0] = (idx, 3.0 * inv);
            taps[1] = (l, -4.0 * inv);
            taps[2] = (l2, inv);
            Stencil { len: 3, taps }
        }
        (None, None) => unreachable!("axis with a single node"),
    }
}

/// Second-derivative stencil at `idx` along `axis`.
#[inline]
pub fn second_derivative(grid: &GridSpec, idx: usize, axis: usize) -> Stencil {
    let inv = 1.0 / (grid.h(axis) * grid.h(axis));
    let mut taps = [(idx, 0.0); 4];
    match (grid.shift(idx, axis, -1), grid.shift(idx, axis, 1)) {
        (Some(l), Some(r)) => {
            taps[0] = (l, inv);
            taps[1] = (idx, -2.0 * inv);
            taps[2] = (r, inv);
            Stencil { len: 3, taps }
        }
        (None, Some(_)) | (Some(_), None) => {
            let dir = if grid.shift(idx, axis, 1).is_some() { 1 } else { -1 };
            let p = |k: isize| grid.shift(idx, axis, dir * k).expect("grid has >= 4 cells");
            taps[0] = (idx, 2.0 * inv);
            taps[1] = (p(1), -5.0 * inv);
            taps[2] = (p(2), 4.0 * inv);
            taps[3] = (p(3), -inv);
            Stencil { len: 4, taps }
        }
        (None, None) => unreachable!("axis with a single node"),
    }
}

/// Gradient of a scalar field; absent axes get zero.
pub fn gradient(f: &[f64], grid: &GridSpec) -> Vec<Vec3> {
    (0..grid.node_count())
        .map(|idx| {
            let mut g = [0.0; 3];
            for (a, ga) in g.iter_mut().enumerate().take(grid.ndim()) {
                *ga = first_derivative(grid, idx, a).apply(f);
            }
            g
        })
        .collect()
}

/// Jacobian of one node of a 3-vector field.
#[inline]
pub fn jacobian_at(v: &[Vec3], grid: &GridSpec, idx: usize) -> Mat3 {
    let mut j = [[0.0; 3]; 3];
    for a in 0..grid.ndim() {
        let d = first_derivative(grid, idx, a).apply3(v);
        for c in 0..3 {
            j[c][a] = d[c];
        }
    }
    j
}

pub fn jacobian(v: &[Vec3], grid: &GridSpec) -> Jacobian {
    Jacobian {
        values: (0..grid.node_count()).map(|i| jacobian_at(v, grid, i)).collect(),
    }
}

/// Divergence and curl from a (padded) 3 x 3 Jacobian.
#[inline]
pub fn divergence_curl(j: &Mat3) -> (f64, Vec3) {
    let div = j[0][0] + j[1][1] + j[2][2];
    let curl = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
    (div, curl)
}

pub fn laplacian(f: &[f64], grid: &GridSpec) -> Vec<f64> {
    (0..grid.node_count())
        .map(|idx| (0..grid.ndim()).map(|a| second_derivative(grid, idx, a).apply(f)).sum())
        .collect()
}

#[inline]
pub fn laplacian3_at(v: &[Vec3], grid: &GridSpec, idx: usize) -> Vec3 {
    let mut out = [0.0; 3];
    for a in 0..grid.ndim() {
        let d = second_derivative(grid, idx, a).apply3(v);
        for c in 0..3 {
            out[c] += d[c];
        }
    }
    out
}

/// Central divergence of a 2-D vector field.
pub fn divergence_2d(u: &VectorField2D) -> Vec<f64> {
    let g = &u.grid;
    let ux = u.component(0);
    let uy = u.component(1);
    (0..g.node_count())
        .map(|i| first_derivative(g, i, 0).apply(&ux) + first_derivative(g, i, 1).apply(&uy))
        .collect()
}

//! Grid totals of the densities and the exact gradient of the discrete energy.

use rayon::prelude::*;

use super::density::density_terms;
use super::FrankConstants;
use crate::dual::Dual;
use crate::field::DirectorPairField;
use crate::stencil::{first_derivative, jacobian_at};
use crate::vec3::{mat_norm2, Vec3};

/// Integrated energies of a director-pair field.
///
/// `null_n` / `null_m` are `1/2 * int (tr((grad n)^2) - (div n)^2)`, so that
/// `modified = frank + alpha1 * null_n + alpha2 * null_m`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub terms: [f64; 12],
    pub null_n: f64,
    pub null_m: f64,
    pub frank: f64,
    pub modified: f64,
    pub dirichlet_n: f64,
    pub dirichlet_m: f64,
}

impl EnergyBreakdown {
    pub fn dirichlet(&self) -> f64 {
        self.dirichlet_n + self.dirichlet_m
    }
}

/// Trapezoid-weighted sum of the pointwise densities over all nodes.
pub fn total_energy(field: &DirectorPairField, k: &FrankConstants) -> EnergyBreakdown {
    let grid = &field.grid;
    let w = grid.weights();
    let per_node: Vec<_> = (0..grid.node_count())
        .into_par_iter()
        .map(|i| {
            let dn = jacobian_at(&field.n, grid, i);
            let dm = jacobian_at(&field.m, grid, i);
            let t = density_terms(&field.n[i], &field.m[i], &dn, &dm, k);
            let modified = t.modified(k);
            (t, modified, 0.5 * mat_norm2(&dn), 0.5 * mat_norm2(&dm))
        })
        .collect();

    let mut out = EnergyBreakdown::default();
    let mut modified = CompensatedSum::default();
    for ((t, md, en, em), wi) in per_node.iter().zip(&w) {
        modified.add(wi * md);
        for (acc, v) in out.terms.iter_mut().zip(t.terms.iter()) {
            *acc += wi * v;
        }
        out.null_n += 0.5 * wi * t.null_n;
        out.null_m += 0.5 * wi * t.null_m;
        out.dirichlet_n += wi * en;
        out.dirichlet_m += wi * em;
    }
    out.frank = out.terms.iter().sum();
    // compensated: descent steps near a minimizer change the energy by a
    // few ulps, so the plain sum is too noisy to compare against
    out.modified = modified.value();
    out
}

/// Neumaier summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Modified energy only.
pub fn modified_energy(field: &DirectorPairField, k: &FrankConstants) -> f64 {
    total_energy(field, k).modified
}

type D24 = Dual<24>;

/// Partials of the modified density at one node with respect to
/// `(n, m, Dn, Dm)`, packed as 24 numbers.
fn node_partials(field: &DirectorPairField, k: &FrankConstants, i: usize) -> [f64; 24] {
    let grid = &field.grid;
    let dn = jacobian_at(&field.n, grid, i);
    let dm = jacobian_at(&field.m, grid, i);
    let n: [D24; 3] = std::array::from_fn(|c| D24::variable(field.n[i][c], c));
    let m: [D24; 3] = std::array::from_fn(|c| D24::variable(field.m[i][c], 3 + c));
    let dn: [[D24; 3]; 3] = std::array::from_fn(|c| std::array::from_fn(|a| D24::variable(dn[c][a], 6 + 3 * c + a)));
    let dm: [[D24; 3]; 3] = std::array::from_fn(|c| std::array::from_fn(|a| D24::variable(dm[c][a], 15 + 3 * c + a)));
    density_terms(&n, &m, &dn, &dm, k).modified(k).d
}

/// Gradient of the discrete modified energy with respect to every nodal value
/// of `n` and `m`. Entries at dirichlet boundary nodes are zeroed (those
/// values are fixed data).
pub fn variational_gradient(field: &DirectorPairField, k: &FrankConstants) -> (Vec<Vec3>, Vec<Vec3>) {
    let grid = &field.grid;
    let w = grid.weights();
    let partials: Vec<[f64; 24]> = (0..grid.node_count())
        .into_par_iter()
        .map(|i| node_partials(field, k, i))
        .collect();

    let mut gn = vec![[0.0; 3]; grid.node_count()];
    let mut gm = vec![[0.0; 3]; grid.node_count()];
    for (i, p) in partials.iter().enumerate() {
        let wi = w[i];
        for c in 0..3 {
            gn[i][c] += wi * p[c];
            gm[i][c] += wi * p[3 + c];
        }
        for a in 0..grid.ndim() {
            let st = first_derivative(grid, i, a);
            for &(j, s) in st.iter() {
                for c in 0..3 {
                    gn[j][c] += wi * s * p[6 + 3 * c + a];
                    gm[j][c] += wi * s * p[15 + 3 * c + a];
                }
            }
        }
    }
    for i in 0..grid.node_count() {
        if grid.is_boundary_node(i) {
            gn[i] = [0.0; 3];
            gm[i] = [0.0; 3];
        }
    }
    (gn, gm)
}

/// Nodes with both neighbours along `axis`, with the two neighbours.
fn second_difference_taps(grid: &crate::grid::GridSpec, i: usize, axis: usize) -> Option<(usize, usize)> {
    Some((grid.shift(i, axis, -1)?, grid.shift(i, axis, 1)?))
}

/// Grid-scale stabilization
/// `sum_i w_i sum_a (alpha / 8) |f(i+a) - 2 f(i) + f(i-a)|^2 / h_a^2`
/// with `alpha1` for n and `alpha2` for m, over nodes with both neighbours.
///
/// Central first differences are blind to odd-even modes; this term gives
/// them back their cost and is `O(h^2)` on smooth fields. On periodic grids
/// with one constant it turns the central-difference Dirichlet energy into
/// the nearest-neighbour one exactly.
pub fn stabilization(field: &DirectorPairField, k: &FrankConstants) -> f64 {
    let grid = &field.grid;
    let w = grid.weights();
    let mut sum = CompensatedSum::default();
    for i in 0..grid.node_count() {
        for a in 0..grid.ndim() {
            let Some((l, r)) = second_difference_taps(grid, i, a) else {
                continue;
            };
            let c = w[i] / (8.0 * grid.h(a) * grid.h(a));
            let d2 = |f: &[Vec3]| (0..3).map(|q| (f[r][q] - 2.0 * f[i][q] + f[l][q]).powi(2)).sum::<f64>();
            sum.add(c * (k.alpha1() * d2(&field.n) + k.alpha2() * d2(&field.m)));
        }
    }
    sum.value()
}

/// The energy the minimizer descends: modified energy plus [`stabilization`].
pub fn discrete_energy(field: &DirectorPairField, k: &FrankConstants) -> f64 {
    let mut sum = CompensatedSum::default();
    sum.add(total_energy(field, k).modified);
    sum.add(stabilization(field, k));
    sum.value()
}

/// Gradient of [`discrete_energy`]; dirichlet boundary entries are zero.
pub fn discrete_gradient(field: &DirectorPairField, k: &FrankConstants) -> (Vec<Vec3>, Vec<Vec3>) {
    let (mut gn, mut gm) = variational_gradient(field, k);
    let grid = &field.grid;
    let w = grid.weights();
    for i in 0..grid.node_count() {
        for a in 0..grid.ndim() {
            let Some((l, r)) = second_difference_taps(grid, i, a) else {
                continue;
            };
            let c = w[i] / (4.0 * grid.h(a) * grid.h(a));
            for (g, f, alpha) in [(&mut gn, &field.n, k.alpha1()), (&mut gm, &field.m, k.alpha2())] {
                for q in 0..3 {
                    let d = c * alpha * (f[r][q] - 2.0 * f[i][q] + f[l][q]);
                    g[r][q] += d;
                    g[l][q] += d;
                    g[i][q] -= 2.0 * d;
                }
            }
        }
    }
    for i in 0..grid.node_count() {
        if grid.is_boundary_node(i) {
            gn[i] = [0.0; 3];
            gm[i] = [0.0; 3];
        }
    }
    (gn, gm)
}

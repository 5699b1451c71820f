//! Discrete Helmholtz projection onto divergence-free velocities.
//!
//! With `G` the central-difference gradient, the projected velocity is
//! `u = u* - G phi` where `phi` minimises `|u* - G phi|` over interior
//! velocity nodes. On periodic grids this is solved exactly in Fourier
//! space; on boxes by conjugate gradients on the normal equations.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField2D};
use crate::grid::GridSpec;
use crate::krylov::conjugate_gradient_to;
use crate::stencil::first_derivative;

/// Relative tolerance of the box Poisson solve.
pub const BOX_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Projection {
    pub u: VectorField2D,
    pub phi: ScalarField,
    pub iterations: usize,
}

fn is_velocity_node(grid: &GridSpec, idx: usize) -> bool {
    !grid.is_boundary_node(idx)
}

/// `-G^T u` over interior velocity nodes: the divergence the projection
/// annihilates. Equals the central divergence on periodic grids and away
/// from dirichlet faces.
pub fn discrete_divergence(u: &VectorField2D) -> Vec<f64> {
    let grid = &u.grid;
    let mut out = vec![0.0; grid.node_count()];
    for i in 0..grid.node_count() {
        if !is_velocity_node(grid, i) {
            continue;
        }
        for a in 0..2 {
            for &(j, w) in first_derivative(grid, i, a).iter() {
                out[j] -= w * u.values[i][a];
            }
        }
    }
    out
}

pub fn max_divergence(u: &VectorField2D) -> f64 {
    discrete_divergence(u).iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn pressure_projection(u_star: &VectorField2D) -> Result<Projection> {
    let grid = &u_star.grid;
    if grid.ndim() != 2 {
        return Err(Error::InvalidGrid("projection needs a 2-D grid".into()));
    }
    if grid.is_periodic(0) && grid.is_periodic(1) {
        Ok(spectral(u_star))
    } else {
        krylov(u_star)
    }
}

fn wavenumber_symbol(n: usize, h: f64, k: usize) -> f64 {
    // sin(kappa h) / h for kappa = 2 pi k' / (n h)
    if k == 0 || 2 * k == n {
        // sin vanishes exactly; do not let rounding invent a tiny symbol
        return 0.0;
    }
    let kp = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    (2.0 * std::f64::consts::PI * kp / n as f64).sin() / h
}

fn fft2(data: &mut [Complex<f64>], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (fx, fy) = if inverse {
        (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
    } else {
        (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
    };
    for row in data.chunks_exact_mut(nx) {
        fx.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = data[i + nx * j];
        }
        fy.process(&mut col);
        for j in 0..ny {
            data[i + nx * j] = col[j];
        }
    }
}

fn spectral(u_star: &VectorField2D) -> Projection {
    let grid = &u_star.grid;
    let [nx, ny, _] = grid.shape();
    let len = nx * ny;
    let sx: Vec<f64> = (0..nx).map(|k| wavenumber_symbol(nx, grid.h(0), k)).collect();
    let sy: Vec<f64> = (0..ny).map(|k| wavenumber_symbol(ny, grid.h(1), k)).collect();

    let mut ux: Vec<Complex<f64>> = u_star.values.iter().map(|v| Complex::new(v[0], 0.0)).collect();
    let mut uy: Vec<Complex<f64>> = u_star.values.iter().map(|v| Complex::new(v[1], 0.0)).collect();
    fft2(&mut ux, nx, ny, false);
    fft2(&mut uy, nx, ny, false);

    // G^ = i s, so G^T G phi^ = |s|^2 phi^ = G^T u^ = -i s . u^
    let mut phi = vec![Complex::new(0.0, 0.0); len];
    for j in 0..ny {
        for i in 0..nx {
            let k = i + nx * j;
            let s2 = sx[i] * sx[i] + sy[j] * sy[j];
            if s2 > 0.0 {
                let rhs = (ux[k] * sx[i] + uy[k] * sy[j]) * Complex::new(0.0, -1.0);
                phi[k] = rhs / s2;
                let grad = phi[k] * Complex::new(0.0, 1.0);
                ux[k] -= grad * sx[i];
                uy[k] -= grad * sy[j];
            }
        }
    }
    fft2(&mut ux, nx, ny, true);
    fft2(&mut uy, nx, ny, true);
    fft2(&mut phi, nx, ny, true);
    let norm = 1.0 / len as f64;
    let u = VectorField2D {
        grid: grid.clone(),
        values: ux.iter().zip(&uy).map(|(a, b)| [a.re * norm, b.re * norm]).collect(),
    };
    let phi = ScalarField {
        grid: grid.clone(),
        values: phi.iter().map(|c| c.re * norm).collect(),
    };
    Projection { u, phi, iterations: 0 }
}

fn gradient_on_velocity_nodes(grid: &GridSpec, phi: &[f64], out: &mut [[f64; 2]]) {
    for (i, g) in out.iter_mut().enumerate() {
        *g = [0.0; 2];
        if is_velocity_node(grid, i) {
            for a in 0..2 {
                g[a] = first_derivative(grid, i, a).apply(phi);
            }
        }
    }
}

fn gradient_transpose(grid: &GridSpec, v: &[[f64; 2]], out: &mut [f64]) {
    out.fill(0.0);
    for (i, vi) in v.iter().enumerate() {
        if is_velocity_node(grid, i) {
            for a in 0..2 {
                for &(j, w) in first_derivative(grid, i, a).iter() {
                    out[j] += w * vi[a];
                }
            }
        }
    }
}

fn krylov(u_star: &VectorField2D) -> Result<Projection> {
    let grid = &u_star.grid;
    let len = grid.node_count();
    let mut u_int = u_star.values.clone();
    for (i, v) in u_int.iter_mut().enumerate() {
        if !is_velocity_node(grid, i) {
            *v = [0.0; 2];
        }
    }
    let mut b = vec![0.0; len];
    gradient_transpose(grid, &u_int, &mut b);
    let mut scratch = vec![[0.0; 2]; len];
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut g = vec![[0.0; 2]; x.len()];
        gradient_on_velocity_nodes(grid, x, &mut g);
        gradient_transpose(grid, &g, y);
    };
    let mut phi = vec![0.0; len];
    // relative to the size of u* (in units of G^T u), so an already
    // projected input is not chased down to rounding noise
    let u_norm = u_int.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum::<f64>().sqrt();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = BOX_TOLERANCE * b_norm.max(u_norm / grid.h_min());
    if b_norm <= target {
        return Ok(Projection {
            u: VectorField2D {
                grid: grid.clone(),
                values: u_int,
            },
            phi: ScalarField::zeros(grid.clone()),
            iterations: 0,
        });
    }
    let report = conjugate_gradient_to(apply, &b, &mut phi, target, 20 * len);
    if !report.converged {
        return Err(Error::PoissonNotConverged(report.residual));
    }
    gradient_on_velocity_nodes(grid, &phi, &mut scratch);
    let values = u_int
        .iter()
        .zip(&scratch)
        .map(|(v, g)| [v[0] - g[0], v[1] - g[1]])
        .collect();
    Ok(Projection {
        u: VectorField2D {
            grid: grid.clone(),
            values,
        },
        phi: ScalarField {
            grid: grid.clone(),
            values: phi,
        },
        iterations: report.iterations,
    })
}

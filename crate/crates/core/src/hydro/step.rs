//! The explicit splitting step and its stability bound.

use rayon::prelude::*;

use super::projection::pressure_projection;
use super::stress::{ericksen_stress, stress_divergence, velocity_gradient_at, velocity_laplacian_at};
use super::{energy_budget, EnergyBudget, FlowState};
use crate::error::{Error, Result};
use crate::field::{DirectorPairField, ScalarField, VectorField2D};
use crate::manifold::{retract, tangent_project_unchecked};
use crate::stencil::{jacobian_at, laplacian3_at};
use crate::vec3::{axpy, Mat3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOptions {
    /// Retract the directors onto the constraint set after each update.
    pub retract: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { retract: true }
    }
}

fn bound(h: f64, diffusivity: f64, umax: f64) -> f64 {
    let diffusive = h * h / (8.0 * diffusivity);
    if umax > 0.0 {
        diffusive.min(h / (2.0 * umax))
    } else {
        diffusive
    }
}

fn check(dt: f64, bound: f64) -> Result<()> {
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::CflViolated { dt, bound });
    }
    Ok(())
}

/// Largest admissible step for the state: `min(h^2 / (8 max(nu, 1)), h / (2 max|u|))`.
pub fn cfl_bound(state: &FlowState) -> f64 {
    bound(state.grid().h_min(), state.nu.max(1.0), state.u.max_abs())
}

/// `u* = u + dt (-u.grad u + nu lap u - div sigma)`, zero on dirichlet walls.
pub fn velocity_step(state: &FlowState, dt: f64) -> Result<VectorField2D> {
    let grid = state.grid();
    check(dt, bound(grid.h_min(), state.nu, state.u.max_abs()))?;
    let sigma = ericksen_stress(&state.directors);
    let div_sigma = stress_divergence(&state.directors, &sigma);
    let u = &state.u;
    let values = (0..grid.node_count())
        .into_par_iter()
        .map(|i| {
            if grid.is_boundary_node(i) {
                return [0.0; 2];
            }
            let ui = u.values[i];
            let gu = velocity_gradient_at(u, i);
            let lap = velocity_laplacian_at(u, i);
            let mut out = [0.0; 2];
            for c in 0..2 {
                let adv = ui[0] * gu[c][0] + ui[1] * gu[c][1];
                out[c] = ui[c] + dt * (-adv + state.nu * lap[c] - div_sigma[i][c]);
            }
            out
        })
        .collect();
    Ok(VectorField2D {
        grid: grid.clone(),
        values,
    })
}

/// New directors and the discrete material derivatives
/// `(n' - n) / dt + u . grad n` used by the budget.
#[derive(Clone, Debug)]
pub struct DirectorUpdate {
    pub directors: DirectorPairField,
    pub dn_dt: Vec<Vec3>,
    pub dm_dt: Vec<Vec3>,
}

#[inline]
fn advect(u: [f64; 2], j: &Mat3) -> Vec3 {
    [0, 1, 2].map(|c| u[0] * j[c][0] + u[1] * j[c][1])
}

/// Explicit constrained heat-flow step advected by `u`: the force
/// `(-u.grad n + lap n, -u.grad m + lap m)` is projected onto the tangent
/// space of the constraint set at `(n, m)`, applied, and optionally
/// retracted. Dirichlet boundary directors are held fixed.
pub fn director_step(
    directors: &DirectorPairField,
    u: &VectorField2D,
    dt: f64,
    opts: &StepOptions,
) -> Result<DirectorUpdate> {
    let grid = &directors.grid;
    check(dt, bound(grid.h_min(), 1.0, u.max_abs()))?;
    let per_node: Vec<Result<(Vec3, Vec3, Vec3, Vec3)>> = (0..grid.node_count())
        .into_par_iter()
        .map(|i| {
            let (n, m) = (directors.n[i], directors.m[i]);
            if grid.is_boundary_node(i) {
                return Ok((n, m, [0.0; 3], [0.0; 3]));
            }
            let an = advect(u.values[i], &jacobian_at(&directors.n, grid, i));
            let am = advect(u.values[i], &jacobian_at(&directors.m, grid, i));
            let ln = laplacian3_at(&directors.n, grid, i);
            let lm = laplacian3_at(&directors.m, grid, i);
            let fn_raw = axpy(&ln, -1.0, &an);
            let fm_raw = axpy(&lm, -1.0, &am);
            let t = tangent_project_unchecked(&n, &m, &fn_raw, &fm_raw);
            let mut n1 = axpy(&n, dt, &t.fn_tan);
            let mut m1 = axpy(&m, dt, &t.fm_tan);
            if opts.retract {
                (n1, m1) = retract(&n1, &m1)?;
            }
            let rate = |new: &Vec3, old: &Vec3, adv: &Vec3| [0, 1, 2].map(|c| (new[c] - old[c]) / dt + adv[c]);
            Ok((n1, m1, rate(&n1, &n, &an), rate(&m1, &m, &am)))
        })
        .collect();
    let len = grid.node_count();
    let mut out = DirectorUpdate {
        directors: DirectorPairField {
            grid: grid.clone(),
            n: Vec::with_capacity(len),
            m: Vec::with_capacity(len),
        },
        dn_dt: Vec::with_capacity(len),
        dm_dt: Vec::with_capacity(len),
    };
    for r in per_node {
        let (n, m, dn, dm) = r?;
        out.directors.n.push(n);
        out.directors.m.push(m);
        out.dn_dt.push(dn);
        out.dm_dt.push(dm);
    }
    Ok(out)
}

fn finite(state: &FlowState) -> Result<()> {
    let bad_u = state.u.values.iter().any(|v| !v[0].is_finite() || !v[1].is_finite());
    let bad_d = state
        .directors
        .n
        .iter()
        .chain(&state.directors.m)
        .any(|v| v.iter().any(|x| !x.is_finite()));
    if bad_u || bad_d {
        return Err(Error::NonFinite(format!("state at t = {}", state.t)));
    }
    Ok(())
}

/// velocity_step -> pressure_projection -> director_step -> energy_budget.
pub fn flow_step(state: &FlowState, dt: f64, opts: &StepOptions) -> Result<(FlowState, EnergyBudget)> {
    let u_star = velocity_step(state, dt)?;
    let proj = pressure_projection(&u_star)?;
    let update = director_step(&state.directors, &proj.u, dt, opts)?;
    let next = FlowState {
        t: state.t + dt,
        u: proj.u,
        p: ScalarField {
            grid: proj.phi.grid,
            values: proj.phi.values.iter().map(|v| v / dt).collect(),
        },
        directors: update.directors,
        nu: state.nu,
    };
    finite(&next)?;
    let budget = energy_budget(state, &next, dt, &update.dn_dt, &update.dm_dt);
    Ok((next, budget))
}

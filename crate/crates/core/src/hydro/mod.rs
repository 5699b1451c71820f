//! 2-D simplified biaxial Ericksen-Leslie solver.
//!
//! One step is a first-order explicit splitting: momentum (advection,
//! viscosity, Ericksen stress) -> pressure projection -> constrained director
//! heat flow advected by the new velocity. Each step reports an
//! [`EnergyBudget`] checking the discrete dissipation law.

mod projection;
mod scan;
mod step;
mod stress;

pub use projection::{discrete_divergence, max_divergence, pressure_projection, Projection, BOX_TOLERANCE};
pub use scan::{concentration_scan, local_energy_density, y_quantities, ConcentrationReport};
pub use step::{cfl_bound, director_step, flow_step, velocity_step, DirectorUpdate, StepOptions};
pub use stress::{ericksen_stress, stress_divergence, Tensor2};

use crate::error::{Error, Result};
use crate::field::{DirectorPairField, ScalarField, VectorField2D};
use crate::grid::GridSpec;
use crate::stencil::jacobian_at;
use crate::vec3::{mat_norm2, norm2, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub u: VectorField2D,
    pub p: ScalarField,
    pub directors: DirectorPairField,
    pub nu: f64,
}

impl FlowState {
    pub fn new(u: VectorField2D, directors: DirectorPairField, nu: f64) -> Result<Self> {
        if u.grid != directors.grid {
            return Err(Error::InvalidGrid("velocity and director grids differ".into()));
        }
        if u.grid.ndim() != 2 {
            return Err(Error::InvalidGrid("flow needs a 2-D grid".into()));
        }
        if !(nu > 0.0) {
            return Err(Error::Validation {
                field: "nu".into(),
                msg: format!("{nu} must be > 0"),
            });
        }
        let p = ScalarField::zeros(u.grid.clone());
        Ok(FlowState {
            t: 0.0,
            u,
            p,
            directors,
            nu,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.u.grid
    }

    /// The parabolic rescaling `(r u, n, m, r^2 P)(x0 + r x, t0 + r^2 t)`:
    /// spacing shrinks by `r`, time is measured from `t0` in units of `r^2`.
    /// Node indices are unchanged.
    pub fn rescaled(&self, t0: f64, r: f64) -> Result<FlowState> {
        let g = self.grid();
        let spacing: Vec<f64> = g.spacing().iter().map(|h| h / r).collect();
        let grid = GridSpec::new(g.dims().to_vec(), spacing, g.boundary().to_vec())?;
        Ok(FlowState {
            t: (self.t - t0) / (r * r),
            u: VectorField2D {
                grid: grid.clone(),
                values: self.u.values.iter().map(|v| [r * v[0], r * v[1]]).collect(),
            },
            p: ScalarField {
                grid: grid.clone(),
                values: self.p.values.iter().map(|v| r * r * v).collect(),
            },
            directors: DirectorPairField {
                grid,
                n: self.directors.n.clone(),
                m: self.directors.m.clone(),
            },
            nu: self.nu,
        })
    }
}

/// Energies of the state after a step, and the step's dissipation balance.
///
/// `residual = 2 (E' - E) / dt + 2 nu visc_dissip + 2 dir_dissip`, zero for
/// the continuous flow; `residual_without_viscous` drops the viscous term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBudget {
    pub kinetic: f64,
    pub dirichlet_n: f64,
    pub dirichlet_m: f64,
    pub total: f64,
    pub visc_dissip: f64,
    pub dir_dissip: f64,
    pub residual: f64,
    pub residual_without_viscous: f64,
}

/// Kinetic and Dirichlet energies of a state: `(1/2 int |u|^2, 1/2 int |grad n|^2, 1/2 int |grad m|^2)`.
pub fn state_energies(state: &FlowState) -> (f64, f64, f64) {
    let g = state.grid();
    let w = g.weights();
    let mut k = 0.0;
    let mut en = 0.0;
    let mut em = 0.0;
    for i in 0..g.node_count() {
        let u = state.u.values[i];
        k += 0.5 * w[i] * (u[0] * u[0] + u[1] * u[1]);
        en += 0.5 * w[i] * mat_norm2(&jacobian_at(&state.directors.n, g, i));
        em += 0.5 * w[i] * mat_norm2(&jacobian_at(&state.directors.m, g, i));
    }
    (k, en, em)
}

/// Budget between consecutive states, given the discrete material
/// derivatives of the directors over the step.
pub fn energy_budget(prev: &FlowState, next: &FlowState, dt: f64, dn_dt: &[Vec3], dm_dt: &[Vec3]) -> EnergyBudget {
    let g = next.grid();
    let w = g.weights();
    let (k0, n0, m0) = state_energies(prev);
    let (k1, n1, m1) = state_energies(next);
    let mut visc = 0.0;
    let mut dir = 0.0;
    for i in 0..g.node_count() {
        let gu = stress::velocity_gradient_at(&next.u, i);
        visc += w[i] * (gu[0][0] * gu[0][0] + gu[0][1] * gu[0][1] + gu[1][0] * gu[1][0] + gu[1][1] * gu[1][1]);
        dir += w[i] * (norm2(&dn_dt[i]) + norm2(&dm_dt[i]));
    }
    let e0 = k0 + n0 + m0;
    let e1 = k1 + n1 + m1;
    let rate = 2.0 * (e1 - e0) / dt;
    EnergyBudget {
        kinetic: k1,
        dirichlet_n: n1,
        dirichlet_m: m1,
        total: e1,
        visc_dissip: visc,
        dir_dissip: dir,
        residual: rate + 2.0 * next.nu * visc + 2.0 * dir,
        residual_without_viscous: rate + 2.0 * dir,
    }
}

/// Budget of a state against itself (no step taken): energies only.
pub fn initial_budget(state: &FlowState) -> EnergyBudget {
    let (k, en, em) = state_energies(state);
    EnergyBudget {
        kinetic: k,
        dirichlet_n: en,
        dirichlet_m: em,
        total: k + en + em,
        ..Default::default()
    }
}

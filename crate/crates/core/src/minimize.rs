//! Projected gradient flow for the discrete energy (modified energy plus
//! grid-scale stabilization) on 3-D dirichlet grids,
//! with Euler-Lagrange residuals and scaled-energy singularity scans.

use crate::energy::{discrete_energy, discrete_gradient, FrankConstants};
use crate::error::{Error, Result};
use crate::field::DirectorPairField;
use crate::grid::{Boundary, GridSpec};
use crate::krylov::conjugate_gradient;
use crate::manifold::{constraint_residuals, retract, tangent_project_unchecked, ON_MANIFOLD_TOL};
use crate::stencil::{jacobian_at, second_derivative};
use crate::vec3::{axpy, mat_norm2, norm2, Vec3};

/// Halvings of the step before a flow step gives up.
pub const MAX_HALVINGS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeConfig {
    pub grid: GridSpec,
    pub k: FrankConstants,
    /// Step size, in length^2 / energy.
    pub tau: f64,
    pub max_iter: usize,
    /// Stop once the projected-gradient norm is at or below this.
    pub tol: f64,
    /// Flag threshold for the scaled energy.
    pub eps0_sq: f64,
    pub theta0: f64,
    pub radii: Vec<f64>,
}

impl MinimizeConfig {
    /// Defaults: stability-bound step, `eps0^2 = 0.05`, `theta0 = 1/4`.
    pub fn new(grid: GridSpec, k: FrankConstants) -> Self {
        let tau = stability_bound(&grid, &k);
        let h = grid.h_min();
        let half_width = (0..grid.ndim())
            .map(|a| 0.5 * grid.length(a))
            .fold(f64::INFINITY, f64::min);
        let radii = [2.0 * h, 4.0 * h].into_iter().filter(|&r| r <= half_width).collect();
        MinimizeConfig {
            grid,
            k,
            tau,
            max_iter: 10_000,
            tol: 1e-6,
            eps0_sq: 0.05,
            theta0: 0.25,
            radii,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| {
            Err(Error::Validation {
                field: field.into(),
                msg,
            })
        };
        if self.grid.ndim() != 3 || self.grid.boundary().iter().any(|&b| b != Boundary::Dirichlet) {
            return bad("grid", "minimization needs a 3-D dirichlet grid".into());
        }
        if !(self.tau > 0.0) {
            return bad("tau", format!("{} must be > 0", self.tau));
        }
        if !(self.tol > 0.0) {
            return bad("tol", format!("{} must be > 0", self.tol));
        }
        let half_width = (0..3).map(|a| 0.5 * self.grid.length(a)).fold(f64::INFINITY, f64::min);
        if let Some(r) = self.radii.iter().find(|&&r| !(r > 0.0 && r <= half_width)) {
            return bad("scan_radii", format!("radius {r} outside (0, {half_width}]"));
        }
        Ok(())
    }
}

/// `h^2 / (12 max k)`.
pub fn stability_bound(grid: &GridSpec, k: &FrankConstants) -> f64 {
    let h = grid.h_min();
    h * h / (12.0 * k.max_k())
}

/// Euler-Lagrange residual: the tangent part of the per-unit-volume
/// gradient, its Lagrange multipliers, and its grid L2 norm.
#[derive(Clone, Debug)]
pub struct ElResidual {
    pub residual_n: Vec<Vec3>,
    pub residual_m: Vec<Vec3>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub mu: Vec<f64>,
    pub norm: f64,
}

pub fn el_residual(field: &DirectorPairField, k: &FrankConstants) -> ElResidual {
    let grid = &field.grid;
    let w = grid.weights();
    let (gn, gm) = discrete_gradient(field, k);
    let len = field.len();
    let mut r = ElResidual {
        residual_n: vec![[0.0; 3]; len],
        residual_m: vec![[0.0; 3]; len],
        lambda1: vec![0.0; len],
        lambda2: vec![0.0; len],
        mu: vec![0.0; len],
        norm: 0.0,
    };
    let mut sum = 0.0;
    for i in 0..len {
        if grid.is_boundary_node(i) {
            continue;
        }
        let t = tangent_project_unchecked(
            &field.n[i],
            &field.m[i],
            &gn[i].map(|v| v / w[i]),
            &gm[i].map(|v| v / w[i]),
        );
        sum += w[i] * (norm2(&t.fn_tan) + norm2(&t.fm_tan));
        r.residual_n[i] = t.fn_tan;
        r.residual_m[i] = t.fm_tan;
        r.lambda1[i] = t.lambda1;
        r.lambda2[i] = t.lambda2;
        r.mu[i] = t.mu;
    }
    r.norm = sum.sqrt();
    r
}

/// One accepted step of the projected flow.
#[derive(Clone, Debug)]
pub struct FlowStep {
    pub field: DirectorPairField,
    pub energy: f64,
    pub tau: f64,
    pub halvings: usize,
}

fn descend(
    field: &DirectorPairField,
    res: &ElResidual,
    k: &FrankConstants,
    tau0: f64,
    energy0: f64,
) -> Result<FlowStep> {
    let mut tau = tau0;
    for halvings in 0..=MAX_HALVINGS {
        let mut trial = field.clone();
        let mut ok = true;
        for i in 0..trial.len() {
            if trial.grid.is_boundary_node(i) {
                continue;
            }
            let a = axpy(&field.n[i], -tau, &res.residual_n[i]);
            let b = axpy(&field.m[i], -tau, &res.residual_m[i]);
            match retract(&a, &b) {
                Ok((n, m)) => {
                    trial.n[i] = n;
                    trial.m[i] = m;
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let e = discrete_energy(&trial, k);
            if e <= energy0 {
                return Ok(FlowStep {
                    field: trial,
                    energy: e,
                    tau,
                    halvings,
                });
            }
        }
        tau *= 0.5;
    }
    Err(Error::StepRejectedRepeatedly(MAX_HALVINGS))
}

/// Explicit projected gradient step with backtracking: interior nodes move
/// by `-tau` times the tangent gradient per unit volume, then retract.
pub fn flow_step(field: &DirectorPairField, k: &FrankConstants, tau: f64) -> Result<FlowStep> {
    let res = el_residual(field, k);
    descend(field, &res, k, tau, discrete_energy(field, k))
}

#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub center: usize,
    pub radius: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ScanResult {
    pub entries: Vec<ScanEntry>,
    /// Centers whose scaled energy exceeds the threshold at every radius.
    pub flagged: Vec<usize>,
}

impl ScanResult {
    pub fn value(&self, center: usize, radius: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.center == center && e.radius == radius)
            .map(|e| e.value)
    }
}

/// `r^-1 * int_{B_r} (|grad n|^2 + |grad m|^2)` over node-in-ball masks with
/// cell-volume weights, for every center whose largest ball stays inside a
/// dirichlet domain.
pub fn scaled_energy_scan(field: &DirectorPairField, radii: &[f64], eps0_sq: f64) -> ScanResult {
    let grid = &field.grid;
    let density: Vec<f64> = (0..field.len())
        .map(|i| mat_norm2(&jacobian_at(&field.n, grid, i)) + mat_norm2(&jacobian_at(&field.m, grid, i)))
        .collect();
    let vol = grid.cell_volume();
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let shape = grid.shape();
    let balls: Vec<_> = radii.iter().map(|&r| grid.ball_offsets(r)).collect();

    let mut out = ScanResult::default();
    for c in 0..field.len() {
        let cc = grid.coords(c);
        let fits = (0..grid.ndim()).all(|a| {
            grid.is_periodic(a) || {
                let reach = (r_max / grid.h(a)).floor() as usize;
                cc[a] >= reach && cc[a] + reach < shape[a]
            }
        });
        if !fits {
            continue;
        }
        let mut all_above = !radii.is_empty();
        for (r, ball) in radii.iter().zip(&balls) {
            let sum: f64 = ball.iter().filter_map(|o| grid.offset(c, o)).map(|j| density[j]).sum();
            let value = vol * sum / r;
            all_above &= value > eps0_sq;
            out.entries.push(ScanEntry {
                center: c,
                radius: *r,
                value,
            });
        }
        if all_above {
            out.flagged.push(c);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub field: DirectorPairField,
    /// Modified energy before the first step and after each accepted step.
    pub energy_trace: Vec<f64>,
    pub grad_norm_trace: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit first; `field` is then the
    /// last (lowest-energy) iterate.
    pub converged: bool,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub mu: Vec<f64>,
    pub scan: ScanResult,
}

pub fn minimize(config: &MinimizeConfig, initial: &DirectorPairField) -> Result<MinimizeResult> {
    config.validate()?;
    if initial.grid != config.grid {
        return Err(Error::InvalidGrid("initial field grid differs from config grid".into()));
    }
    let off = constraint_residuals(initial).max();
    if off > ON_MANIFOLD_TOL {
        return Err(Error::ConstraintViolated(off));
    }
    let k = &config.k;
    let mut field = initial.clone();
    let mut energy = discrete_energy(&field, k);
    let mut energy_trace = vec![energy];
    let mut grad_norm_trace = Vec::new();
    let mut iterations = 0;
    let (res, converged) = loop {
        let res = el_residual(&field, k);
        grad_norm_trace.push(res.norm);
        if !res.norm.is_finite() {
            return Err(Error::NonFinite("projected gradient".into()));
        }
        if res.norm <= config.tol {
            break (res, true);
        }
        if iterations == config.max_iter {
            break (res, false);
        }
        let step = descend(&field, &res, k, config.tau, energy)?;
        field = step.field;
        energy = step.energy;
        energy_trace.push(energy);
        iterations += 1;
    };
    let scan = scaled_energy_scan(&field, &config.radii, config.eps0_sq);
    Ok(MinimizeResult {
        grad_norm: res.norm,
        lambda1: res.lambda1,
        lambda2: res.lambda2,
        mu: res.mu,
        field,
        energy_trace,
        grad_norm_trace,
        iterations,
        converged,
        scan,
    })
}

/// Replace interior values by the componentwise discrete harmonic extension
/// of the boundary values, then retract.
pub fn harmonic_extension(boundary: &DirectorPairField) -> Result<DirectorPairField> {
    let grid = &boundary.grid;
    let interior: Vec<usize> = (0..boundary.len()).filter(|&i| !grid.is_boundary_node(i)).collect();
    let mut slot = vec![usize::MAX; boundary.len()];
    for (s, &i) in interior.iter().enumerate() {
        slot[i] = s;
    }
    // -lap restricted to interior unknowns
    let apply = |x: &[f64], y: &mut [f64]| {
        for (s, &i) in interior.iter().enumerate() {
            let mut acc = 0.0;
            for a in 0..grid.ndim() {
                for &(j, wgt) in second_derivative(grid, i, a).iter() {
                    if slot[j] != usize::MAX {
                        acc -= wgt * x[slot[j]];
                    }
                }
            }
            y[s] = acc;
        }
    };
    let mut out = boundary.clone();
    for which in 0..2 {
        for c in 0..3 {
            let vals: Vec<f64> = if which == 0 {
                boundary.n.iter().map(|v| v[c]).collect()
            } else {
                boundary.m.iter().map(|v| v[c]).collect()
            };
            // move known boundary contributions to the right-hand side
            let rhs: Vec<f64> = interior
                .iter()
                .map(|&i| {
                    let mut acc = 0.0;
                    for a in 0..grid.ndim() {
                        for &(j, wgt) in second_derivative(grid, i, a).iter() {
                            if slot[j] == usize::MAX {
                                acc += wgt * vals[j];
                            }
                        }
                    }
                    acc
                })
                .collect();
            let mut x: Vec<f64> = interior.iter().map(|&i| vals[i]).collect();
            conjugate_gradient(apply, &rhs, &mut x, 1e-12, 10 * interior.len() + 100);
            for (s, &i) in interior.iter().enumerate() {
                if which == 0 {
                    out.n[i][c] = x[s];
                } else {
                    out.m[i][c] = x[s];
                }
            }
        }
    }
    for &i in &interior {
        let (n, m) = retract(&out.n[i], &out.m[i])?;
        out.n[i] = n;
        out.m[i] = m;
    }
    Ok(out)
}

//! Energy-concentration detection and the parabolic-cylinder Y quantities.

use rayon::prelude::*;

use super::FlowState;
use crate::error::{Error, Result};
use crate::stencil::jacobian_at;
use crate::vec3::mat_norm2;

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationReport {
    /// `int_{B_r(x)} (|u|^2 + |grad n|^2 + |grad m|^2)` for every node `x`.
    pub local: Vec<f64>,
    pub max_local: f64,
    pub radius: f64,
    pub threshold: f64,
    pub fired: bool,
    /// Centers at or above the threshold.
    pub centers: Vec<usize>,
}

/// `|u|^2 + |grad n|^2 + |grad m|^2` per node.
pub fn local_energy_density(state: &FlowState) -> Vec<f64> {
    let g = state.grid();
    let d = &state.directors;
    (0..g.node_count())
        .into_par_iter()
        .map(|i| {
            let u = state.u.values[i];
            u[0] * u[0] + u[1] * u[1] + mat_norm2(&jacobian_at(&d.n, g, i)) + mat_norm2(&jacobian_at(&d.m, g, i))
        })
        .collect()
}

/// Disk sums of the local energy density (cell-area weights, node-in-disk
/// masks, periodic wrap, clipped at dirichlet walls). Requires `r >= 2h`.
pub fn concentration_scan(state: &FlowState, r: f64, threshold: f64) -> ConcentrationReport {
    let g = state.grid();
    debug_assert!(r >= 2.0 * g.h_min() * (1.0 - 1e-12), "scan radius below 2h");
    let density = local_energy_density(state);
    let disk = g.ball_offsets(r);
    let area = g.cell_volume();
    let local: Vec<f64> = (0..g.node_count())
        .into_par_iter()
        .map(|c| {
            area * disk
                .iter()
                .filter_map(|o| g.offset(c, o))
                .map(|j| density[j])
                .sum::<f64>()
        })
        .collect();
    let max_local = local.iter().cloned().fold(0.0, f64::max);
    let centers: Vec<usize> = (0..local.len()).filter(|&c| local[c] >= threshold).collect();
    ConcentrationReport {
        max_local,
        radius: r,
        threshold,
        fired: !centers.is_empty(),
        centers,
        local,
    }
}

/// `(Y1, Y2)` on the cylinder `B_r(x0) x [t0 - r^2, t0]`, with `x0` the node
/// `center` and `t0` the time of the last state in `window`. Space-time means
/// weight nodes in the disk equally and time levels in the window equally;
/// `[P]` is the disk mean at each time level.
pub fn y_quantities(window: &[FlowState], center: usize, r: f64) -> Result<(f64, f64)> {
    let last = window
        .last()
        .ok_or_else(|| Error::WindowTooShort("empty window".into()))?;
    let t0 = last.t;
    let start = t0 - r * r;
    let eps = 1e-12 * (1.0 + t0.abs());
    if window[0].t > start + eps {
        return Err(Error::WindowTooShort(format!(
            "window starts at {} but the cylinder needs {}",
            window[0].t, start
        )));
    }
    let g = last.grid();
    let nodes: Vec<usize> = g.ball_offsets(r).iter().filter_map(|o| g.offset(center, o)).collect();
    let slices: Vec<&FlowState> = window
        .iter()
        .filter(|s| s.t >= start - eps && s.t <= t0 + eps)
        .collect();
    let count = (nodes.len() * slices.len()) as f64;

    let mut mean_u = [0.0; 2];
    for s in &slices {
        for &j in &nodes {
            mean_u[0] += s.u.values[j][0];
            mean_u[1] += s.u.values[j][1];
        }
    }
    mean_u = mean_u.map(|v| v / count);

    let mut y1 = 0.0;
    let mut y2 = 0.0;
    for s in &slices {
        let d = &s.directors;
        let p_mean = nodes.iter().map(|&j| s.p.values[j]).sum::<f64>() / nodes.len() as f64;
        for &j in &nodes {
            let du = [s.u.values[j][0] - mean_u[0], s.u.values[j][1] - mean_u[1]];
            let gn = mat_norm2(&jacobian_at(&d.n, s.grid(), j));
            let gm = mat_norm2(&jacobian_at(&d.m, s.grid(), j));
            y1 += (du[0] * du[0] + du[1] * du[1]).powi(2) + gn * gn + gm * gm;
            y2 += (s.p.values[j] - p_mean).abs().powf(4.0 / 3.0);
        }
    }
    Ok(((y1 / count).powf(0.25), r * (y2 / count).powf(0.75)))
}

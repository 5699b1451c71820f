//! Named initial-data recipes.
//!
//! Every recipe returns a divergence-free velocity (projected; zero on 3-D
//! grids) and an admissible director pair. On dirichlet grids the director
//! values on the faces double as boundary data.

use super::rng::SplitMix64;
use crate::error::{Error, Result};
use crate::field::{DirectorPairField, VectorField2D};
use crate::grid::GridSpec;
use crate::hydro::pressure_projection;
use crate::manifold::retract_field;
use crate::vec3::{mat_vec, rotation, Vec3};

const E1: Vec3 = [1.0, 0.0, 0.0];
const E3: Vec3 = [0.0, 0.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recipe {
    /// `u = 0`, `(n, m) = (e3, e1)`.
    Constant,
    /// `u = 0`, `n = (cos a x1, sin a x1, 0)`, `m = e3`; `a` = wavenumber.
    CircleWave,
    /// `u = A (sin kx cos ky, -cos kx sin ky)` with `k = 2 pi / length`, constant directors.
    TaylorGreen,
    /// Random low-mode velocity (projected) and a random smooth rotation of `(e3, e1)`.
    RandomSmooth,
    /// Two opposite Gaussian vortices of radius `width`, constant directors.
    VortexPair,
    /// Directors rotated by `2 pi A rho^2 / (rho^2 + width^2)` about the
    /// azimuthal axis around the domain centre: energy concentrated within
    /// `width` of the centre, `u = 0`.
    ConcentratedBump,
}

impl Recipe {
    pub const ALL: [Recipe; 6] = [
        Recipe::Constant,
        Recipe::CircleWave,
        Recipe::TaylorGreen,
        Recipe::RandomSmooth,
        Recipe::VortexPair,
        Recipe::ConcentratedBump,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Recipe::Constant => "constant",
            Recipe::CircleWave => "circle-wave",
            Recipe::TaylorGreen => "taylor-green",
            Recipe::RandomSmooth => "random-smooth",
            Recipe::VortexPair => "vortex-pair",
            Recipe::ConcentratedBump => "concentrated-bump",
        }
    }

    pub fn parse(s: &str) -> Result<Recipe> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownRecipe(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecipeParams {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub width: f64,
}

impl Default for RecipeParams {
    fn default() -> Self {
        RecipeParams {
            amplitude: 1.0,
            wavenumber: 1.0,
            width: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub u: VectorField2D,
    pub directors: DirectorPairField,
}

/// Displacement from the domain centre, minimum image on periodic axes.
fn from_centre(grid: &GridSpec, x: [f64; 3]) -> [f64; 3] {
    let mut d = [0.0; 3];
    for a in 0..grid.ndim() {
        let l = grid.length(a);
        let mut v = x[a] - 0.5 * l;
        if grid.is_periodic(a) {
            v -= l * (v / l).round();
        }
        d[a] = v;
    }
    d
}

/// Random trigonometric polynomial with modes `|k_a| <= 2` per axis,
/// periodic over the domain, amplitude ~ 1.
fn random_modes(rng: &mut SplitMix64, grid: &GridSpec) -> impl Fn([f64; 3]) -> f64 {
    let mut modes = Vec::new();
    let kz_max = if grid.ndim() == 3 { 2 } else { 0 };
    for kz in -kz_max..=kz_max {
        for ky in -2i32..=2 {
            for kx in -2i32..=2 {
                let w = [kx as f64, ky as f64, kz as f64];
                let decay = 1.0 / (1.0 + w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
                modes.push((w, rng.gaussian() * decay, rng.uniform(0.0, 2.0 * std::f64::consts::PI)));
            }
        }
    }
    let scale: Vec<f64> = (0..3)
        .map(|a| {
            if a < grid.ndim() {
                2.0 * std::f64::consts::PI / grid.length(a)
            } else {
                0.0
            }
        })
        .collect();
    move |x| {
        modes
            .iter()
            .map(|(w, amp, phase)| {
                amp * (w[0] * scale[0] * x[0] + w[1] * scale[1] * x[1] + w[2] * scale[2] * x[2] + phase).cos()
            })
            .sum()
    }
}

fn project(u: VectorField2D) -> Result<VectorField2D> {
    if u.grid.ndim() != 2 {
        return Ok(VectorField2D::zeros(u.grid));
    }
    Ok(pressure_projection(&u)?.u)
}

/// Build the initial state for `recipe`; randomised recipes depend only on `seed`.
pub fn generate_initial(recipe: Recipe, seed: u64, grid: &GridSpec, p: &RecipeParams) -> Result<InitialData> {
    let zeros = VectorField2D::zeros(grid.clone());
    let constant = || DirectorPairField::constant(grid.clone(), E3, E1);
    let mut data = match recipe {
        Recipe::Constant => InitialData {
            u: zeros,
            directors: constant(),
        },
        Recipe::CircleWave => {
            let a = p.wavenumber;
            let directors =
                DirectorPairField::from_fn(grid.clone(), |x| ([(a * x[0]).cos(), (a * x[0]).sin(), 0.0], E3));
            InitialData { u: zeros, directors }
        }
        Recipe::TaylorGreen => {
            let k = 2.0 * std::f64::consts::PI / grid.length(0);
            let ky = 2.0 * std::f64::consts::PI / grid.length(1);
            let u = VectorField2D::from_fn(grid.clone(), |x| {
                [
                    p.amplitude * (k * x[0]).sin() * (ky * x[1]).cos(),
                    -p.amplitude * (k * x[0]).cos() * (ky * x[1]).sin(),
                ]
            });
            InitialData {
                u: project(u)?,
                directors: constant(),
            }
        }
        Recipe::RandomSmooth => {
            let mut rng = SplitMix64::new(seed);
            let ux = random_modes(&mut rng, grid);
            let uy = random_modes(&mut rng, grid);
            let angle = random_modes(&mut rng, grid);
            let axis: Vec<_> = (0..3).map(|_| random_modes(&mut rng, grid)).collect();
            let u = VectorField2D::from_fn(grid.clone(), |x| [p.amplitude * ux(x), p.amplitude * uy(x)]);
            let directors = DirectorPairField::from_fn(grid.clone(), |x| {
                // axis offset keeps it away from zero
                let mut w = [1.5 + axis[0](x), axis[1](x), axis[2](x)];
                let len = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt().max(1e-3);
                w = w.map(|v| v / len);
                let r = rotation(&w, std::f64::consts::PI * angle(x));
                (mat_vec(&r, &E3), mat_vec(&r, &E1))
            });
            InitialData {
                u: project(u)?,
                directors,
            }
        }
        Recipe::VortexPair => {
            let w2 = p.width * p.width;
            let sep = 0.15 * grid.length(0);
            let u = VectorField2D::from_fn(grid.clone(), |x| {
                let d = from_centre(grid, x);
                let mut v = [0.0; 2];
                for (sign, cx) in [(1.0, -sep), (-1.0, sep)] {
                    let (dx, dy) = (d[0] - cx, d[1]);
                    // u = curl of the stream function A exp(-r^2 / w^2)
                    let g = sign * p.amplitude * (-(dx * dx + dy * dy) / w2).exp() * 2.0 / w2;
                    v[0] += -g * dy;
                    v[1] += g * dx;
                }
                v
            });
            InitialData {
                u: project(u)?,
                directors: constant(),
            }
        }
        Recipe::ConcentratedBump => {
            let w2 = p.width * p.width;
            let directors = DirectorPairField::from_fn(grid.clone(), |x| {
                let d = from_centre(grid, x);
                let rho2 = d[0] * d[0] + d[1] * d[1];
                if rho2 == 0.0 {
                    return (E3, E1);
                }
                let rho = rho2.sqrt();
                let axis = [-d[1] / rho, d[0] / rho, 0.0];
                let r = rotation(&axis, 2.0 * std::f64::consts::PI * p.amplitude * rho2 / (rho2 + w2));
                (mat_vec(&r, &E3), mat_vec(&r, &E1))
            });
            InitialData { u: zeros, directors }
        }
    };
    if grid.ndim() != 2 {
        data.u = VectorField2D::zeros(grid.clone());
    }
    retract_field(&mut data.directors)?;
    Ok(data)
}

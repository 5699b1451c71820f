//! Fixtures shared by the criterion benches.

use std::f64::consts::TAU;

use biaxial::io::{generate_initial, Recipe, RecipeParams};
use biaxial::{Boundary, DirectorPairField, FlowState, FrankConstants, GridSpec, VectorField2D};

/// Constants with every term active.
pub fn general_constants() -> FrankConstants {
    FrankConstants::new([1.0, 2.0, 1.5, 1.2, 0.8, 1.1, 0.3, 0.2, 0.1, 0.4, 0.5, 0.6]).expect("admissible constants")
}

/// Random smooth director pair on the unit cube with `cells` per axis.
pub fn cube_field(cells: usize) -> DirectorPairField {
    let grid = GridSpec::uniform(3, cells, 1.0, Boundary::Dirichlet).expect("valid grid");
    generate_initial(Recipe::RandomSmooth, 1, &grid, &RecipeParams::default())
        .expect("recipe")
        .directors
}

/// Random smooth flow state on the `2 pi` torus.
pub fn torus_state(cells: usize) -> FlowState {
    let grid = GridSpec::uniform(2, cells, TAU, Boundary::Periodic).expect("valid grid");
    let init = generate_initial(Recipe::RandomSmooth, 1, &grid, &RecipeParams::default()).expect("recipe");
    FlowState::new(init.u, init.directors, 1.0).expect("valid state")
}

/// Non-solenoidal velocity in the unit box, zero on the walls.
pub fn box_velocity(cells: usize) -> VectorField2D {
    let grid = GridSpec::uniform(2, cells, 1.0, Boundary::Dirichlet).expect("valid grid");
    let g = grid.clone();
    let mut u = VectorField2D::from_fn(grid, |x| [(7.0 * x[1]).sin(), (5.0 * x[0]).cos()]);
    for (i, v) in u.values.iter_mut().enumerate() {
        if g.is_boundary_node(i) {
            *v = [0.0; 2];
        }
    }
    u
}

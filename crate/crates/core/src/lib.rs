//! Numerical toolkit for biaxial nematic liquid crystals described by an
//! orthonormal director pair `(n, m)`.
//!
//! Two halves share the same field and stencil machinery:
//!
//! * [`energy`] and [`minimize`]: the twelve-constant biaxial Oseen-Frank
//!   energy, its null-Lagrangian modification, exact discrete variational
//!   gradients, projected gradient flow on 3-D grids, and scaled-energy
//!   singularity scans.
//! * [`hydro`]: a 2-D solver for the simplified biaxial Ericksen-Leslie
//!   system (incompressible Navier-Stokes coupled to the constrained
//!   director heat flow) with energy-budget, constraint and concentration
//!   diagnostics.
//!
//! [`io`] holds the configuration format, initial-data recipes and the
//! snapshot / time-series writers; [`run`] drives complete runs.

// Index loops mirror the tensor notation; `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod dual;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod hydro;
pub mod io;
pub mod krylov;
pub mod manifold;
pub mod minimize;
pub mod run;
pub mod stencil;
pub mod vec3;

pub use energy::{EnergyBreakdown, FrankConstants, QuadraticForm};
pub use error::{Error, Result};
pub use field::{DirectorPairField, Jacobian, ScalarField, VectorField2D};
pub use grid::{Boundary, GridSpec};
pub use hydro::{ConcentrationReport, EnergyBudget, FlowState};
pub use minimize::{MinimizeConfig, MinimizeResult};

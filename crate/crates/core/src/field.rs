//! Field containers on a [`GridSpec`].

use crate::grid::GridSpec;
use crate::vec3::{Mat3, Vec3};

/// Orthonormal director pair `(n, m)` per node.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectorPairField {
    pub grid: GridSpec,
    pub n: Vec<Vec3>,
    pub m: Vec<Vec3>,
}

impl DirectorPairField {
    pub fn constant(grid: GridSpec, n: Vec3, m: Vec3) -> Self {
        let len = grid.node_count();
        DirectorPairField {
            grid,
            n: vec![n; len],
            m: vec![m; len],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 3]) -> (Vec3, Vec3)) -> Self {
        let (n, m) = (0..grid.node_count()).map(|i| f(grid.position(i))).unzip();
        DirectorPairField { grid, n, m }
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    /// Apply a fixed rotation to every director.
    pub fn rotated(&self, r: &Mat3) -> Self {
        use crate::vec3::mat_vec;
        DirectorPairField {
            grid: self.grid.clone(),
            n: self.n.iter().map(|v| mat_vec(r, v)).collect(),
            m: self.m.iter().map(|v| mat_vec(r, v)).collect(),
        }
    }
}

/// Velocity field on a 2-D grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2D {
    pub grid: GridSpec,
    pub values: Vec<[f64; 2]>,
}

impl VectorField2D {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.node_count();
        VectorField2D {
            grid,
            values: vec![[0.0; 2]; len],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 3]) -> [f64; 2]) -> Self {
        let values = (0..grid.node_count()).map(|i| f(grid.position(i))).collect();
        VectorField2D { grid, values }
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.node_count();
        ScalarField {
            grid,
            values: vec![0.0; len],
        }
    }
}

/// Per-node 3 x d derivative matrices, stored padded to 3 x 3:
/// `values[node][i][a]` is the derivative of component `i` along axis `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian {
    pub values: Vec<Mat3>,
}

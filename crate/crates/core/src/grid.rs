//! Uniform tensor-product grids with collocated nodes.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Wrap-around; `N` cells carry `N` nodes.
    Periodic,
    /// Fixed boundary values; `N` cells carry `N + 1` nodes including both faces.
    Dirichlet,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Dirichlet => "dirichlet",
        }
    }
}

/// Grid description. Axes beyond `ndim` are absent: one node, zero derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    dims: Vec<usize>,
    spacing: Vec<f64>,
    boundary: Vec<Boundary>,
}

impl GridSpec {
    pub fn new(dims: Vec<usize>, spacing: Vec<f64>, boundary: Vec<Boundary>) -> Result<Self> {
        let nd = dims.len();
        if !(2..=3).contains(&nd) || spacing.len() != nd || boundary.len() != nd {
            return Err(Error::InvalidGrid(format!(
                "need 2 or 3 axes with matching spacing/boundary, got {}/{}/{}",
                nd,
                spacing.len(),
                boundary.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 4) {
            return Err(Error::InvalidGrid(format!("cell count {d} < 4")));
        }
        if let Some(h) = spacing.iter().find(|&&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid(format!("spacing {h} not positive")));
        }
        Ok(GridSpec {
            dims,
            spacing,
            boundary,
        })
    }

    /// Cube `[0, length]^ndim` (or torus) with `cells` cells per axis.
    pub fn uniform(ndim: usize, cells: usize, length: f64, boundary: Boundary) -> Result<Self> {
        GridSpec::new(
            vec![cells; ndim],
            vec![length / cells as f64; ndim],
            vec![boundary; ndim],
        )
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn boundary(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    /// Smallest spacing over the present axes.
    pub fn h_min(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.dims[axis] as f64 * self.spacing[axis]
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        axis < self.ndim() && self.boundary[axis] == Boundary::Periodic
    }

    /// Node counts per axis, padded with 1 for absent axes.
    pub fn shape(&self) -> [usize; 3] {
        let mut s = [1; 3];
        for a in 0..self.ndim() {
            s[a] = match self.boundary[a] {
                Boundary::Periodic => self.dims[a],
                Boundary::Dirichlet => self.dims[a] + 1,
            };
        }
        s
    }

    pub fn node_count(&self) -> usize {
        self.shape().iter().product()
    }

    /// Linear index, x fastest.
    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        let s = self.shape();
        c[0] + s[0] * (c[1] + s[1] * c[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let s = self.shape();
        [idx % s[0], (idx / s[0]) % s[1], idx / (s[0] * s[1])]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let mut x = [0.0; 3];
        for a in 0..self.ndim() {
            x[a] = c[a] as f64 * self.spacing[a];
        }
        x
    }

    /// Node on a dirichlet face.
    pub fn is_boundary_node(&self, idx: usize) -> bool {
        let c = self.coords(idx);
        let s = self.shape();
        (0..self.ndim()).any(|a| self.boundary[a] == Boundary::Dirichlet && (c[a] == 0 || c[a] + 1 == s[a]))
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Trapezoid weights: half weight per dirichlet face the node sits on.
    pub fn weights(&self) -> Vec<f64> {
        let s = self.shape();
        let vol = self.cell_volume();
        (0..self.node_count())
            .map(|idx| {
                let c = self.coords(idx);
                let mut w = vol;
                for a in 0..self.ndim() {
                    if self.boundary[a] == Boundary::Dirichlet && (c[a] == 0 || c[a] + 1 == s[a]) {
                        w *= 0.5;
                    }
                }
                w
            })
            .collect()
    }

    /// Neighbour of `idx` shifted by `off` along `axis`, wrapping on periodic
    /// axes; `None` when it leaves a dirichlet grid.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, off: isize) -> Option<usize> {
        let s = self.shape();
        let stride: usize = s[..axis].iter().product();
        let n = s[axis] as isize;
        let c = ((idx / stride) % s[axis]) as isize;
        let p = c + off;
        let p = if self.is_periodic(axis) {
            p.rem_euclid(n)
        } else if p < 0 || p >= n {
            return None;
        } else {
            p
        };
        Some((idx as isize + (p - c) * stride as isize) as usize)
    }

    /// Minimum-image displacement from node `a` to node `b` in physical units.
    pub fn displacement(&self, a: usize, b: usize) -> [f64; 3] {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let s = self.shape();
        let mut d = [0.0; 3];
        for ax in 0..self.ndim() {
            let mut k = cb[ax] as isize - ca[ax] as isize;
            if self.is_periodic(ax) {
                let n = s[ax] as isize;
                k = (k + n / 2).rem_euclid(n) - n / 2;
            }
            d[ax] = k as f64 * self.spacing[ax];
        }
        d
    }

    /// Integer offsets (per present axis) of all nodes within distance `r`
    /// of a node, in a fixed order.
    pub fn ball_offsets(&self, r: f64) -> Vec<[isize; 3]> {
        let mut ext = [0isize; 3];
        for a in 0..self.ndim() {
            ext[a] = (r / self.spacing[a]).floor() as isize;
        }
        let mut out = Vec::new();
        for k in -ext[2]..=ext[2] {
            for j in -ext[1]..=ext[1] {
                for i in -ext[0]..=ext[0] {
                    let o = [i, j, k];
                    let d2: f64 = (0..self.ndim()).map(|a| (o[a] as f64 * self.spacing[a]).powi(2)).sum();
                    if d2 <= r * r * (1.0 + 1e-12) {
                        out.push(o);
                    }
                }
            }
        }
        out
    }

    /// Apply an offset from [`GridSpec::ball_offsets`]; `None` when it leaves
    /// a dirichlet grid.
    pub fn offset(&self, idx: usize, o: &[isize; 3]) -> Option<usize> {
        let mut cur = idx;
        for a in 0..self.ndim() {
            if o[a] != 0 {
                cur = self.shift(cur, a, o[a])?;
            }
        }
        Some(cur)
    }
}

//! Periodic 3-D grids, node-collocated fields and centered-difference calculus.

pub(crate) mod ops;
pub(crate) mod spectral;

#[allow(unused_imports)]
pub(crate) use ops::{check_periodic, check_same};
pub use ops::{curl, divergence, gradient, inner, inner_vector, inverse_curl, laplacian};

use serde::Serialize;

use crate::error::GridError;

/// Upper bound on node count accepted by the constructors.
pub const MAX_NODES: usize = 1 << 28;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid3 {
    n: [usize; 3],
    h: [f64; 3],
    origin: [f64; 3],
    periodic: bool,
}

impl Grid3 {
    pub fn periodic(n: [usize; 3], h: [f64; 3], origin: [f64; 3]) -> Result<Self, GridError> {
        Self::build(n, h, origin, true)
    }

    /// A grid flagged non-periodic. Only useful for sampling; every stencil
    /// operator rejects it.
    pub fn open(n: [usize; 3], h: [f64; 3], origin: [f64; 3]) -> Result<Self, GridError> {
        Self::build(n, h, origin, false)
    }

    /// Periodic cube `[0, length)^3` with `n` cells per axis.
    pub fn cube(n: usize, length: f64) -> Result<Self, GridError> {
        let h = length / n as f64;
        Self::periodic([n; 3], [h; 3], [0.0; 3])
    }

    /// Periodic box `[0, lengths)` with per-axis cell counts.
    pub fn boxed(n: [usize; 3], lengths: [f64; 3]) -> Result<Self, GridError> {
        let h = [lengths[0] / n[0] as f64, lengths[1] / n[1] as f64, lengths[2] / n[2] as f64];
        Self::periodic(n, h, [0.0; 3])
    }

    fn build(n: [usize; 3], h: [f64; 3], origin: [f64; 3], periodic: bool) -> Result<Self, GridError> {
        if n.iter().any(|&k| k < 4) {
            return Err(GridError::TooFewCells(n));
        }
        let total = n[0].checked_mul(n[1]).and_then(|x| x.checked_mul(n[2]));
        if !matches!(total, Some(t) if t <= MAX_NODES) {
            return Err(GridError::TooLarge(n));
        }
        if h.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(GridError::BadSpacing(h));
        }
        if origin.iter().any(|x| !x.is_finite()) {
            return Err(GridError::BadOrigin(origin));
        }
        Ok(Grid3 { n, h, origin, periodic })
    }

    pub fn n(&self) -> [usize; 3] {
        self.n
    }

    pub fn h(&self) -> [f64; 3] {
        self.h
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h_min(&self) -> f64 {
        self.h[0].min(self.h[1]).min(self.h[2])
    }

    pub fn cell_volume(&self) -> f64 {
        self.h[0] * self.h[1] * self.h[2]
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.n[0] as f64 * self.h[0], self.n[1] as f64 * self.h[1], self.n[2] as f64 * self.h[2]]
    }

    pub fn volume(&self) -> f64 {
        self.len() as f64 * self.cell_volume()
    }

    /// Linear index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let rest = idx / self.n[0];
        [i, rest % self.n[1], rest / self.n[1]]
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + i as f64 * self.h[0],
            self.origin[1] + j as f64 * self.h[1],
            self.origin[2] + k as f64 * self.h[2],
        ]
    }

    pub fn node_position(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.coords(idx);
        self.position(i, j, k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid3,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid3, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &Grid3) -> Self {
        ScalarField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid3, value: f64) -> Self {
        ScalarField { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    pub fn from_fn(grid: &Grid3, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|idx| f(grid.node_position(idx))).collect();
        ScalarField { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid3,
    values: [Vec<f64>; 3],
}

impl VectorField {
    pub fn new(grid: Grid3, values: [Vec<f64>; 3]) -> Result<Self, GridError> {
        for v in &values {
            if v.len() != grid.len() {
                return Err(GridError::LengthMismatch { expected: grid.len(), found: v.len() });
            }
        }
        Ok(VectorField { grid, values })
    }

    pub fn zeros(grid: &Grid3) -> Self {
        let z = vec![0.0; grid.len()];
        VectorField { grid: grid.clone(), values: [z.clone(), z.clone(), z] }
    }

    pub fn from_fn(grid: &Grid3, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.node_position(idx));
            for (c, &x) in v.iter().enumerate() {
                out.values[c][idx] = x;
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.values[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.values
    }

    pub fn components_mut(&mut self) -> &mut [Vec<f64>; 3] {
        &mut self.values
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.values[0][idx], self.values[1][idx], self.values[2][idx]]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| max_abs(v)).fold(0.0, nan_max)
    }

    /// Largest pointwise Euclidean norm.
    pub fn max_norm(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let [a, b, c] = self.at(i);
                (a * a + b * b + c * c).sqrt()
            })
            .fold(0.0, nan_max)
    }
}

/// Maximum that lets a NaN through instead of discarding it.
pub(crate) fn nan_max(m: f64, x: f64) -> f64 {
    if x > m || x.is_nan() {
        x
    } else {
        m
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| nan_max(m, x.abs()))
}

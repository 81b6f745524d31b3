//! Uniform axes and dense row-major fields on the (p, x, t) grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct UniformAxis {
    values: Vec<f64>,
    step: f64,
}

impl UniformAxis {
    /// `n` points from `start` to `end` inclusive.
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter { name: "grid size", reason: "need at least 3 points" });
        }
        let span = end - start;
        if !(span > 0.0 && span.is_finite()) {
            return Err(Error::InvalidParameter { name: "grid extent", reason: "must be positive" });
        }
        let denom = (n - 1) as f64;
        let values = (0..n).map(|i| start + span * (i as f64 / denom)).collect();
        Ok(UniformAxis { values, step: span / denom })
    }

    /// `n` (odd) points on `[-half_width, half_width]`, mirror-exact:
    /// `values[n-1-i] == -values[i]` bitwise.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter { name: "n_p", reason: "must be odd and at least 3" });
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter { name: "p_max", reason: "must be positive" });
        }
        let m = (n - 1) / 2;
        let step = half_width / m as f64;
        let mut values = vec![0.0; n];
        for k in 1..=m {
            let v = half_width * (k as f64 / m as f64);
            values[m + k] = v;
            values[m - k] = -v;
        }
        Ok(UniformAxis { values, step })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Index of the grid point closest to `v`.
    pub fn nearest(&self, v: f64) -> usize {
        let raw = libm::round((v - self.values[0]) / self.step);
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.values.len() - 1)
        }
    }
}

/// Uniform (p, x, t) simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationGrid {
    pub p: UniformAxis,
    pub x: UniformAxis,
    pub t: UniformAxis,
}

impl SimulationGrid {
    pub fn new(n_p: usize, p_max: f64, n_x: usize, length: f64, n_t: usize, t_max: f64) -> Result<Self> {
        Ok(SimulationGrid {
            p: UniformAxis::symmetric(p_max, n_p)?,
            x: UniformAxis::new(0.0, length, n_x)?,
            t: UniformAxis::new(0.0, t_max, n_t)?,
        })
    }

    /// The p-grid must reach at least three Fermi momenta.
    pub fn check_fermi_momentum(&self, p_fermi: f64) -> Result<()> {
        if self.p.last() < 3.0 * p_fermi {
            return Err(Error::InvalidParameter { name: "p_max", reason: "must be at least 3 Fermi momenta" });
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.p.len(), self.x.len(), self.t.len())
    }
}

/// Dense 2D field, row-major `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Field2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Field2 { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Field2 { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Field2 { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Dense 3D field indexed `(p, x, t)`, `t` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3 {
    np: usize,
    nx: usize,
    nt: usize,
    data: Vec<f64>,
}

impl Field3 {
    pub fn zeros(np: usize, nx: usize, nt: usize) -> Self {
        Field3 { np, nx, nt, data: vec![0.0; np * nx * nt] }
    }

    pub fn from_fn(np: usize, nx: usize, nt: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(np * nx * nt);
        for i in 0..np {
            for j in 0..nx {
                for k in 0..nt {
                    data.push(f(i, j, k));
                }
            }
        }
        Field3 { np, nx, nt, data }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.np, self.nx, self.nt)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.nx + j) * self.nt + k]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Pointwise `1 − f`.
    pub fn complement(&self) -> Field3 {
        Field3 { np: self.np, nx: self.nx, nt: self.nt, data: self.data.iter().map(|v| 1.0 - v).collect() }
    }

    /// Samples over p at fixed `(x, t)` indices.
    pub fn p_slice(&self, j: usize, k: usize) -> Vec<f64> {
        (0..self.np).map(|i| self.get(i, j, k)).collect()
    }

    pub fn x_slice(&self, i: usize, k: usize) -> Vec<f64> {
        (0..self.nx).map(|j| self.get(i, j, k)).collect()
    }

    pub fn t_slice(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.nt).map(|k| self.get(i, j, k)).collect()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

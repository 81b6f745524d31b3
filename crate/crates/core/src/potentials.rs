//! Thermal scalar and vector potentials of the damping force.
//!
//! The force `A(p_ref, x)·f′` is split into a static part `A(1 − f₀)`, which
//! integrates in `x` to `φ`, and the departure from equilibrium
//! `A(f₀ − f)`, which integrates in `t` to `a`. With that convention
//! `∂a/∂t + ∂φ/∂x = A·f′` on every grid point up to the quadrature error.

use alloc::vec::Vec;

use crate::equilibrium::EquilibriumField;
use crate::grid::{Field2, Field3, SimulationGrid};
use crate::kernels::KernelSet;
use crate::quadrature::{cumulative_trapezoid, derivative};
use crate::{Error, Result};

/// Gauge fixed by [`ThermalPotentials::extract`].
pub const EXTRACTION_GAUGE: &str = "phi(x=0)=0, a(x,t=0)=0, both at p_ref";

/// `φ(x) = ∫₀ˣ A(p, x′)(1 − f₀(p, x′)) dx′` at momentum index `p_index`.
pub fn scalar_potential(grid: &SimulationGrid, kernels: &KernelSet, equilibrium: &EquilibriumField, p_index: usize) -> Vec<f64> {
    let f0 = equilibrium.f0();
    let integrand: Vec<f64> = (0..grid.x.len()).map(|j| kernels.a(p_index, j) * (1.0 - f0.get(p_index, j))).collect();
    cumulative_trapezoid(&integrand, grid.x.step())
}

/// `φ_ss(x) = ∫₀ˣ A(p, x′) f′(x′) dx′` for a time-independent hole slice.
pub fn steady_state_scalar(grid: &SimulationGrid, kernels: &KernelSet, hole: &[f64], p_index: usize) -> Vec<f64> {
    let integrand: Vec<f64> = hole.iter().enumerate().map(|(j, &h)| kernels.a(p_index, j) * h).collect();
    cumulative_trapezoid(&integrand, grid.x.step())
}

/// `a(x, t) = ∫₀ᵗ A(p, x)(f₀(p, x) − f(p, x, t′)) dt′`, indexed `(x, t)`.
pub fn vector_potential(grid: &SimulationGrid, kernels: &KernelSet, equilibrium: &EquilibriumField, f: &Field3, p_index: usize) -> Field2 {
    let (nx, nt) = (grid.x.len(), grid.t.len());
    let f0 = equilibrium.f0();
    let mut a_vec = Field2::zeros(nx, nt);
    for j in 0..nx {
        let a = kernels.a(p_index, j);
        let e = f0.get(p_index, j);
        let departure: Vec<f64> = f.t_slice(p_index, j).iter().map(|&v| a * (e - v)).collect();
        for (k, v) in cumulative_trapezoid(&departure, grid.t.step()).into_iter().enumerate() {
            a_vec.set(j, k, v);
        }
    }
    a_vec
}

/// `φ(x, t)` and `a(x, t)`, both indexed `(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalPotentials {
    phi: Field2,
    a_vec: Field2,
    hx: f64,
    ht: f64,
}

impl ThermalPotentials {
    /// Extracts both potentials at the momentum index `p_index`, with
    /// `φ(0) = 0` and `a(x, 0) = 0`.
    pub fn extract(
        grid: &SimulationGrid,
        kernels: &KernelSet,
        equilibrium: &EquilibriumField,
        f: &Field3,
        p_index: usize,
    ) -> Result<Self> {
        let (np, nx, nt) = grid.shape();
        if f.shape() != (np, nx, nt) {
            return Err(Error::ShapeMismatch { expected: np * nx * nt, found: f.data().len() });
        }
        if p_index >= np {
            return Err(Error::InvalidParameter { name: "p_index", reason: "outside the p-grid" });
        }
        let phi_x = scalar_potential(grid, kernels, equilibrium, p_index);
        let phi = Field2::from_fn(nx, nt, |j, _| phi_x[j]);
        let a_vec = vector_potential(grid, kernels, equilibrium, f, p_index);
        let (hx, ht) = (grid.x.step(), grid.t.step());
        Ok(ThermalPotentials { phi, a_vec, hx, ht })
    }

    /// Builds potentials directly from `(x, t)` fields.
    pub fn from_fields(phi: Field2, a_vec: Field2, hx: f64, ht: f64) -> Result<Self> {
        if phi.rows() != a_vec.rows() || phi.cols() != a_vec.cols() {
            return Err(Error::ShapeMismatch { expected: phi.data().len(), found: a_vec.data().len() });
        }
        if !(hx > 0.0 && ht > 0.0) {
            return Err(Error::InvalidParameter { name: "step", reason: "grid steps must be positive" });
        }
        Ok(ThermalPotentials { phi, a_vec, hx, ht })
    }

    pub fn phi(&self) -> &Field2 {
        &self.phi
    }

    pub fn a_vec(&self) -> &Field2 {
        &self.a_vec
    }

    /// `φ(x)` at time index `k`.
    pub fn phi_profile(&self, k: usize) -> Vec<f64> {
        self.phi.column(k)
    }

    /// `a(x_j, t)` as a time series.
    pub fn a_series(&self, j: usize) -> Vec<f64> {
        self.a_vec.row(j).to_vec()
    }

    /// `φ → φ − ∂χ/∂t`, `a → a + ∂χ/∂x`.
    pub fn gauge_transform(&self, chi: &Field2) -> Result<Self> {
        let (nx, nt) = (self.phi.rows(), self.phi.cols());
        if chi.rows() != nx || chi.cols() != nt {
            return Err(Error::ShapeMismatch { expected: nx * nt, found: chi.data().len() });
        }
        let (dchi_dx, dchi_dt) = partials(chi, self.hx, self.ht);
        let phi = Field2::from_fn(nx, nt, |j, k| self.phi.get(j, k) - dchi_dt.get(j, k));
        let a_vec = Field2::from_fn(nx, nt, |j, k| self.a_vec.get(j, k) + dchi_dx.get(j, k));
        Ok(ThermalPotentials { phi, a_vec, hx: self.hx, ht: self.ht })
    }

    /// Same transform with the partial derivatives of `χ` supplied as
    /// functions of `(x, t)`.
    pub fn gauge_transform_analytic(
        &self,
        x: &[f64],
        t: &[f64],
        dchi_dx: impl Fn(f64, f64) -> f64,
        dchi_dt: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let (nx, nt) = (self.phi.rows(), self.phi.cols());
        if x.len() != nx || t.len() != nt {
            return Err(Error::ShapeMismatch { expected: nx * nt, found: x.len() * t.len() });
        }
        let phi = Field2::from_fn(nx, nt, |j, k| self.phi.get(j, k) - dchi_dt(x[j], t[k]));
        let a_vec = Field2::from_fn(nx, nt, |j, k| self.a_vec.get(j, k) + dchi_dx(x[j], t[k]));
        Ok(ThermalPotentials { phi, a_vec, hx: self.hx, ht: self.ht })
    }

    /// `∂a/∂t + ∂φ/∂x` by finite differences.
    pub fn reconstruct_force(&self) -> Field2 {
        let (_, da_dt) = partials(&self.a_vec, self.hx, self.ht);
        let (dphi_dx, _) = partials(&self.phi, self.hx, self.ht);
        let (nx, nt) = (self.phi.rows(), self.phi.cols());
        Field2::from_fn(nx, nt, |j, k| da_dt.get(j, k) + dphi_dx.get(j, k))
    }
}

/// `(∂/∂x, ∂/∂t)` of an `(x, t)` field.
fn partials(field: &Field2, hx: f64, ht: f64) -> (Field2, Field2) {
    let (nx, nt) = (field.rows(), field.cols());
    let mut dx = Field2::zeros(nx, nt);
    let mut dt = Field2::zeros(nx, nt);
    for k in 0..nt {
        for (j, v) in derivative(&field.column(k), hx).into_iter().enumerate() {
            dx.set(j, k, v);
        }
    }
    for j in 0..nx {
        for (k, v) in derivative(field.row(j), ht).into_iter().enumerate() {
            dt.set(j, k, v);
        }
    }
    (dx, dt)
}

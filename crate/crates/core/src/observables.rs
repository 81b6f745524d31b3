//! Spatial profiles at one time snapshot: damping force, density, charge
//! current, heat current and the thermal scalar potential.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::band::Band;
use crate::grid::{Field3, SimulationGrid};
use crate::kernels::KernelSet;
use crate::potentials::ThermalPotentials;
use crate::quadrature::trapezoid;
use crate::{Error, Result};

fn integrate(values: &[f64], h: f64) -> f64 {
    trapezoid(values, h)
}

/// `n = (1/2π) ∫ f dp`.
pub fn density(p_slice: &[f64], hp: f64) -> f64 {
    integrate(p_slice, hp) / (2.0 * PI)
}

/// `j = −(1/2π) ∫ (p/m) f dp` (charge current, electron charge −1).
pub fn charge_current(band: &Band, p: &[f64], p_slice: &[f64], hp: f64) -> f64 {
    let w: Vec<f64> = p.iter().zip(p_slice).map(|(&p, &f)| band.velocity(p) * f).collect();
    -integrate(&w, hp) / (2.0 * PI)
}

/// `j_q = (1/2π) ∫ ξ_p (p/m) f dp`.
pub fn heat_current(band: &Band, p: &[f64], p_slice: &[f64], hp: f64) -> f64 {
    let w: Vec<f64> = p.iter().zip(p_slice).map(|(&p, &f)| band.xi(p) * band.velocity(p) * f).collect();
    integrate(&w, hp) / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableProfiles {
    pub x: Vec<f64>,
    /// `A(p_ref, x)·f′(p_ref, x, t)`.
    pub f_damp: Vec<f64>,
    pub n: Vec<f64>,
    pub j: Vec<f64>,
    pub j_q: Vec<f64>,
    pub phi: Vec<f64>,
}

impl ObservableProfiles {
    /// Profiles at time index `t_index`, damping force taken at `p_index`.
    pub fn compute(
        grid: &SimulationGrid,
        band: &Band,
        kernels: &KernelSet,
        f: &Field3,
        potentials: &ThermalPotentials,
        p_index: usize,
        t_index: usize,
    ) -> Result<Self> {
        let (np, nx, nt) = grid.shape();
        if f.shape() != (np, nx, nt) {
            return Err(Error::ShapeMismatch { expected: np * nx * nt, found: f.data().len() });
        }
        if t_index >= nt || p_index >= np {
            return Err(Error::InvalidParameter { name: "snapshot", reason: "index outside the grid" });
        }
        let hp = grid.p.step();
        let p = grid.p.values();
        let mut out = ObservableProfiles {
            x: grid.x.values().to_vec(),
            f_damp: Vec::with_capacity(nx),
            n: Vec::with_capacity(nx),
            j: Vec::with_capacity(nx),
            j_q: Vec::with_capacity(nx),
            phi: potentials.phi_profile(t_index),
        };
        for jx in 0..nx {
            let slice = f.p_slice(jx, t_index);
            out.f_damp.push(kernels.a(p_index, jx) * (1.0 - f.get(p_index, jx, t_index)));
            out.n.push(density(&slice, hp));
            out.j.push(charge_current(band, p, &slice, hp));
            out.j_q.push(heat_current(band, p, &slice, hp));
        }
        Ok(out)
    }
}

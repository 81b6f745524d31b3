#![allow(dead_code)]

use qbe_core::kernels::KernelSet;
use qbe_core::{Band, EquilibriumField, ExternalField, ModelParameters, PhononBath, Prepared, SimulationGrid, TemperatureProfile};

pub const KB: f64 = 8.617_333_262e-5;

pub fn default_prepared(t0: f64) -> Prepared {
    Prepared::new(ModelParameters { t0, ..Default::default() }).unwrap()
}

pub fn collisionless_params() -> ModelParameters {
    ModelParameters {
        bath: PhononBath::default().with_coupling_g2(0.0).unwrap(),
        field_strength: 0.0,
        ..Default::default()
    }
}

/// Zero kernels, zero field, uniform temperature.
pub struct Bare {
    pub grid: SimulationGrid,
    pub equilibrium: EquilibriumField,
    pub kernels: KernelSet,
    pub field: ExternalField,
}

pub fn bare(n_p: usize, n_x: usize, n_t: usize, p_max: f64, length: f64, t_max: f64) -> Bare {
    let grid = SimulationGrid::new(n_p, p_max, n_x, length, n_t, t_max).unwrap();
    let profile = TemperatureProfile::new(300.0, 0.0, length).unwrap();
    let equilibrium = EquilibriumField::build(&profile, Band::new(0.5, 0.004).unwrap(), &grid).unwrap();
    let kernels = KernelSet::zeros(n_p, n_x);
    Bare { grid, equilibrium, kernels, field: ExternalField::zero() }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

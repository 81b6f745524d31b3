//! One-dimensional electron transport under the quantum Boltzmann equation
//! with a temperature-dependent electron–phonon damping force.
//!
//! The crate is `no_std` (with `alloc`). It covers the phonon bath, the
//! complex resolvent kernels, the local-equilibrium distribution, the
//! separated-variable fixed-point solver, the thermal scalar/vector potential
//! extraction and the observable moments. File formats, configuration and
//! the sweep runner live in the `qbe-sim` crate.
//!
//! Internal units: energy in eV, length in nm, time in ħ/eV, momentum in
//! ħ/nm (so ħ = 1) and charge in units of the elementary charge. Temperatures
//! are carried in kelvin and only ever enter through `k_B·T`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod band;
pub mod equilibrium;
mod error;
pub mod grid;
pub mod kernels;
pub mod model;
pub mod observables;
pub mod phonon;
pub mod potentials;
pub mod quadrature;
pub mod solver;
pub mod units;

pub use band::Band;
pub use equilibrium::{EquilibriumField, TemperatureProfile};
pub use error::{Error, Result};
pub use grid::{Field2, Field3, SimulationGrid, UniformAxis};
pub use kernels::{KernelEvaluator, KernelSet, QuadratureOptions, ResolventPair};
pub use model::{ModelParameters, Prepared, RunResult};
pub use observables::ObservableProfiles;
pub use phonon::PhononBath;
pub use potentials::ThermalPotentials;
pub use solver::{ExternalField, SeparatedSolution, SolverOptions};
pub use units::UnitSystem;

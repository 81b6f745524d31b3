//! End-to-end assembly of one run: grids, equilibrium, kernels, solve,
//! potentials and profiles.

use crate::band::Band;
use crate::equilibrium::{chemical_potential_for_density, EquilibriumField, TemperatureProfile};
use crate::grid::{Field3, SimulationGrid};
use crate::kernels::{CorrectionOptions, KernelEvaluator, KernelSet, QuadratureOptions};
use crate::observables::ObservableProfiles;
use crate::phonon::PhononBath;
use crate::potentials::ThermalPotentials;
use crate::solver::{fixed_point_solve, ExternalField, Problem, References, SeparatedSolution, SolverOptions};
use crate::{Error, Result};

/// Every physical and numerical input of a single run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParameters {
    pub bath: PhononBath,
    pub quadrature: QuadratureOptions,
    pub corrections: CorrectionOptions,
    /// Band mass, internal units.
    pub mass: f64,
    /// Line density at the cold end, nm⁻¹. Fixes μ through `T0`.
    pub density_n0: f64,
    /// Overrides the density-derived chemical potential (eV).
    pub mu: Option<f64>,
    /// Temperature at `x = 0`, K.
    pub t0: f64,
    /// K/nm.
    pub gradient: f64,
    /// nm.
    pub length: f64,
    /// V/m.
    pub field_strength: f64,
    pub n_p: usize,
    pub p_max: f64,
    pub n_x: usize,
    pub n_t: usize,
    pub t_max: f64,
    /// Time index the profiles are reported at.
    pub snapshot_index: usize,
    /// `normalization_density` is replaced by `density_n0` when solving.
    pub solver: SolverOptions,
}

impl Default for ModelParameters {
    fn default() -> Self {
        ModelParameters {
            bath: PhononBath::default(),
            quadrature: QuadratureOptions::default(),
            corrections: CorrectionOptions::default(),
            mass: 0.5,
            density_n0: 0.03,
            mu: None,
            t0: 300.0,
            gradient: 2.0,
            length: 2.0,
            field_strength: -1e7,
            n_p: 601,
            p_max: 1.2,
            n_x: 81,
            n_t: 41,
            t_max: 100.0,
            snapshot_index: 0,
            solver: SolverOptions::default(),
        }
    }
}

/// Everything that is fixed before the fixed-point loop starts.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub params: ModelParameters,
    pub grid: SimulationGrid,
    pub profile: TemperatureProfile,
    pub band: Band,
    pub equilibrium: EquilibriumField,
    pub evaluator: KernelEvaluator,
    pub kernels: KernelSet,
    pub field: ExternalField,
    pub refs: References,
}

impl Prepared {
    pub fn new(params: ModelParameters) -> Result<Self> {
        let grid = SimulationGrid::new(params.n_p, params.p_max, params.n_x, params.length, params.n_t, params.t_max)?;
        if params.snapshot_index >= params.n_t {
            return Err(Error::InvalidParameter { name: "snapshot_index", reason: "outside the time grid" });
        }
        let profile = TemperatureProfile::new(params.t0, params.gradient, params.length)?;
        let mu = match params.mu {
            Some(mu) => mu,
            None => chemical_potential_for_density(params.mass, params.density_n0, params.t0)?,
        };
        let band = Band::new(params.mass, mu)?;
        if let Some(pf) = band.fermi_momentum() {
            grid.check_fermi_momentum(pf)?;
        }
        let equilibrium = EquilibriumField::build(&profile, band, &grid)?;
        let field = ExternalField::from_field_strength(params.field_strength);
        let evaluator = KernelEvaluator::new(params.bath, band, params.quadrature)?;
        // References only need the grid and band; kernels are not read yet.
        let placeholder = KernelSet::zeros(grid.p.len(), grid.x.len());
        let refs = Problem { grid: &grid, kernels: &placeholder, equilibrium: &equilibrium, field: &field }
            .references(&params.solver)?;
        let kernels = KernelSet::build(&evaluator, &grid, &equilibrium, params.corrections, refs.x_index)?;
        Ok(Prepared { params, grid, profile, band, equilibrium, evaluator, kernels, field, refs })
    }

    pub fn problem(&self) -> Problem<'_> {
        Problem { grid: &self.grid, kernels: &self.kernels, equilibrium: &self.equilibrium, field: &self.field }
    }

    pub fn solve(&self) -> Result<RunResult> {
        let mut options = self.params.solver;
        options.normalization_density = self.params.density_n0;
        let solution = fixed_point_solve(&self.problem(), &options)?;
        let f = solution.assemble();
        let hole = f.complement();
        let p_index = solution.refs.p_index;
        let potentials = ThermalPotentials::extract(&self.grid, &self.kernels, &self.equilibrium, &f, p_index)?;
        let profiles = ObservableProfiles::compute(
            &self.grid,
            &self.band,
            &self.kernels,
            &f,
            &potentials,
            p_index,
            self.params.snapshot_index,
        )?;
        Ok(RunResult { solution, f, hole, potentials, profiles })
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub solution: SeparatedSolution,
    pub f: Field3,
    pub hole: Field3,
    pub potentials: ThermalPotentials,
    pub profiles: ObservableProfiles,
}

/// Prepares and solves in one call.
pub fn run(params: ModelParameters) -> Result<(Prepared, RunResult)> {
    let prepared = Prepared::new(params)?;
    let result = prepared.solve()?;
    Ok((prepared, result))
}

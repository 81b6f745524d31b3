//! Separated-variable solution `f = 𝒩·P(p)·X(x)·T(t)` of the damped
//! transport equation
//!
//! ```text
//! ∂f/∂t + v ∂f/∂x + (F_ext + A f′) ∂f/∂p = B (∂f′/∂p) f
//! ```
//!
//! The X, P and T factors are each obtained by integrating the log-derivative
//! that follows from dividing the equation by the other two factors. The
//! integrands still depend on the remaining variables, so they are evaluated
//! at fixed reference points (`p_ref`, `x_ref`, `t_ref = 0`). Each factor
//! carries its log-derivative `G = X′/X`, `H = P′/P` exactly as integrated,
//! and the other equations read `G(x_ref)`, `H(p_ref)` from it rather than
//! differencing the tabulated factor. The decay rate `λ` enters the X and P
//! integrands through `∂T/∂t = −λT` and is refit from the T equation on
//! every sweep of the fixed-point loop.
//!
//! With corrections enabled the velocity becomes `v + C`, the force gains
//! `D` and the gain term `E_gain·f′·f` is added on the right.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::equilibrium::EquilibriumField;
use crate::grid::{Field3, SimulationGrid};
use crate::kernels::KernelSet;
use crate::quadrature::{cumulative_trapezoid, cumulative_trapezoid_from, trapezoid};
use crate::units::UnitSystem;
use crate::{Error, Result};

/// Uniform applied electric field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalField {
    field_strength: f64,
    drive: f64,
}

impl ExternalField {
    /// `field_strength` in V/m. The coefficient of `∂f/∂p` is the force the
    /// field exerts on an electron, `−e·E`: a negative field pushes electrons
    /// along `+x`.
    pub fn from_field_strength(field_strength: f64) -> Self {
        ExternalField { field_strength, drive: -UnitSystem::field_to_internal(field_strength) }
    }

    pub fn zero() -> Self {
        ExternalField { field_strength: 0.0, drive: 0.0 }
    }

    /// Field strength in V/m.
    pub fn field_strength(&self) -> f64 {
        self.field_strength
    }

    /// Force on the electron in eV/nm (the `∂U/∂x` slot of the equation).
    pub fn drive(&self) -> f64 {
        self.drive
    }
}

/// How the X equation's leftover p-dependence is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Closure {
    /// Evaluate at `p_ref`.
    #[default]
    Reference,
    /// Average the integrand over right movers weighted by `f₀(1 − f₀)` at `x_ref`.
    FermiWeighted,
}

/// What to do when `F_ext + D + A·f₀` crosses zero on the p-grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularPolicy {
    /// Clamp `|H|` at `cap` and record the crossing.
    Clamp { cap: f64 },
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub lambda0: Option<f64>,
    pub tol: f64,
    pub max_iters: usize,
    /// Reference momentum; the Fermi momentum when `None`.
    pub p_ref: Option<f64>,
    /// Reference position; `L/2` when `None`.
    pub x_ref: Option<f64>,
    /// Line density `n(x_ref, 0)` the solution is normalized to.
    pub normalization_density: f64,
    pub singular: SingularPolicy,
    /// Largest allowed `|ln X|` before reporting overflow.
    pub overflow_log_cap: f64,
    pub closure: Closure,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            lambda0: None,
            tol: 1e-8,
            max_iters: 50,
            p_ref: None,
            x_ref: None,
            normalization_density: 0.03,
            singular: SingularPolicy::Clamp { cap: 1e4 },
            overflow_log_cap: 600.0,
            closure: Closure::Reference,
        }
    }
}

/// Grid indices of the reference points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct References {
    pub p_index: usize,
    pub x_index: usize,
}

/// Borrowed inputs of one solve.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub grid: &'a SimulationGrid,
    pub kernels: &'a KernelSet,
    pub equilibrium: &'a EquilibriumField,
    pub field: &'a ExternalField,
}

impl Problem<'_> {
    /// Coefficient of `∂f/∂p` with `f′` replaced by its equilibrium value.
    fn force(&self, i: usize, j: usize) -> f64 {
        self.field.drive() + self.kernels.d(i, j) + self.kernels.a(i, j) * self.equilibrium.f0().get(i, j)
    }

    fn velocity(&self, i: usize) -> f64 {
        self.equilibrium.band().velocity(self.grid.p.values()[i]) + self.kernels.c(i)
    }

    /// `E_gain·f′` source per unit `f`, with `f′ ≈ 1 − f₀`.
    fn gain(&self, i: usize, j: usize) -> f64 {
        if self.kernels.corrections_enabled() {
            self.kernels.e_gain(i) * (1.0 - self.equilibrium.f0().get(i, j))
        } else {
            0.0
        }
    }

    fn relaxation(&self, i: usize, j: usize) -> f64 {
        self.kernels.b(i, j) * self.equilibrium.f0_dp().get(i, j)
    }

    pub fn references(&self, options: &SolverOptions) -> Result<References> {
        let p_ref = match options.p_ref {
            Some(p) => p,
            None => self.equilibrium.band().fermi_momentum().ok_or(Error::InvalidParameter {
                name: "p_ref",
                reason: "no Fermi momentum (mu <= 0); set p_ref explicitly",
            })?,
        };
        let p_index = self.grid.p.nearest(p_ref);
        if self.grid.p.values()[p_index] == 0.0 {
            return Err(Error::InvalidParameter { name: "p_ref", reason: "reference velocity is zero" });
        }
        if p_index == 0 || p_index + 1 == self.grid.p.len() {
            return Err(Error::InvalidParameter { name: "p_ref", reason: "must be an interior p-grid point" });
        }
        let x_ref = options.x_ref.unwrap_or(0.5 * self.grid.x.last());
        if !(x_ref >= 0.0 && x_ref <= self.grid.x.last()) {
            return Err(Error::InvalidParameter { name: "x_ref", reason: "must lie in [0, L]" });
        }
        Ok(References { p_index, x_index: self.grid.x.nearest(x_ref) })
    }

    fn check_shape(&self, f: &Field3) -> Result<()> {
        let want = self.grid.shape();
        if f.shape() != want {
            return Err(Error::ShapeMismatch { expected: want.0 * want.1 * want.2, found: f.data().len() });
        }
        Ok(())
    }
}

/// `d ln X/dx` at every x-grid point, given `d ln P/dp` on the p-grid.
///
/// Dividing by `P·X·T` leaves only log-derivatives, so neither factor's
/// scale enters.
pub fn x_log_derivative(problem: &Problem<'_>, refs: References, p_log_derivative: &[f64], lambda: f64, closure: Closure) -> Result<Vec<f64>> {
    let nx = problem.grid.x.len();
    let integrand = |i: usize, j: usize| -> Result<f64> {
        let v = problem.velocity(i);
        if v == 0.0 {
            return Err(Error::InvalidParameter { name: "p_ref", reason: "reference velocity is zero" });
        }
        Ok((lambda - problem.force(i, j) * p_log_derivative[i] + problem.relaxation(i, j) + problem.gain(i, j)) / v)
    };
    match closure {
        Closure::Reference => (0..nx).map(|j| integrand(refs.p_index, j)).collect(),
        Closure::FermiWeighted => {
            let np = problem.grid.p.len();
            let f0 = problem.equilibrium.f0();
            let weights: Vec<(usize, f64)> = ((np / 2 + 1)..np)
                .map(|i| {
                    let f = f0.get(i, refs.x_index);
                    (i, f * (1.0 - f))
                })
                .filter(|&(_, w)| w > 1e-12)
                .collect();
            let total: f64 = weights.iter().map(|w| w.1).sum();
            if total == 0.0 {
                return Err(Error::InvalidParameter { name: "closure", reason: "no occupied right movers to weight" });
            }
            (0..nx)
                .map(|j| {
                    let mut acc = 0.0;
                    for &(i, w) in &weights {
                        acc += w * integrand(i, j)?;
                    }
                    Ok(acc / total)
                })
                .collect()
        }
    }
}

/// A factor together with its exact log-derivative on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub values: Vec<f64>,
    pub log_derivative: Vec<f64>,
}

/// X factor: `X(x) = exp ∫₀ˣ G`, cumulative trapezoid, `X(0) = 1`.
pub fn solve_x(problem: &Problem<'_>, refs: References, p_log_derivative: &[f64], lambda: f64, options: &SolverOptions) -> Result<Factor> {
    let g = x_log_derivative(problem, refs, p_log_derivative, lambda, options.closure)?;
    let log_x = cumulative_trapezoid(&g, problem.grid.x.step());
    let xs = problem.grid.x.values();
    for (j, &l) in log_x.iter().enumerate() {
        if !(l.abs() <= options.overflow_log_cap) {
            return Err(Error::Overflow { x: xs[j], log_value: l });
        }
    }
    Ok(Factor { values: log_x.into_iter().map(libm::exp).collect(), log_derivative: g })
}

/// Result of one P update.
#[derive(Debug, Clone, PartialEq)]
pub struct PUpdate {
    pub factor: Factor,
    /// Momenta where the force coefficient crosses zero (integrand clamped).
    pub singular_momenta: Vec<f64>,
}

/// P factor: `P(p) = f₀(p_ref, x_ref)·exp ∫_{p_ref}^{p} H`, integrated
/// outward from `p_ref`, with `x_log_slope = X′/X` at `x_ref`. If the force
/// coefficient vanishes on the whole grid the equation does not constrain P
/// and `previous` is returned.
pub fn solve_p(
    problem: &Problem<'_>,
    refs: References,
    x_log_slope: f64,
    lambda: f64,
    previous: &Factor,
    options: &SolverOptions,
) -> Result<PUpdate> {
    let jx = refs.x_index;
    let p = problem.grid.p.values();
    let np = p.len();
    let forces: Vec<f64> = (0..np).map(|i| problem.force(i, jx)).collect();
    if forces.iter().all(|&f| f == 0.0) {
        return Ok(PUpdate { factor: previous.clone(), singular_momenta: Vec::new() });
    }
    let mut singular_momenta = Vec::new();
    for i in 0..np {
        let crosses = forces[i] == 0.0 || (i + 1 < np && forces[i + 1] != 0.0 && forces[i].signum() != forces[i + 1].signum());
        if crosses {
            if options.singular == SingularPolicy::Fail {
                return Err(Error::SingularDenominator { p: p[i] });
            }
            singular_momenta.push(p[i]);
        }
    }
    let cap = match options.singular {
        SingularPolicy::Clamp { cap } => cap,
        SingularPolicy::Fail => f64::INFINITY,
    };
    let h: Vec<f64> = (0..np)
        .map(|i| {
            let num = problem.relaxation(i, jx) + lambda + problem.gain(i, jx) - problem.velocity(i) * x_log_slope;
            if num == 0.0 {
                return 0.0;
            }
            let v = num / forces[i];
            if v.is_finite() { v.clamp(-cap, cap) } else { cap.copysign(num * forces[i]) }
        })
        .collect();
    let anchor = problem.equilibrium.f0().get(refs.p_index, jx);
    let log_p = cumulative_trapezoid_from(&h, problem.grid.p.step(), refs.p_index);
    let values = log_p.into_iter().map(|l| anchor * libm::exp(l)).collect();
    Ok(PUpdate { factor: Factor { values, log_derivative: h }, singular_momenta })
}

/// Rate `K` of the time equation at the references, from `P′/P` at `p_ref`
/// and `X′/X` at `x_ref`.
pub fn time_rate(problem: &Problem<'_>, refs: References, p_log_slope: f64, x_log_slope: f64) -> f64 {
    let (ip, jx) = (refs.p_index, refs.x_index);
    problem.relaxation(ip, jx) + problem.gain(ip, jx) - problem.velocity(ip) * x_log_slope - problem.force(ip, jx) * p_log_slope
}

/// T factor `T(t) = exp(K·t)` and `K`; the next `λ` is `−K`.
pub fn solve_t(problem: &Problem<'_>, refs: References, p_log_slope: f64, x_log_slope: f64) -> (Vec<f64>, f64) {
    let k = time_rate(problem, refs, p_log_slope, x_log_slope);
    (problem.grid.t.values().iter().map(|&t| libm::exp(k * t)).collect(), k)
}

/// Diagnostics attached to a solution; none of them abort the run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionFlags {
    pub not_converged: bool,
    pub singular_momenta: Vec<f64>,
    /// `K > 0`: the time factor grows instead of decaying.
    pub growing: bool,
    pub f_min: f64,
    pub f_max: f64,
    /// `f` left `[-0.05, 1.05]` somewhere.
    pub bounds_violated: bool,
    pub equilibrium_ratio_min: f64,
    pub equilibrium_ratio_max: f64,
    /// `P/f₀` left `[0.5, 2]` where `f₀(p, x_ref) ≥ 0.1`.
    pub equilibrium_ratio_violated: bool,
}

impl SolutionFlags {
    pub fn any(&self) -> bool {
        self.not_converged || !self.singular_momenta.is_empty() || self.growing || self.bounds_violated || self.equilibrium_ratio_violated
    }
}

/// The factored distribution and its fixed-point history.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedSolution {
    pub p_factor: Vec<f64>,
    pub x_factor: Vec<f64>,
    pub t_factor: Vec<f64>,
    pub norm: f64,
    pub refs: References,
    pub p_ref: f64,
    pub x_ref: f64,
    pub t_ref: f64,
    pub iterations: usize,
    pub converged: bool,
    pub lambda: f64,
    /// `λ₀, λ₁, …` one entry per completed sweep after the initial guess.
    pub lambda_history: Vec<f64>,
    pub final_change: f64,
    pub residual_l2: f64,
    pub residual_max: f64,
    pub flags: SolutionFlags,
}

impl SeparatedSolution {
    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.norm * self.p_factor[i] * self.x_factor[j] * self.t_factor[k]
    }

    /// `f` on the full grid.
    pub fn assemble(&self) -> Field3 {
        Field3::from_fn(self.p_factor.len(), self.x_factor.len(), self.t_factor.len(), |i, j, k| self.value(i, j, k))
    }

    /// Relative change of λ over the last sweep.
    pub fn lambda_relative_change(&self) -> f64 {
        match self.lambda_history.as_slice() {
            [.., a, b] => ((b - a) / b).abs(),
            _ => 0.0,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Iterates `solve_x → solve_p → solve_t` until the max-norm change of all
/// three factors drops below `tol` or `max_iters` is reached. A run that
/// does not converge returns its best iterate with `not_converged` set.
pub fn fixed_point_solve(problem: &Problem<'_>, options: &SolverOptions) -> Result<SeparatedSolution> {
    if !(options.tol > 0.0) || options.max_iters == 0 {
        return Err(Error::InvalidParameter { name: "tol/max_iters", reason: "must be positive" });
    }
    if !(options.normalization_density > 0.0) {
        return Err(Error::InvalidParameter { name: "density_n0", reason: "must be positive" });
    }
    let refs = problem.references(options)?;
    let (ip, jx) = (refs.p_index, refs.x_index);
    let f0 = problem.equilibrium.f0();
    let f0_dp = problem.equilibrium.f0_dp();
    let mut p_factor = Factor {
        values: f0.column(jx),
        log_derivative: (0..problem.grid.p.len())
            .map(|i| {
                let e = f0.get(i, jx);
                if e > 0.0 { f0_dp.get(i, jx) / e } else { 0.0 }
            })
            .collect(),
    };
    let mut lambda = options.lambda0.unwrap_or_else(|| problem.relaxation(ip, jx).abs());
    let mut x_factor = Factor { values: vec![1.0; problem.grid.x.len()], log_derivative: vec![0.0; problem.grid.x.len()] };
    let mut t_factor: Vec<f64> = problem.grid.t.values().iter().map(|&t| libm::exp(-lambda * t)).collect();
    let mut history = vec![lambda];
    let mut singular = Vec::new();

    struct Best {
        change: f64,
        p: Factor,
        x: Factor,
        t: Vec<f64>,
        lambda: f64,
    }
    let mut best: Option<Best> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut change = f64::INFINITY;

    for iteration in 1..=options.max_iters {
        iterations = iteration;
        let x_new = solve_x(problem, refs, &p_factor.log_derivative, lambda, options)?;
        let update = solve_p(problem, refs, x_new.log_derivative[jx], lambda, &p_factor, options)?;
        let (t_new, k) = solve_t(problem, refs, update.factor.log_derivative[ip], x_new.log_derivative[jx]);
        if !(all_finite(&x_new.values) && all_finite(&update.factor.values) && all_finite(&t_new) && k.is_finite()) {
            return Err(Error::NonFinite { iteration });
        }
        change = max_abs_diff(&x_new.values, &x_factor.values)
            .max(max_abs_diff(&update.factor.values, &p_factor.values))
            .max(max_abs_diff(&t_new, &t_factor));
        x_factor = x_new;
        p_factor = update.factor;
        t_factor = t_new;
        lambda = -k;
        history.push(lambda);
        singular = update.singular_momenta;
        if best.as_ref().is_none_or(|b| change < b.change) {
            best = Some(Best { change, p: p_factor.clone(), x: x_factor.clone(), t: t_factor.clone(), lambda });
        }
        if change < options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        if let Some(b) = best {
            p_factor = b.p;
            x_factor = b.x;
            t_factor = b.t;
            lambda = b.lambda;
            change = b.change;
        }
    }
    let p_factor = p_factor.values;
    let x_factor = x_factor.values;

    let density_shape = trapezoid(&p_factor, problem.grid.p.step()) / (2.0 * PI);
    let norm = options.normalization_density / (x_factor[jx] * density_shape);
    if !norm.is_finite() {
        return Err(Error::NonFinite { iteration: iterations });
    }

    let mut solution = SeparatedSolution {
        p_factor,
        x_factor,
        t_factor,
        norm,
        refs,
        p_ref: problem.grid.p.values()[ip],
        x_ref: problem.grid.x.values()[jx],
        t_ref: 0.0,
        iterations,
        converged,
        lambda,
        lambda_history: history,
        final_change: change,
        residual_l2: 0.0,
        residual_max: 0.0,
        flags: SolutionFlags::default(),
    };

    let f = solution.assemble();
    let hole = f.complement();
    let norms = residual(problem, &f, &hole)?;
    solution.residual_l2 = norms.l2;
    solution.residual_max = norms.max;

    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..solution.p_factor.len() {
        let e = f0.get(i, jx);
        if e >= 0.1 {
            let r = solution.p_factor[i] / e;
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
    }
    let (f_min, f_max) = (f.min(), f.max());
    solution.flags = SolutionFlags {
        not_converged: !converged,
        singular_momenta: singular,
        growing: -lambda > 0.0,
        f_min,
        f_max,
        bounds_violated: f_min < -0.05 || f_max > 1.05,
        equilibrium_ratio_min: rmin,
        equilibrium_ratio_max: rmax,
        equilibrium_ratio_violated: rmin < 0.5 || rmax > 2.0,
    };
    Ok(solution)
}

/// Grid norms of the residual over interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    /// Root mean square.
    pub l2: f64,
    pub max: f64,
}

/// Residual of the transport equation for `f` and its hole field `f′`:
///
/// ```text
/// R = ∂f/∂t + (v + C) ∂f/∂x + (F_ext + D + A f′) ∂f/∂p − B (∂f′/∂p) f − E_gain f′ f
/// ```
///
/// (`C`, `D`, `E_gain` only with corrections enabled), centered differences
/// on interior points.
pub fn residual(problem: &Problem<'_>, f: &Field3, hole: &Field3) -> Result<ResidualNorms> {
    problem.check_shape(f)?;
    problem.check_shape(hole)?;
    let (np, nx, nt) = f.shape();
    let (hp, hx, ht) = (problem.grid.p.step(), problem.grid.x.step(), problem.grid.t.step());
    let k = problem.kernels;
    let band = problem.equilibrium.band();
    let p = problem.grid.p.values();
    let drive = problem.field.drive();
    let with_gain = k.corrections_enabled();
    let mut sum = 0.0;
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    for i in 1..np - 1 {
        let v = band.velocity(p[i]) + k.c(i);
        let e = if with_gain { k.e_gain(i) } else { 0.0 };
        for j in 1..nx - 1 {
            let (a, b, d) = (k.a(i, j), k.b(i, j), k.d(i, j));
            for t in 1..nt - 1 {
                let fv = f.get(i, j, t);
                let hv = hole.get(i, j, t);
                let df_dt = (f.get(i, j, t + 1) - f.get(i, j, t - 1)) / (2.0 * ht);
                let df_dx = (f.get(i, j + 1, t) - f.get(i, j - 1, t)) / (2.0 * hx);
                let df_dp = (f.get(i + 1, j, t) - f.get(i - 1, j, t)) / (2.0 * hp);
                let dh_dp = (hole.get(i + 1, j, t) - hole.get(i - 1, j, t)) / (2.0 * hp);
                let r = df_dt + v * df_dx + (drive + d + a * hv) * df_dp - b * dh_dp * fv - e * hv * fv;
                sum += r * r;
                worst = worst.max(r.abs());
                count += 1;
            }
        }
    }
    let l2 = if count > 0 { libm::sqrt(sum / count as f64) } else { 0.0 };
    Ok(ResidualNorms { l2, max: worst })
}

//! Electron–phonon resolvent coefficients `a`, `b` and the kernel fields
//! `A`, `B`, `E_gain`, `C`, `D` of the damped transport equation.
//!
//! Every coefficient is `Re[2πi·∫₀^{q_D} (dq/2π) …]` with the energy
//! denominators evaluated on shell at `ξ_p = p²/2m − μ`. The vector
//! coefficients `A` and `B` integrate `q` over the half line only and are
//! oriented along `−sgn(p)`, since the isotropic 3D integral of `q⃗` times an
//! even function vanishes. The discarded imaginary part is kept as a
//! diagnostic.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::band::Band;
use crate::equilibrium::EquilibriumField;
use crate::grid::{Field2, SimulationGrid};
use crate::phonon::PhononBath;
use crate::quadrature::{derivative_at, simpson, simpson_coarse};
use crate::units::UnitSystem;
use crate::{Error, Result};

/// Complex weights `a`, `b` combining phonon emission and absorption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventPair {
    pub a: Complex64,
    pub b: Complex64,
}

impl ResolventPair {
    /// `a = (N+1)/(ξ−ω+iδ) + N/(ξ+ω+iδ)`, `b = N/(ξ−ω+iδ) + (N+1)/(ξ+ω+iδ)`.
    pub fn from_parts(xi: f64, omega: f64, occupation: f64, delta: f64) -> Self {
        let emit = Complex64::new(xi - omega, delta).inv();
        let absorb = Complex64::new(xi + omega, delta).inv();
        ResolventPair {
            a: emit * (occupation + 1.0) + absorb * occupation,
            b: emit * occupation + absorb * (occupation + 1.0),
        }
    }
}

pub fn resolvent_pair(bath: &PhononBath, xi: f64, q: f64, temperature: f64) -> Result<ResolventPair> {
    let omega = bath.dispersion(q)?;
    let n = crate::phonon::occupation(omega, temperature)?;
    Ok(ResolventPair::from_parts(xi, omega, n, bath.delta()))
}

/// Composite Simpson settings for the phonon-momentum integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Number of Simpson intervals on `[0, q_D]`; a multiple of 4, ≥ 64.
    pub intervals: usize,
    /// Allowed Richardson estimate relative to `∫|integrand|`.
    pub rtol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { intervals: 256, rtol: 1e-5 }
    }
}

/// A real coefficient with its discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub value: f64,
    pub imag_residue: f64,
    /// Richardson error estimate relative to `∫|integrand|`.
    pub richardson: f64,
}

fn orientation(p: f64) -> f64 {
    if p > 0.0 {
        -1.0
    } else if p < 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Evaluates kernel coefficients for one bath and band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvaluator {
    bath: PhononBath,
    band: Band,
    quad: QuadratureOptions,
}

impl KernelEvaluator {
    pub fn new(bath: PhononBath, band: Band, quad: QuadratureOptions) -> Result<Self> {
        if quad.intervals < 64 || quad.intervals % 4 != 0 {
            return Err(Error::InvalidParameter {
                name: "quadrature_intervals",
                reason: "must be a multiple of 4 and at least 64",
            });
        }
        if !(quad.rtol > 0.0) {
            return Err(Error::InvalidParameter { name: "quadrature_rtol", reason: "must be positive" });
        }
        Ok(KernelEvaluator { bath, band, quad })
    }

    pub fn bath(&self) -> &PhononBath {
        &self.bath
    }

    pub fn band(&self) -> &Band {
        &self.band
    }

    /// Simpson over `q ∈ [0, q_D]` of `integrand(q, ω_q, M_q²)` with a
    /// Richardson check against the half-resolution rule.
    fn integrate<F>(&self, momentum: f64, integrand: F) -> Result<(Complex64, f64)>
    where
        F: Fn(f64, f64, f64) -> Complex64,
    {
        let n = self.quad.intervals;
        let q_d = self.bath.debye_cutoff();
        let h = q_d / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut magnitudes = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let q = q_d * (i as f64 / n as f64);
            let v = integrand(q, self.bath.sound_speed() * q, self.bath.coupling_g2() * q);
            magnitudes.push(v.norm());
            values.push(v);
        }
        let fine = simpson(&values, h);
        let coarse = simpson_coarse(&values, h);
        let scale = simpson(&magnitudes, h);
        if scale == 0.0 {
            return Ok((fine, 0.0));
        }
        let estimate = (fine - coarse).norm() / 15.0 / scale;
        if !(estimate <= self.quad.rtol) {
            return Err(Error::QuadratureNotConverged { estimate, tolerance: self.quad.rtol, momentum });
        }
        Ok((fine, estimate))
    }

    fn occupations(&self, temperature: f64) -> Result<impl Fn(f64) -> f64> {
        if !(temperature > 0.0) {
            return Err(Error::Domain { what: "temperature", value: temperature });
        }
        let kbt = UnitSystem::thermal_energy(temperature);
        Ok(move |omega: f64| libm::exp(-omega / kbt))
    }

    /// Damping-force coefficient `A(p, T)` (eV/nm), the factor multiplying
    /// the hole distribution `f′`.
    pub fn damping_coefficient_a(&self, p: f64, temperature: f64) -> Result<Coefficient> {
        let xi = self.band.xi(p);
        let delta = self.bath.delta();
        let occ = self.occupations(temperature)?;
        let (integral, richardson) = self.integrate(p, |q, omega, m2| {
            ResolventPair::from_parts(xi, omega, occ(omega), delta).b * (m2 * q)
        })?;
        let total = Complex64::i() * integral * orientation(p);
        Ok(Coefficient { value: total.re, imag_residue: total.im, richardson })
    }

    /// Inverse-damping-relaxation coefficient `B(p, T)`, multiplying
    /// `∂f′/∂p · f` on the collision side.
    pub fn relaxation_coefficient_b(&self, p: f64, temperature: f64) -> Result<Coefficient> {
        let xi = self.band.xi(p);
        let delta = self.bath.delta();
        let occ = self.occupations(temperature)?;
        let (integral, richardson) = self.integrate(p, |q, omega, m2| {
            ResolventPair::from_parts(xi, omega, occ(omega), delta).a * (m2 * q)
        })?;
        let total = -Complex64::i() * integral * orientation(p);
        Ok(Coefficient { value: total.re, imag_residue: total.im, richardson })
    }

    /// Gain coefficient `E_gain(p)`: the collision term without its `f′·f` factor.
    pub fn gain_coefficient_e(&self, p: f64) -> Result<Coefficient> {
        self.gain_at_energy(self.band.xi(p), p)
    }

    /// `E_gain` at an explicit on-shell energy `xi`; `momentum` only labels errors.
    pub fn gain_at_energy(&self, xi: f64, momentum: f64) -> Result<Coefficient> {
        let delta = self.bath.delta();
        let (integral, richardson) = self.integrate(momentum, |_q, omega, m2| {
            (Complex64::new(xi - omega, delta).inv() - Complex64::new(xi + omega, delta).inv()) * m2
        })?;
        let total = -Complex64::i() * integral;
        Ok(Coefficient { value: total.re, imag_residue: total.im, richardson })
    }

    /// `(∫(dq/2π) M² a, ∫(dq/2π) M² b)` at on-shell energy `xi`.
    pub fn resolvent_means(&self, xi: f64, temperature: f64) -> Result<(Complex64, Complex64)> {
        let delta = self.bath.delta();
        let occ = self.occupations(temperature)?;
        let (ia, _) = self.integrate(xi, |_q, omega, m2| {
            ResolventPair::from_parts(xi, omega, occ(omega), delta).a * m2
        })?;
        let (ib, _) = self.integrate(xi, |_q, omega, m2| {
            ResolventPair::from_parts(xi, omega, occ(omega), delta).b * m2
        })?;
        Ok((ia / (2.0 * PI), ib / (2.0 * PI)))
    }

    /// Quantum-correction pair `(C, D)`: anomalous velocity and force
    /// correction, built from the model Green functions
    /// `Re Gʳ = ξ/(ξ²+δ²)` and `G^> = i(1 − f)`. `df_dp`, `df_dx` are the
    /// distribution derivatives at `(p, x)`; `hbar_scale` multiplies both
    /// terms (zero switches the corrections off).
    pub fn correction_coefficients_cd(
        &self,
        p: f64,
        temperature: f64,
        df_dp: f64,
        df_dx: f64,
        hbar_scale: f64,
    ) -> Result<(f64, f64)> {
        let xi = self.band.xi(p);
        let d2 = self.bath.delta() * self.bath.delta();
        let re_gr_dp = self.band.velocity(p) * (d2 - xi * xi) / ((xi * xi + d2) * (xi * xi + d2));
        let (ia, ib) = self.resolvent_means(xi, temperature)?;
        let two_pi = 2.0 * PI * hbar_scale;
        let i = Complex64::i();
        let g_greater_dp = -i * df_dp;
        let g_greater_dx = -i * df_dx;
        let c = (-i * two_pi * ib * re_gr_dp + i * two_pi * ia * g_greater_dp).re;
        // ∂ Re Gʳ/∂x vanishes for the free-particle model
        let d = (-i * two_pi * ia * g_greater_dx).re;
        Ok((c, d))
    }
}

/// Whether the quantum-correction coefficients `C`, `D`, `E_gain` enter the
/// separated equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionOptions {
    pub enabled: bool,
    pub hbar_scale: f64,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        CorrectionOptions { enabled: false, hbar_scale: 1.0 }
    }
}

/// Ratios of discarded imaginary residue to retained real part, plus the
/// worst Richardson estimate seen while building a [`KernelSet`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KernelDiagnostics {
    pub imag_ratio_a: f64,
    pub imag_ratio_b: f64,
    pub imag_ratio_e: f64,
    pub max_richardson: f64,
}

/// Kernel coefficients sampled on the simulation grid. `A`, `B` and `D`
/// follow the local temperature `T(x)` and live on (p, x); `E_gain` is
/// temperature independent; `C` is taken at the reference position.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    a: Field2,
    b: Field2,
    e_gain: Vec<f64>,
    c: Vec<f64>,
    d: Field2,
    corrections_enabled: bool,
    diagnostics: KernelDiagnostics,
}

struct Row {
    a: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
    e: f64,
    c: f64,
    imag: [f64; 3],
    real: [f64; 3],
    richardson: f64,
}

impl KernelSet {
    pub fn zeros(np: usize, nx: usize) -> Self {
        KernelSet {
            a: Field2::zeros(np, nx),
            b: Field2::zeros(np, nx),
            e_gain: alloc::vec![0.0; np],
            c: alloc::vec![0.0; np],
            d: Field2::zeros(np, nx),
            corrections_enabled: false,
            diagnostics: KernelDiagnostics::default(),
        }
    }

    /// Assemble from explicit fields (used for analytic test problems).
    pub fn from_fields(a: Field2, b: Field2, e_gain: Vec<f64>, c: Vec<f64>, d: Field2, corrections_enabled: bool) -> Result<Self> {
        let (np, nx) = (a.rows(), a.cols());
        for (len, want) in [(b.rows() * b.cols(), np * nx), (d.rows() * d.cols(), np * nx), (e_gain.len(), np), (c.len(), np)] {
            if len != want {
                return Err(Error::ShapeMismatch { expected: want, found: len });
            }
        }
        let (c, d) = if corrections_enabled { (c, d) } else { (alloc::vec![0.0; np], Field2::zeros(np, nx)) };
        Ok(KernelSet { a, b, e_gain, c, d, corrections_enabled, diagnostics: KernelDiagnostics::default() })
    }

    pub fn build(
        evaluator: &KernelEvaluator,
        grid: &SimulationGrid,
        equilibrium: &EquilibriumField,
        corrections: CorrectionOptions,
        x_ref_index: usize,
    ) -> Result<Self> {
        let p = grid.p.values();
        let temps = equilibrium.temperatures();
        let (np, nx) = (p.len(), temps.len());
        let hx = grid.x.step();
        let compute_row = |i: usize| -> Result<Row> {
            let mut row = Row {
                a: Vec::with_capacity(nx),
                b: Vec::with_capacity(nx),
                d: alloc::vec![0.0; nx],
                e: 0.0,
                c: 0.0,
                imag: [0.0; 3],
                real: [0.0; 3],
                richardson: 0.0,
            };
            for &t in temps {
                let a = evaluator.damping_coefficient_a(p[i], t)?;
                let b = evaluator.relaxation_coefficient_b(p[i], t)?;
                row.imag[0] += a.imag_residue.abs();
                row.real[0] += a.value.abs();
                row.imag[1] += b.imag_residue.abs();
                row.real[1] += b.value.abs();
                row.richardson = row.richardson.max(a.richardson).max(b.richardson);
                row.a.push(a.value);
                row.b.push(b.value);
            }
            let e = evaluator.gain_coefficient_e(p[i])?;
            row.e = e.value;
            row.imag[2] = e.imag_residue.abs();
            row.real[2] = e.value.abs();
            row.richardson = row.richardson.max(e.richardson);
            if corrections.enabled {
                let f0_row = equilibrium.f0().row(i);
                for j in 0..nx {
                    let df_dx = derivative_at(f0_row, hx, j);
                    let df_dp = equilibrium.f0_dp().get(i, j);
                    let (c, d) = evaluator.correction_coefficients_cd(p[i], temps[j], df_dp, df_dx, corrections.hbar_scale)?;
                    row.d[j] = d;
                    if j == x_ref_index {
                        row.c = c;
                    }
                }
            }
            Ok(row)
        };

        #[cfg(feature = "parallel")]
        let rows: Vec<Result<Row>> = {
            use rayon::prelude::*;
            (0..np).into_par_iter().map(compute_row).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let rows: Vec<Result<Row>> = (0..np).map(compute_row).collect();

        let mut a = Field2::zeros(np, nx);
        let mut b = Field2::zeros(np, nx);
        let mut d = Field2::zeros(np, nx);
        let mut e_gain = Vec::with_capacity(np);
        let mut c = Vec::with_capacity(np);
        let mut imag = [0.0; 3];
        let mut real = [0.0; 3];
        let mut max_richardson: f64 = 0.0;
        for (i, row) in rows.into_iter().enumerate() {
            let row = row?;
            for j in 0..nx {
                a.set(i, j, row.a[j]);
                b.set(i, j, row.b[j]);
                d.set(i, j, row.d[j]);
            }
            e_gain.push(row.e);
            c.push(row.c);
            for k in 0..3 {
                imag[k] += row.imag[k];
                real[k] += row.real[k];
            }
            max_richardson = max_richardson.max(row.richardson);
        }
        let ratio = |k: usize| if real[k] > 0.0 { imag[k] / real[k] } else { 0.0 };
        Ok(KernelSet {
            a,
            b,
            e_gain,
            c,
            d,
            corrections_enabled: corrections.enabled,
            diagnostics: KernelDiagnostics {
                imag_ratio_a: ratio(0),
                imag_ratio_b: ratio(1),
                imag_ratio_e: ratio(2),
                max_richardson,
            },
        })
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a.get(i, j)
    }

    #[inline]
    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.b.get(i, j)
    }

    #[inline]
    pub fn e_gain(&self, i: usize) -> f64 {
        self.e_gain[i]
    }

    #[inline]
    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d.get(i, j)
    }

    pub fn a_field(&self) -> &Field2 {
        &self.a
    }

    pub fn b_field(&self) -> &Field2 {
        &self.b
    }

    pub fn d_field(&self) -> &Field2 {
        &self.d
    }

    pub fn e_gain_values(&self) -> &[f64] {
        &self.e_gain
    }

    pub fn c_values(&self) -> &[f64] {
        &self.c
    }

    pub fn corrections_enabled(&self) -> bool {
        self.corrections_enabled
    }

    pub fn diagnostics(&self) -> &KernelDiagnostics {
        &self.diagnostics
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.a.rows(), self.a.cols())
    }
}

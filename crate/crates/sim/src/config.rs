//! TOML run configuration, validation and conversion to model parameters.

use std::fmt;
use std::path::{Path, PathBuf};

use qbe_core::kernels::{CorrectionOptions, QuadratureOptions};
use qbe_core::solver::{Closure, SingularPolicy, SolverOptions};
use qbe_core::{ModelParameters, PhononBath};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathConfig {
    /// c_s in eV·nm (ħ = 1).
    pub sound_speed_ev_nm: f64,
    pub debye_cutoff_per_nm: f64,
    /// g² in eV²·nm.
    pub coupling_g2: f64,
    pub delta_ev: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        let b = PhononBath::default();
        BathConfig {
            sound_speed_ev_nm: b.sound_speed(),
            debye_cutoff_per_nm: b.debye_cutoff(),
            coupling_g2: b.coupling_g2(),
            delta_ev: b.delta(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(rename = "T0_kelvin")]
    pub t0_kelvin: Vec<f64>,
    pub gradient_k_per_nm: f64,
    pub length_nm: f64,
    pub density_n0: f64,
    /// Band mass in ħ²/(eV·nm²).
    pub mass: f64,
    /// Fixes μ instead of deriving it from `density_n0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_ev: Option<f64>,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        let m = ModelParameters::default();
        ProfileConfig {
            t0_kelvin: vec![m.t0],
            gradient_k_per_nm: m.gradient,
            length_nm: m.length,
            density_n0: m.density_n0,
            mass: m.mass,
            mu_ev: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub field_strength_v_per_m: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { field_strength_v_per_m: ModelParameters::default().field_strength }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_p: usize,
    pub p_max: f64,
    pub n_x: usize,
    pub n_t: usize,
    pub t_max: f64,
    pub snapshot_index: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let m = ModelParameters::default();
        GridConfig { n_p: m.n_p, p_max: m.p_max, n_x: m.n_x, n_t: m.n_t, t_max: m.t_max, snapshot_index: m.snapshot_index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureChoice {
    Reference,
    FermiWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularChoice {
    Clamp,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    pub tol: f64,
    pub max_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ref: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_ref: Option<f64>,
    pub closure: ClosureChoice,
    pub singular_policy: SingularChoice,
    pub singular_cap: f64,
    pub overflow_log_cap: f64,
    pub quadrature_intervals: usize,
    pub quadrature_rtol: f64,
    pub corrections_enabled: bool,
    pub hbar_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverOptions::default();
        let q = QuadratureOptions::default();
        SolverConfig {
            lambda0: None,
            tol: s.tol,
            max_iters: s.max_iters,
            p_ref: None,
            x_ref: None,
            closure: ClosureChoice::Reference,
            singular_policy: SingularChoice::Clamp,
            singular_cap: 1e4,
            overflow_log_cap: s.overflow_log_cap,
            quadrature_intervals: q.intervals,
            quadrature_rtol: q.rtol,
            corrections_enabled: false,
            hbar_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Also write `A(p, x)·f′(p, x)` at the snapshot time.
    pub emit_p_resolved: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("out"), emit_p_resolved: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    /// |f_damp| strictly increasing in T0 at every x.
    pub damping_monotone_in_t0: bool,
    pub density_increasing_in_x: bool,
    pub current_increasing_in_x: bool,
    /// |j_q| strictly increasing in T0 at every x.
    pub heat_current_monotone_in_t0: bool,
    /// Fraction of x-intervals allowed to break a trend in x.
    pub trend_exception_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_l2_max: Option<f64>,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            damping_monotone_in_t0: true,
            density_increasing_in_x: true,
            current_increasing_in_x: true,
            heat_current_monotone_in_t0: true,
            trend_exception_fraction: 0.01,
            residual_l2_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathConfig,
    pub profile: ProfileConfig,
    pub field: FieldConfig,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub checks: ChecksConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration:\n{0}")]
    Invalid(Violations),
}

/// Every violated field with its reason.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Violations(pub Vec<(String, String)>);

impl Violations {
    fn push(&mut self, field: &str, reason: impl Into<String>) {
        self.0.push((field.to_string(), reason.into()));
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(f, _)| f.as_str())
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (field, reason) in &self.0 {
            writeln!(f, "  {field}: {reason}")?;
        }
        Ok(())
    }
}

fn positive(v: &mut Violations, field: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        v.push(field, format!("must be positive and finite (got {x})"));
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let cfg = Self::parse(&text).map_err(|message| ConfigError::Parse { path: path.to_path_buf(), message })?;
        cfg.validate().map_err(ConfigError::Invalid)?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Checks every field and reports all violations together.
    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Violations::default();
        let b = &self.bath;
        positive(&mut v, "bath.sound_speed_ev_nm", b.sound_speed_ev_nm);
        positive(&mut v, "bath.debye_cutoff_per_nm", b.debye_cutoff_per_nm);
        positive(&mut v, "bath.delta_ev", b.delta_ev);
        if !(b.coupling_g2 >= 0.0 && b.coupling_g2.is_finite()) {
            v.push("bath.coupling_g2", "must be non-negative and finite");
        }

        let p = &self.profile;
        if p.t0_kelvin.is_empty() {
            v.push("profile.T0_kelvin", "needs at least one temperature");
        }
        let mut seen = Vec::new();
        for &t in &p.t0_kelvin {
            if !(t > 0.0 && t.is_finite()) {
                v.push("profile.T0_kelvin", format!("temperatures must be positive (got {t})"));
            } else if p.length_nm > 0.0 && !(t + p.gradient_k_per_nm * p.length_nm > 0.0) {
                v.push("profile", format!("T(L) = {} K is not positive for T0 = {t} K", t + p.gradient_k_per_nm * p.length_nm));
            }
            if seen.contains(&t) {
                v.push("profile.T0_kelvin", format!("duplicate temperature {t}"));
            }
            seen.push(t);
        }
        if !p.gradient_k_per_nm.is_finite() {
            v.push("profile.gradient_k_per_nm", "must be finite");
        }
        positive(&mut v, "profile.length_nm", p.length_nm);
        positive(&mut v, "profile.density_n0", p.density_n0);
        positive(&mut v, "profile.mass", p.mass);
        if let Some(mu) = p.mu_ev {
            if !mu.is_finite() {
                v.push("profile.mu_ev", "must be finite");
            }
        }

        if !self.field.field_strength_v_per_m.is_finite() {
            v.push("field.field_strength_v_per_m", "must be finite");
        }

        let g = &self.grid;
        if g.n_p < 5 || g.n_p % 2 == 0 {
            v.push("grid.n_p", format!("must be odd and at least 5 (got {})", g.n_p));
        }
        if g.n_x < 3 {
            v.push("grid.n_x", "must be at least 3");
        }
        if g.n_t < 3 {
            v.push("grid.n_t", "must be at least 3");
        }
        positive(&mut v, "grid.p_max", g.p_max);
        positive(&mut v, "grid.t_max", g.t_max);
        if g.snapshot_index >= g.n_t {
            v.push("grid.snapshot_index", "must be below n_t");
        }

        let s = &self.solver;
        if let Some(l) = s.lambda0 {
            if !(l >= 0.0 && l.is_finite()) {
                v.push("solver.lambda0", "must be non-negative and finite");
            }
        }
        positive(&mut v, "solver.tol", s.tol);
        if s.max_iters == 0 {
            v.push("solver.max_iters", "must be at least 1");
        }
        if let Some(pr) = s.p_ref {
            if !(pr.is_finite() && pr != 0.0 && pr.abs() < g.p_max) {
                v.push("solver.p_ref", "must be nonzero and inside (-p_max, p_max)");
            }
        }
        if let Some(xr) = s.x_ref {
            if !(xr >= 0.0 && xr <= p.length_nm) {
                v.push("solver.x_ref", "must lie in [0, length_nm]");
            }
        }
        positive(&mut v, "solver.singular_cap", s.singular_cap);
        positive(&mut v, "solver.overflow_log_cap", s.overflow_log_cap);
        if s.quadrature_intervals < 64 || s.quadrature_intervals % 4 != 0 {
            v.push("solver.quadrature_intervals", "must be a multiple of 4 and at least 64");
        }
        positive(&mut v, "solver.quadrature_rtol", s.quadrature_rtol);
        if !(s.hbar_scale >= 0.0 && s.hbar_scale.is_finite()) {
            v.push("solver.hbar_scale", "must be non-negative and finite");
        }

        let c = &self.checks;
        if !(0.0..1.0).contains(&c.trend_exception_fraction) {
            v.push("checks.trend_exception_fraction", "must lie in [0, 1)");
        }
        if let Some(r) = c.residual_l2_max {
            positive(&mut v, "checks.residual_l2_max", r);
        }
        if self.output.directory.as_os_str().is_empty() {
            v.push("output.directory", "must not be empty");
        }

        if v.0.is_empty() { Ok(()) } else { Err(v) }
    }

    /// Temperatures in ascending order.
    pub fn temperatures(&self) -> Vec<f64> {
        let mut t = self.profile.t0_kelvin.clone();
        t.sort_by(f64::total_cmp);
        t
    }

    /// Model parameters for one sweep point.
    pub fn model_parameters(&self, t0: f64) -> Result<ModelParameters, qbe_core::Error> {
        let b = &self.bath;
        let s = &self.solver;
        let bath = PhononBath::new(b.sound_speed_ev_nm, b.debye_cutoff_per_nm, b.coupling_g2, b.delta_ev)?;
        let solver = SolverOptions {
            lambda0: s.lambda0,
            tol: s.tol,
            max_iters: s.max_iters,
            p_ref: s.p_ref,
            x_ref: s.x_ref,
            normalization_density: self.profile.density_n0,
            singular: match s.singular_policy {
                SingularChoice::Clamp => SingularPolicy::Clamp { cap: s.singular_cap },
                SingularChoice::Fail => SingularPolicy::Fail,
            },
            overflow_log_cap: s.overflow_log_cap,
            closure: match s.closure {
                ClosureChoice::Reference => Closure::Reference,
                ClosureChoice::FermiWeighted => Closure::FermiWeighted,
            },
        };
        Ok(ModelParameters {
            bath,
            quadrature: QuadratureOptions { intervals: s.quadrature_intervals, rtol: s.quadrature_rtol },
            corrections: CorrectionOptions { enabled: s.corrections_enabled, hbar_scale: s.hbar_scale },
            mass: self.profile.mass,
            density_n0: self.profile.density_n0,
            mu: self.profile.mu_ev,
            t0,
            gradient: self.profile.gradient_k_per_nm,
            length: self.profile.length_nm,
            field_strength: self.field.field_strength_v_per_m,
            n_p: self.grid.n_p,
            p_max: self.grid.p_max,
            n_x: self.grid.n_x,
            n_t: self.grid.n_t,
            t_max: self.grid.t_max,
            snapshot_index: self.grid.snapshot_index,
            solver,
        })
    }

    /// The config with every default filled in, as TOML.
    pub fn resolved_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

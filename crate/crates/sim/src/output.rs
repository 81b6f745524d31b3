//! CSV and JSON writers for one sweep point.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qbe_core::kernels::KernelDiagnostics;
use qbe_core::{Prepared, RunResult};
use serde::Serialize;

/// Fixed-width scientific notation with 17 significant digits, so values
/// round-trip exactly and identical runs give identical bytes.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// `300` for whole kelvins, `250.5` otherwise.
pub fn temperature_tag(t0: f64) -> String {
    format!("{t0}")
}

pub fn profiles_path(dir: &Path, t0: f64) -> PathBuf {
    dir.join(format!("profiles_T{}.csv", temperature_tag(t0)))
}

pub fn avec_path(dir: &Path, t0: f64) -> PathBuf {
    dir.join(format!("avec_T{}.csv", temperature_tag(t0)))
}

pub fn report_path(dir: &Path, t0: f64) -> PathBuf {
    dir.join(format!("report_T{}.json", temperature_tag(t0)))
}

pub fn p_resolved_path(dir: &Path, t0: f64) -> PathBuf {
    dir.join(format!("p_resolved_T{}.csv", temperature_tag(t0)))
}

fn csv_writer(path: &Path) -> std::io::Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path)?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file)))
}

fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> std::io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format_value(c[i])))?;
    }
    w.flush()
}

/// `x_nm, f_damp, n, j, j_q, phi` at the snapshot time.
pub fn write_profiles(path: &Path, result: &RunResult) -> std::io::Result<()> {
    let p = &result.profiles;
    write_columns(path, &["x_nm", "f_damp", "n", "j", "j_q", "phi"], &[&p.x, &p.f_damp, &p.n, &p.j, &p.j_q, &p.phi])
}

/// `t, a_vec` at the reference position.
pub fn write_avec(path: &Path, prepared: &Prepared, result: &RunResult) -> std::io::Result<()> {
    let series = result.potentials.a_series(result.solution.refs.x_index);
    write_columns(path, &["t", "a_vec"], &[prepared.grid.t.values(), &series])
}

/// `A(p, x)·f′(p, x)` at the snapshot time, one row per grid point.
pub fn write_p_resolved(path: &Path, prepared: &Prepared, result: &RunResult) -> std::io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["p", "x_nm", "damping_force"])?;
    let k = prepared.params.snapshot_index;
    for (i, &p) in prepared.grid.p.values().iter().enumerate() {
        for (j, &x) in prepared.grid.x.values().iter().enumerate() {
            let force = prepared.kernels.a(i, j) * result.hole.get(i, j, k);
            w.write_record([format_value(p), format_value(x), format_value(force)])?;
        }
    }
    w.flush()
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagReport {
    pub not_converged: bool,
    pub singular_momenta: Vec<f64>,
    pub growing: bool,
    pub f_min: f64,
    pub f_max: f64,
    pub bounds_violated: bool,
    pub equilibrium_ratio_min: f64,
    pub equilibrium_ratio_max: f64,
    pub equilibrium_ratio_violated: bool,
    pub residual_above_threshold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub imag_ratio_a: f64,
    pub imag_ratio_b: f64,
    pub imag_ratio_e: f64,
    pub max_richardson: f64,
}

impl From<&KernelDiagnostics> for KernelReport {
    fn from(d: &KernelDiagnostics) -> Self {
        KernelReport {
            imag_ratio_a: d.imag_ratio_a,
            imag_ratio_b: d.imag_ratio_b,
            imag_ratio_e: d.imag_ratio_e,
            max_richardson: d.max_richardson,
        }
    }
}

/// Per-run report, written even when the run is flagged.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    #[serde(rename = "T0_kelvin")]
    pub t0_kelvin: f64,
    pub mu_ev: f64,
    pub fermi_momentum: Option<f64>,
    pub drive_ev_per_nm: f64,
    pub p_ref: f64,
    pub x_ref: f64,
    pub t_ref: f64,
    pub iterations: usize,
    pub converged: bool,
    pub lambda: f64,
    pub lambda_history: Vec<f64>,
    pub lambda_relative_change: f64,
    pub final_change: f64,
    pub normalization: f64,
    pub residual_l2: f64,
    pub residual_max: f64,
    pub residual_l2_max: Option<f64>,
    pub kernels: KernelReport,
    pub flags: FlagReport,
    pub wall_time_s: f64,
    pub interpretation: Vec<&'static str>,
}

impl RunReport {
    pub fn new(prepared: &Prepared, result: &RunResult, residual_l2_max: Option<f64>, wall_time_s: f64) -> Self {
        let s = &result.solution;
        let fl = &s.flags;
        RunReport {
            t0_kelvin: prepared.params.t0,
            mu_ev: prepared.band.mu(),
            fermi_momentum: prepared.band.fermi_momentum(),
            drive_ev_per_nm: prepared.field.drive(),
            p_ref: s.p_ref,
            x_ref: s.x_ref,
            t_ref: s.t_ref,
            iterations: s.iterations,
            converged: s.converged,
            lambda: s.lambda,
            lambda_history: s.lambda_history.clone(),
            lambda_relative_change: s.lambda_relative_change(),
            final_change: s.final_change,
            normalization: s.norm,
            residual_l2: s.residual_l2,
            residual_max: s.residual_max,
            residual_l2_max,
            kernels: prepared.kernels.diagnostics().into(),
            flags: FlagReport {
                not_converged: fl.not_converged,
                singular_momenta: fl.singular_momenta.clone(),
                growing: fl.growing,
                f_min: fl.f_min,
                f_max: fl.f_max,
                bounds_violated: fl.bounds_violated,
                equilibrium_ratio_min: fl.equilibrium_ratio_min,
                equilibrium_ratio_max: fl.equilibrium_ratio_max,
                equilibrium_ratio_violated: fl.equilibrium_ratio_violated,
                residual_above_threshold: residual_l2_max.is_some_and(|m| !(s.residual_l2 <= m)),
            },
            wall_time_s,
            interpretation: INTERPRETATION.to_vec(),
        }
    }
}

/// Modelling choices every run makes, echoed into reports and `validate`.
pub const INTERPRETATION: &[&str] = &[
    "phonon momenta restricted to 0 <= q <= q_D, measure dq/2pi",
    "kernel orientation factor -sgn(p): A(p) < 0 for p > 0",
    "drive term is the field force on the electron, -e*E",
    "kernels A, B, D sampled at the local temperature T(x); E_gain and C at x_ref",
    "f' = f0 - f taken as the hole occupation 1 - f",
    "thermal scalar potential phi(x) = int_0^x A(p_ref, x')(1 - f0) dx'",
    "vector potential a(x, t) = int_0^t A(p_ref, x) f'(p_ref, x, t') dt', reported at x_ref",
    "moments use the trapezoid rule on the p-grid",
    "heat-current trend judged on |j_q|",
];

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

//! Temperature sweeps on a bounded worker pool, plus the trend checks.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qbe_core::{ObservableProfiles, Prepared, RunResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{self, RunReport};

pub const WORKERS_ENV: &str = "QBE_SIM_WORKERS";
pub const MAX_WORKERS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("{WORKERS_ENV} must be a positive integer (got {0:?})")]
    BadWorkerEnv(String),
    #[error("cannot create output directory {path}: {source}")]
    OutputDir { path: PathBuf, source: std::io::Error },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

/// Worker count: command line, then the environment, then the machine,
/// capped at `MAX_WORKERS`.
pub fn resolve_workers(cli: Option<usize>) -> Result<usize, SweepError> {
    let n = match cli {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(s) => s.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or(SweepError::BadWorkerEnv(s))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    Ok(n.clamp(1, MAX_WORKERS))
}

/// One sweep point after solving.
#[derive(Debug)]
pub struct RunOutcome {
    pub t0: f64,
    pub result: Result<(Prepared, RunResult, RunReport), String>,
}

impl RunOutcome {
    pub fn profiles(&self) -> Option<&ObservableProfiles> {
        self.result.as_ref().ok().map(|(_, r, _)| &r.profiles)
    }

    pub fn report(&self) -> Option<&RunReport> {
        self.result.as_ref().ok().map(|(_, _, r)| r)
    }
}

fn write_outputs(dir: &Path, cfg: &RunConfig, prepared: &Prepared, result: &RunResult, report: &RunReport) -> Result<(), SweepError> {
    let t0 = prepared.params.t0;
    let wrap = |path: PathBuf, r: std::io::Result<()>| r.map_err(|source| SweepError::Write { path, source });
    let p = output::profiles_path(dir, t0);
    wrap(p.clone(), output::write_profiles(&p, result))?;
    let p = output::avec_path(dir, t0);
    wrap(p.clone(), output::write_avec(&p, prepared, result))?;
    if cfg.output.emit_p_resolved {
        let p = output::p_resolved_path(dir, t0);
        wrap(p.clone(), output::write_p_resolved(&p, prepared, result))?;
    }
    let p = output::report_path(dir, t0);
    wrap(p.clone(), output::write_json(&p, report))
}

fn run_point(cfg: &RunConfig, dir: &Path, t0: f64) -> Result<RunOutcome, SweepError> {
    let start = Instant::now();
    let solved = cfg.model_parameters(t0).and_then(qbe_core::model::run);
    let (prepared, result) = match solved {
        Ok(v) => v,
        Err(e) => return Ok(RunOutcome { t0, result: Err(e.to_string()) }),
    };
    let report = RunReport::new(&prepared, &result, cfg.checks.residual_l2_max, start.elapsed().as_secs_f64());
    write_outputs(dir, cfg, &prepared, &result, &report)?;
    Ok(RunOutcome { t0, result: Ok((prepared, result, report)) })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckVerdict {
    pub name: &'static str,
    pub enabled: bool,
    /// `None` when the check could not be evaluated.
    pub passed: Option<bool>,
    pub violations: usize,
    pub allowed: usize,
    pub detail: String,
}

impl CheckVerdict {
    pub fn failed(&self) -> bool {
        self.enabled && self.passed != Some(true)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    #[serde(rename = "T0_kelvin")]
    pub t0_kelvin: f64,
    pub converged: bool,
    pub flagged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    #[serde(rename = "T0_kelvin")]
    pub t0_kelvin: Vec<f64>,
    pub workers: usize,
    pub runs: Vec<RunSummary>,
    pub checks: Vec<CheckVerdict>,
    /// Signed `j_q` compared across T0; informational.
    pub heat_current_signed_increasing_in_t0: Option<bool>,
    pub all_converged: bool,
    pub all_checks_passed: bool,
    pub exit_code: i32,
}

/// Count of steps where `values` fails to strictly increase.
pub fn non_increasing_steps(values: &[f64]) -> usize {
    values.windows(2).filter(|w| !(w[1] > w[0])).count()
}

/// Count of positions where `series[k][j]` fails to strictly increase in `k`.
pub fn non_increasing_across(series: &[Vec<f64>]) -> usize {
    let n = series.first().map_or(0, |s| s.len());
    (0..n).filter(|&j| series.windows(2).any(|w| !(w[1][j] > w[0][j]))).count()
}

fn magnitudes(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.abs()).collect()
}

fn allowed(fraction: f64, steps: usize) -> usize {
    (fraction * steps as f64).floor() as usize
}

fn in_x_check(name: &'static str, enabled: bool, runs: &[RunOutcome], fraction: f64, pick: fn(&ObservableProfiles) -> &[f64]) -> CheckVerdict {
    let (mut violations, mut allow) = (0, 0);
    let mut passed = Some(true);
    let mut detail = Vec::new();
    for r in runs {
        let Some(p) = r.profiles() else {
            passed = None;
            detail.push(format!("T0={}: run failed", r.t0));
            continue;
        };
        let v = pick(p);
        let steps = v.len().saturating_sub(1);
        let (bad, a) = (non_increasing_steps(v), allowed(fraction, steps));
        violations += bad;
        allow += a;
        if bad > a {
            passed = passed.map(|_| false);
        }
        detail.push(format!("T0={}: {bad} of {steps} steps not increasing", r.t0));
    }
    CheckVerdict { name, enabled, passed, violations, allowed: allow, detail: detail.join("; ") }
}

fn in_t0_check(name: &'static str, enabled: bool, runs: &[RunOutcome], pick: fn(&ObservableProfiles) -> Vec<f64>) -> CheckVerdict {
    let series: Option<Vec<Vec<f64>>> = runs.iter().map(|r| r.profiles().map(pick)).collect();
    let Some(series) = series else {
        return CheckVerdict { name, enabled, passed: None, violations: 0, allowed: 0, detail: "a run failed".into() };
    };
    if series.len() < 2 {
        return CheckVerdict { name, enabled, passed: None, violations: 0, allowed: 0, detail: "needs at least two temperatures".into() };
    }
    let bad = non_increasing_across(&series);
    let n = series[0].len();
    CheckVerdict {
        name,
        enabled,
        passed: Some(bad == 0),
        violations: bad,
        allowed: 0,
        detail: format!("{bad} of {n} positions not strictly increasing with T0"),
    }
}

/// Evaluates every trend and threshold check over a finished sweep.
pub fn evaluate_checks(cfg: &RunConfig, runs: &[RunOutcome]) -> (Vec<CheckVerdict>, Option<bool>) {
    let c = &cfg.checks;
    let mut checks = Vec::new();
    checks.push(in_t0_check("damping_monotone_in_t0", c.damping_monotone_in_t0, runs, |p| magnitudes(&p.f_damp)));
    checks.push(in_x_check("density_increasing_in_x", c.density_increasing_in_x, runs, c.trend_exception_fraction, |p| p.n.as_slice()));
    checks.push(in_x_check("current_increasing_in_x", c.current_increasing_in_x, runs, c.trend_exception_fraction, |p| p.j.as_slice()));
    checks.push(in_t0_check("heat_current_monotone_in_t0", c.heat_current_monotone_in_t0, runs, |p| magnitudes(&p.j_q)));
    let signed = in_t0_check("signed", true, runs, |p| p.j_q.clone()).passed;

    if let Some(limit) = c.residual_l2_max {
        let values: Option<Vec<f64>> = runs.iter().map(|r| r.report().map(|rep| rep.residual_l2)).collect();
        let (passed, violations, detail) = match values {
            Some(v) => {
                let bad = v.iter().filter(|&&r| !(r <= limit)).count();
                let worst = v.iter().copied().fold(0.0, f64::max);
                (Some(bad == 0), bad, format!("largest residual_l2 {worst:e} against {limit:e}"))
            }
            None => (None, 0, "a run failed".to_string()),
        };
        checks.push(CheckVerdict { name: "residual_within_threshold", enabled: true, passed, violations, allowed: 0, detail });
    }
    (checks, signed)
}

/// A finished sweep: per-run results in ascending T0 and the summary.
#[derive(Debug)]
pub struct Sweep {
    pub runs: Vec<RunOutcome>,
    pub summary: SweepSummary,
}

impl Sweep {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}

/// Runs every temperature of `cfg` on `workers` threads and writes all
/// outputs into `dir`.
pub fn run_sweep(cfg: &RunConfig, dir: &Path, workers: usize) -> Result<Sweep, SweepError> {
    std::fs::create_dir_all(dir).map_err(|source| SweepError::OutputDir { path: dir.to_path_buf(), source })?;
    let temps = cfg.temperatures();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| SweepError::Pool(e.to_string()))?;
    let runs = pool.install(|| temps.par_iter().map(|&t0| run_point(cfg, dir, t0)).collect::<Result<Vec<_>, _>>())?;

    let (checks, signed) = evaluate_checks(cfg, &runs);
    let all_converged = runs.iter().all(|r| r.report().is_some_and(|rep| rep.converged));
    let any_failed = runs.iter().any(|r| r.result.is_err());
    let all_checks_passed = checks.iter().all(|c| !c.failed());
    let exit_code = if any_failed {
        3
    } else if !all_converged || !all_checks_passed {
        4
    } else {
        0
    };
    let summary = SweepSummary {
        t0_kelvin: temps,
        workers,
        runs: runs
            .iter()
            .map(|r| RunSummary {
                t0_kelvin: r.t0,
                converged: r.report().is_some_and(|rep| rep.converged),
                flagged: r.result.as_ref().is_ok_and(|(_, res, rep)| res.solution.flags.any() || rep.flags.residual_above_threshold),
                error: r.result.as_ref().err().cloned(),
            })
            .collect(),
        checks,
        heat_current_signed_increasing_in_t0: signed,
        all_converged,
        all_checks_passed,
        exit_code,
    };
    let path = dir.join("sweep_summary.json");
    output::write_json(&path, &summary).map_err(|source| SweepError::Write { path, source })?;
    Ok(Sweep { runs, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_counting() {
        assert_eq!(non_increasing_steps(&[1.0, 2.0, 3.0]), 0);
        assert_eq!(non_increasing_steps(&[1.0, 1.0, 0.5, 2.0]), 2);
        assert_eq!(non_increasing_across(&[vec![1.0, 5.0], vec![2.0, 4.0], vec![3.0, 6.0]]), 1);
        assert_eq!(allowed(0.01, 80), 0);
        assert_eq!(allowed(0.01, 400), 4);
    }

    #[test]
    fn cli_workers_win_and_are_capped() {
        assert_eq!(resolve_workers(Some(3)).unwrap(), 3);
        assert_eq!(resolve_workers(Some(0)).unwrap(), 1);
        assert_eq!(resolve_workers(Some(1000)).unwrap(), MAX_WORKERS);
    }
}

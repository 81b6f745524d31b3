use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qbe-sim"));
    c.env_remove("QBE_SIM_WORKERS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "[profile]\nT0_kelvin = [300.0]\n[grid]\nn_p = 201\nn_x = 21\nn_t = 11\n";

#[test]
fn validate_prints_resolved_config() {
    let out = bin().args(["validate"]).arg(configs().join("fig1.cfg")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("T0_kelvin = [200.0, 250.0, 300.0]"), "{text}");
    assert!(text.contains("quadrature_intervals = 256"));
    assert!(text.contains("# interpretation"));
}

#[test]
fn invalid_config_lists_every_field_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "[profile]\nT0_kelvin = [0.0]\ndensity_n0 = -1.0\n[grid]\nn_x = 1\n");
    for cmd in ["validate", "run"] {
        let out = bin().arg(cmd).arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2));
        let err = stderr(&out);
        for field in ["profile.T0_kelvin", "profile.density_n0", "grid.n_x"] {
            assert!(err.contains(field), "{cmd}: {field} missing in {err}");
        }
    }
}

#[test]
fn cold_end_crossing_names_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "[profile]\nT0_kelvin = [50.0]\ngradient_k_per_nm = -30.0\nlength_nm = 2.0\n");
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("  profile: T(L)"), "{}", stderr(&out));
}

#[test]
fn unparsable_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "[grid\n");
    assert_eq!(bin().arg("run").arg(&cfg).output().unwrap().status.code(), Some(2));
    let missing = dir.path().join("absent.cfg");
    assert_eq!(bin().arg("validate").arg(&missing).output().unwrap().status.code(), Some(2));
}

#[test]
fn bad_worker_env_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), SMALL);
    let out = bin().env("QBE_SIM_WORKERS", "many").arg("run").arg(&cfg).arg("--output").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("QBE_SIM_WORKERS"));
}

#[test]
fn solver_failure_names_temperature_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // p-grid too short for the Fermi momentum at this density
    let cfg = write(dir.path(), "[profile]\nT0_kelvin = [300.0]\ndensity_n0 = 0.3\n[grid]\nn_p = 201\np_max = 0.3\nn_x = 21\nn_t = 11\n");
    let out = bin().arg("run").arg(&cfg).arg("--output").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("T0 = 300 K"), "{}", stderr(&out));
    let summary = std::fs::read_to_string(dir.path().join("o/sweep_summary.json")).unwrap();
    assert!(summary.contains("\"exit_code\": 3"));
}

#[test]
fn non_convergence_exits_4_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), &format!("{SMALL}[solver]\nmax_iters = 1\n"));
    let out_dir = dir.path().join("o");
    let out = bin().arg("run").arg(&cfg).arg("--output").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report_T300.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], false);
    assert_eq!(report["flags"]["not_converged"], true);
}

#[test]
fn residual_threshold_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), &format!("{SMALL}[checks]\nresidual_l2_max = 1e-9\n"));
    let out = bin().arg("run").arg(&cfg).arg("--output").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("check residual_within_threshold: FAIL"));
}

#[test]
fn collisionless_config_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("QBE_SIM_WORKERS", "2")
        .arg("run")
        .arg(configs().join("collisionless.cfg"))
        .arg("--output")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let profiles = std::fs::read_to_string(dir.path().join("profiles_T300.csv")).unwrap();
    assert!(profiles.starts_with("x_nm,f_damp,n,j,j_q,phi\n"));
    assert!(!profiles.contains('\r'));
    assert_eq!(profiles.lines().count(), 82);
    let avec = std::fs::read_to_string(dir.path().join("avec_T300.csv")).unwrap();
    assert!(avec.starts_with("t,a_vec\n"));
    // no coupling: the damping force and both potentials vanish
    for line in profiles.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols[1], 0.0);
        assert_eq!(cols[5], 0.0);
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["workers"], 2);
    assert_eq!(summary["all_converged"], true);
}

#[test]
fn p_resolved_output_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), &format!("{SMALL}[output]\nemit_p_resolved = true\n"));
    let out = bin().arg("run").arg(&cfg).arg("--output").arg(dir.path().join("o")).arg("--workers").arg("1").output().unwrap();
    assert!(out.status.success() || out.status.code() == Some(4), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("o/p_resolved_T300.csv")).unwrap();
    assert!(text.starts_with("p,x_nm,damping_force\n"));
    assert_eq!(text.lines().count(), 1 + 201 * 21);
}

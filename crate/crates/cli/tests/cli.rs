use std::fs;
use std::path::Path;
use std::process::Command;

use concealed_cli::{converge, parse_config, run_to_dir, CliError, ScenarioConfig, ScenarioKind, Sink};

fn quiet() -> Sink {
    Sink { quiet: true }
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn small(scenario: &str, extra: &str) -> ScenarioConfig {
    parse_config(&format!(
        "scenario={scenario}\n[numerics]\nn_labels=128\noutput_stride=50\n{extra}"
    ))
    .unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_concealed"))
}

#[test]
fn config_examples() {
    let cfg = parse_config("scenario=gaussian-free").unwrap();
    assert_eq!(
        (cfg.physical.sigma0, cfg.physical.hbar, cfg.physical.mass),
        (1.0, 1.0, 1.0)
    );

    let cfg = parse_config("scenario=harmonic-coherent\n[physical]\nomega=1\nx0=1\n").unwrap();
    assert!((cfg.physical.sigma0.powi(2) - 0.5).abs() < 1e-15);
    assert_eq!(cfg.physical.x0, 1.0);

    let err = parse_config("scenario=gaussian-free\n[physical]\nsigma0=-1\n").unwrap_err();
    assert!(err.to_string().contains("sigma0"));
}

#[test]
fn csv_headers_are_fixed() {
    let dir = tempfile::tempdir().unwrap();
    run_to_dir(
        &small("gaussian-free", "t_final=0.01\ndt=1e-3\n"),
        dir.path(),
        &mut quiet(),
    )
    .unwrap();
    let header = |name: &str| read_csv(&dir.path().join(name)).0.join(",");
    assert_eq!(header("trajectories.csv"), "t,a,q,qdot,J,u,Q,Qdot");
    assert_eq!(
        header("energy.csv"),
        "t,T_visible,T_concealed,V_external,H_lagrangian,H_eulerian,H_operator,H_metric"
    );
    assert_eq!(
        header("eulerian.csv"),
        "t,x,rho_qlag,rho_psi,v,V_concealed_lagrangian,V_concealed_continuity"
    );
}

#[test]
fn zero_duration_writes_only_initial_rows() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_to_dir(&small("gaussian-boosted", "t_final=0\n"), dir.path(), &mut quiet()).unwrap();
    assert_eq!(report.steps_done, 0);
    let (_, traj) = read_csv(&dir.path().join("trajectories.csv"));
    let (_, energy) = read_csv(&dir.path().join("energy.csv"));
    let (_, euler) = read_csv(&dir.path().join("eulerian.csv"));
    assert_eq!(traj.len(), 128);
    assert_eq!(energy.len(), 1);
    assert!(!euler.is_empty());
    assert!(traj.iter().chain(&energy).chain(&euler).all(|r| r[0] == 0.0));
    // trajectories start at their labels
    assert!(traj.iter().all(|r| r[1] == r[2] && (r[4] - 1.0).abs() < 1e-12));
    assert_eq!(report.metrics.energy_drift, 0.0);
}

#[test]
fn free_gaussian_meets_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("gaussian-free", "t_final=2\n[toggles]\nrun_reference=off\n");
    let report = run_to_dir(&cfg, dir.path(), &mut quiet()).unwrap();
    let m = report.metrics;
    assert!((m.t - 2.0).abs() < 1e-12);
    assert!(m.trajectory_error.unwrap() < cfg.numerics.tolerance);
    assert!(m.concealed_error.unwrap() < cfg.numerics.tolerance);
    assert!(m.density_l2.is_none());
    let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("trajectory_sup_error") && text.contains("within tolerance"));
    assert!(text.contains("[N=128 M=- dt=1e-3]"), "{text}");
    let (_, energy) = read_csv(&dir.path().join("energy.csv"));
    assert_eq!(energy.len(), 41);
    assert!(energy.iter().all(|r| r[5].is_nan() && r[6].is_nan()));
}

#[test]
fn routh_demo_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_to_dir(
        &ScenarioConfig::defaults(ScenarioKind::RouthDemo),
        dir.path(),
        &mut quiet(),
    )
    .unwrap();
    let note = |k: &str| report.notes.iter().find(|(n, _)| n == k).unwrap().1.clone();
    assert!(note("full_vs_reduced_sup").parse::<f64>().unwrap() < 1e-10);
    assert!(report.metrics.concealed_error.unwrap() < 1e-10);
    let (header, rows) = read_csv(&dir.path().join("routh.csv"));
    assert_eq!(header.join(","), "t,q_full,q_reduced,q_exact,Q_full,Q_reduced,Q_exact");
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[4] - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    assert!((last[1] - 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn output_is_deterministic() {
    let cfg = small("custom", "t_final=0.2\n");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_to_dir(&cfg, a.path(), &mut quiet()).unwrap();
    run_to_dir(&cfg, b.path(), &mut quiet()).unwrap();
    for name in ["trajectories.csv", "energy.csv", "eulerian.csv", "report.txt"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn narrow_domain_is_widened() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_to_dir(
        &small("gaussian-free", "t_final=0\nhalf_width=2\n"),
        dir.path(),
        &mut quiet(),
    )
    .unwrap();
    assert_eq!(report.warnings.len(), 1);
    let (_, euler) = read_csv(&dir.path().join("eulerian.csv"));
    assert!(euler[0][1] <= -6.0);
}

#[test]
fn refinement_orders() {
    let cfg =
        parse_config("scenario=gaussian-free\n[numerics]\nn_labels=384\ndt=4e-3\nt_final=0.5\noutput_stride=25\n")
            .unwrap();
    let table = converge(&cfg, None, &mut quiet()).unwrap();
    assert!(table.failed().is_none());
    let orders = table.orders();
    let get = |name: &str| orders.iter().find(|(n, _)| *n == name).unwrap().1.clone();
    for (name, lo, hi) in [
        ("trajectory_error", 1.8, 2.2),
        ("energy_drift", 1.8, 2.2),
        ("density_l2", 1.8, 2.2),
        ("continuity_error", 0.9, 1.2),
    ] {
        for o in get(name) {
            let o = o.unwrap();
            assert!((lo..hi).contains(&o), "{name} order {o}");
        }
    }
}

#[test]
fn compression_failure_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("scenario=custom\n[numerics]\nn_labels=512\nt_final=0.1\ninertia=0.01\n").unwrap();
    let err = run_to_dir(&cfg, dir.path(), &mut quiet()).unwrap_err();
    assert!(matches!(err, CliError::Numerical(_)), "{err}");
    assert_eq!(err.exit_code(), 2);
    let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("FAILED at step"), "{text}");
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "scenario=gaussian-free\n[numerics]\ndt=soon\n").unwrap();
    let out = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = bin().args(["run", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    fs::write(
        &cfg,
        "scenario=custom\n[numerics]\nn_labels=512\nt_final=0.1\ninertia=0.01\n",
    )
    .unwrap();
    let out = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    fs::write(&cfg, "scenario=gaussian-free\n[numerics]\nn_labels=64\nt_final=0.05\n").unwrap();
    let out = bin()
        .args(["--quiet", "run"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path().join("ok"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(dir.path().join("ok/report.txt").exists());

    let out = bin().args(["demo", "no-such-scenario"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            concealed_cli::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

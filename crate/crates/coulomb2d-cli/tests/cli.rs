//! End-to-end tests of the batch front end: exit codes, file contracts,
//! determinism, and the documented behaviors of each subcommand.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coulomb2d"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn constants_isotropic_c2_column_zero_and_c3_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    for &nu in &[-0.3, 0.0, 0.25, 0.4] {
        let cfg = write(
            tmp.path(),
            "c.json",
            &format!(r#"{{"modulus": {{"e": 1.0, "nu": {nu}}}, "sweep_points": 19}}"#),
        );
        let out_dir = tmp.path().join(format!("out{nu}"));
        let out = run(&[
            "constants",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_success(&out);

        let report = read_json(&out_dir.join("constants.json"));
        let c3_exact = (1.0 - 2.0 * nu) * (1.0 + nu) / 2.0;
        let c3 = report["c3"].as_f64().unwrap();
        assert!((c3 - c3_exact).abs() < 1e-8, "c3 {c3} vs {c3_exact} at nu={nu}");

        // Isotropy: the c2 column of the orientation sweep vanishes.
        let sweep = std::fs::read_to_string(out_dir.join("constants_sweep.csv")).unwrap();
        let mut lines = sweep.lines();
        assert_eq!(
            lines.next().unwrap(),
            "theta[rad],c1[-],c2[-],c3[-],c4[-],alpha[-]"
        );
        let mut rows = 0;
        for line in lines {
            let c2: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
            assert!(c2.abs() < 1e-12, "c2 = {c2} in row {line}");
            rows += 1;
        }
        assert_eq!(rows, 19);
    }
}

#[test]
fn constants_malformed_json_exits_2_without_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", "{\"modulus\": {");
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "constants",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists(), "no partial files on config error");
}

#[test]
fn constants_unknown_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"modulus": {"e": 1.0, "nu": 0.3}, "bogus": 1}"#,
    );
    let out = run(&["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn missing_config_flag_exits_2() {
    let out = run(&["constants"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernels_reports_structure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "k.json", r#"{"n": 48}"#);
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "kernels",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let report = read_json(&out_dir.join("kernels.json"));
    assert!(report["lambda_min_symmetric"].as_f64().unwrap() > 0.0);
    assert_eq!(report["skew_defect"].as_f64().unwrap(), 0.0);
    assert!(report["max_potential_deviation"].as_f64().unwrap() < 5e-3);
}

#[test]
fn steady_slide_flat_punch_total_load_and_convergence_ratio() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "s.json",
        r#"{"constants": {"modulus": {"e": 2.0, "nu": 0.3}},
            "friction": 0.0, "n": 64,
            "indentor": {"flat": {"depth": 1.0}}, "doublings": 2}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "steady-slide",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let report = read_json(&out_dir.join("steady_slide.json"));
    assert_eq!(report["class"], "coercive");
    assert!(report["converged"].as_bool().unwrap());

    // Flat punch of depth g: total load approaches -|g| / (C1 log 2).
    let nu: f64 = 0.3;
    let c1 = 2.0 * (1.0 - nu * nu) / (std::f64::consts::PI * 2.0);
    let exact = -1.0 / (c1 * 2.0f64.ln());
    let load = report["total_load"].as_f64().unwrap();
    assert!(
        ((load - exact) / exact).abs() < 1e-2,
        "total load {load} vs {exact}"
    );

    // Doubling levels produce a convergence-ratio entry.
    assert_eq!(report["levels"].as_array().unwrap().len(), 3);
    let orders = report["observed_orders"].as_array().unwrap();
    assert_eq!(orders.len(), 1);
    assert!(orders[0].as_f64().unwrap() > 0.9);
}

#[test]
fn steady_slide_noncoercive_exits_4_with_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "s.json",
        r#"{"constants": {"synthetic": {"c1": 1.0, "c2": 0.5, "c3": 0.3, "c4": 1.0}},
            "friction": 3.0, "n": 80,
            "indentor": {"parabola": {"depth": 0.5}}}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "steady-slide",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let report = read_json(&out_dir.join("steady_slide.json"));
    assert_eq!(report["class"], "non-coercive");
    assert_eq!(report["f_critical"].as_f64().unwrap(), 2.0);
    assert!(report["nonexistence"]["certificate_quadratic"].as_f64().unwrap() < 0.0);
}

#[test]
fn contact_step_frictionless_never_slips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"mesh": {"contact_square": {"nx": 6, "ny": 3}},
            "modulus": {"e": 1.0, "nu": 0.3},
            "body_force": [0.8, -1.0]}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "contact-step",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let report = read_json(&out_dir.join("contact_step.json"));
    let counts = report["state_counts"].as_object().unwrap();
    assert!(!counts.contains_key("slip+"));
    assert!(!counts.contains_key("slip-"));
    assert!(report["kkt"]["max"].as_f64().unwrap() < 1e-8);

    let table = std::fs::read_to_string(out_dir.join("contact_step.csv")).unwrap();
    assert!(table.starts_with("node[-],s[-],x[-],y[-],u_n[-],u_t[-],t_n[-],t_t[-],state[-]\n"));
}

#[test]
fn contact_step_oblique_margin_violation_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"mesh": {"contact_square": {"nx": 4, "ny": 3}},
            "modulus": {"e": 1.0, "nu": 0.3},
            "body_force": [0.5, -1.0],
            "friction": 5.0,
            "mode": {"alpha": [0.5, 0.5, 0.5, 0.5, 0.5]}}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "contact-step",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("f*|alpha| < 1"),
        "refusal must cite the condition: {stderr}"
    );
    assert!(!out_dir.exists(), "refused run writes nothing");
}

#[test]
fn evolve_constant_load_steps_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "e.json",
        r#"{"mesh": {"contact_square": {"nx": 6, "ny": 3}},
            "modulus": {"e": 1.0, "nu": 0.3},
            "body_force": [0.8, -1.0], "friction": 0.3,
            "steps": [{}, {}]}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let a = std::fs::read(out_dir.join("evolve_step_000.csv")).unwrap();
    let b = std::fs::read(out_dir.join("evolve_step_001.csv")).unwrap();
    assert_eq!(a, b, "constant-load steps must be byte-identical");
    let report = read_json(&out_dir.join("evolve.json"));
    assert_eq!(report["steps"][1]["warm_started"], true);
    let dissipation = report["dissipation"].as_array().unwrap();
    assert!(dissipation.iter().all(|d| d.as_f64().unwrap() >= 0.0));
}

#[test]
fn probe_reports_structure_and_seed_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "p.json",
        r#"{"mesh": {"contact_square": {"nx": 9, "ny": 3}},
            "modulus": {"e": 1.5, "nu": 0.3},
            "body_force": [1.5, -1.0], "friction": 1.0,
            "pairs": 6, "rays": 2, "continuity_points": 7}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "probe",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let report = read_json(&out_dir.join("probe.json"));
    assert_eq!(report["seed"].as_u64().unwrap(), 0);
    assert!(report["min_monotonicity_quotient_dual"].as_f64().unwrap() > 0.0);
    assert!(report["coercivity_increasing_dual"].as_bool().unwrap());
    let exponent = report["continuity_exponent"].as_f64().unwrap();
    assert!((0.4..=0.6).contains(&exponent), "exponent {exponent}");

    // The --seed flag overrides the config seed.
    let out_dir2 = tmp.path().join("out2");
    let out = run(&[
        "probe",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir2.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_success(&out);
    let report2 = read_json(&out_dir2.join("probe.json"));
    assert_eq!(report2["seed"].as_u64().unwrap(), 7);
    assert_ne!(
        report["min_monotonicity_quotient_dual"],
        report2["min_monotonicity_quotient_dual"],
        "different seed must draw different samples"
    );
}

#[test]
fn identical_config_gives_byte_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "p.json",
        r#"{"mesh": {"contact_square": {"nx": 6, "ny": 3}},
            "modulus": {"e": 1.5, "nu": 0.3},
            "body_force": [1.0, -1.0], "friction": 0.5,
            "pairs": 4, "rays": 2, "continuity_points": 5}"#,
    );
    let dirs = ["r1", "r2"];
    for d in dirs {
        let out = bin()
            .args([
                "probe",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                tmp.path().join(d).to_str().unwrap(),
            ])
            .env("COULOMB2D_THREADS", "2")
            .output()
            .unwrap();
        assert_success(&out);
    }
    for name in [
        "probe.json",
        "probe_pairs.csv",
        "probe_coercivity.csv",
        "probe_continuity.csv",
    ] {
        let a = std::fs::read(tmp.path().join("r1").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("r2").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn bad_thread_env_exits_2() {
    let out = bin()
        .args(["constants"])
        .env("COULOMB2D_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn voigt_and_mandel_conventions_agree_for_isotropy() {
    // Plane-strain isotropic stiffness E=1, nu=0.25 in both conventions:
    // lambda = 0.4, mu = 0.4 -> diagonal 1.2, off-diagonal 0.4, shear 0.4.
    let tmp = tempfile::tempdir().unwrap();
    let voigt = write(
        tmp.path(),
        "v.json",
        r#"{"modulus": {"voigt": [1.2, 0.4, 0.0, 1.2, 0.0, 0.4]}, "sweep_points": 3}"#,
    );
    let mandel = write(
        tmp.path(),
        "m.json",
        r#"{"modulus": {"mandel": [1.2, 0.4, 0.0, 1.2, 0.0, 0.8]}, "sweep_points": 3}"#,
    );
    let iso = write(
        tmp.path(),
        "i.json",
        r#"{"modulus": {"e": 1.0, "nu": 0.25}, "sweep_points": 3}"#,
    );
    let mut reports = Vec::new();
    for (cfg, dir) in [(&voigt, "ov"), (&mandel, "om"), (&iso, "oi")] {
        let out_dir = tmp.path().join(dir);
        let out = run(&[
            "constants",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_success(&out);
        reports.push(read_json(&out_dir.join("constants.json")));
    }
    for key in ["c1", "c2", "c3", "c4"] {
        let v = reports[0][key].as_f64().unwrap();
        let m = reports[1][key].as_f64().unwrap();
        let i = reports[2][key].as_f64().unwrap();
        assert!((v - m).abs() < 1e-12, "{key}: voigt {v} vs mandel {m}");
        assert!((v - i).abs() < 1e-10, "{key}: voigt {v} vs isotropic {i}");
    }
}

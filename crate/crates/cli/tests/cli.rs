//! End-to-end checks of the `mesub` binary: report contents, file formats,
//! exit codes, and run-to-run determinism, driven through the shipped
//! example configs plus a few deliberately broken ones.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesub"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be utf-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

/// Value of a `key = value` report line.
fn report_value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    let line = text
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("report should contain a \"{key}\" line:\n{text}"));
    line[prefix.len()..]
        .parse()
        .unwrap_or_else(|_| panic!("\"{line}\" should end in a number"))
}

#[test]
fn depopulate_reports_the_known_fields() {
    for (name, expect) in [("case_a.toml", 6.409250), ("case_b.toml", 5.136039)] {
        let out = run(&["depopulate", config(name).to_str().unwrap()]);
        assert_eq!(exit_code(&out), 0, "{name} stderr: {}", stderr(&out));
        let text = stdout(&out);
        let closed = report_value(&text, "closed_form_B1_T");
        let numeric = report_value(&text, "numeric_B1_T");
        assert!(
            (closed - expect).abs() < 1e-4,
            "{name}: closed form {closed} T, expected near {expect} T"
        );
        assert!(
            (closed - numeric).abs() < 1e-6,
            "{name}: closed form {closed} vs numeric {numeric}"
        );
    }
}

#[test]
fn depopulate_on_a_single_subband_device_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.toml");
    std::fs::write(
        &path,
        "[material]\neffective_mass_ratio = 0.067\nmobility_m2_per_vs = 600.0\n\n\
         [confinement]\ntype = \"parabolic\"\nz0_nm = 4.0\n\n\
         [densities]\ntotal_per_m2 = 1.0e15\n",
    )
    .unwrap();
    let out = run(&["depopulate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(
        stdout(&out).contains("depopulation_fields_T = []"),
        "one occupied subband never depopulates:\n{}",
        stdout(&out)
    );
}

#[test]
fn subbands_crosses_the_depopulation_field() {
    let cfg = config("case_a.toml");
    let below = run(&["subbands", cfg.to_str().unwrap(), "--B", "0"]);
    assert_eq!(exit_code(&below), 0, "stderr: {}", stderr(&below));
    let text = stdout(&below);
    assert!(text.contains("n_occupied = 2"), "at 0 T:\n{text}");
    let n1 = report_value(&text, "N1_per_m2");
    assert!(
        (n1 - 1.2e14).abs() / 1.2e14 < 1e-6,
        "upper subband should hold 1.2e14 m^-2 at zero field, got {n1}"
    );

    let above = run(&["subbands", cfg.to_str().unwrap(), "--B", "6.41"]);
    let text = stdout(&above);
    assert!(text.contains("n_occupied = 1"), "at 6.41 T:\n{text}");
    assert!(
        text.contains("N1_per_m2 = 0"),
        "upper subband should be empty at 6.41 T:\n{text}"
    );
}

#[test]
fn sweep_csv_has_the_fixed_header_and_symmetric_detectors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        config("case_a.toml").to_str().unwrap(),
        "--B-range",
        "0,8",
        "--steps",
        "17",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "B_T,n_occupied,N0_per_m2,N1_per_m2,theta_deg,frac_C,frac_D1,frac_D2,resistance_proxy"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 17, "expected at least the requested steps, got {}", rows.len());
    for row in &rows {
        assert_eq!(row.len(), 9, "malformed row {row:?}");
        assert_eq!(row[6], row[7], "detector columns must match to the last digit: {row:?}");
    }
    let first_theta: f64 = rows[0][4].parse().unwrap();
    let last_theta: f64 = rows.last().unwrap()[4].parse().unwrap();
    assert_eq!(first_theta, 0.0, "no deflection before any jump");
    assert!(
        (last_theta - 10.0286).abs() < 1e-3,
        "post-jump deflection should sit near 10.03 deg, got {last_theta}"
    );
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("case_a.toml");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let out = run(&[
            "sweep",
            cfg.to_str().unwrap(),
            "--B-range",
            "0,8",
            "--steps",
            "33",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "identical invocations must write identical bytes");
}

#[test]
fn sweep_json_carries_model_notes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let out = run(&[
        "sweep",
        config("case_a.toml").to_str().unwrap(),
        "--B-range",
        "6,7",
        "--steps",
        "3",
        "--out",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let json = std::fs::read_to_string(&path).unwrap();
    for needle in ["\"model_notes\"", "\"records\"", "\"B_T\"", "\"frac_D2\"", "50/50"] {
        assert!(json.contains(needle), "JSON output should contain {needle}:\n{json}");
    }
}

#[test]
fn sweep_to_an_unwritable_path_exits_4() {
    let out = run(&[
        "sweep",
        config("case_a.toml").to_str().unwrap(),
        "--B-range",
        "0,8",
        "--steps",
        "5",
        "--out",
        "/nonexistent-dir/sweep.csv",
    ]);
    assert_eq!(exit_code(&out), 4, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("i/o error"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_config_keys_are_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.toml");
    std::fs::write(
        &path,
        "[material]\neffective_mass_ratio = 0.067\nmobility_m2_per_vs = 600.0\nmobilty = 1.0\n\n\
         [confinement]\ntype = \"parabolic\"\nz0_nm = 4.0\n",
    )
    .unwrap();
    let out = run(&["depopulate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("mobilty"),
        "the misspelled key should be named: {}",
        stderr(&out)
    );
}

#[test]
fn inconsistent_per_subband_densities_are_rejected_by_index() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("skewed.toml");
    std::fs::write(
        &path,
        "[material]\neffective_mass_ratio = 0.067\nmobility_m2_per_vs = 600.0\n\n\
         [confinement]\ntype = \"parabolic\"\nz0_nm = 4.0\n\n\
         [densities]\nper_subband_per_m2 = [2.0e16, 5.0e15]\n",
    )
    .unwrap();
    let out = run(&["depopulate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("per_subband_per_m2[0]"),
        "the offending entry should be named: {}",
        stderr(&out)
    );
}

#[test]
fn missing_config_file_exits_2() {
    let out = run(&["depopulate", "/nonexistent-dir/missing.toml"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("cannot read config"), "stderr: {}", stderr(&out));
}

#[test]
fn design_solves_the_drive_field_for_an_angle() {
    let out = run(&[
        "design",
        config("case_a.toml").to_str().unwrap(),
        "--target-theta-deg",
        "10",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let drive = report_value(&text, "F_v_per_m");
    assert!(
        (drive - 641.868).abs() < 1e-2,
        "drive for a 10 deg deflection should be near 641.87 V/m, got {drive}"
    );
    assert!(report_value(&text, "residual_deg").abs() < 1e-9, "{text}");
}

#[test]
fn design_solves_the_confinement_for_a_depopulation_field() {
    let out = run(&[
        "design",
        config("case_a.toml").to_str().unwrap(),
        "--target-B1-T",
        "5.136039",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let z0 = report_value(&text, "z0_nm");
    assert!(
        (z0 - 5.0).abs() < 1e-3,
        "confinement hitting 5.136 T should be near 5 nm, got {z0} nm"
    );
    assert!(report_value(&text, "residual_T").abs() < 1e-4, "{text}");
}

#[test]
fn design_requires_exactly_one_target() {
    let both = run(&[
        "design",
        config("case_a.toml").to_str().unwrap(),
        "--target-theta-deg",
        "10",
        "--target-B1-T",
        "5",
    ]);
    assert_eq!(exit_code(&both), 2, "stderr: {}", stderr(&both));
    let neither = run(&["design", config("case_a.toml").to_str().unwrap()]);
    assert_eq!(exit_code(&neither), 2, "stderr: {}", stderr(&neither));
}

#[test]
fn design_with_an_unreachable_target_exits_5() {
    let out = run(&[
        "design",
        config("case_a.toml").to_str().unwrap(),
        "--target-B1-T",
        "1000",
    ]);
    assert_eq!(exit_code(&out), 5);
    let err = stderr(&out);
    assert!(
        err.contains("bracket [") && err.contains("objective"),
        "the failure should report the bracket it searched: {err}"
    );
}

#[test]
fn dispersion_rejects_the_analytic_solver_on_a_triangular_well() {
    let cfg = config("triangular.toml");
    let forced = run(&["dispersion", cfg.to_str().unwrap(), "--solver", "analytic"]);
    assert_eq!(exit_code(&forced), 2, "stderr: {}", stderr(&forced));
    let compared = run(&["dispersion", cfg.to_str().unwrap(), "--compare"]);
    assert_eq!(exit_code(&compared), 2, "stderr: {}", stderr(&compared));
}

#[test]
fn dispersion_solvers_agree_on_a_parabolic_well() {
    let out = run(&[
        "dispersion",
        config("case_a.toml").to_str().unwrap(),
        "--B",
        "5",
        "--compare",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let deviation = report_value(&stdout(&out), "max_relative_deviation");
    assert!(
        deviation < 1e-5,
        "grid and closed-form energies should agree to 1e-5, got {deviation}"
    );
}

#[test]
fn triangular_dispersion_is_symmetric_at_zero_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disp.csv");
    let out = run(&[
        "dispersion",
        config("triangular.toml").to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for i in 0..rows.len() {
        let mirror = &rows[rows.len() - 1 - i];
        assert_eq!(rows[i][0], -mirror[0], "sample grid should be symmetric");
        for (e, me) in rows[i][1..].iter().zip(&mirror[1..]) {
            assert!(
                ((e - me) / e).abs() < 1e-8,
                "E(kx) and E(-kx) should match at 0 T: {e} vs {me}"
            );
        }
    }
    for line in stdout(&out).lines().filter(|l| l.starts_with("minimum_kx_per_m")) {
        let min: f64 = line.split(" = ").nth(1).unwrap().parse().unwrap();
        assert_eq!(min, 0.0, "minima sit at kx = 0 without a field: {line}");
    }
}

#[test]
fn triangular_dispersion_minima_shift_in_a_field() {
    let out = run(&[
        "dispersion",
        config("triangular.toml").to_str().unwrap(),
        "--B",
        "5",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut seen = 0;
    for line in text.lines().filter(|l| l.starts_with("minimum_kx_per_m")) {
        let min: f64 = line.split(" = ").nth(1).unwrap().parse().unwrap();
        assert!(
            min.abs() > 1e5,
            "at 5 T every band minimum should move off kx = 0: {line}"
        );
        seen += 1;
    }
    assert_eq!(seen, 3, "expected one minimum per band:\n{text}");
}

#[test]
fn dispersion_requires_a_symmetric_kx_range() {
    let out = run(&[
        "dispersion",
        config("case_a.toml").to_str().unwrap(),
        "--kx-range",
        "-1e8,2e8",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("symmetric"), "stderr: {}", stderr(&out));
}

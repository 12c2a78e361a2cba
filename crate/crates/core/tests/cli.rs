//! Smoke tests for the command-line binary: output shape, determinism and
//! exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tanfam"))
}

#[test]
fn cascade_json_contains_first_merging_parameter() {
    let out = bin()
        .args(["cascade", "--depth", "2", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let beta1 = v["betas"][0]["t"].as_f64().unwrap();
    assert!((beta1 - 2.94).abs() < 0.01);
}

#[test]
fn cascade_csv_has_expected_columns() {
    let out = bin()
        .args(["cascade", "--depth", "2", "--csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,alpha,beta,residual_alpha,residual_beta"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn cycle_at_half_reports_fixed_point() {
    let out = bin().args(["cycle", "--t", "0.5"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["period_t"].as_u64(), Some(1));
    assert!(v["real_points"][0].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn transversal_certificate_is_positive() {
    let out = bin().args(["transversal", "--n", "1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["positivity"].as_bool(), Some(true));
}

#[test]
fn attractor_csv_lists_bridges_and_gaps() {
    let out = bin()
        .args(["attractor", "--depth", "2", "--csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("level,side,index,left,right,kind"));
    assert!(text.contains(",bridge") && text.contains(",gap"));
}

#[test]
fn plane_render_is_deterministic_and_valid_ppm() {
    let dir = std::env::temp_dir();
    let (p1, p2) = (dir.join("tanfam_cli_p1.ppm"), dir.join("tanfam_cli_p2.ppm"));
    for p in [&p1, &p2] {
        let out = bin()
            .args([
                "plane",
                "--region",
                "0.2,3.1,0.05,1.5",
                "--width",
                "24",
                "--height",
                "16",
                "--out",
                p.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let (b1, b2) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(b1, b2);
    assert!(b1.starts_with(b"P6\n24 16\n255\n"));
    assert_eq!(b1.len(), b"P6\n24 16\n255\n".len() + 24 * 16 * 3);
}

#[test]
fn diagram_render_writes_ppm() {
    let path = std::env::temp_dir().join("tanfam_cli_diag.ppm");
    let out = bin()
        .args([
            "diagram",
            "--t-min",
            "0.3",
            "--t-max",
            "3.1",
            "--width",
            "60",
            "--height",
            "40",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(std::fs::read(&path).unwrap().starts_with(b"P6\n60 40\n255\n"));
}

#[test]
fn usage_errors_exit_one() {
    let out = bin().arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["plane", "--region", "oops", "--out", "/tmp/x.ppm"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invariant_violations_exit_two() {
    let out = bin().args(["cascade", "--depth", "99"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["--precision-bits", "113", "cascade", "--depth", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

use std::path::Path;
use std::process::{Command, Output};

use invgen_core::experiments::{FIT_CSV_HEADER, RECORD_CSV_HEADER};

fn invgen(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invgen"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("run invgen")
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap_or_default()
        .to_string()
}

#[test]
fn blowup_p2_passes_and_writes_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = invgen(&["blowup", "--p", "2", "--svg"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(first_line(&dir.path().join("blowup_p2.csv")), RECORD_CSV_HEADER);
    assert_eq!(first_line(&dir.path().join("blowup_fit.csv")), FIT_CSV_HEADER);
    let rows = std::fs::read_to_string(dir.path().join("blowup_p2.csv")).unwrap();
    assert_eq!(rows.lines().count(), 18);
    let svg = std::fs::read_to_string(dir.path().join("blowup.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn narrow_rho_range_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = invgen(&["blowup", "--p", "4", "--rho", "1e2:1e3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn malformed_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["blowup", "--p", "1"][..],
        &["blowup", "--rho", "1e6:1e2"],
        &["kernel", "--eps", "-1"],
        &["semigroup", "--grid-N", "1000"],
        &["vdc", "--bogus"],
    ] {
        let out = invgen(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn kernel_and_vdc_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = invgen(&["kernel"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        first_line(&dir.path().join("kernel.csv")),
        "t,eps,laplace_quad,laplace_exact,abs_error"
    );
    let out = invgen(&["vdc"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        first_line(&dir.path().join("vdc.csv")),
        "rho,a,b,curvature,sup_G,emp_M,bound_part"
    );
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["blowup", "--p", "2,4", "--rho", "1e2:1e5", "--points-per-decade", "2"];
    let ra = invgen(&[&args[..], &["--workers", "1"]].concat(), a.path());
    let rb = invgen(&[&args[..], &["--workers", "3"]].concat(), b.path());
    assert_eq!(ra.status.code(), Some(0), "{}", String::from_utf8_lossy(&ra.stdout));
    assert_eq!(rb.status.code(), Some(0));
    for name in ["blowup_p2.csv", "blowup_p4.csv", "blowup_fit.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = invgen(&["selftest"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

//! End-to-end runs of the binary against the shipped example states.
//!
//! Stdout is compared byte for byte with `tests/golden/<name>.txt`. Set
//! `SYMEXT_BLESS=1` to rewrite the golden files after an intended change.

use std::path::{Path, PathBuf};
use std::process::Command;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn symext(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_symext"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exited normally"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(name: &str, args: &[&str]) {
    let (code, stdout, stderr) = symext(args);
    assert_eq!(code, 0, "{name}: {stderr}");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("SYMEXT_BLESS").is_some() {
        std::fs::write(&path, &stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout, expected, "{name} drifted from its golden file");
}

fn value<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{stdout}"))
}

#[test]
fn bell_check() {
    let (code, out, _) = symext(&["check", "--state", "data/states/bell.qstate", "--levels", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "verdict"), "NOT_EXTENDIBLE");
    let lambda: f64 = value(&out, "lambda").parse().unwrap();
    assert!((lambda - 1.0 / 3.0).abs() < 0.02);
    assert_eq!(value(&out, "witness_valid"), "true");
    golden("check_bell_2_1", &["check", "data/states/bell.qstate", "--levels", "2,1"]);
}

#[test]
fn golden_checks() {
    golden("check_separable_3_1", &["check", "data/states/separable_2x2.qstate", "--levels", "3,1"]);
    golden("check_werner_2_1", &["check", "data/states/werner_0.5.qstate", "--levels", "2,1"]);
    golden("check_ghz_2_2_1", &["check", "data/states/ghz.qstate", "--levels", "2,2,1"]);
    golden(
        "check_tiles_ppt_2_1",
        &["check", "data/states/tiles.qstate", "--levels", "2,1", "--ppt", "1:2"],
    );
}

#[test]
fn golden_bounds() {
    golden("bound_trace_8_1", &["bound", "--norm", "trace", "--dims", "2,2", "--levels", "8,1"]);
    golden("bound_locc_ells", &["bound", "--norm", "locc", "--dims", "2,16", "--ells", "4"]);
    golden("bound_ppt", &["bound", "--norm", "trace-ppt", "--dims", "2,3,2", "--levels", "4,4,1"]);
    golden(
        "definetti",
        &["definetti", "--dim", "2", "--n", "1", "--bigN", "2", "--k", "1048576", "--norm", "locc"],
    );
    golden("ell_for_error", &["ell-for-error", "--dims", "2,2,2", "--bigN", "3", "--eps", "0.1"]);
}

#[test]
fn trace_bound_example() {
    let (code, out, _) = symext(&["bound", "--norm", "trace", "--dims", "2,2", "--levels", "8,1"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "value"), "1.0");
}

#[test]
fn threshold_scan() {
    let (code, out, _) = symext(&["threshold", "--family", "isotropic", "--levels", "2,1"]);
    assert_eq!(code, 0);
    let t: f64 = value(&out, "threshold").parse().unwrap();
    assert!((t - 0.75).abs() < 1e-3, "{t}");
}

#[test]
fn make_state_round_trip() {
    let dir = std::env::temp_dir().join(format!("symext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("bell.qstate");
    let (code, _, err) = symext(&["make-state", "--family", "bell", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let shipped = std::fs::read_to_string(workspace().join("data/states/bell.qstate")).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), shipped);

    let w = dir.join("bell.qwit");
    let (code, out, _) = symext(&[
        "check",
        "data/states/bell.qstate",
        "--levels",
        "2,1",
        "--witness-out",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "witness_out"), w.to_str().unwrap());
    assert!(std::fs::read_to_string(&w).unwrap().starts_with("QWIT 1\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = ["check", "data/states/isotropic_0.7.qstate", "--levels", "3,1"];
    assert_eq!(symext(&args).1, symext(&args).1);
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["check", "--state", "data/states/bell.qstate", "--levels", "2"],
        &["check", "--state", "data/states/missing.qstate", "--levels", "2,1"],
        &["check", "--levels", "2,1"],
        &["check", "data/states/bell.qstate", "--levels", "2,1", "--ppt", "1:1"],
        &["check", "data/states/bell.qstate", "--levels", "2,1", "--witness-out", "no/such/dir/w.qwit"],
        &["bound", "--norm", "trace", "--dims", "2,2"],
        &["bound", "--norm", "spectral", "--dims", "2,2", "--levels", "2,1"],
        &["definetti", "--dim", "2", "--n", "3", "--bigN", "2", "--k", "8", "--norm", "locc"],
        &["make-state", "--family", "nope", "--out", "/tmp/x.qstate"],
        &[],
    ];
    for args in cases {
        let (code, out, err) = symext(args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(out.is_empty(), "{args:?} printed results: {out}");
        assert!(!err.is_empty());
    }
}

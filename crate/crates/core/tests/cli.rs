use std::path::Path;
use std::process::Command;

fn hexsle(args: &[&str], config: Option<(&Path, &str)>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hexsle"));
    cmd.args(args);
    if let Some((path, text)) = config {
        std::fs::write(path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

const SQUARE: &str = "[crossing]\ndomain = { kind = \"rhombus\" }\nmesh = 0.03125\nsamples = 4000\n";

#[test]
fn square_crossing_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, stdout) = hexsle(
        &["crossing", "--seed", "5", "--workers", "2", "--check", "--out", out.to_str().unwrap()],
        Some((&dir.path().join("c.toml"), SQUARE)),
    );
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("PASS crossing"));
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["root_seed"], 5);
    assert_eq!(manifest["worker_count"], 2);
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = "[crossing]\ndomain = { kind = \"rhombus\" }\nmesh = -1.0\nsamples = 10\n";
    let (code, _) = hexsle(&["crossing", "--out", out.to_str().unwrap()], Some((&dir.path().join("c.toml"), bad)));
    assert_eq!(code, 2);
    let unknown = "[crossing]\nshape = 3\n";
    let (code, _) = hexsle(&["crossing", "--out", out.to_str().unwrap()], Some((&dir.path().join("d.toml"), unknown)));
    assert_eq!(code, 2);
    let (code, _) = hexsle(&["crossing", "--workers", "0", "--out", out.to_str().unwrap()], None);
    assert_eq!(code, 2);
}

#[test]
fn failed_check_exits_3_only_with_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // six arms cannot decay faster than ratio^-10 at these radii
    let strict = "[arms]\nbox_size = 48.0\nr_in = 3.0\nratios = [2.0, 4.0]\nsamples = 500\ninterior_slope_bound = -10.0\n";
    let path = dir.path().join("a.toml");
    let (code, stdout) = hexsle(&["arms", "--check", "--out", out.to_str().unwrap()], Some((&path, strict)));
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("FAIL"));
    let (code, _) = hexsle(&["arms", "--out", out.to_str().unwrap()], Some((&path, strict)));
    assert_eq!(code, 0);
}

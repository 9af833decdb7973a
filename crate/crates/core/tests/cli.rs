//! End-to-end runs of the `pftrail` binary.

use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn pftrail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pftrail"))
        .args(args)
        .env_remove("PFTRAIL_THREADS")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn render_writes_collada() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.dae");
    let out = pftrail(&["render", "--builtin", "hilbert", "--grid", "16", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = std::fs::read_to_string(&path).unwrap();
    assert!(doc.starts_with("<?xml"));
    assert!(doc.contains("<library_geometries>"));
    assert!(doc.contains("<instance_camera url=\"#camera\"/>"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangles:"));
}

#[test]
fn render_to_stdout_is_deterministic_across_threads() {
    let args = ["render", "--builtin", "gosper", "--grid", "24", "--parapets"];
    let one = pftrail(&[&["--threads", "1"], &args[..]].concat());
    let four = pftrail(&[&["--threads", "4"], &args[..]].concat());
    let again = pftrail(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(code(&one), 0);
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn render_options_run() {
    for extra in [
        &["--zoom", "0.2857142857142857,2"][..],
        &["--focus", "0.5,0.5,1.5"],
        &["--style", "eroded", "--slope", "0.5"],
        &["--no-background", "--no-bridges", "--policy", "min"],
        &["--colormap", "hypsometric", "--tau", "0.001", "--oversample", "2"],
    ] {
        let args = [&["render", "--builtin", "polya", "--grid", "16", "-o", "-"][..], extra].concat();
        let out = pftrail(&args);
        assert_eq!(code(&out), 0, "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.starts_with(b"<?xml"));
    }
}

#[test]
fn dump_cells_lists_layers() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("cells.txt");
    let out = pftrail(&[
        "render", "--builtin", "zorder", "--grid", "16", "-o", "-", "--dump-cells", dump.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dump).unwrap();
    assert!(text.lines().any(|l| l.ends_with(" bridge")));
    assert!(text.lines().all(|l| l.split(' ').count() == 7));
}

#[test]
fn image_matches_golden_digest() {
    let out = pftrail(&["image", "--builtin", "polya", "--scheme", "gray", "--size", "256x256"]);
    assert_eq!(code(&out), 0);
    let digest: String = Sha256::digest(&out.stdout).iter().map(|b| format!("{b:02x}")).collect();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/polya_256_gray.sha256");
    if let Ok(stored) = std::fs::read_to_string(golden) {
        assert_eq!(digest, stored.trim());
    }
    assert!(out.stdout.starts_with(b"P6\n256 256\n255\n"));
}

#[test]
fn info_reports_weights() {
    let out = pftrail(&["info", "--builtin", "polya"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.matches("weight 0.500000").count(), 2, "{text}");
    assert!(text.contains("expansion radius R = 1.008883"));

    let text = stdout(&pftrail(&["info", "--builtin", "gosper"]));
    assert!(text.contains("7 segments"));
    assert_eq!(text.matches("weight 0.142857").count(), 7, "{text}");
}

#[test]
fn invert_prints_parameter_or_miss() {
    let out = pftrail(&["invert", "--builtin", "polya", "--point", "0.5,0"]);
    assert_eq!(code(&out), 0);
    let t: f64 = stdout(&out).trim().parse().unwrap();
    assert!((t - 0.25).abs() < 1e-9);
    let out = pftrail(&["invert", "--builtin", "polya", "--point", "2,2", "--eps", "1e-3"]);
    assert_eq!(stdout(&out).trim(), "not on curve");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&pftrail(&[])), 1);
    assert_eq!(code(&pftrail(&["image", "--builtin", "polya", "--size", "0x0"])), 1);
    assert_eq!(code(&pftrail(&["render", "--builtin", "polya", "--grid", "2"])), 1);
    assert_eq!(code(&pftrail(&["info", "missing.pfc"])), 2);
    assert_eq!(code(&pftrail(&["info", "--builtin", "nosuch"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pfc");
    std::fs::write(&bad, "curve bad\nstart X\ngenerator X basis square\nseg 1 0\n").unwrap();
    assert_eq!(code(&pftrail(&["info", bad.to_str().unwrap()])), 3);
    std::fs::write(&bad, "curve bad\nstart X\ngenerator X basis hexagonal\n").unwrap();
    assert_eq!(code(&pftrail(&["info", bad.to_str().unwrap()])), 2);
    let unwritable = dir.path().join("no/such/dir/out.dae");
    let out = pftrail(&["render", "--builtin", "polya", "--grid", "8", "-o", unwritable.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn thread_variable_is_read() {
    let out = Command::new(env!("CARGO_BIN_EXE_pftrail"))
        .args(["info", "--builtin", "polya"])
        .env("PFTRAIL_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn help_shows_defaults() {
    let out = pftrail(&["render", "--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for flag in ["--grid", "--policy", "--azimuth", "--elevation", "--fov", "--parapet-trigger"] {
        assert!(text.contains(flag), "{flag} missing");
    }
    assert!(text.contains("[default: 128]"));
}

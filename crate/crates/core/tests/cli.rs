use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const GOODMAN_CERT: &str = "flagcert v1\nindex-base 0\nt 3\ns 1\nl1 2\ntypes 1\ntype 0 0\nmatrix 0 2\n3/4 -3/4\n-3/4 3/4\nbound 1/4\n";

fn flagcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagcert")).args(args).output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn enumerate_writes_legacy_flag_lists() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/flags");
    let o = flagcert(&["enumerate", "--s", "0", "--l", "3", "--format", "legacy", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("jbc03")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "4");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.len() == 3));

    let o = flagcert(&["enumerate", "--s", "1", "--l", "2", "--format", "legacy", "--out", path(&out)]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(out.join("jbc12_1")).unwrap().lines().next(), Some("2"));
}

#[test]
fn enumerate_prints_counts() {
    let o = flagcert(&["enumerate", "--s", "0", "--l", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1044 flags"));
}

#[test]
fn build_sdp_constraint_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (l1, t, m) in [("2", "3", "4"), ("3", "4", "34")] {
        let out = dir.path().join(format!("p{l1}.dat-s"));
        let o = flagcert(&["build-sdp", "--t", t, "--s", "1", "--l1", l1, "--out", path(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(fs::read_to_string(&out).unwrap().lines().next(), Some(m));
    }
}

#[test]
fn invalid_sizes_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.dat-s");
    let o = flagcert(&["build-sdp", "--t", "3", "--s", "2", "--l1", "2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("l1"));
    let o = flagcert(&["build-sdp", "--t", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certify_from_solution_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("g{i}.cert"));
        let o = flagcert(&[
            "certify", "--t", "3", "--s", "1", "--l1", "2", "--solution", path(&fixture("goodman.sol")),
            "--denominator", "1000", "--out", path(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("certified bound 1/4 = 0.25"));
        texts.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], GOODMAN_CERT);
}

#[test]
fn certify_rejects_tampered_solution() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("bad.sol");
    let text = fs::read_to_string(fixture("goodman.sol")).unwrap();
    fs::write(&sol, text.replacen("1 1 2", "1 1 7", 1)).unwrap();
    let out = dir.path().join("g.cert");
    let o = flagcert(&["certify", "--t", "3", "--s", "1", "--l1", "2", "--solution", path(&sol), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("outside a 2x2 block"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cert");
    fs::write(&good, GOODMAN_CERT).unwrap();
    let o = flagcert(&["verify", path(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recomputed bound 1/4 = 0.25"));

    let inflated = dir.path().join("inflated.cert");
    fs::write(&inflated, GOODMAN_CERT.replace("bound 1/4", "bound 1778112001/7112448000")).unwrap();
    let o = flagcert(&["verify", path(&inflated)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("constraint"), "{}", stderr(&o));

    let version = dir.path().join("v2.cert");
    fs::write(&version, GOODMAN_CERT.replace("flagcert v1", "flagcert v2")).unwrap();
    let o = flagcert(&["verify", path(&version)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported certificate format"));

    let o = flagcert(&["verify", path(&dir.path().join("missing.cert"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn legacy_layout_round_trip_with_shuffled_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let o = flagcert(&[
        "certify", "--t", "3", "--s", "1", "--l1", "2", "--solution", path(&fixture("goodman.sol")),
        "--format", "legacy", "--out", path(&data),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let flags = fs::read_to_string(data.join("jbc12_1")).unwrap();
    assert_eq!(flags.lines().count(), 3);

    let verify = |bound: &str| {
        flagcert(&[
            "verify", "--format", "legacy", "--t", "3", "--s", "1", "--l1", "2", "--bound", bound, "--data-dir",
            path(&data),
        ])
    };
    let o = verify("1/4");
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("recomputed bound 1/4"));

    // list the flags in the opposite order and permute the matrix to match
    let lines: Vec<&str> = flags.lines().collect();
    fs::write(data.join("jbc12_1"), format!("2\n{}\n{}\n", lines[2], lines[1])).unwrap();
    let yz = fs::read_to_string(data.join("yz1")).unwrap();
    let rows: Vec<Vec<&str>> = yz.lines().map(|l| l.split(',').collect()).collect();
    fs::write(
        data.join("yz1"),
        format!("{},{}\n{},{}\n", rows[1][1], rows[1][0], rows[0][1], rows[0][0]),
    )
    .unwrap();
    assert!(verify("1/4").status.success());
    assert_eq!(verify("1/3").status.code(), Some(1));

    // a flag listed twice is caught
    fs::write(data.join("jbc12_1"), format!("2\n{}\n{}\n", lines[1], lines[1])).unwrap();
    let o = verify("1/4");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("repeats"));
}

#[test]
fn coeffs_legacy_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = flagcert(&["coeffs", "--t", "3", "--s", "1", "--l1", "2", "--format", "legacy", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["jbc12_1", "si12_1", "qjb13_1", "sp12_1", "l33"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    // triangle and empty graph each count fully, the others not at all
    assert_eq!(fs::read_to_string(dir.path().join("l33")).unwrap(), "1\n0\n0\n1\n");
    let q = fs::read_to_string(dir.path().join("qjb13_1")).unwrap();
    assert_eq!(q.lines().count(), 6);
}

#[test]
fn coeffs_native_files_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = flagcert(&["coeffs", "--t", "3", "--s", "2", "--l1", "3", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("flags_s2_l3_type1.txt")).unwrap();
    let (ty, flags) = flagcert::formats::read_flag_list_native(&text).unwrap();
    assert_eq!(ty.order(), 2);
    assert_eq!(flags.len(), 4);
}

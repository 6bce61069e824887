use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kfc_core::cobordism::{compose, parse_pieces};
use kfc_core::PlFunction;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn kfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfc")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = kfc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    kfc(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn upsilon_at_a_point() {
    assert_eq!(stdout(&["upsilon", "--torus", "2", "3", "--at", "1/2"]), "-1/2\n");
    assert_eq!(stdout(&["upsilon", "--torus", "3", "5", "--at", "1"]), "-3\n");
    assert_eq!(stdout(&["upsilon", path(&data("trefoil.kfc")), "--at", "2/3"]), "-2/3\n");
}

#[test]
fn upsilon_of_unknot_is_flat() {
    assert_eq!(stdout(&["upsilon", path(&data("unknot.kfc")), "--pl"]), "0\t0\n2\t0\n");
}

#[test]
fn upsilon_pl_matches_torus_formula() {
    let from_complex = stdout(&["upsilon", "--torus", "3", "7", "--pl"]);
    assert_eq!(from_complex, stdout(&["torus", "3", "7"]));
    let f: PlFunction = from_complex.parse().unwrap();
    assert_eq!(f.first_slope(), kfc_core::pl::rat(-6, 1));
}

#[test]
fn tau_of_trefoil() {
    assert_eq!(stdout(&["tau", path(&data("trefoil.kfc"))]), "1\n");
    assert_eq!(stdout(&["tau", "--torus", "3", "4"]), "3\n");
}

#[test]
fn mt_scalar_two() {
    assert_eq!(stdout(&["mt", "--scalar", "2"]), "0\t0\n1\t-1\n2\t0\n");
    assert_eq!(stdout(&["mt", "--class", "-2"]), stdout(&["mt", "--scalar", "2"]));
    assert_eq!(stdout(&["mt", "--class", "1,-2", "--charvec"]), stdout(&["mt", "--class", "1,-2"]));
}

#[test]
fn csv_samples() {
    assert_eq!(
        stdout(&["mt", "--scalar", "2", "--csv", "1/2"]),
        "t,value\n0,0\n1/2,-1/2\n1,-1\n3/2,-1/2\n2,0\n"
    );
}

#[test]
fn bound_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let u1 = dir.path().join("u1.pl");
    fs::write(&u1, stdout(&["torus", "2", "3"])).unwrap();
    let u1 = u1.to_str().unwrap();
    // the empty class and genus 0 leave Upsilon unchanged
    assert_eq!(stdout(&["bound", "--upsilon1", u1]), stdout(&["torus", "2", "3"]));
    let out = stdout(&["bound", "--upsilon1", u1, "--class", "-1,2", "--genus", "1", "--tau1", "1"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("# tau <= 3"));
    let f: PlFunction = out.parse().unwrap();
    assert_eq!(f.eval(&kfc_core::pl::rat(1, 1)).unwrap(), kfc_core::pl::rat(-3, 1));
}

#[test]
fn crossing_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let up = dir.path().join("plus.pl");
    fs::write(&up, stdout(&["torus", "2", "3"])).unwrap();
    let out = stdout(&["crossing", "--upsilon-plus", up.to_str().unwrap()]);
    assert_eq!(out, "# lower\n0\t0\n1\t-1\n2\t0\n# upper\n0\t0\n2\t0\n");
}

#[test]
fn grading_from_pieces_and_topology_agree() {
    let pieces = data("pieces.txt");
    let from_pieces = stdout(&["grading", "--pieces", path(&pieces), "--t", "1/2"]);
    assert_eq!(from_pieces, "dA[K]\t3/2\ndA\t3/2\ndgr_w\t0\ndgr_z\t-3\ndgr_t\t-3/4\n");

    let (_, top) = compose(&parse_pieces(&fs::read_to_string(&pieces).unwrap()).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let tf = dir.path().join("top.txt");
    fs::write(&tf, top.to_string()).unwrap();
    assert_eq!(stdout(&["grading", "--topology", tf.to_str().unwrap(), "--t", "1/2"]), from_pieces);
}

#[test]
fn undefined_maslov_grading_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let tf = dir.path().join("top.txt");
    fs::write(&tf, "c1_sq=0\nchi_W=0\nsigma_W=0\nw_in=1\nw_out=1\nz_in=1\nz_out=1\ngr_z_defined=false\nlabel K c1=0 int=0 chi_w=0 chi_z=0\n").unwrap();
    let out = stdout(&["grading", "--topology", tf.to_str().unwrap(), "--t", "1"]);
    assert!(out.contains("dgr_z\tundefined\n"), "{out}");
    assert!(out.ends_with("dgr_t\tundefined\n"), "{out}");
}

#[test]
fn verify_suites() {
    let out = kfc(&["verify", "--suite", "sharpness"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
    assert!(text.trim_end().ends_with("passed"));
    assert_eq!(code(&["verify", "--suite", "conjugation"]), 0);
    assert_eq!(code(&["verify", "--suite", "additivity"]), 0);
    assert_eq!(code(&["verify", "--suite", "nonsense"]), 2);
}

#[test]
fn validate_lists_violations() {
    assert_eq!(stdout(&["validate", path(&data("trefoil.kfc"))]), "valid\n");
    let out = kfc(&["validate", path(&data("inhomogeneous.kfc"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not homogeneous"));
}

#[test]
fn conjugate_and_staircase_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t34.kfc");
    fs::write(&f, stdout(&["staircase", "3", "4"])).unwrap();
    let f = f.to_str().unwrap();
    assert_eq!(stdout(&["upsilon", f]), stdout(&["torus", "3", "4"]));
    let c = dir.path().join("conj.kfc");
    fs::write(&c, stdout(&["conjugate", f])).unwrap();
    // T(3,4) is symmetric, so conjugation leaves Upsilon alone
    assert_eq!(stdout(&["upsilon", c.to_str().unwrap()]), stdout(&["upsilon", f]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("g.kfc");
    fs::write(&garbage, "not a complex\n").unwrap();
    assert_eq!(code(&["tau", garbage.to_str().unwrap()]), 2);
    assert_eq!(code(&["tau", "/nonexistent/file.kfc"]), 2);
    assert_eq!(code(&["tau", path(&data("inhomogeneous.kfc"))]), 2);
    assert_eq!(code(&["upsilon", "--frobnicate"]), 2);
    assert_eq!(code(&["upsilon", "--torus", "2", "3", "--at", "5/2"]), 3);
    assert_eq!(code(&["upsilon", path(&data("two_free.kfc")), "--pl"]), 3);
    assert_eq!(code(&["tau", path(&data("two_free.kfc"))]), 3);
    assert_eq!(code(&["upsilon", "--torus", "3", "4", "--Q", "1"]), 3);
    assert_eq!(code(&["grading", "--pieces", path(&data("pieces.txt")), "--t", "x"]), 2);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    fs::write(&f, "link K=1\npiece handle0 j=K\npiece bogus\n").unwrap();
    let out = kfc(&["grading", "--pieces", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:3:"));
}

#[test]
fn lenient_upsilon_reports_maximum() {
    let out = kfc(&["upsilon", path(&data("two_free.kfc")), "--at", "1", "--lenient"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["upsilon", "--torus", "4", "7"],
        vec!["mt", "--class", "3,-1,2", "--charvec"],
        vec!["grading", "--pieces", path(&data("pieces.txt")), "--t", "2/3"],
        vec!["staircase", "3", "5"],
    ] {
        let a = kfc(&args);
        let b = kfc(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

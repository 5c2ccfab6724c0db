use std::path::{Path, PathBuf};

use netpoll_cli::{run, EXIT_ERROR, EXIT_NO, EXIT_YES};

fn netpoll(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("netpoll").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn field<'a>(out: &'a str, name: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(name)?.strip_prefix(": "))
}

const TUTORIAL: &str = "candidates a b\nvoter x a 0\nvoter y b 1\nedge x y\ninitiator x\ntarget a\nbudget 1\n";

#[test]
fn tutorial_instance_is_yes_at_cost_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.txt");
    std::fs::write(&inst, TUTORIAL).unwrap();
    let (code, out, _) = netpoll(&["solve", "--mode", "constructive", "--instance", inst.to_str().unwrap()]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(out, "result: YES\ncost: 1\nwitness: y\n");
}

#[test]
fn tutorial_destructive_is_no() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.txt");
    std::fs::write(&inst, TUTORIAL).unwrap();
    let (code, out, _) = netpoll(&["solve", "--mode", "destructive", "--instance", inst.to_str().unwrap()]);
    assert_eq!(code, EXIT_NO);
    assert_eq!(out, "result: NO\n");
}

#[test]
fn solve_and_oracle_agree_on_fixtures() {
    let files = fixtures();
    assert!(files.len() >= 10);
    for f in files {
        for mode in ["constructive", "destructive"] {
            let f = f.to_str().unwrap();
            let (c1, o1, e1) = netpoll(&["solve", "--mode", mode, "--instance", f]);
            let (c2, o2, e2) = netpoll(&["oracle", "--mode", mode, "--instance", f]);
            assert!(c1 != EXIT_ERROR && c2 != EXIT_ERROR, "{f}: {e1} {e2}");
            assert_eq!(c1, c2, "{f} {mode}");
            assert_eq!(field(&o1, "cost"), field(&o2, "cost"), "{f} {mode}");
        }
    }
}

#[test]
fn jobs_do_not_change_output() {
    for f in fixtures() {
        let f = f.to_str().unwrap();
        let (c1, o1, _) = netpoll(&["solve", "--mode", "destructive", "--instance", f]);
        let (c4, o4, _) = netpoll(&["--jobs", "4", "solve", "--mode", "destructive", "--instance", f]);
        assert_eq!((c1, o1), (c4, o4), "{f}");
    }
}

#[test]
fn reduction_witness_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (code, x3c, _) = netpoll(&["gen-x3c", "--ell", "2", "--seed", "7", "--planted"]);
    assert_eq!(code, EXIT_YES);
    std::fs::write(p("x.txt"), x3c).unwrap();
    for which in ["two-candidates", "tree"] {
        let (code, inst, err) =
            netpoll(&["reduce", "--which", which, "--x3c", &p("x.txt"), "--witness-out", &p("w.txt")]);
        assert_eq!(code, EXIT_YES, "{err}");
        std::fs::write(p("r.txt"), inst).unwrap();
        let (code, out, _) =
            netpoll(&["verify-witness", "--instance", &p("r.txt"), "--witness", &p("w.txt"), "--mode", "constructive"]);
        assert_eq!(code, EXIT_YES, "{which}: {out}");
    }
}

#[test]
fn oracle_with_deletable_list() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(p("x.txt"), "1\n1 2 3\n1 2 3\n").unwrap();
    let (_, inst, _) = netpoll(&["reduce", "--which", "two-candidates", "--x3c", &p("x.txt")]);
    std::fs::write(p("r.txt"), inst).unwrap();
    let (code, out, _) =
        netpoll(&["oracle", "--mode", "constructive", "--instance", &p("r.txt"), "--deletable", "v1,v2"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(field(&out, "witness"), Some("v1"));
    let (code, _, err) = netpoll(&["oracle", "--mode", "constructive", "--instance", &p("r.txt"), "--deletable", "zz"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("zz"));
}

#[test]
fn oversized_oracle_input_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (_, x3c, _) = netpoll(&["gen-x3c", "--ell", "2", "--seed", "1"]);
    std::fs::write(p("x.txt"), x3c).unwrap();
    let (_, inst, _) = netpoll(&["reduce", "--which", "two-candidates", "--x3c", &p("x.txt")]);
    std::fs::write(p("r.txt"), inst).unwrap();
    let (code, _, err) = netpoll(&["oracle", "--mode", "constructive", "--instance", &p("r.txt")]);
    assert_eq!(code, EXIT_ERROR);
    assert!(!err.is_empty());
}

#[test]
fn decompose_output_round_trips_through_validate_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    for f in fixtures() {
        let f = f.to_str().unwrap();
        for flags in [&[][..], &["--nice"][..], &["--pin"][..]] {
            let mut args = vec!["decompose", "--graph-of", f];
            args.extend_from_slice(flags);
            let (code, td, _) = netpoll(&args);
            assert_eq!(code, EXIT_YES);
            std::fs::write(p("td.txt"), td).unwrap();
            let (code, out, _) = netpoll(&["validate-td", "--instance", f, "--td", &p("td.txt")]);
            assert_eq!(code, EXIT_YES, "{f} {flags:?}: {out}");
            let (c1, o1, _) = netpoll(&["solve", "--mode", "constructive", "--instance", f, "--td", &p("td.txt")]);
            let (c2, o2, _) = netpoll(&["solve", "--mode", "constructive", "--instance", f]);
            assert_eq!(c1, c2);
            assert_eq!(field(&o1, "cost"), field(&o2, "cost"));
        }
    }
}

#[test]
fn broken_decomposition_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(p("i.txt"), TUTORIAL).unwrap();
    std::fs::write(p("td.txt"), "0 bag - : x\n1 bag 0 : y\n").unwrap();
    let (code, out, _) = netpoll(&["validate-td", "--instance", &p("i.txt"), "--td", &p("td.txt")]);
    assert_eq!(code, EXIT_NO);
    assert!(out.contains("violation"));
    let (code, _, _) = netpoll(&["solve", "--mode", "constructive", "--instance", &p("i.txt"), "--td", &p("td.txt")]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn solve_x3c_reports_cover() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    std::fs::write(&x, "2\n1 2 3\n1 4 5\n2 4 6\n3 5 6\n").unwrap();
    let (code, out, _) = netpoll(&["solve-x3c", "--x3c", x.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (EXIT_NO, "result: NO\n"));
    std::fs::write(&x, "2\n1 2 3\n4 5 6\n1 2 3\n4 5 6\n").unwrap();
    let (code, out, _) = netpoll(&["solve-x3c", "--x3c", x.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (EXIT_YES, "result: YES\ncover: 1 2\n"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(netpoll(&["solve", "--mode", "constructive", "--instance", "/nonexistent/file"]).0, EXIT_ERROR);
    assert_eq!(netpoll(&["frobnicate"]).0, EXIT_ERROR);
    assert_eq!(netpoll(&["solve", "--bogus"]).0, EXIT_ERROR);
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.txt");
    std::fs::write(&inst, "candidates a\nvoter x a 0\nedge x q\ninitiator x\ntarget a\nbudget 0\n").unwrap();
    let (code, _, err) = netpoll(&["solve", "--mode", "constructive", "--instance", inst.to_str().unwrap()]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn output_is_deterministic() {
    for f in fixtures() {
        let f = f.to_str().unwrap();
        let a = netpoll(&["solve", "--mode", "constructive", "--instance", f]);
        let b = netpoll(&["solve", "--mode", "constructive", "--instance", f]);
        assert_eq!(a, b);
    }
    assert_eq!(netpoll(&["gen-x3c", "--ell", "3", "--seed", "5"]), netpoll(&["gen-x3c", "--ell", "3", "--seed", "5"]));
}

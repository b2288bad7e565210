use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use maltsev_cli::{run, Io, EXIT_MAYBE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn invoke(args: &[&str], stdin: &str) -> Run {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("maltsev").chain(args.iter().copied()),
        &mut Io {
            stdin: &mut input,
            stdout: &mut out,
            stderr: &mut err,
        },
    );
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        let f = Files {
            dir: tempfile::tempdir().unwrap(),
        };
        f.put("c3.dg", "3\n0 1\n1 2\n2 0\n");
        f.put("n4.dg", "# not rectangular\n4\n0 2\n1 2\n1 3\n");
        f.put("fork.dg", "3\n0 2\n1 2\n");
        f.put("p3.dg", "3\n0 1\n1 2\n");
        f.put("fig2.dg", "3\n0 2\n1 0\n1 1\n2 2\n");
        f.put("bad.dg", "2\n0 7\n");
        f
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

#[test]
fn rect_reports_the_witness() {
    let f = Files::new();
    let r = invoke(&["rect", &f.path("n4.dg")], "");
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_NEGATIVE, "non-rectangular: 0 2 1 3\n"));
    let r = invoke(&["rect", &f.path("c3.dg")], "");
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_OK, "rectangular\n"));
    let r = invoke(&["--json", "rect", &f.path("n4.dg")], "");
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["witness"], serde_json::json!([0, 2, 1, 3]));
}

#[test]
fn factor_prints_quotient_and_classes() {
    let f = Files::new();
    let r = invoke(&["factor", &f.path("fork.dg"), "--side", "plus"], "");
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.stdout, "1\nclass 0: 0 1\n");
    let r = invoke(&["factor", &f.path("fork.dg"), "--side", "minus"], "");
    assert_eq!(r.stdout, "1\nclass 0: 2\n");
    let r = invoke(&["factor", &f.path("n4.dg")], "");
    assert_eq!(r.code, EXIT_NEGATIVE);
}

#[test]
fn decide_emits_certificates() {
    let f = Files::new();
    let r = invoke(&["decide", &f.path("c3.dg")], "");
    assert_eq!(r.code, EXIT_OK);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["verdict"], true);
    assert_eq!(v["base"], "disjoint-cycles");

    let r = invoke(&["decide", &f.path("fig2.dg")], "");
    assert_eq!(r.code, EXIT_NEGATIVE);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["verdict"], false);
    assert_eq!(v["level"], 1);
}

#[test]
fn synth_then_verify() {
    let f = Files::new();
    for kind in ["majority", "maltsev"] {
        let r = invoke(&["synth", &f.path("p3.dg"), "--kind", kind], "");
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        let v = invoke(&["verify", &f.path("p3.dg"), "--kind", kind], &r.stdout);
        assert_eq!((v.code, v.stdout.as_str()), (EXIT_OK, "ok\n"));
    }
    let r = invoke(&["synth", &f.path("n4.dg"), "--kind", "majority"], "");
    assert_eq!(r.code, EXIT_NEGATIVE);
}

#[test]
fn verify_rejects_bad_tables() {
    let f = Files::new();
    let projection: Vec<usize> = (0..27).map(|i| i / 9).collect();
    let table = f.put(
        "proj.json",
        &serde_json::json!({"n": 3, "arity": 3, "table": projection}).to_string(),
    );
    let r = invoke(&["verify", &f.path("c3.dg"), "--kind", "majority", "--table", &table], "");
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert!(r.stdout.starts_with("violation"), "{}", r.stdout);
    let r = invoke(&["verify", &f.path("c3.dg"), "--kind", "majority"], "{\"n\": 2}");
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn oracle_subcommand() {
    let f = Files::new();
    let r = invoke(&["oracle", &f.path("n4.dg"), "--kind", "maltsev"], "");
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_NEGATIVE, "none\n"));
    let r = invoke(&["oracle", &f.path("c3.dg"), "--kind", "maltsev"], "");
    assert_eq!(r.code, EXIT_OK);
    let inst = f.put(
        "inst.json",
        r#"{"h": {"n": 3, "edges": [[0, 1], [1, 2]]}, "pins": {"0": 0, "2": 2}}"#,
    );
    let r = invoke(&["oracle", &f.path("c3.dg"), "--instance", &inst], "");
    assert_eq!(r.code, EXIT_OK);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"0": 0, "1": 1, "2": 2}));
}

#[test]
fn census_prints_csv() {
    let r = invoke(&["census", "--n", "2", "--mode", "up_to_iso"], "");
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(
        r.stdout,
        "n,mode,total,rectangular,maltsev,majority\n2,up_to_iso,10,8,8,10\n"
    );
    let r = invoke(&["census", "--n", "9"], "");
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn csp_verdicts_and_exit_codes() {
    let f = Files::new();
    let yes = f.put(
        "yes.json",
        r#"{"h": {"n": 3, "edges": [[0, 1], [1, 2]]}, "pins": {"0": 0, "2": 2}}"#,
    );
    let no = f.put(
        "no.json",
        r#"{"h": {"n": 3, "edges": [[0, 1], [1, 2]]}, "pins": {"0": 0, "2": 0}}"#,
    );
    let r = invoke(&["csp", "--graph", &f.path("c3.dg"), "--instance", &yes, "--oracle"], "");
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_OK, "yes\noracle: yes (agree)\n"));
    let r = invoke(&["csp", "--graph", &f.path("c3.dg"), "--instance", &no], "");
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_NEGATIVE, "no\n"));

    let edge = f.put("edge.json", r#"{"h": {"n": 2, "edges": [[0, 1]]}, "pins": {}}"#);
    let r = invoke(&["csp", "--graph", &f.path("n4.dg"), "--instance", &edge], "");
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_MAYBE, "maybe\n"));
    assert!(r.stderr.contains("warning"));

    let r = invoke(
        &["--json", "csp", "--graph", &f.path("c3.dg"), "--seed", "3", "--oracle"],
        "",
    );
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["agree"], true);
    assert!(v["instance"]["h"]["n"].is_u64());
}

#[test]
fn usage_errors() {
    let f = Files::new();
    assert_eq!(invoke(&["frobnicate"], "").code, EXIT_USAGE);
    assert_eq!(invoke(&["rect"], "").code, EXIT_USAGE);
    assert_eq!(invoke(&["rect", &f.path("c3.dg"), "--bogus"], "").code, EXIT_USAGE);
    assert_eq!(invoke(&["synth", &f.path("c3.dg"), "--kind", "nu"], "").code, EXIT_USAGE);
    let r = invoke(&["rect", &f.path("bad.dg")], "");
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
    assert_eq!(invoke(&["rect", &f.path("missing.dg")], "").code, EXIT_USAGE);
    assert_eq!(invoke(&["--help"], "").code, EXIT_OK);
}

#[test]
fn binary_pipeline() {
    let f = Files::new();
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_maltsev"));
    let synth = Command::new(&bin)
        .args(["synth", &f.path("c3.dg"), "--kind", "majority"])
        .output()
        .unwrap();
    assert!(synth.status.success());
    let mut verify = Command::new(&bin)
        .args(["verify", &f.path("c3.dg"), "--kind", "majority"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    verify.stdin.take().unwrap().write_all(&synth.stdout).unwrap();
    let out = verify.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");

    let rect = Command::new(&bin).args(["rect", &f.path("n4.dg")]).output().unwrap();
    assert_eq!(rect.status.code(), Some(1));
    let bad = Command::new(&bin).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

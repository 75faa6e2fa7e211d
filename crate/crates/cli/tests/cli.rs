use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwverify"))
        .args(args)
        .env_remove("FW_VERIFY_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", stdout(o)))
}

#[test]
fn list_prints_every_identity() {
    let o = run(&["list", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["thm1", "thm4", "cor3", "whipple-terminating", "dougall-terminating"] {
        assert!(names.contains(&n), "{n} missing");
    }
}

#[test]
fn eval_whipple_terminating_by_hand() {
    let o = run(&["eval", "--identity", "whipple-terminating", "--bind", "b=2", "--bind", "c=3", "--bind", "n=1", "--side", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("lhs = 0.333333333"), "{text}");
    assert!(text.contains("rhs = 0.333333333"), "{text}");
}

#[test]
fn eval_json_sides_agree() {
    let o = run(&["eval", "--identity", "thm1", "--bind", "a=0.3", "--bind", "l=1.2", "--bind", "n=4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let l = v["lhs"]["re"].as_f64().unwrap();
    let r = v["rhs"]["re"].as_f64().unwrap();
    assert!((l - r).abs() <= 1e-12 * l.abs().max(1.0));
}

#[test]
fn eval_rejects_non_integer_for_integer_symbol() {
    let o = run(&["eval", "--identity", "thm1", "--bind", "a=0.3", "--bind", "l=1.2", "--bind", "n=1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_thm1_fifty_trials() {
    let o = run(&["verify", "--identity", "thm1", "--trials", "50", "--seed", "7", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("50/50"), "{}", stdout(&o));
}

#[test]
fn verify_unknown_identity_suggests() {
    let o = run(&["verify", "--identity", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("did you mean"), "{err}");

    let o = run(&["verify", "--identity", "thm", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    let s: Vec<&str> = v["error"]["suggestions"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(s.contains(&"thm1"), "{s:?}");
}

#[test]
fn json_on_usage_errors() {
    for args in [
        &["verify", "--format", "json", "--bogus"][..],
        &["eval", "--identity", "thm1", "--bind", "zz=1", "--format", "json"][..],
        &["verify", "--identity", "thm1", "--trials", "0", "--format", "json"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(json(&o)["error"]["message"].is_string());
    }
}

#[test]
fn verify_json_is_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = ["verify", "--identity", "cor1", "--trials", "10", "--seed", "3", "--format", "json", "--out", path.to_str().unwrap()];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let mut first = json(&a);
    let mut file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let mut second = json(&run(&args));
    for v in [&mut first, &mut file, &mut second] {
        v["wall_time_ms"] = serde_json::Value::Null;
    }
    assert_eq!(first, second);
    assert_eq!(first, file);
    assert_eq!(first["aggregate"]["pass_count"], 10);
}

#[test]
fn verify_failure_exits_one() {
    // example1 is recorded as a discrepancy; most trials fail.
    let o = run(&["verify", "--identity", "example1", "--trials", "20", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn roundtrip_random_and_degenerate() {
    let o = run(&["roundtrip", "--n-max", "8", "--trials", "5", "--seed", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);

    let o = run(&["roundtrip", "--x", "2,1", "--y", "-0.5", "--z", "1.3", "--n-max", "6", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["roundtrip", "--x", "5", "--y", "2", "--z", "1", "--n-max", "3", "--trials", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(json(&o)["error"].is_object());
}

#[test]
fn parse_check_corpus_and_bad_file() {
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus");
    let files: Vec<String> = std::fs::read_dir(corpus)
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .filter(|p| p.ends_with(".fwid"))
        .collect();
    assert!(!files.is_empty());
    let mut args = vec!["parse-check"];
    args.extend(files.iter().map(String::as_str));
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fwid");
    std::fs::write(&bad, "identity broken\nlhs: (\n").unwrap();
    let o = run(&["parse-check", bad.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["ok"], false);

    let o = run(&["parse-check", "/nonexistent/x.fwid"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_fwverify"))
        .args(["list"])
        .env("FW_VERIFY_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

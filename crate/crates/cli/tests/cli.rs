use std::path::PathBuf;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn mmp_with_stdin(args: &[&str], stdin: &str) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("mmp").chain(args.iter().copied());
    let code = mmp_cli::dispatch(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn mmp(args: &[&str]) -> Run {
    mmp_with_stdin(args, "")
}

fn assert_no_floats(v: &Value) {
    match v {
        Value::Number(n) => assert!(!n.is_f64(), "float {n} in output"),
        Value::Array(a) => a.iter().for_each(assert_no_floats),
        Value::Object(o) => o.values().for_each(assert_no_floats),
        _ => {}
    }
}

#[test]
fn p2_check() {
    let r = mmp(&["toric", "check", &fixture("p2.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    for key in ["regular", "simplicial", "terminal", "complete"] {
        assert_eq!(v[key], true, "{key}");
    }
}

#[test]
fn twenty_seven_lines() {
    let r = mmp(&["surface", "lines", "--k", "6", "--bound", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let classes = r.json();
    let classes = classes.as_array().unwrap();
    assert_eq!(classes.len(), 27);
    for c in classes {
        let c: Vec<i64> = c.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        // (d; −m_1..−m_6): d² − Σm² = −1 and 3d − Σm = 1
        let (d, m) = (c[0], &c[1..]);
        assert_eq!(d * d - m.iter().map(|x| x * x).sum::<i64>(), -1, "{c:?}");
        assert_eq!(3 * d + m.iter().sum::<i64>(), 1, "{c:?}");
    }
}

#[test]
fn f1_anticanonical_scaling_is_one_step() {
    let r = mmp(&["mmp", "scale", &fixture("f1.json"), "--C", "anticanonical", "--strategy", "first"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = r.json();
    assert_eq!(t["steps"].as_array().unwrap().len(), 1);
    assert_eq!(t["schema_version"], 1);
    assert_no_floats(&t);
}

#[test]
fn explicit_choices_walk_f1_through_p2() {
    let r = mmp(&["mmp", "run", &fixture("f1.json"), "--choices", "1,0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = r.json();
    let kinds: Vec<&str> = t["steps"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["Divisorial", "Fibration"]);
    assert_eq!(t["strategy"], "explicit");
}

#[test]
fn malformed_field_is_a_validation_error_with_a_path() {
    let bad = r#"{"rank": 2, "rays": [[1, "x"], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [2, 0]]}"#;
    let r = mmp_with_stdin(&["toric", "check", "-"], bad);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("rays[0][1]"), "{}", r.stderr);
    let r = mmp_with_stdin(&["toric", "check"], "{not json");
    assert_eq!(r.code, 2);
}

#[test]
fn engine_failures_exit_three() {
    let r = mmp(&["mmp", "scale", &fixture("f1.json"), "--C", "zero"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let r = mmp(&["mmp", "run", &fixture("f1.json"), "--choices", "0,0"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn usage_errors_exit_two_and_help_zero() {
    assert_eq!(mmp(&["toric", "frobnicate"]).code, 2);
    assert_eq!(mmp(&["--help"]).code, 0);
}

#[test]
fn stdin_and_out_and_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let trace = dir.path().join("trace.json");
    let f1 = std::fs::read_to_string(fixture("f1.json")).unwrap();
    let args = ["mmp", "run", "--strategy", "most-negative", "--trace", trace.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let r = mmp_with_stdin(&args, &f1);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), std::fs::read_to_string(&trace).unwrap());
}

#[test]
fn partial_trace_is_written_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    let r = mmp(&["mmp", "run", &fixture("f1.json"), "--choices", "1,5", "--trace", trace.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn seed_fixes_random_runs() {
    let model = fixture("p2_blowup6.json");
    let args = ["mmp", "scale", &model, "--C", "anticanonical", "--strategy", "random", "--seed", "17"];
    let a = mmp(&args);
    let b = mmp(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.json()["seed"], 17);
}

#[test]
fn kappa_csv_and_counts() {
    let r = mmp(&["kappa", "dim", &fixture("p2.json"), "--divisor", "1,0,0", "--csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(rows[0], "m,h0");
    // h⁰(O(m)) = (m+1)(m+2)/2
    for row in &rows[1..] {
        let (m, h) = row.split_once(',').unwrap();
        let (m, h): (u64, u64) = (m.parse().unwrap(), h.parse().unwrap());
        assert_eq!(h, (m + 1) * (m + 2) / 2);
    }
}

#[test]
fn singularity_commands() {
    let r = mmp(&["surface", "lct", &fixture("cusp.json"), "--slot", "cusp"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("5/6"), "{}", r.stdout);
    let r = mmp(&["surface", "classify", &fixture("a3.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_no_floats(&r.json());
    assert!(r.stdout.contains("Canonical"), "{}", r.stdout);
}

#[test]
fn every_json_command_is_float_free() {
    let cases: Vec<Vec<String>> = vec![
        vec!["toric".into(), "mori".into(), fixture("f2.json")],
        vec!["toric".into(), "resolve".into(), fixture("p1xp1.json")],
        vec!["toric".into(), "contract".into(), fixture("f1.json"), "--ray".into(), "1".into()],
        vec!["surface".into(), "contract".into(), fixture("p2_blowup6.json"), "--curve".into(), "0".into()],
        vec!["kappa".into(), "count".into(), fixture("f1.json"), "--divisor".into(), "anticanonical".into(), "--m".into(), "3".into()],
        vec!["kappa".into(), "dim".into(), fixture("f2.json"), "--divisor".into(), "0,1,0,0".into()],
        vec!["polytope".into(), "lc".into(), fixture("cusp.json"), "--slots".into(), "cusp".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = mmp(&refs);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        assert_no_floats(&r.json());
    }
}

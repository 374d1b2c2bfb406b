//! End-to-end runs of the `reeskit` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use reeskit::cli::fixtures::fixture;
use reeskit::ideal_ops::{ideal_equal, saturate, IdealHandle};
use reeskit::polyring::{parse_poly, VarSet};
use reeskit::rees::build_context_unchecked;
use serde_json::Value;

fn fixture_path(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

fn reeskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reeskit")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    let out = reeskit(args);
    out.status.code().expect("exited normally")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reeskit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_of(args: &[&str], name: &str) -> (i32, String) {
    let out = scratch(name);
    let path = out.to_string_lossy().into_owned();
    let mut full = vec!["--json", path.as_str()];
    full.extend_from_slice(args);
    let c = code(&full);
    (c, std::fs::read_to_string(&out).unwrap())
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check", &fixture_path("F1")]), 0);
    assert_eq!(code(&["check", &fixture_path("F2")]), 0);
    assert_eq!(code(&["check", &fixture_path("example_3_9")]), 1);
    assert_eq!(code(&["check", &fixture_path("example_3_8")]), 1);
}

#[test]
fn operational_errors_exit_two() {
    assert_eq!(code(&["check", "/nonexistent/input.json"]), 2);
    let bad = scratch("malformed.json");
    std::fs::write(&bad, "{ \"variables\": [\"x\", ").unwrap();
    assert_eq!(code(&["check", &bad.to_string_lossy()]), 2);
    let wrong = scratch("wrong_shape.json");
    std::fs::write(&wrong, r#"{"variables": ["x", "y"], "matrix": [["x", "y^2"]], "rank": 1}"#).unwrap();
    assert_eq!(code(&["check", &wrong.to_string_lossy()]), 2);
}

#[test]
fn uncertified_input_is_refused() {
    assert_eq!(code(&["fiber", &fixture_path("example_3_9")]), 1);
    assert_eq!(code(&["defining-ideal", &fixture_path("example_3_9")]), 1);
}

#[test]
fn verify_passes_on_the_small_fixtures() {
    assert_eq!(code(&["defining-ideal", "--verify", &fixture_path("F1")]), 0);
    assert_eq!(code(&["defining-ideal", "--verify", &fixture_path("F2")]), 0);
}

#[test]
fn forced_oracle_reports_the_gap() {
    let (c, text) = json_of(&["defining-ideal", "--force-oracle", &fixture_path("example_3_9")], "forced.json");
    assert_eq!(c, 1);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["exit_code"], 1);
}

#[test]
fn fast_fixtures_pass() {
    let out = reeskit(&["fixtures", "run", "--tier", "fast"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().any(|l| l.starts_with("PASS ")));
    assert!(!stdout.lines().any(|l| l.starts_with("FAIL ")));
    let listed = String::from_utf8_lossy(&reeskit(&["fixtures", "list"]).stdout).into_owned();
    assert!(listed.contains("F1") && listed.contains("example_3_11"));
}

#[test]
fn json_output_is_deterministic() {
    for args in [vec!["defining-ideal", "--verify"], vec!["check"], vec!["fiber"], vec!["jacobian-dual"]] {
        let mut a = args.clone();
        let f = fixture_path("F1");
        a.push(&f);
        let (c1, first) = json_of(&a, "run1.json");
        let (c2, second) = json_of(&a, "run2.json");
        assert_eq!(c1, c2);
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn printed_polynomials_parse_back() {
    for name in ["F1", "F2"] {
        let (c, text) = json_of(&["defining-ideal", &fixture_path(name)], &format!("{name}_ideal.json"));
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&text).unwrap();
        let ideal = &v["defining_ideal"];
        let names: Vec<String> =
            ideal["variables"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
        let ring = VarSet::new(names.iter().map(String::as_str)).unwrap();
        let mut seen = 0;
        for key in ["basis", "ells", "bprime_minors"] {
            for s in ideal[key].as_array().unwrap() {
                let s = s.as_str().unwrap();
                let p = parse_poly(s, &ring).unwrap();
                assert_eq!(p.to_string(), s);
                assert_eq!(parse_poly(&p.to_string(), &ring).unwrap(), p);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }
}

#[test]
fn original_coordinates_match_the_raw_saturation() {
    let (c, text) = json_of(&["--original-coordinates", "defining-ideal", &fixture_path("F1")], "original.json");
    assert_eq!(c, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    let raw = fixture("F1").unwrap().doc.presentation().unwrap();
    let direct = build_context_unchecked(&raw).unwrap();
    let big = &direct.bigring;
    let gens = v["defining_ideal"]["input_coordinates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| parse_poly(s.as_str().unwrap(), big).unwrap())
        .collect();
    let printed = IdealHandle::new(big, gens).unwrap();
    let oracle = saturate(&direct.l, &IdealHandle::from_vars(big, &[0, 1])).unwrap();
    assert!(ideal_equal(&printed, &oracle).unwrap());
}

use std::path::PathBuf;

use masstransport::ProcessSpec;
use masstransport_cli::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn spec(name: &str) -> String {
    specs_dir().join(format!("{name}.json")).display().to_string()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("masstransport").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("masstransport-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

/// Golden outputs: (fixture file, process, arguments after `--spec`).
const GOLDEN: &[(&str, &str, &[&str])] = &[
    ("sample_two_point.csv", "two_point", &["sample", "--trials", "3", "--lo", "-3", "--hi", "3"]),
    ("sample_mixture.csv", "mixture", &["sample", "--trials", "4", "--lo", "-2", "--hi", "2"]),
    ("transport_p06_walk.csv", "p06_walk", &["transport", "--lo", "-6", "--hi", "6", "--seed", "7"]),
    ("identity_two_point.csv", "two_point", &["verify-identity", "--mode", "exact", "--horizon", "6"]),
    ("identity_ma_gaussian.csv", "ma_gaussian", &["verify-identity", "--horizon", "4", "--trials", "400"]),
    ("maximal_markov.csv", "two_point_markov", &["verify-maximal", "--mode", "both", "--horizon", "4", "--trials", "400"]),
    ("survival_p06_walk.csv", "p06_walk", &["survival", "--mode", "both", "--horizon", "6", "--trials", "400"]),
    ("birkhoff_rotation.csv", "rotation", &["birkhoff", "--trials", "3", "--n-max", "64"]),
];

#[test]
fn golden_csv_outputs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    for (file, process, rest) in GOLDEN {
        let path = spec(process);
        let mut args = vec!["--spec", path.as_str()];
        args.extend_from_slice(rest);
        let (code, out, err) = invoke(&args);
        assert_eq!(code, EXIT_OK, "{file}: {err}");
        let fixture = dir.join(file);
        if update {
            std::fs::write(&fixture, &out).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&fixture)
            .unwrap_or_else(|e| panic!("{}: {e}", fixture.display()));
        assert!(out == expected, "{file} differs from its fixture");
    }
}

#[test]
fn every_bundled_spec_round_trips() {
    let mut seen = 0;
    for entry in std::fs::read_dir(specs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let parsed = ProcessSpec::from_path(&path).unwrap();
        let again = ProcessSpec::from_json(&parsed.to_json()).unwrap();
        assert_eq!(parsed, again, "{}", path.display());
        seen += 1;
    }
    assert_eq!(seen, 11);
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify-identity"));
    let (code, out, _) = invoke(&["--version"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_two() {
    let two_point = spec("two_point");
    let cases: &[&[&str]] = &[
        &[],
        &["sample"],
        &["frobnicate", "--spec", &two_point],
        &["sample", "--spec", &two_point, "--lo", "1"],
        &["sample", "--spec", &two_point, "--trials", "0"],
        &["verify-identity", "--spec", &two_point, "--trials", "1"],
        &["birkhoff", "--spec", &two_point, "--epsilon", "0"],
        &["survival", "--spec", &two_point, "--threads", "0"],
        &["sample", "--spec", &two_point, "--mode", "sometimes"],
    ];
    for args in cases {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn exact_horizon_beyond_cap_is_a_usage_error() {
    let path = spec("two_point");
    let (code, _, err) = invoke(&["verify-identity", "--spec", &path, "--mode", "exact", "--horizon", "9"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("error"));
}

#[test]
fn spec_errors_name_the_offending_field() {
    let cases = [
        (
            r#"{"kind": "IidDiscrete", "support": [{"value": 1, "prob": "1/2"}, {"value": -1, "prob": 0.5}]}"#,
            "support[1].prob",
        ),
        (r#"{"kind": "brownian"}"#, "kind"),
        (
            r#"{"kind": "Mixture", "components": [
                {"weight": "1/2", "process": {"kind": "IidGaussian", "mean": 0, "stddev": 1}},
                {"weight": "1/2", "process": {"kind": "IidDiscrete", "support": [{"value": 1, "prob": "3/2"}]}}]}"#,
            "components[1].process.support",
        ),
        (
            r#"{"kind": "MarkovChain", "transition": [["1/2", "1/2"], ["1/3", "1/3"]], "payoffs": [1, -1]}"#,
            "transition[1]",
        ),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let path = write_temp(&format!("bad{i}.json"), text);
        let (code, out, err) = invoke(&["sample", "--spec", path.to_str().unwrap()]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, EXIT_USAGE, "case {i}: {err}");
        assert!(out.is_empty());
        assert!(err.contains(field), "case {i}: {err:?} lacks {field}");
    }
}

#[test]
fn missing_spec_file_exits_two() {
    let (code, _, err) = invoke(&["sample", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("/nonexistent/spec.json"));
}

#[test]
fn failed_check_exits_one() {
    // Three trajectories of length 16 cannot all be within 0.05 of the mean.
    let path = spec("two_point");
    let (code, out, err) = invoke(&["birkhoff", "--spec", &path, "--trials", "3", "--n-max", "16"]);
    assert_eq!(code, EXIT_CHECK_FAILED, "{err}");
    assert!(out.starts_with("trial,component,n,avg\n"));
    assert!(err.contains("deviating fraction"));
}

#[test]
fn out_flag_writes_the_file() {
    let path = spec("p06_walk");
    let target = std::env::temp_dir().join(format!("masstransport-cli-{}-out.csv", std::process::id()));
    let target_str = target.to_str().unwrap().to_owned();
    let (code, out, _) = invoke(&["survival", "--spec", &path, "--mode", "exact", "--horizon", "3", "--out", &target_str]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    std::fs::remove_file(&target).ok();
    assert!(written.starts_with("N,mode,value,std_error,ci_lo,ci_hi,tail_bound,pass\n"));
    assert!(written.contains("\n2,exact,9/25,"));
}

#[test]
fn json_output_parses() {
    let path = spec("two_point");
    for cmd in ["sample", "transport", "verify-identity", "verify-maximal", "survival", "birkhoff"] {
        let (code, out, err) = invoke(&[cmd, "--spec", &path, "--format", "json", "--trials", "200", "--n-max", "256", "--horizon", "3"]);
        assert!(code == EXIT_OK || code == EXIT_CHECK_FAILED, "{cmd}: {err}");
        serde_json::from_str::<serde_json::Value>(&out).unwrap_or_else(|e| panic!("{cmd}: {e}"));
    }
}

#[test]
fn identity_json_has_cumulative_column() {
    let path = spec("two_point");
    let (_, out, _) = invoke(&["verify-identity", "--spec", &path, "--mode", "exact", "--horizon", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let cumulative = v["cumulative"].as_array().unwrap();
    assert_eq!(cumulative.len(), 3);
    assert_eq!(cumulative[2]["lhs"].as_f64(), Some(0.375));
}

#[test]
fn sample_leaves_x_blank_at_lo() {
    let path = spec("two_point");
    let (_, out, _) = invoke(&["sample", "--spec", &path, "--trials", "1", "--lo", "-1", "--hi", "1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,0,-1,,"));
    assert!(lines[2].ends_with(",0"));
}

#[test]
fn thread_count_does_not_change_output() {
    let path = spec("mixture");
    for cmd in ["verify-identity", "verify-maximal", "survival", "birkhoff"] {
        let base = ["--spec", path.as_str(), "--trials", "300", "--horizon", "5", "--n-max", "128"];
        let mut one = vec![cmd, "--threads", "1"];
        one.extend_from_slice(&base);
        let mut four = vec![cmd, "--threads", "4"];
        four.extend_from_slice(&base);
        assert_eq!(invoke(&one).1, invoke(&four).1, "{cmd}");
    }
}

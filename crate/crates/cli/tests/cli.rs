use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn microrev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microrev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let k = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

#[test]
fn map_line_counts() {
    let o = microrev(&["map", "--beta-delta-e", "2", "--p", "0.5", "--regime", "release", "--grid", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 10);
    assert_eq!(
        text.lines().next().unwrap(),
        "c_i,c_f,theta_i,theta_f,p_forward,p_backward,ratio,q_over_de,gamma,diverged"
    );

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let o = microrev(&["map", "--beta-delta-e", "2", "--p", "0.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 201 * 201 + 1);
}

#[test]
fn map_corners_are_classical() {
    let text = stdout(&microrev(&["map", "--grid", "5", "--beta-delta-e", "4"]));
    let gammas = column(&text, "gamma");
    for k in [0, 24] {
        let g: f64 = gammas[k].parse().unwrap();
        assert!((g - 1.0).abs() < 1e-10, "{g}");
    }
}

#[test]
fn map_output_is_deterministic() {
    let args = ["map", "--grid", "21", "--beta-delta-e", "1.3", "--p", "0.27", "--regime", "absorb"];
    assert_eq!(microrev(&args).stdout, microrev(&args).stdout);
}

#[test]
fn map_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("map.svg");
    let o = microrev(&["map", "--grid", "4", "--format", "json", "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
    assert_eq!(v["params"]["grid"], 4);
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn numeric_map_matches_closed() {
    let closed = stdout(&microrev(&["map", "--grid", "6"]));
    let numeric = stdout(&microrev(&["map", "--grid", "6", "--evaluation", "numeric"]));
    for (a, b) in column(&closed, "gamma").iter().zip(column(&numeric, "gamma")) {
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn extremum_summary_line() {
    let o = microrev(&["extremum", "--beta-delta-e", "2", "--p", "0.5", "--regime", "absorb"]);
    assert!(o.status.success());
    let line = stdout(&o);
    let parts: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(parts[0], "max");
    let v: Vec<f64> = parts[1..].iter().map(|s| s.parse().unwrap()).collect();
    assert!((v[0] - 0.53).abs() < 0.03 && (v[1] - 0.73).abs() < 0.03);
    assert!((v[2] - 2.56).abs() < 0.03);
    assert!(v[3] <= 1e-6);
}

#[test]
fn extremum_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let o = microrev(&["extremum", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["kind"], "min");
    assert_eq!(v["params"]["round_values"].as_array().unwrap().len(), 7);
}

#[test]
fn cut_endpoints() {
    let o = microrev(&["cut", "--beta-delta-e", "2", "--p", "0.5", "--regime", "release", "--n", "101"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 102);
    let g = column(&text, "gamma");
    for k in [0, 100] {
        assert!((g[k].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn classical_curve_is_flat() {
    let o = microrev(&["curve", "--case", "classical"]);
    let g = column(&stdout(&o), "gamma");
    assert_eq!(g.len(), 81);
    for x in g {
        assert!((x.parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn photonic_sim_reports() {
    let o = microrev(&["photonic-sim", "--case", "2", "--beta-delta-e", "2", "--p", "0.5", "--n-shots", "0"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["sampled"].is_null());
    assert!((v["analytic"]["p_backward"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["analytic"]["gamma"].as_f64().unwrap() - 1.683168051061465).abs() < 1e-12);

    let args = ["photonic-sim", "--case", "3", "--n-shots", "50000", "--seed", "11"];
    let (a, b) = (microrev(&args), microrev(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    assert!(v["sampled"]["std_err"].as_f64().unwrap() > 0.0);
}

#[test]
fn bad_flags_exit_2_and_name_the_flag() {
    for (args, flag) in [
        (vec!["map", "--p", "1.5"], "--p"),
        (vec!["map", "--grid", "1"], "--grid"),
        (vec!["map", "--beta-delta-e", "-1"], "--beta-delta-e"),
        (vec!["cut", "--n", "0"], "--n"),
        (vec!["curve", "--beta-min", "3", "--beta-max", "1"], "--beta-max"),
        (vec!["photonic-sim", "--time", "1"], "--tau"),
        (vec!["map", "--time", "1", "--tau", "0"], "--tau"),
    ] {
        let o = microrev(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn verify_exit_codes() {
    let o = microrev(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr).unwrap();
    for suite in ["linalg", "states", "channel-oracle", "symmetry", "photonic-equivalence", "limits"] {
        assert!(err.contains(&format!("suite {suite}:")), "{err}");
    }
    assert_eq!(microrev(&["verify", "--perturb-forward", "1e-6"]).status.code(), Some(1));

    let v: Value = serde_json::from_slice(&microrev(&["verify", "--format", "json"]).stdout).unwrap();
    assert_eq!(v["params"]["failed"], 0);
}

//! End-to-end checks of the `delaylab` binary: the documented example
//! invocations, byte-stable reruns, the reduce round trip, and the exit-code
//! contract.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delaylab"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "delaylab {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success(), "delaylab {args:?} unexpectedly passed");
    out
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON output")
}

/// Last data row of a CSV as numbers.
fn last_row(csv: &str) -> Vec<f64> {
    csv.lines()
        .last()
        .expect("nonempty CSV")
        .split(',')
        .map(|v| v.parse().expect("numeric cell"))
        .collect()
}

#[test]
fn simulate_hutchinson_settles_at_carrying_capacity() {
    let csv = run_ok(&[
        "simulate",
        "--model",
        "hutchinson",
        "--param",
        "gamma=1",
        "--param",
        "k=1",
        "--param",
        "tau=1.4",
        "--t-end",
        "100",
        "--step",
        "1e-3",
    ]);
    assert_eq!(csv.lines().next(), Some("t,x1"));
    assert_eq!(csv.lines().count(), 1002, "header plus 1001 grid points");
    let row = last_row(&csv);
    assert!((row[0] - 100.0).abs() < 1e-9);
    assert!((row[1] - 1.0).abs() < 1e-3, "final x = {}", row[1]);
}

#[test]
fn hopf_reports_the_analytic_crossing() {
    let doc = json(&run_ok(&["hopf", "--a", "1", "--b", "2"]));
    let tau0 = doc["tau0"].as_f64().unwrap();
    let period = doc["period"].as_f64().unwrap();
    let omega0 = doc["omega0"].as_f64().unwrap();
    assert!((tau0 - 1.209_199_576_156_145_4).abs() < 1e-12, "tau0 = {tau0}");
    assert!((period - 3.627_598_728_468_435_7).abs() < 1e-12);
    assert!((omega0 - 3.0f64.sqrt()).abs() < 1e-12);
    let family = doc["family"].as_array().unwrap();
    assert_eq!(family.len(), 5);
    let second = family[1].as_f64().unwrap();
    assert!((second - (tau0 + period)).abs() < 1e-12);
}

#[test]
fn oscillation_verdict_carries_the_deciding_product() {
    let doc = json(&run_ok(&["oscillation", "--a", "1", "--tau", "0.5"]));
    assert_eq!(doc["verdict"]["tag"], "Oscillatory");
    let product = doc["product"].as_f64().unwrap();
    assert!((product - 0.5 * std::f64::consts::E).abs() < 1e-15);
    let justification = doc["verdict"]["justification"].as_str().unwrap();
    assert!(justification.contains("1.359"), "{justification}");
    assert_eq!(doc["verdict"]["certainty"], "proved-by-criterion");
}

#[test]
fn analyze_flips_across_the_hopf_delay() {
    let grow = json(&run_ok(&[
        "analyze", "--model", "linear_scalar", "--param", "a=1", "--param", "b=2",
        "--param", "tau=1.25",
    ]));
    assert!(grow["max_re"].as_f64().unwrap() > 0.0);
    assert_eq!(grow["verdict"]["tag"], "Unstable");
    assert_eq!(grow["neutral"], serde_json::Value::Bool(false));

    let decay = json(&run_ok(&[
        "analyze", "--model", "linear_scalar", "--param", "a=1", "--param", "b=2",
        "--param", "tau=1.15",
    ]));
    assert!(decay["max_re"].as_f64().unwrap() < 0.0);
    assert_eq!(decay["verdict"]["tag"], "LocallyStable");
}

#[test]
fn analyze_flags_the_neutral_chain() {
    let doc = json(&run_ok(&[
        "analyze", "--model", "neutral_example", "--param", "tau=0.1",
        "--re-min", "-1", "--re-max", "8", "--im-max", "400",
    ]));
    assert_eq!(doc["neutral"], serde_json::Value::Bool(true));
    assert_eq!(doc["right_edge_clear"], serde_json::Value::Bool(false));
    assert!(doc["max_re"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["verdict"]["tag"], "Unstable");
}

#[test]
fn sweep_finds_the_switch_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let ev_path = dir.path().join("events.json");
    run_ok(&[
        "sweep", "--model", "linear_scalar", "--param", "a=1", "--param", "b=2",
        "--tau-min", "0.5", "--tau-max", "2", "--grid", "31",
        "--out", csv_path.to_str().unwrap(),
        "--events-out", ev_path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().next(), Some("tau,max_re"));
    assert_eq!(csv.lines().count(), 32, "header plus 31 evaluated points");
    let doc = json(&std::fs::read_to_string(&ev_path).unwrap());
    assert_eq!(doc["warnings"].as_array().unwrap().len(), 0);
    let events = doc["events"].as_array().unwrap();
    assert_eq!(events.len(), 1, "{events:?}");
    let tau_star = events[0]["tau_star"].as_f64().unwrap();
    assert!((tau_star - 1.209_199_576_156_145_4).abs() < 1e-4, "tau* = {tau_star}");
    assert_eq!(events[0]["direction"], "destabilizing");
    let freq = events[0]["crossing_frequency"].as_f64().unwrap();
    assert!((freq - 3.0f64.sqrt()).abs() < 1e-3);
}

#[test]
fn check_competition_passes_and_refuses_as_designed() {
    let strong = json(&run_ok(&[
        "check", "--model", "competition",
        "--param", "b1=2", "--param", "b2=2",
        "--param", "m1_const=1", "--param", "m1_self=3", "--param", "m1_cross=1",
        "--param", "m2_const=1", "--param", "m2_cross=1", "--param", "m2_self=3",
        "--param", "tau11=0.3", "--param", "tau12=0.5",
        "--param", "tau21=0.7", "--param", "tau22=0.2",
    ]));
    assert_eq!(strong["verdict"]["tag"], "AbsolutelyStableInDelays");
    let star = strong["coexistence_state"].as_array().unwrap();
    assert!((star[0].as_f64().unwrap() - 0.25).abs() < 1e-12);
    let probe = strong["probe_box"].as_array().unwrap();
    assert!((probe[0].as_f64().unwrap() - 1.0).abs() < 1e-12);

    // Weak self-limitation: dominance fails and the test refuses.
    let weak = json(&run_ok(&[
        "check", "--model", "competition",
        "--param", "b1=2", "--param", "b2=2",
        "--param", "m1_const=1", "--param", "m1_self=1", "--param", "m1_cross=2",
        "--param", "m2_const=1", "--param", "m2_cross=2", "--param", "m2_self=1",
        "--param", "tau11=0.3", "--param", "tau12=0.5",
        "--param", "tau21=0.7", "--param", "tau22=0.2",
        "--probe-box", "1.5,1.5",
    ]));
    assert_eq!(weak["verdict"]["tag"], "Unknown");
    let justification = weak["verdict"]["justification"].as_str().unwrap();
    assert!(justification.contains("(vi)"), "{justification}");
}

#[test]
fn check_covers_the_other_closed_form_criteria() {
    let hutch = json(&run_ok(&[
        "check", "--model", "hutchinson",
        "--param", "gamma=1", "--param", "k=1", "--param", "tau=1.4",
    ]));
    assert_eq!(hutch["verdict"]["tag"], "GloballyStable");

    let damped = json(&run_ok(&[
        "check", "--model", "damped_secondorder",
        "--param", "a0=2", "--param", "a1=3", "--param", "b=1", "--param", "tau=0.4",
    ]));
    assert_eq!(damped["verdict"]["tag"], "AbsolutelyStableInDelays");

    let allee = run_err(&["check", "--model", "allee", "--param", "a=1",
        "--param", "b=1", "--param", "c=1", "--param", "tau=0.5"]);
    assert_eq!(allee.status.code(), Some(2));
}

#[test]
fn reduce_roundtrip_reproduces_the_reduced_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let original = dir.path().join("lv.json");
    std::fs::write(
        &original,
        r#"{
  "schema_version": 1,
  "model": {"lv_distributed": {
    "growth": [3.0],
    "interactions": [[-2.0]],
    "kernel_weights": [[-1.0]],
    "kernel_rate": 1.0
  }},
  "history": {"span_start": -1.0, "constant": [0.4]},
  "options": {"step": 1e-3, "t_end": 20.0, "output_points": 201}
}"#,
    )
    .unwrap();
    let direct = run_ok(&["simulate", "--model-file", original.to_str().unwrap()]);

    let reduced_path = dir.path().join("reduced.json");
    run_ok(&[
        "reduce",
        "--model-file",
        original.to_str().unwrap(),
        "--out",
        reduced_path.to_str().unwrap(),
    ]);
    let reduced = json(&std::fs::read_to_string(&reduced_path).unwrap());
    assert_eq!(reduced["schema_version"], 1);
    assert_eq!(reduced["reduced"]["dimension"], 2);
    let x_star = reduced["reduced"]["steady_state"][0].as_f64().unwrap();
    assert!((x_star - 1.0).abs() < 1e-12);

    let replay = run_ok(&["simulate", "--model-file", reduced_path.to_str().unwrap()]);
    assert_eq!(direct, replay, "round trip must be byte-identical");

    // Both runs settle at the coexistence state in both components.
    let row = last_row(&direct);
    assert_eq!(row.len(), 3, "t, x, and the kernel average");
    assert!((row[1] - 1.0).abs() < 1e-9 && (row[2] - 1.0).abs() < 1e-9);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "analyze", "--model", "damped_secondorder", "--param", "a0=2",
        "--param", "a1=0.2", "--param", "b=1", "--param", "tau=1.3",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));

    let sim = [
        "simulate", "--model", "allee", "--param", "a=1", "--param", "b=1",
        "--param", "c=1", "--param", "tau=0.5", "--t-end", "30", "--step", "1e-2",
    ];
    assert_eq!(run_ok(&sim), run_ok(&sim));
}

#[test]
fn model_files_support_piecewise_histories() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("linear.json");
    // Damped oscillator with delayed restoring force and a two-piece ramp
    // history on [-1, 0].
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "model": {"linear": {
    "matrix": [[0.0, 1.0], [-1.0, -0.5]],
    "delayed": [{"tau": 1.0, "matrix": [[0.0, 0.0], [-0.25, 0.0]]}]
  }},
  "history": {"pieces": [
    {"start": -1.0, "end": -0.5, "coeffs": [[1.0], [0.0]]},
    {"start": -0.5, "end": 0.0, "coeffs": [[0.5, -1.0], [-1.0]]}
  ]},
  "options": {"step": 1e-3, "t_end": 10.0, "output_points": 101}
}"#,
    )
    .unwrap();
    let csv = run_ok(&["simulate", "--model-file", path.to_str().unwrap()]);
    assert_eq!(csv.lines().next(), Some("t,x1,x2"));
    assert_eq!(csv.lines().count(), 102);
    // Pieces evaluate in global time, so the last piece pins x(0) = (0.5, -1).
    let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',')
        .map(|v| v.parse().unwrap()).collect();
    assert!((first[1] - 0.5).abs() < 1e-12 && (first[2] + 1.0).abs() < 1e-12);

    let doc = json(&run_ok(&["analyze", "--model-file", path.to_str().unwrap()]));
    assert_eq!(doc["model"], "inline linear");
    assert!(doc["max_re"].as_f64().unwrap() < 0.0, "light damping still decays");
}

#[test]
fn exit_codes_separate_config_from_numeric_failures() {
    let unknown = run_err(&["simulate", "--model", "nosuch"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown model"));

    let missing = run_err(&["simulate", "--model", "hutchinson", "--param", "gamma=1"]);
    assert_eq!(missing.status.code(), Some(2), "missing parameters are config errors");

    let schema = run_err(&["simulate", "--model-file", "/nonexistent.json"]);
    assert_eq!(schema.status.code(), Some(2));

    let rootless = run_err(&[
        "analyze", "--model", "linear_scalar", "--param", "a=1", "--param", "b=0",
        "--param", "tau=1", "--re-min", "-0.5", "--re-max", "0.5",
    ]);
    assert_eq!(rootless.status.code(), Some(3), "empty windows are numeric failures");
    let msg = String::from_utf8_lossy(&rootless.stderr).to_string();
    assert!(msg.contains("analyze"), "failure location on stderr: {msg}");

    let no_crossing = run_err(&["hopf", "--a", "2", "--b", "1"]);
    assert_eq!(no_crossing.status.code(), Some(3));
}

#[test]
fn bad_model_files_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str); 3] = [
        ("version.json", r#"{"schema_version": 2, "model": "hutchinson"}"#),
        ("unknown_field.json", r#"{"schema_version": 1, "model": "hutchinson", "extra": 1}"#),
        (
            "short_history.json",
            r#"{
  "schema_version": 1,
  "model": "hutchinson",
  "params": {"gamma": 1.0, "k": 1.0, "tau": 2.0},
  "history": {"span_start": -1.0, "constant": [0.5]}
}"#,
        ),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = run_err(&["simulate", "--model-file", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

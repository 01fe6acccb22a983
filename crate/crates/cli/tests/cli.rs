//! End-to-end tests of the binary: exit codes, determinism, file outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rising-bandits"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn generate_is_bit_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let output = run_in(
            dir.path(),
            &[
                "generate", "--family", "ltf", "--count", "3", "--horizon", "5000", "--seed",
                "11", "--out", out,
            ],
        );
        assert_exit(&output, 0);
    }
    for entry in fs::read_dir(dir.path().join("a")).unwrap() {
        let name = entry.unwrap().file_name();
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between reruns");
    }
}

#[test]
fn generate_rejects_zero_count_and_bad_family() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(
        dir.path(),
        &[
            "generate", "--family", "ltf", "--count", "0", "--out", "x",
        ],
    );
    assert_exit(&output, 1);
    let output = run_in(
        dir.path(),
        &["generate", "--family", "bogus", "--out", "x"],
    );
    assert_exit(&output, 1);
}

#[test]
fn run_produces_tables_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "base_seed": 9,
        "instances": [
            {"generate": {"family": "intro", "horizon": 20000, "seed": 1, "sigma": 0.0, "noise": "none"}},
            {"generate": {"family": "ltf", "count": 2, "horizon": 5000, "seed": 2, "sigma": 0.0, "noise": "none"}}
        ],
        "policies": [{"name": "det_cure"}, {"name": "oracle"}],
        "horizons": [500, 1500],
        "replicates": 2,
        "output_dir": "results"
    }"#;
    fs::write(dir.path().join("exp.json"), config).unwrap();

    let output = run_in(dir.path(), &["run", "--config", "exp.json"]);
    assert_exit(&output, 0);
    for file in ["regret.csv", "aggregate.json", "ranks.csv", "win_rates.csv"] {
        assert!(
            dir.path().join("results").join(file).exists(),
            "{file} missing"
        );
    }
    let first = fs::read(dir.path().join("results/regret.csv")).unwrap();

    let output = run_in(
        dir.path(),
        &["run", "--config", "exp.json", "--out", "results2"],
    );
    assert_exit(&output, 0);
    let second = fs::read(dir.path().join("results2/regret.csv")).unwrap();
    assert_eq!(first, second, "rerun changed regret.csv");

    // The oracle rows should all be ~zero regret.
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results/aggregate.json")).unwrap())
            .unwrap();
    let oracle = rows
        .iter()
        .find(|r| r["policy"] == "oracle")
        .expect("oracle row");
    assert!(oracle["mean_regret"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn run_rejects_bad_configs_before_any_episode() {
    let dir = tempfile::tempdir().unwrap();
    let bad_policy = r#"{
        "base_seed": 1,
        "instances": [{"generate": {"family": "intro", "horizon": 20000, "seed": 1}}],
        "policies": [{"name": "thompson"}],
        "horizons": [100]
    }"#;
    fs::write(dir.path().join("bad.json"), bad_policy).unwrap();
    let output = run_in(dir.path(), &["run", "--config", "bad.json"]);
    assert_exit(&output, 1);

    let bad_horizons = r#"{
        "base_seed": 1,
        "instances": [{"generate": {"family": "intro", "horizon": 20000, "seed": 1}}],
        "policies": [{"name": "oracle"}],
        "horizons": [1000, 100]
    }"#;
    fs::write(dir.path().join("bad2.json"), bad_horizons).unwrap();
    let output = run_in(dir.path(), &["run", "--config", "bad2.json"]);
    assert_exit(&output, 1);

    let missing_file = r#"{
        "base_seed": 1,
        "instances": [{"file": "nope.json"}],
        "policies": [{"name": "oracle"}],
        "horizons": [100]
    }"#;
    fs::write(dir.path().join("bad3.json"), missing_file).unwrap();
    let output = run_in(dir.path(), &["run", "--config", "bad3.json"]);
    assert_exit(&output, 1);
}

#[test]
fn run_reflects_episode_failures_in_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // det_cure demands noise-free rewards; a gaussian instance fails its
    // cells but the sweep still completes.
    let config = r#"{
        "base_seed": 1,
        "instances": [
            {"generate": {"family": "intro", "horizon": 20000, "seed": 1, "sigma": 0.0, "noise": "none"}},
            {"generate": {"family": "intro", "horizon": 20000, "seed": 2, "sigma": 0.1, "noise": "gaussian"}}
        ],
        "policies": [{"name": "det_cure"}],
        "horizons": [200],
        "output_dir": "results"
    }"#;
    fs::write(dir.path().join("exp.json"), config).unwrap();
    let output = run_in(dir.path(), &["run", "--config", "exp.json"]);
    assert_exit(&output, 2);
    assert!(dir.path().join("results/failures.json").exists());
}

#[test]
fn run_writes_traces_on_demand() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "base_seed": 3,
        "instances": [{"generate": {"family": "intro", "horizon": 20000, "seed": 1, "sigma": 0.0, "noise": "none"}}],
        "policies": [{"name": "oracle"}],
        "horizons": [50],
        "output_dir": "results"
    }"#;
    fs::write(dir.path().join("exp.json"), config).unwrap();
    let output = run_in(dir.path(), &["run", "--config", "exp.json", "--traces"]);
    assert_exit(&output, 0);
    let traces: Vec<_> = fs::read_dir(dir.path().join("results/traces"))
        .unwrap()
        .collect();
    assert_eq!(traces.len(), 1);
    let text = fs::read_to_string(traces[0].as_ref().unwrap().path()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,cumulative_expected_reward"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn verify_small_suites_exit_zero_and_emit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(
        dir.path(),
        &[
            "verify", "prop41", "--count", "20", "--max-t", "6", "--seed", "5", "--out",
            "report.json",
        ],
    );
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["suite"], "prop41");
    assert_eq!(report["all_hold"], true);
    assert_eq!(report["total"], 20);

    // Noise-free concentration has zero violations by construction.
    let output = run_in(
        dir.path(),
        &["verify", "lemma_d1", "--sigma", "0", "--trials", "500"],
    );
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["lhs"], 0.0);
    }
}

#[test]
fn verify_dominance_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(
        dir.path(),
        &[
            "verify",
            "dominance",
            "--instances",
            "4",
            "--horizons",
            "1000,10000",
            "--seed",
            "5",
        ],
    );
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["total"], 8);
    assert_eq!(report["all_hold"], true);
}

#[test]
fn bound_validates_parameters_and_reports_components() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run_in(
        dir.path(),
        &[
            "generate", "--family", "intro", "--out", ".", "--sigma", "0.1", "--noise",
            "gaussian", "--seed", "7",
        ],
    );
    assert_exit(&gen, 0);
    let instance = "intro-T50000-s7-000.json";

    let output = run_in(
        dir.path(),
        &[
            "bound", "--instance", instance, "--horizon", "10000", "--q", "1.0", "--epsilon",
            "0.25",
        ],
    );
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert!((report["bound"].as_f64().unwrap() - 20145.577087085385).abs() < 1e-3);

    // sigma 0 zeroes the noise term.
    let output = run_in(
        dir.path(),
        &[
            "bound", "--instance", instance, "--horizon", "10000", "--sigma", "0",
        ],
    );
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["noise_term"], 0.0);

    // Measured slack on the easy two-arm instance is positive.
    let output = run_in(
        dir.path(),
        &[
            "bound", "--instance", instance, "--horizon", "5000", "--measure", "3",
        ],
    );
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert!(report["slack"].as_f64().unwrap() > 0.0);

    // Out-of-range parameters are usage errors.
    for bad in [
        vec!["--epsilon", "0.5"],
        vec!["--epsilon", "0"],
        vec!["--q", "1.5"],
        vec!["--q", "-0.1"],
    ] {
        let mut args = vec!["bound", "--instance", instance, "--horizon", "1000"];
        args.extend(bad);
        let output = run_in(dir.path(), &args);
        assert_exit(&output, 1);
    }
}

#[test]
fn results_are_independent_of_the_parallelism_degree() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "base_seed": 21,
        "instances": [{"generate": {"family": "concave", "count": 3, "horizon": 10000, "seed": 4}}],
        "policies": [{"name": "cure_ucb"}, {"name": "rexp3"}],
        "horizons": [800],
        "replicates": 2
    }"#;
    fs::write(dir.path().join("exp.json"), config).unwrap();
    for (out, jobs) in [("serial", "1"), ("parallel", "4")] {
        let output = run_in(
            dir.path(),
            &["run", "--config", "exp.json", "--out", out, "--jobs", jobs],
        );
        assert_exit(&output, 0);
    }
    let a = fs::read(dir.path().join("serial/regret.csv")).unwrap();
    let b = fs::read(dir.path().join("parallel/regret.csv")).unwrap();
    assert_eq!(a, b, "regret.csv depends on --jobs");
}

#[test]
fn help_exits_zero() {
    let output = bin().arg("--help").output().unwrap();
    assert_exit(&output, 0);
    let output = bin().args(["verify", "--help"]).output().unwrap();
    assert_exit(&output, 0);
}

#[test]
fn csv_instances_load_as_tabulated_arms() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("arm_a,arm_b\n");
    for r in 1..=100 {
        let a = 0.4;
        let b = (r as f64 / 80.0).min(1.0) * 0.9;
        csv.push_str(&format!("{a},{b}\n"));
    }
    fs::write(dir.path().join("curves.csv"), csv).unwrap();
    let config = r#"{
        "base_seed": 4,
        "instances": [{"file": "curves.csv"}],
        "policies": [{"name": "oracle"}, {"name": "det_cure"}],
        "horizons": [100],
        "output_dir": "results"
    }"#;
    fs::write(dir.path().join("exp.json"), config).unwrap();
    let output = run_in(dir.path(), &["run", "--config", "exp.json"]);
    assert_exit(&output, 0);
    let csv_out = fs::read_to_string(dir.path().join("results/regret.csv")).unwrap();
    assert!(csv_out.lines().any(|l| l.starts_with("curves,oracle")));
}

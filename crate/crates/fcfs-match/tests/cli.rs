use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fcfs_match::{model_to_json, read_model};
use fcfs_match_core::analytic::EnumerationOptions;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_fcfs-match");

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

fn fcfs(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_model(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// A model with `n` agents sharing one good.
fn star(n: usize, lambda_bar: f64) -> String {
    let agents: Vec<String> = (1..=n)
        .map(|i| format!(r#"{{"name": "c{i}", "alpha": {}}}"#, 1.0 / n as f64))
        .collect();
    let edges: Vec<String> = (1..=n).map(|i| format!(r#"["s", "c{i}"]"#)).collect();
    format!(
        r#"{{"agents": [{}], "goods": [{{"name": "s", "beta": 1.0}}], "edges": [{}], "lambda_bar": {lambda_bar}, "mu_bar": 1.0}}"#,
        agents.join(", "),
        edges.join(", ")
    )
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn validate_reports_diagnostics() {
    let m = example("three_by_three.json");
    let out = fcfs(&["validate", "--model", m.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["stable"], true);
    assert_eq!(v["crp"], true);
    assert_eq!(v["max_stable_rho"], 1.0);
}

#[test]
fn validate_reports_unstable_models_without_failing() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(example("disjoint_pairs.json"))
        .unwrap()
        .replace("0.7", "0.9");
    let m = write_model(&dir, "hot.json", &text);
    let out = fcfs(&["validate", "--model", &m]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["stable"], false);
    assert_eq!(v["crp"], false);
    assert_eq!(v["witness"]["agents"], serde_json::json!(["c1"]));
    assert!((v["max_stable_rho"].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn malformed_and_invalid_models_exit_2() {
    let dir = TempDir::new().unwrap();
    let broken = write_model(&dir, "broken.json", "{\"agents\": [");
    let out = fcfs(&["validate", "--model", &broken]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let bad = write_model(&dir, "bad.json", &star(2, 0.5).replace("0.5}", "0.4}"));
    assert_eq!(code(&fcfs(&["rates", "--model", &bad])), 2);
    assert_eq!(
        code(&fcfs(&["rates", "--model", "/nonexistent/model.json"])),
        2
    );
}

#[test]
fn rate_table_matches_worked_example() {
    let m = example("three_by_three.json");
    let out = fcfs(&["rates", "--model", m.to_str().unwrap(), "--table"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row = |good: &str| -> Vec<String> {
        text.lines()
            .find(|l| l.starts_with(good))
            .unwrap()
            .split_whitespace()
            .skip(1)
            .map(str::to_string)
            .collect()
    };
    assert_eq!(row("s1"), ["0.090", "0.139", "0", "0.071"]);
    assert_eq!(row("s2"), ["0.120", "0", "0.067", "0.113"]);
    assert_eq!(row("s3"), ["0", "0.211", "0.073", "0.116"]);
}

#[test]
fn wait_table_matches_worked_example() {
    let m = example("three_by_three.json");
    let out = fcfs(&["waits", "--model", m.to_str().unwrap(), "--table"]);
    let text = stdout(&out);
    for expected in ["E(W_c1) = 4.33", "E(W_c2) = 4.41", "E(W_c3) = 3.75"] {
        assert!(text.contains(expected), "{text}");
    }
}

#[test]
fn csv_round_trips_to_library_values() {
    let dir = TempDir::new().unwrap();
    let m = example("three_by_three.json");
    let model = read_model(&m).unwrap();
    let analysis = fcfs_match_core::analyze(&model, &EnumerationOptions::default()).unwrap();
    let close = |text: &str, want: f64| {
        let got: f64 = text.parse().unwrap();
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    };

    let rates = dir.path().join("rates.csv");
    let out = fcfs(&[
        "rates",
        "--model",
        m.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        rates.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let rows = csv_rows(&fs::read_to_string(&rates).unwrap());
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let g = model.good_index(&row[0]).unwrap();
        let want = if row[1] == "LOST" {
            analysis.rates.loss[g]
        } else {
            analysis
                .rates
                .rate(g, model.agent_index(&row[1]).unwrap())
                .unwrap()
        };
        close(&row[2], want);
    }

    let delays = dir.path().join("delays.csv");
    fcfs(&[
        "delays",
        "--model",
        m.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        delays.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&delays).unwrap();
    let (pairs, agents) = text.split_once("\n\n").unwrap();
    for row in csv_rows(pairs) {
        let (g, a) = (
            model.good_index(&row[0]).unwrap(),
            model.agent_index(&row[1]).unwrap(),
        );
        let d = analysis.delays.pair.get(g, a).unwrap();
        close(&row[2], d.mean);
        close(&row[3], d.variance);
    }
    for row in csv_rows(agents) {
        let d = analysis.delays.agent[model.agent_index(&row[0]).unwrap()].unwrap();
        close(&row[1], d.mean);
        close(&row[2], d.variance);
    }
}

#[test]
fn json_reports_are_keyed_by_identifiers() {
    let m = example("three_by_three.json");
    let out = fcfs(&["delays", "--model", m.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mean = v["pairs"]["s2"]["c3"]["mean"].as_f64().unwrap();
    assert!((mean - 6.308).abs() < 1e-3);
    assert!((v["agents"]["c3"]["mean"].as_f64().unwrap() - 6.382).abs() < 1e-3);
}

#[test]
fn model_round_trip_revalidates() {
    let dir = TempDir::new().unwrap();
    let model = read_model(&example("three_by_three.json")).unwrap();
    let path = write_model(&dir, "copy.json", &model_to_json(&model));
    assert_eq!(read_model(Path::new(&path)).unwrap(), model);
}

#[test]
fn type_cap_exits_4() {
    let dir = TempDir::new().unwrap();
    let m = write_model(&dir, "star.json", &star(13, 0.5));
    let out = fcfs(&["rates", "--model", &m]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn unstable_model_exits_3() {
    let dir = TempDir::new().unwrap();
    let m = write_model(&dir, "hot.json", &star(2, 1.0));
    assert_eq!(code(&fcfs(&["rates", "--model", &m])), 3);
    assert_eq!(code(&fcfs(&["waits", "--model", &m])), 3);
}

#[test]
fn sweep_writes_one_row_per_pair_and_loss() {
    let m = example("three_by_three.json");
    let out = fcfs(&[
        "sweep",
        "--model",
        m.to_str().unwrap(),
        "--rho-min",
        "0.05",
        "--rho-max",
        "0.85",
        "--steps",
        "17",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next(),
        Some("rho,good,agent,rate,delay_mean,delay_var")
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 17 * 9);
    assert_eq!(rows.iter().filter(|r| r[2] == "LOST").count(), 17 * 3);
}

#[test]
fn single_point_sweep_equals_rates() {
    let m = example("three_by_three.json");
    let sweep = csv_rows(&stdout(&fcfs(&[
        "sweep",
        "--model",
        m.to_str().unwrap(),
        "--rho-min",
        "0.7",
        "--rho-max",
        "0.7",
        "--steps",
        "1",
    ])));
    let rates = csv_rows(&stdout(&fcfs(&[
        "rates",
        "--model",
        m.to_str().unwrap(),
        "--format",
        "csv",
    ])));
    assert_eq!(sweep.len(), rates.len());
    for (s, r) in sweep.iter().zip(&rates) {
        assert_eq!(s[0], "0.7");
        assert_eq!(&s[1..4], &r[..]);
    }
}

#[test]
fn sweep_past_the_stable_range_exits_3() {
    let m = example("disjoint_pairs.json");
    let out = fcfs(&[
        "sweep",
        "--model",
        m.to_str().unwrap(),
        "--rho-min",
        "0.5",
        "--rho-max",
        "0.9",
        "--steps",
        "5",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.8"));
}

#[test]
fn bad_arguments_exit_2() {
    let m = example("three_by_three.json");
    let m = m.to_str().unwrap();
    assert_eq!(code(&fcfs(&["sweep", "--model", m, "--steps", "0"])), 2);
    assert_eq!(
        code(&fcfs(&[
            "sweep",
            "--model",
            m,
            "--rho-min",
            "0.9",
            "--rho-max",
            "0.2"
        ])),
        2
    );
    assert_eq!(
        code(&fcfs(&[
            "simulate",
            "--model",
            m,
            "--events",
            "1000",
            "--burn-in",
            "1000"
        ])),
        2
    );
    assert_eq!(code(&fcfs(&["rates", "--model", m, "--format", "xml"])), 2);
}

#[test]
fn simulation_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = example("three_by_three.json");
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = Command::new(BIN)
            .args([
                "simulate",
                "--model",
                m.to_str().unwrap(),
                "--events",
                "200000",
                "--seed",
                "17",
            ])
            .args(["--out", path.to_str().unwrap()])
            .env("FCFS_MATCH_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        fs::read(path).unwrap()
    };
    let first = run("a.json", "1");
    assert_eq!(first, run("b.json", "4"));
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["config"]["seed"], 17);
    assert_eq!(v["totals"]["events"], 200_000 - 10_000);
}

#[test]
fn thread_count_does_not_change_reports() {
    let m = example("three_by_three.json");
    let run = |threads: &str| {
        Command::new(BIN)
            .args(["delays", "--model", m.to_str().unwrap(), "--format", "csv"])
            .env("FCFS_MATCH_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
    let bad = Command::new(BIN)
        .args(["rates", "--model", m.to_str().unwrap()])
        .env("FCFS_MATCH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn verification_passes_on_the_worked_example() {
    let dir = TempDir::new().unwrap();
    let m = example("three_by_three.json");
    let out_path = dir.path().join("verify.csv");
    let out = fcfs(&[
        "verify",
        "--model",
        m.to_str().unwrap(),
        "--events",
        "10000000",
        "--seed",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("quantity,analytic,empirical,stderr,z_score")
    );
    let rows = csv_rows(&text);
    assert!(rows.iter().any(|r| r[0] == "rate/s1/c1"));
    assert!(rows.iter().any(|r| r[0].starts_with("pi_y/")));
    assert!(rows
        .iter()
        .all(|r| r[4].parse::<f64>().unwrap().abs() <= 4.0));
}

#[test]
fn corrupted_rate_fails_verification() {
    let m = example("three_by_three.json");
    let out = fcfs(&[
        "verify",
        "--model",
        m.to_str().unwrap(),
        "--events",
        "1000000",
        "--corrupt-rate",
        "0.01",
    ]);
    assert_eq!(code(&out), 5);
    // the comparison is still written
    assert!(stdout(&out).lines().count() > 1);
}

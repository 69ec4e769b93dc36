use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn uamcts(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uamcts")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_data_is_reproducible_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&uamcts(&["--seed", "4", "gen-data", "--n", "40"], &a)), 0);
    assert_eq!(code(&uamcts(&["--seed", "4", "gen-data", "--n", "40"], &b)), 0);
    let csv = fs::read_to_string(a.join("dataset.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
    assert!(csv.starts_with("level,alpha,duration,next_level\n"));
    assert_eq!(csv, fs::read_to_string(b.join("dataset.csv")).unwrap());

    // The echoed config alone reproduces the run.
    let c = dir.path().join("c");
    let cfg = a.join("config.json");
    assert_eq!(code(&uamcts(&["--config", cfg.to_str().unwrap(), "gen-data"], &c)), 0);
    assert_eq!(csv, fs::read_to_string(c.join("dataset.csv")).unwrap());
}

#[test]
fn zero_points_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&uamcts(&["gen-data", "--n", "0"], dir.path())), 2);
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = uamcts(&["gen-data", "--n", "3"], &blocker.join("sub"));
    assert_ne!(code(&o), 0);
}

#[test]
fn fit_is_deterministic_and_reports_mse() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let test = dir.path().join("test");
    uamcts(&["--seed", "1", "gen-data", "--n", "40"], &data);
    uamcts(&["--seed", "2", "gen-data", "--n", "20"], &test);
    let args = |out: &str| {
        let o = uamcts(
            &[
                "fit",
                "--data",
                data.join("dataset.csv").to_str().unwrap(),
                "--test",
                test.join("dataset.csv").to_str().unwrap(),
            ],
            &dir.path().join(out),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        String::from_utf8(o.stdout).unwrap()
    };
    let stdout = args("m1");
    args("m2");
    assert!(stdout.contains("train MSE") && stdout.contains("test MSE"));
    let m1 = fs::read(dir.path().join("m1/model.json")).unwrap();
    assert_eq!(m1, fs::read(dir.path().join("m2/model.json")).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&m1).unwrap();
    for key in ["kernel_params", "feature_scaler", "dataset"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn fit_reports_bad_csv_cells_and_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "level,alpha,duration,next_level\n10,1.0,0.5,20\n10,oops,0.5,20\n").unwrap();
    let o = uamcts(&["fit", "--data", bad.to_str().unwrap()], &dir.path().join("m"));
    assert_ne!(code(&o), 0);
    let err = stderr(&o);
    assert!(err.contains("row 2") && err.contains("alpha"), "{err}");

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_ne!(code(&uamcts(&["fit", "--data", empty.to_str().unwrap()], &dir.path().join("e"))), 0);
}

#[test]
fn plan_with_perfect_model_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = uamcts(&["plan", "--perfect", "--x-ref", "45", "--method", "MCTS"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    assert!(trace.lines().count() >= 1);
    let first: serde_json::Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    for key in ["k", "observed", "action", "predicted", "mde", "true_level"] {
        assert!(first.get(key).is_some(), "{key}");
    }
}

#[test]
fn plan_rejects_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    let o = uamcts(&["plan", "--perfect", "--x-ref", "50", "--method", "UA-MCTS-0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not implemented"));

    let o = uamcts(&["plan", "--perfect", "--x-ref", "50", "--method", "UCB"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("MCTS-inflated"), "registry listed: {}", stderr(&o));

    assert_eq!(code(&uamcts(&["plan", "--perfect", "--x-ref", "1.0"], dir.path())), 2);
    assert_eq!(code(&uamcts(&["plan", "--x-ref", "50"], dir.path())), 2);
}

#[test]
fn bench_smoke_run_is_quick_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let a = uamcts(&["--seed", "3", "bench", "--trials", "1"], &dir.path().join("a"));
    assert!(start.elapsed().as_secs_f64() < 30.0);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let b = uamcts(&["--seed", "3", "bench", "--trials", "1", "--sequential"], &dir.path().join("b"));
    assert_eq!(code(&b), 0);
    let summary = fs::read_to_string(dir.path().join("a/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 12);
    assert_eq!(summary, fs::read_to_string(dir.path().join("b/summary.csv")).unwrap());
    let scatter = fs::read_to_string(dir.path().join("a/scatter_5_UA-MCTS-1.csv")).unwrap();
    assert!(scatter.starts_with("alpha,duration,gp_std,kind\n"));
    assert!(dir.path().join("a/report.json").exists() && dir.path().join("a/config.json").exists());
}

#[test]
fn bench_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"trials": 9, "dataset_sizes": [5], "methods": ["MCTS"], "test_size": 10}"#).unwrap();
    let o = uamcts(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "bench",
            "--trials",
            "1",
            "--iterations",
            "100",
            "--set",
            "search.tau=0.5",
        ],
        &dir.path().join("out"),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let echoed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/config.json")).unwrap()).unwrap();
    assert_eq!(echoed["trials"], 1);
    assert_eq!(echoed["dataset_sizes"], serde_json::json!([5]));
    assert_eq!(echoed["search"]["tau"], 0.5);
    assert_eq!(echoed["search"]["budget"], serde_json::json!({ "iterations": 100 }));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"trails": 1}"#).unwrap();
    assert_eq!(code(&uamcts(&["--config", bad.to_str().unwrap(), "bench"], &dir.path().join("bad"))), 2);
}

#[test]
fn sweep_single_value_matches_bench() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--trials", "2", "--dataset-sizes", "5", "--methods", "UA-MCTS-1", "--iterations", "150"];
    let mut sweep_args = vec!["--seed", "6", "sweep", "--param", "tau", "--values", "0.25"];
    sweep_args.extend(common);
    let s = uamcts(&sweep_args, &dir.path().join("s"));
    assert_eq!(code(&s), 0, "{}", stderr(&s));
    assert!(String::from_utf8_lossy(&s.stdout).contains("sweep tau over [0.25]"));
    let mut bench_args = vec!["--seed", "6", "bench", "--tau", "0.25"];
    bench_args.extend(common);
    assert_eq!(code(&uamcts(&bench_args, &dir.path().join("b"))), 0);

    let sweep = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    let bench = fs::read_to_string(dir.path().join("b/summary.csv")).unwrap();
    assert!(sweep.starts_with("tau,dataset_size,method,success_rate,n_actions_mean,n_actions_sd\n"));
    let sweep_row: Vec<&str> = sweep.lines().nth(1).unwrap().split(',').collect();
    let bench_row: Vec<&str> = bench.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(sweep_row[0], "0.25");
    assert_eq!(sweep_row[1..3], bench_row[0..2]);
    assert_eq!(sweep_row[3..], bench_row[4..]);
}

#[test]
fn sweep_with_flat_sigmoid_completes() {
    let dir = tempfile::tempdir().unwrap();
    let o = uamcts(
        &["sweep", "--param", "h", "--values", "0,10", "--trials", "1", "--dataset-sizes", "5", "--iterations", "100"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 2 * 3);
    assert_eq!(code(&uamcts(&["sweep", "--param", "gamma", "--values", "1"], dir.path())), 2);
}

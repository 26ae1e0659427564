use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

use endim::cli::{
    exit_code, preset, presets, run, ExperimentConfig, Format, RunOptions, Status, Task,
};
use endim::par::Exec;
use endim::Error;

fn endim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(name: &str, v: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("endim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn config_pointer(v: Value) -> String {
    match ExperimentConfig::parse(&v.to_string()) {
        Err(Error::Config { pointer, .. }) => pointer,
        other => panic!("expected a config error, got {other:?}"),
    }
}

fn params_pointer(v: Value, task: Task) -> String {
    let cfg = ExperimentConfig::parse(&v.to_string()).unwrap();
    match run(&cfg, Some(task), &RunOptions::default()) {
        Err(Error::Config { pointer, .. }) => pointer,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn config_errors_carry_json_pointers() {
    assert_eq!(
        config_pointer(json!({"systems": {"X": {"kind": "full", "alphabet": "two"}}})),
        "/systems/X"
    );
    assert_eq!(
        config_pointer(json!({"systems": {"X": {"kind": "torus"}}})),
        "/systems/X/kind"
    );
    assert_eq!(config_pointer(json!({"bogus": 1})), "/bogus");
    assert_eq!(
        config_pointer(json!({"budget": {"node_budget": -1}})),
        "/budget/node_budget"
    );
    let base = json!({
        "systems": {"X": {"kind": "full", "alphabet": 2}},
        "covers": {"U": {"kind": "symbols"}},
        "params": {"system": "X", "cover": "U", "n_max": "many"}
    });
    assert_eq!(params_pointer(base, Task::Dimension), "/params/n_max");
    let missing =
        json!({"covers": {"U": {"kind": "symbols"}}, "params": {"system": "Y", "cover": "U"}});
    assert_eq!(params_pointer(missing, Task::Complexity), "/systems/Y");
}

#[test]
fn task_must_match_subcommand() {
    let cfg = preset("folner-boxes").unwrap();
    assert!(matches!(
        run(&cfg, Some(Task::Dimension), &RunOptions::default()),
        Err(Error::Config { .. })
    ));
    let mut untasked = cfg.clone();
    untasked.task = None;
    assert!(run(&untasked, None, &RunOptions::default()).is_err());
    assert!(run(&untasked, Some(Task::Folner), &RunOptions::default()).is_ok());
}

#[test]
fn exit_codes_follow_error_classes() {
    assert_eq!(exit_code(&Error::config("/", "x")), 2);
    assert_eq!(exit_code(&Error::Budget("x".into())), 3);
    assert_eq!(exit_code(&Error::Capacity("x".into())), 3);
    assert_eq!(exit_code(&Error::Invariant("x".into())), 4);
    assert_eq!(exit_code(&Error::FactorViolation("x".into())), 4);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(
        endim(&["folner", "--preset", "folner-boxes"]).status.code(),
        Some(0)
    );
    assert_eq!(
        endim(&["run", "--preset", "no-such-preset"]).status.code(),
        Some(2)
    );
    assert_eq!(endim(&["run"]).status.code(), Some(2));
    let bad = write_config(
        "bad.json",
        &json!({"task": "folner", "params": {"k": [0, 1], "oops": true}}),
    );
    let out = endim(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/params/oops"));
    let out = endim(&["joining", "--preset", "full-vs-fixedpoint", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "degraded");
    assert_eq!(report["result"]["verdict"], "partial");
    let not_a_factor = write_config(
        "factor.json",
        &json!({
            "systems": {"X": {"kind": "full", "alphabet": 2}, "G": {"kind": "golden_mean"}},
            "codes": {"id": {"kind": "identity"}},
            "covers": {"U": {"kind": "symbols"}},
            "task": "complexity",
            "params": {"system": "X", "factor": {"code": "id", "codomain": "G"}, "cover": "U", "n_max": 4}
        }),
    );
    assert_eq!(
        endim(&["run", "--config", not_a_factor.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn reports_are_self_describing() {
    let out = endim(&["run", "--preset", "golden-mean", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# endim report schema=1 tool="));
    assert!(head.contains("task=dimension status=ok config="));
    assert_eq!(
        lines.next().unwrap(),
        "n,folner_size,N,N_upper,mode,lograt,alpha_upper,alpha_lower"
    );
    assert_eq!(
        lines.next().unwrap().split(',').take(4).collect::<Vec<_>>(),
        ["0", "1", "2", "2"]
    );

    let report = run(
        &preset("golden-mean").unwrap(),
        None,
        &RunOptions::default(),
    )
    .unwrap();
    let v = report.json();
    for key in [
        "schema_version",
        "tool_version",
        "config_hash",
        "task",
        "status",
        "warnings",
        "columns",
        "rows",
        "result",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    let counts: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[2].as_u64().unwrap())
        .collect();
    assert_eq!(&counts[..6], &[2, 3, 5, 8, 13, 21]);
}

#[test]
fn output_path_and_budget_override_change_the_hash_only_when_relevant() {
    let cfg = preset("full-shift-dim").unwrap();
    let mut moved = cfg.clone();
    moved.output.path = Some("elsewhere.csv".into());
    moved.output.format = Some(Format::Csv);
    let a = run(&cfg, None, &RunOptions::default()).unwrap();
    let b = run(&moved, None, &RunOptions::default()).unwrap();
    assert_eq!(a.config_hash, b.config_hash);
    let c = run(
        &cfg,
        None,
        &RunOptions {
            budget: Some(10),
            exec: Exec::Parallel,
        },
    )
    .unwrap();
    assert_ne!(a.config_hash, c.config_hash);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    for (name, cfg) in presets() {
        if name == "folner-dependence" {
            continue;
        }
        let seq = run(
            &cfg,
            None,
            &RunOptions {
                budget: None,
                exec: Exec::Sequential,
            },
        )
        .unwrap();
        let par = run(
            &cfg,
            None,
            &RunOptions {
                budget: None,
                exec: Exec::Parallel,
            },
        )
        .unwrap();
        assert_eq!(
            seq.render(Format::Json).unwrap(),
            par.render(Format::Json).unwrap(),
            "{name}"
        );
        assert_eq!(
            seq.render(Format::Csv).unwrap(),
            par.render(Format::Csv).unwrap(),
            "{name}"
        );
        assert!(matches!(seq.status, Status::Ok | Status::Degraded));
    }
}

#[test]
fn presets_round_trip_through_json() {
    for (name, cfg) in presets() {
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg, "{name}");
    }
}

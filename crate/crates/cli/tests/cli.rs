use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use gamesolve::StrategyProfile;
use gamesolve_cli::{execute, run, Command, Outcome, RunConfig};
use serde_json::Value;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn example_configs() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    assert!(paths.len() >= 10);
    paths
}

fn load(name: &str) -> RunConfig {
    RunConfig::load(&configs_dir().join(name)).unwrap()
}

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_gamesolve"))
}

#[test]
fn example_configs_round_trip() {
    for path in example_configs() {
        let cfg = RunConfig::load(&path).unwrap();
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg, "{}", path.display());
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e:#}", path.display()));
    }
}

#[test]
fn reports_have_the_top_level_keys() {
    for path in example_configs() {
        let out = execute(&RunConfig::load(&path).unwrap()).unwrap();
        let obj = out.report.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(
            keys,
            ["command", "diagnostics", "game", "result", "seed", "spec_version"]
        );
        assert_eq!(obj["spec_version"], "1");
    }
}

#[test]
fn cournot_dynamics_end_at_the_nash_profile() {
    let out = execute(&load("cournot_sync.json")).unwrap();
    assert_eq!(out.outcome, Outcome::Success);
    let trace = out.trace.unwrap();
    let last = trace.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').skip(2).take(2).map(|c| c.parse().unwrap()).collect();
    for q in cols {
        assert!((q - 8.0 / 3.0).abs() < 1e-4, "{last}");
    }
}

#[test]
fn trace_rows_and_utilities_are_recomputable() {
    let cfg = load("cournot_round_robin.json");
    let game = cfg.game.build().unwrap();
    let out = execute(&cfg).unwrap();
    let rows = out.report["diagnostics"]["trace_rows"].as_u64().unwrap() as usize;
    let trace = out.trace.unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), rows + 1, "header plus one line per step");
    assert_eq!(lines[0], "step,movers,action_0,action_1,utility_0,utility_1");
    assert!(lines[1].starts_with("0,,"));
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        let q: Vec<f64> = cols[2..4].iter().map(|c| c.parse().unwrap()).collect();
        let u = game.evaluate_utilities(&StrategyProfile::from_scalars(&q)).unwrap();
        // Actions are printed to 12 digits, so recomputed utilities agree to about that.
        for (k, col) in cols[4..6].iter().enumerate() {
            let printed: f64 = col.parse().unwrap();
            assert!((printed - u[k]).abs() <= 1e-9 * (1.0 + u[k].abs()), "{line}");
        }
    }
}

#[test]
fn finite_trace_uses_indices() {
    let out = execute(&load("coordination_random.json")).unwrap();
    let trace = out.trace.unwrap();
    assert!(trace.lines().nth(1).unwrap().starts_with("0,,#0,#1,#2,"));
    assert!(trace.lines().last().unwrap().contains("#0,#0,#0,1,1,1"));
}

#[test]
fn empty_equilibrium_list() {
    let out = execute(&load("pennies_enumerate.json")).unwrap();
    assert_eq!(out.outcome, Outcome::Negative);
    assert_eq!(out.report["result"]["equilibria"], Value::Array(vec![]));
    assert_eq!(out.report["result"]["count"], 0);
}

#[test]
fn prisoners_dilemma_report_has_labels() {
    let out = execute(&load("pd_enumerate.json")).unwrap();
    let eq = &out.report["result"]["equilibria"][0]["profile"];
    assert_eq!(eq["actions"], serde_json::json!(["#1", "#1"]));
    assert_eq!(eq["labels"], serde_json::json!(["Defect", "Defect"]));
}

#[test]
fn spne_report_has_both_methods() {
    let out = execute(&load("stackelberg_spne.json")).unwrap();
    let r = &out.report["result"];
    assert_eq!(r["analytic"]["leader_action"], 4.0);
    assert_eq!(r["analytic"]["follower_action"], 2.0);
    assert!((r["numeric"]["leader_action"].as_f64().unwrap() - 4.0).abs() < 1e-3);
    assert!((r["numeric"]["follower_action"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert_eq!(out.report["diagnostics"]["interior"], true);
    assert!(out.report["diagnostics"]["foc_residual"].as_f64().unwrap() <= 1e-2);
}

#[test]
fn illustrative_games_are_tagged() {
    let out = execute(&load("demand_response_cycle.json")).unwrap();
    assert_eq!(out.report["game"]["model"], "illustrative");
    let out = execute(&load("pd_enumerate.json")).unwrap();
    assert!(out.report["game"].get("model").is_none());
}

#[test]
fn run_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load("cournot_sync.json");
    cfg.trace = Some(dir.path().join("t.csv"));
    cfg.report = Some(dir.path().join("r.json"));
    let out = run(&cfg).unwrap();
    assert_eq!(
        fs::read_to_string(dir.path().join("t.csv")).unwrap(),
        out.trace.unwrap()
    );
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report, out.report);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("cournot_sync.json", 0),
        ("stackelberg_spne.json", 0),
        ("pd_nash_check.json", 0),
        ("pennies_enumerate.json", 2),
        ("demand_response_cycle.json", 2),
    ];
    for (name, code) in cases {
        let report = dir.path().join(format!("{name}.report"));
        let out = bin()
            .args(["run", "--config"])
            .arg(configs_dir().join(name))
            .arg("--report")
            .arg(&report)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(code), "{name}");
        assert!(
            out.stderr.is_empty(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
        assert!(report.exists());
    }
}

#[test]
fn errors_exit_one_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let report = dir.path().join("r.json");
    fs::write(
        &bad,
        r#"{"game": {"kind": "CournotLinear", "parameters": {"a": 10, "b": -1, "c1": 0, "c2": 0}},
                        "command": "Spne", "options": {}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(!report.exists());

    fs::write(&bad, "{not json").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("cournot_async_better.json");
    let trace = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--trace")
            .arg(&path)
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert!(out.status.success());
        fs::read(path).unwrap()
    };
    assert_eq!(trace("5", "a.csv"), trace("5", "b.csv"));
    assert_ne!(trace("5", "a.csv"), trace("6", "c.csv"));
}

#[test]
fn list_games_and_validate() {
    let out = bin().arg("list-games").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in [
        "CournotLinear",
        "StackelbergLinear",
        "PrisonersDilemma",
        "MatrixGame",
        "CoordinationGame",
        "DemandResponseToy",
    ] {
        assert!(text.contains(kind));
    }
    for path in example_configs() {
        let out = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
        assert!(out.status.success(), "{}", path.display());
    }
}

#[test]
fn command_names_match_tags() {
    for path in example_configs() {
        let cfg = RunConfig::load(&path).unwrap();
        let text: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(text["command"], cfg.command.name());
        if let Command::Dynamics(d) = &cfg.command {
            assert!(d.stop.max_iters > 0);
        }
    }
}

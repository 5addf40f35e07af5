use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use tqm_cli::report::{JsonReport, CSV_HEADER};
use tqm_cli::{ExperimentConfig, OutputFormat, RawConfig};
use tqm_core::{Algorithm, AdversaryKind};

fn tqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_exits_zero() {
    let out = tqm(&["verify", "--instances", "200"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 8);
}

#[test]
fn verify_writes_json_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("verify.json");
    assert_eq!(code(&tqm(&["verify", "--instances", "50", "--out", path_str(&p)])), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn config_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["run", "--algorithm", "mw_parallel", "--adversary", "fixed_step", "--eps", "0.1"],
        &["run", "--algorithm", "mw_parallel", "--adversary", "fixed_step", "--n", "16", "--eps", "0.6"],
        &["run", "--algorithm", "bogus", "--adversary", "fixed_step", "--n", "16", "--eps", "0.1"],
        &["run", "--n", "sixteen"],
        &["run", "--unknown-flag"],
        &["sweep", "--algorithm", "mw_parallel", "--adversary", "fixed_step", "--n", "16", "--eps", "0.1", "--t-grid", "40,20"],
        &["sweep", "--algorithm", "mw_parallel", "--adversary", "fixed_step", "--n", "16", "--eps", "0.1"],
        &["run", "--algorithm", "iw_single", "--adversary", "hard_instance", "--n", "65", "--eps", "0.0833333333333333"],
        &["run", "--config", "/nonexistent/experiment.toml"],
    ];
    for args in cases {
        assert_eq!(code(&tqm(args)), 1, "{args:?}");
    }
    let out = tqm(&["run", "--algorithm", "naive", "--adversary", "iid_step"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing required field(s): n, eps"));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("no/such/dir/out.csv");
    let out = tqm(&[
        "run", "--algorithm", "naive", "--adversary", "iid_step", "--n", "4", "--eps", "0.2", "--T", "3", "--trials", "1",
        "--out", path_str(&p),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("out.csv"));
}

#[test]
fn mw_run_succeeds_every_trial() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mw.csv");
    let out = tqm(&[
        "run", "--algorithm", "mw_parallel", "--adversary", "iid_step", "--n", "64", "--eps", "0.1", "--trials", "25",
        "--out", path_str(&p),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(&p).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.len(), 7);
        assert_eq!(r[0], i.to_string());
        assert_eq!(r[2], "375");
        assert_eq!(r[4], "1");
        assert!(!r[5].is_empty() && !r[6].is_empty());
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("25/25 = 1.000"));
}

#[test]
fn two_hundred_trials_give_201_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("iw.csv");
    let out = tqm(&[
        "run", "--algorithm", "iw_single", "--adversary", "iid_step", "--n", "32", "--eps", "0.25", "--T", "300",
        "--out", path_str(&p),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 201);
}

#[test]
fn zero_trials_give_a_header_only_csv() {
    let out = tqm(&["run", "--algorithm", "naive", "--adversary", "iid_step", "--n", "8", "--eps", "0.2", "--trials", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let p = dir.path().join(name);
        let out = tqm(&[
            "run", "--algorithm", "iw_single", "--adversary", "hard_instance", "--n", "12", "--eps", "0.1666666666666667",
            "--T", "500", "--trials", "5", "--seed", seed, "--no-timing", "--out", path_str(&p),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(&p).unwrap()
    };
    let a = run("a.csv", "7");
    assert_eq!(a, run("b.csv", "7"));
    assert_ne!(a, run("c.csv", "8"));
    assert!(String::from_utf8(a).unwrap().lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    let out = dir.path().join("r.json");
    std::fs::write(
        &cfg,
        format!(
            "algorithm = \"sqrt_grid\"\nadversary = \"fixed_step\"\nn = 25\neps = 0.2\nT = 30\ntrials = 4\noutput_format = \"json\"\noutput_path = \"{}\"\n",
            out.display()
        ),
    )
    .unwrap();
    assert_eq!(code(&tqm(&["run", "--config", path_str(&cfg), "--trials", "3"])), 0);
    let report: JsonReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.config.trials, 3);
    assert_eq!(report.config.algorithm, Algorithm::SqrtGrid);
    assert_eq!(report.results.len(), 3);
    assert_eq!(report.summary.unwrap().trials, 3);

    std::fs::write(&cfg, "algorithm = \"naive\"\nadversary = \"iid_step\"\nn = 8\neps = 0.1\nseed = 3\n").unwrap();
    assert_eq!(code(&tqm(&["run", "--config", path_str(&cfg)])), 1);
}

#[test]
fn sweep_reports_every_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sweep.json");
    let out = tqm(&[
        "sweep", "--algorithm", "mw_parallel", "--adversary", "iid_step", "--n", "16", "--eps", "0.2", "--trials", "10",
        "--t-grid", "2,8,32", "--format", "json", "--out", path_str(&p),
    ]);
    assert_eq!(code(&out), 0);
    let report: JsonReport = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let sweep = report.sweep.unwrap();
    assert_eq!(sweep.points.iter().map(|p| p.rounds).collect::<Vec<_>>(), vec![2, 8, 32]);
    assert_eq!(report.results.len(), 30);
    assert_eq!(report.results[29].rounds, 32);
}

#[test]
fn json_report_round_trips_its_config() {
    let out = tqm(&[
        "run", "--algorithm", "iw_single", "--adversary", "iid_step", "--n", "10", "--eps", "0.3", "--T", "20",
        "--trials", "2", "--isotonic", "--tau-check", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let report: JsonReport = serde_json::from_slice(&out.stdout).unwrap();
    let reparsed = ExperimentConfig::resolve(RawConfig::from(&report.config)).unwrap();
    assert_eq!(reparsed, report.config);
    assert!(report.config.isotonic && report.config.tau_check);
}

fn any_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        prop::sample::select(vec![Algorithm::MwParallel, Algorithm::IwSingle, Algorithm::Naive, Algorithm::SqrtGrid]),
        prop::sample::select(vec![AdversaryKind::FixedStep, AdversaryKind::IidStep, AdversaryKind::PigeonholeDemo]),
        2usize..5000,
        0.01..0.49f64,
        prop::option::of(1usize..50),
        prop::option::of(1usize..100_000),
        (0usize..500, any::<u64>(), any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()),
        prop::option::of(prop::collection::btree_set(1usize..1000, 1..6)),
    )
        .prop_map(|(alg, adv, n, eps, k, t, (trials, seed, json, tau, iso, timing), grid)| {
            let raw = RawConfig {
                algorithm: Some(alg.to_string()),
                adversary: Some(adv.to_string()),
                n: Some(n),
                eps: Some(eps),
                k,
                rounds: t,
                trials: Some(trials),
                master_seed: Some(seed),
                output_format: Some(if json { OutputFormat::Json } else { OutputFormat::Csv }),
                tau_check: Some(tau),
                isotonic: Some(iso),
                record_timing: Some(timing),
                t_grid: grid.map(|g| g.into_iter().collect()),
                ..RawConfig::default()
            };
            ExperimentConfig::resolve(raw).unwrap()
        })
}

proptest! {
    #[test]
    fn config_survives_json_round_trip(cfg in any_config()) {
        let report = JsonReport::new(&cfg, &[]);
        let text = report.to_string_pretty();
        let back: JsonReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back.config, &cfg);
        prop_assert_eq!(ExperimentConfig::resolve(RawConfig::from(&back.config)).unwrap(), cfg);
    }

    #[test]
    fn config_survives_toml_round_trip(cfg in any_config()) {
        prop_assume!(cfg.master_seed <= i64::MAX as u64);
        let text = toml::to_string(&RawConfig::from(&cfg)).unwrap();
        prop_assert_eq!(ExperimentConfig::resolve(RawConfig::from_toml_str(&text).unwrap()).unwrap(), cfg);
    }

    #[test]
    fn parser_rejects_unknown_keys(key in "[a-z_]{1,12}", value in 0u32..100) {
        let known = [
            "algorithm", "adversary", "n", "eps", "k", "eta", "trials", "master_seed", "output_path",
            "output_format", "tau_check", "isotonic", "t_grid", "record_timing",
        ];
        prop_assume!(!known.contains(&key.as_str()));
        let text = format!("{key} = {value}");
        prop_assert!(RawConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,80}") {
        let _ = RawConfig::from_toml_str(&text).map(ExperimentConfig::resolve);
    }
}

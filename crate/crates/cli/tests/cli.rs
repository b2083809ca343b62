use std::path::Path;
use std::process::Command;

use qfock_cli::sweep::{rows_from_json, rows_to_csv, rows_to_json};
use qfock_cli::{cmd_dump, cmd_sweep, cmd_verify, parse_list, run_sweep, CliError, DumpObject, Format, RunConfig};
use serde_json::Value;

fn small(out: &Path) -> RunConfig {
    RunConfig {
        q: vec![0.3],
        lambda: vec![0.15],
        depth: 8,
        out: out.to_path_buf(),
        ..RunConfig::default()
    }
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn config_round_trips_through_toml() {
    let c = RunConfig {
        q: vec![-0.5, 0.25],
        lambda: vec![0.1],
        depth: 10,
        terms: Some(4),
        sweep_depths: vec![8, 10],
        jobs: 3,
        format: Format::Json,
        ..RunConfig::default()
    };
    assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);

    let partial = RunConfig::from_toml("q = [0.1]\n[tolerances]\nexact = 1e-11\n").unwrap();
    assert_eq!(partial.q, vec![0.1]);
    assert_eq!(partial.lambda, RunConfig::default().lambda);
    assert_eq!(partial.tolerances.exact, 1e-11);
    assert_eq!(partial.tolerances.identity, 1e-10);

    assert!(matches!(RunConfig::from_toml("depht = 3"), Err(CliError::Config(_))));
    assert!(matches!(RunConfig::from_toml("format = \"xml\""), Err(CliError::Config(_))));
}

#[test]
fn defaults() {
    let c = RunConfig::default();
    assert_eq!(c.grid().len(), 35);
    assert_eq!(c.grid()[0], (-0.8, 0.05));
    assert_eq!(c.grid()[1], (-0.8, 0.15));
    assert_eq!(c.depths(), vec![12]);
    assert_eq!(c.terms_for(12), 6);
    c.validate().unwrap();
}

#[test]
fn lists() {
    assert_eq!(parse_list("0.1, -0.2,0").unwrap(), vec![0.1, -0.2, 0.0]);
    assert!(parse_list("").unwrap().is_empty());
    assert!(matches!(parse_list("0.1,x"), Err(CliError::Config(_))));
}

#[test]
fn validation_rejects_before_work() {
    let d = tempfile::tempdir().unwrap();
    let base = small(d.path());
    let bad_q = RunConfig { q: vec![0.99], ..base.clone() };
    let e = bad_q.validate().unwrap_err();
    assert!(matches!(e, CliError::Library(qfock::Error::Parameter(_)) | CliError::Config(_)), "{e}");
    assert_eq!(e.exit_code(), 2);

    let bad_lambda = RunConfig { lambda: vec![1.0], ..base.clone() };
    assert!(matches!(bad_lambda.validate(), Err(CliError::Config(_))));

    let budget = RunConfig {
        lambda: vec![0.95],
        depth: 14,
        ..base.clone()
    };
    let e = budget.validate().unwrap_err();
    assert!(matches!(e, CliError::Library(qfock::Error::Budget(_))), "{e}");

    let terms = RunConfig { terms: Some(5), ..base.clone() };
    assert!(matches!(terms.validate(), Err(CliError::Config(_))));

    // nothing was written
    assert!(std::fs::read_dir(d.path()).unwrap().next().is_none());
    assert!(matches!(run_sweep(&budget), Err(CliError::Library(qfock::Error::Budget(_)))));
}

#[test]
fn empty_grid_sweeps_to_a_header() {
    let d = tempfile::tempdir().unwrap();
    let c = RunConfig { q: vec![], ..small(d.path()) };
    let rows = cmd_sweep(&c).unwrap();
    assert!(rows.is_empty());
    let csv = std::fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("# qfock-sweep/1\nq,lambda,depth,"));
    assert!(d.path().join("sweep.gp").exists());
}

#[test]
fn verdicts_straddle_the_threshold() {
    let d = tempfile::tempdir().unwrap();
    let c = RunConfig {
        q: vec![0.1],
        lambda: vec![0.15, 0.25],
        ..small(d.path())
    };
    let rows = run_sweep(&c).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].analytic_verdict, Some(true));
    assert_eq!(rows[1].analytic_verdict, Some(false));
    for r in &rows {
        assert_eq!(r.status, "ok");
        assert!((r.threshold.unwrap() - 0.19536490356513794).abs() < 1e-12);
        assert!(r.min_singular.unwrap() > 0.0);
        assert_eq!(r.n_star, 3);
    }
    // wall time stays out of the data files
    let untimed: Vec<_> = rows.iter().cloned().map(|r| qfock_cli::SweepRow { runtime_ms: 0, ..r }).collect();
    assert_eq!(rows_from_json(&rows_to_json(&rows)).unwrap(), untimed);
    let csv = rows_to_csv(&rows);
    let first: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(first.len(), 11);
    assert_eq!(first[5], "true");
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.1);
}

#[test]
fn kernel_regime_singular_values_shrink_with_depth() {
    let d = tempfile::tempdir().unwrap();
    let c = RunConfig {
        q: vec![0.0],
        lambda: vec![0.75],
        sweep_depths: vec![8, 10, 12],
        ..small(d.path())
    };
    let m: Vec<f64> = run_sweep(&c).unwrap().iter().map(|r| r.min_singular.unwrap()).collect();
    assert!(m[1] < m[0] && m[2] < m[1], "{m:?}");
}

#[test]
fn dumps() {
    let d = tempfile::tempdir().unwrap();
    let c = RunConfig { depth: 12, ..small(d.path()) };
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();

    let path = cmd_dump(&c, DumpObject::Xi, &s(&["6"]), Format::Json).unwrap();
    assert_eq!(path.file_name().unwrap(), "xi_6.json");
    let xi = read_json(&path);
    assert_eq!(xi["vector"]["levels"].as_array().unwrap().len(), 7);
    let (a, b) = (xi["norm_sq"].as_f64().unwrap(), xi["norm_sq_closed_form"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-12 * b);

    let gram = read_json(&cmd_dump(&c, DumpObject::Gram, &s(&["2"]), Format::Json).unwrap());
    let blocks = gram["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 3);
    assert!(blocks.iter().any(|b| b["words"].as_array().unwrap().len() == 2));

    let op = read_json(&cmd_dump(&c, DumpObject::Operator, &s(&["wen", "3"]), Format::Json).unwrap());
    assert_eq!(op["safe_level"].as_u64(), Some(9));
    assert!(!op["operator"]["blocks"].as_array().unwrap().is_empty());
    assert!(d.path().join("operator_wen_3.json").exists());

    for sel in [&["flip"][..], &["z", "2"], &["creation", "Ebar"], &["s_inf", "3"]] {
        cmd_dump(&c, DumpObject::Operator, &s(sel), Format::Json).unwrap();
    }

    let e = cmd_dump(&c, DumpObject::Operator, &s(&["frobnicate"]), Format::Json).unwrap_err();
    assert!(matches!(e, CliError::Library(qfock::Error::UnknownSelector(_))), "{e}");
    assert!(matches!("matrix".parse::<DumpObject>(), Err(CliError::Library(qfock::Error::UnknownSelector(_)))));
    assert!(matches!(cmd_dump(&c, DumpObject::Gram, &s(&["13"]), Format::Json), Err(CliError::Library(qfock::Error::Truncation(_)))));
    assert!(matches!(cmd_dump(&c, DumpObject::Gram, &s(&["2"]), Format::Csv), Err(CliError::Config(_))));
}

#[test]
fn small_verify_passes_and_reports() {
    let d = tempfile::tempdir().unwrap();
    let report = cmd_verify(&small(d.path())).unwrap();
    assert_eq!(report.failed, 0, "{:?}", report.first_failure);
    assert!(report.total >= 40);
    let names: std::collections::BTreeSet<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert!(names.len() >= 40, "{}", names.len());
    let json = read_json(&d.path().join("verify.json"));
    assert_eq!(json["schema"], "qfock-verify/1");
    assert_eq!(json["passed"].as_u64().unwrap() as usize, report.total);
}

fn qfock(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qfock")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_str().unwrap();

    let ok = qfock(&["verify", "--q", "0.3", "--lambda", "0.15", "--depth", "8", "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("0 failed"));

    let bad = qfock(&["sweep", "--q", "0.99", "--out", out]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("0.99"));

    let budget = qfock(&["sweep", "--q", "0.3", "--lambda", "0.95", "--depth", "14", "--out", out]);
    assert_eq!(budget.status.code(), Some(2));

    // an impossible tolerance makes checks fail
    let config = d.path().join("strict.toml");
    std::fs::write(&config, "q = [0.3]\nlambda = [0.15]\ndepth = 8\n[tolerances]\nexact = -1.0\n").unwrap();
    let fail = qfock(&["verify", "--config", config.to_str().unwrap(), "--out", out]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL "));

    let dump = qfock(&["dump", "xi", "2", "--q", "-0.5", "--lambda", "0.3", "--depth", "6", "--out", out]);
    assert_eq!(dump.status.code(), Some(0));
    assert!(d.path().join("xi_2.json").exists());
    let unknown = qfock(&["dump", "operator", "nope", "--out", out]);
    assert_eq!(unknown.status.code(), Some(2));

    let help = qfock(&["--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("depth 12") && text.contains("Exit codes"));
}

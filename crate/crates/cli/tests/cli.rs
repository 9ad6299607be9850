use packing_bounds::euclid::Method;
use packing_bounds::report::{parse_csv, parse_json};
use packing_bounds_cli::{main_with_args, run, Cli, CliError, RunConfig};

use clap::Parser;

fn config(args: &[&str]) -> Result<RunConfig, CliError> {
    let mut full = vec!["packbounds"];
    full.extend_from_slice(args);
    RunConfig::from_cli(Cli::try_parse_from(full).expect("arguments parse"))
}

fn output(args: &[&str]) -> String {
    run(&config(args).unwrap()).unwrap()
}

#[test]
fn table_csv_matches_reference_rows() {
    let csv = output(&["table", "--dims", "12,24,48", "--methods", "rogers,levenshtein,kl,cz", "--format", "csv"]);
    let records = parse_csv(&csv).unwrap();
    assert_eq!(records.len(), 12);
    let get = |n: usize, m: Method| {
        records
            .iter()
            .find(|r| r.n == n && r.method == m)
            .map(|r| r.value_rounded.as_str())
            .unwrap()
    };
    assert_eq!(get(12, Method::Rogers), "8.759e-2");
    assert_eq!(get(24, Method::Cz), "2.637e-2");
    assert_eq!(get(48, Method::Rogers), "1.128e-6");
    // rows stay ordered by n, then by the requested method order
    let order: Vec<_> = records.iter().map(|r| (r.n, r.method)).collect();
    assert_eq!(order[0], (12, Method::Rogers));
    assert_eq!(order[11], (48, Method::Cz));
}

#[test]
fn csv_and_json_round_trip_log_values() {
    let csv = output(&["table", "--dims", "36,600", "--format", "csv"]);
    let json = output(&["table", "--dims", "36,600", "--format", "json"]);
    let a = parse_csv(&csv).unwrap();
    let b = parse_json(&json).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.n, x.method, &x.value_rounded), (y.n, y.method, &y.value_rounded));
        assert!((x.value_log10 - y.value_log10).abs() <= 1e-12 * x.value_log10.abs());
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = ["table", "--dims", "24,96,120", "--format", "json"];
    assert_eq!(output(&args), output(&args));
    let mc = ["overlap", "--n", "3", "--r", "1", "--R", "4", "--samples", "50000", "--seed", "9"];
    assert_eq!(output(&mc), output(&mc));
}

#[test]
fn rate_json() {
    let v: serde_json::Value = serde_json::from_str(&output(&["rate"])).unwrap();
    assert!((v["theta_star"].as_f64().unwrap() - 1.0995).abs() < 1e-3);
    assert!((v["rate_log2"].as_f64().unwrap() + 0.5990).abs() < 1e-3);
}

#[test]
fn overlap_at_zero_separation_is_one() {
    assert_eq!(output(&["overlap", "--n", "2", "--r", "0", "--R", "5", "--format", "text"]), "1.0\n");
}

#[test]
fn crossover_transitions() {
    let v: serde_json::Value =
        serde_json::from_str(&output(&["crossover", "--lo", "90", "--hi", "120", "--format", "json"])).unwrap();
    let t = v["transitions"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!((t[0]["last"].as_u64(), t[0]["to"].as_str()), (Some(95), Some("levenshtein")));
    assert_eq!((t[1]["last"].as_u64(), t[1]["to"].as_str()), (Some(114), Some("kl")));
    let single = output(&["crossover", "--lo", "4", "--hi", "4"]);
    assert_eq!(single, "n,method\n4,rogers\n");
}

#[test]
fn lp_certificate_json() {
    let v: serde_json::Value = serde_json::from_str(&output(&["lp", "--n", "3", "--theta", "3.141592653589793"])).unwrap();
    assert_eq!(v["certified"], true);
    assert!((v["objective"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn invalid_configs_exit_2() {
    assert_eq!(main_with_args(["packbounds", "crossover", "--lo", "2", "--hi", "5"]), 2);
    assert_eq!(main_with_args(["packbounds", "table", "--methods", "simplex"]), 2);
    assert_eq!(main_with_args(["packbounds", "table", "--methods", "hyp_coarse"]), 2);
    assert_eq!(main_with_args(["packbounds", "table", "--rel-tol", "0"]), 2);
    assert_eq!(main_with_args(["packbounds", "table", "--dims", "0"]), 2);
    assert_eq!(main_with_args(["packbounds", "bound", "--dims", "4", "--methods", "hyp_coarse"]), 2);
    assert_eq!(main_with_args(["packbounds", "frobnicate"]), 2);
}

#[test]
fn non_convergence_exits_3() {
    let err = run(&config(&["table", "--dims", "12", "--methods", "rogers", "--rel-tol", "1e-300"]).unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    let diag: serde_json::Value = serde_json::from_str(&err.diagnostic()).unwrap();
    assert_eq!(diag["error"], "non_convergence");
    assert_eq!(main_with_args(["packbounds", "table", "--dims", "12", "--rel-tol", "1e-300"]), 3);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("rate.json");
    std::fs::write(&cfg, "# tolerances\nrel_tol = 1e-10\nseed=4\n").unwrap();
    let c = config(&["rate", "--config", cfg.to_str().unwrap()]).unwrap();
    assert_eq!((c.rel_tol, c.seed), (1e-10, 4));

    let code = main_with_args(["packbounds", "rate", "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["theta_star"].is_number());

    std::fs::write(&cfg, "tolerance = 3\n").unwrap();
    assert!(matches!(config(&["rate", "--config", cfg.to_str().unwrap()]), Err(CliError::Config(_))));
    assert_eq!(main_with_args(["packbounds", "rate", "--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn hyperbolic_records() {
    let recs = parse_csv(&output(&["hyperbolic", "--dims", "8", "--r", "1", "--theta", "3.141592653589793"])).unwrap();
    assert_eq!(recs[0].method, Method::HypCoarse);
    // θ = π: the antipodal bound 2 times sin^{n-1}(π/2)
    assert_eq!(recs[0].value_rounded, "2.000e0");
}

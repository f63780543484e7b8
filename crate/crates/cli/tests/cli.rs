//! End-to-end tests of the `dgp1` binary: exit codes, report contents,
//! reproducibility, and schema conformance.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dgp1(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgp1"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_reference_instance(dir: &Path) -> String {
    let path = dir.join("ref4.json");
    fs::write(&path, "{\"n\":4,\"consecutive\":[4,2,3],\"closing\":1}\n").unwrap();
    path.display().to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn solution_rows(report: &Value) -> Vec<u64> {
    report["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["row"].as_u64().unwrap())
        .collect()
}

#[test]
fn solve_feasible_instance_exits_zero_with_two_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reference_instance(dir.path());
    let out = dgp1(&["solve", &path, "--method", "bp"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["schema"], "dgp1-report/1");
    assert_eq!(report["method"], "bp");
    assert_eq!(report["solution_count"], 2);
    assert_eq!(solution_rows(&report), vec![7, 10]);
}

#[test]
fn solve_infeasible_instance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    fs::write(&path, "{\"n\":1,\"consecutive\":[],\"closing\":1}\n").unwrap();
    let out = dgp1(&["solve", path.to_str().unwrap(), "--method", "mvm"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["feasible"], false);
    assert_eq!(report["solution_count"], 0);
}

#[test]
fn solve_error_paths_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgp1(&["solve", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\":4,\"consecutive\":[4,2],\"closing\":1}\n").unwrap();
    let out = dgp1(&["solve", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("consecutive"), "stderr: {stderr}");
}

#[test]
fn all_methods_report_the_same_solution_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reference_instance(dir.path());
    let mut row_sets = Vec::new();
    for method in ["bp", "mvm", "optics"] {
        let out = dgp1(&["solve", &path, "--method", method], dir.path());
        assert_eq!(out.status.code(), Some(0), "method {method}");
        row_sets.push(solution_rows(&stdout_json(&out)));
    }
    assert_eq!(row_sets[0], row_sets[1]);
    assert_eq!(row_sets[1], row_sets[2]);
}

#[test]
fn reports_validate_against_the_published_schema() {
    let schema_text = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json"),
    )
    .unwrap();
    let schema: Value = serde_json::from_str(&schema_text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = write_reference_instance(dir.path());
    let single = dir.path().join("single.json");
    fs::write(&single, "{\"n\":1,\"consecutive\":[],\"closing\":1}\n").unwrap();

    let runs: Vec<Vec<&str>> = vec![
        vec!["solve", &path, "--method", "bp"],
        vec!["solve", &path, "--method", "mvm", "--threads", "4"],
        vec!["solve", &path, "--method", "optics"],
        vec!["solve", &path, "--method", "optics", "--analytic", "--noise-sigma", "0.01"],
        vec![
            "solve",
            single.to_str().unwrap(),
            "--method",
            "optics",
            "--eps",
            "0.5",
        ],
    ];
    for args in runs {
        let out = dgp1(&args, dir.path());
        assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
        let report = stdout_json(&out);
        let errors: Vec<String> =
            validator.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "schema violations for {args:?}: {errors:?}");
    }
}

#[test]
fn generate_is_seed_deterministic_and_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let result = dgp1(
            &[
                "generate", "--n", "4", "--feasible", "--seed", "7", "--out",
                out.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert_eq!(result.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let solved = dgp1(&["solve", a.to_str().unwrap(), "--method", "bp"], dir.path());
    assert_eq!(solved.status.code(), Some(0));
    let report = stdout_json(&solved);
    assert!(report["solution_count"].as_u64().unwrap() >= 2);

    let different = dgp1(&["generate", "--n", "4", "--feasible", "--seed", "8"], dir.path());
    assert_ne!(different.stdout, fs::read(&a).unwrap());
}

#[test]
fn generate_rejects_tiny_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgp1(&["generate", "--n", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_csv_columns_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgp1(
        &["bench", "--n", "4..6", "--methods", "mvm", "--repeats", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,method,repeat,wall_ns,mean_wall_ns,min_wall_ns,mac_count,modeled_optical_seconds"
    );
    let mut per_n = std::collections::HashMap::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let n: u32 = fields[0].parse().unwrap();
        let mac: u64 = fields[6].parse().unwrap();
        assert_eq!(mac, (1u64 << n) * u64::from(n));
        let modeled: f64 = fields[7].parse().unwrap();
        assert!((modeled - mac as f64 / 134_369_280_000.0).abs() < 1e-18);
        *per_n.entry(n).or_insert(0u32) += 1;
    }
    assert_eq!(per_n[&4], 3);
    assert_eq!(per_n[&5], 3);
    assert_eq!(per_n[&6], 3);
}

#[test]
fn bench_rejects_out_of_cap_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgp1(&["bench", "--n", "4..40"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn intensity_dump_writes_one_row_per_matrix_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reference_instance(dir.path());
    let dump = dir.path().join("frames.csv");
    let out = dgp1(
        &[
            "solve", &path, "--method", "optics", "--dump-intensities",
            dump.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&dump).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row,intensity");
    assert_eq!(lines.len(), 1 + 16);
    // Candidate pixels carry (near-)zero intensity in the dump as well.
    let intensity_of = |row: usize| -> f64 { lines[row].split(',').nth(1).unwrap().parse().unwrap() };
    assert!(intensity_of(7) < 1e-4);
    assert!(intensity_of(10) < 1e-4);

    let rejected = dgp1(
        &["solve", &path, "--method", "bp", "--dump-intensities", "x.csv"],
        dir.path(),
    );
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn zero_distance_warning_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    fs::write(&path, "{\"n\":3,\"consecutive\":[0,1],\"closing\":1}\n").unwrap();
    let out = dgp1(&["solve", path.to_str().unwrap()], dir.path());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("zero"), "stderr: {stderr}");
    // The report itself stays on stdout and carries the warning too.
    let report = stdout_json(&out);
    assert!(report["warnings"][0].as_str().unwrap().contains("zero"));
}

#[test]
fn noisy_optics_runs_are_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reference_instance(dir.path());
    let run = |seed: &str| {
        let out = dgp1(
            &["solve", &path, "--method", "optics", "--noise-sigma", "0.05", "--seed", seed],
            dir.path(),
        );
        stdout_json(&out)["optics"]["per_frame_min_intensity"].clone()
    };
    assert_eq!(run("11"), run("11"));
    assert_ne!(run("11"), run("12"));
}

#[test]
fn csv_format_emits_solution_rows_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reference_instance(dir.path());
    let out = dgp1(&["solve", &path, "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec![
        "row,signs,positions",
        "7,-1 1 1 -1,0 -4 -2 1 0",
        "10,1 -1 -1 1,0 4 2 -1 0",
    ]);
}

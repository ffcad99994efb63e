//! End-to-end checks of the binary: exit codes, determinism, format
//! round-trips and input diagnostics.

use std::path::PathBuf;
use std::process::{Command, Output};

fn exptest() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exptest"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("exptest-cli-{name}-{}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Small deterministic exponential-ish sample (quantiles of Exp(1)).
fn exp_quantile_file(n: usize, name: &str) -> PathBuf {
    let mut lines = String::new();
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        lines.push_str(&format!("{}\n", -(1.0 - u).ln()));
    }
    write_temp(name, &lines)
}

#[test]
fn test_command_accepts_exponential_data() {
    let file = exp_quantile_file(60, "expdata");
    let output = exptest()
        .args(["test"])
        .arg(&file)
        .args(["--k", "2", "--method", "asymptotic", "--alpha", "0.05"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = stdout(&output);
    assert!(text.contains("fail-to-reject"), "{text}");
}

#[test]
fn test_command_rejects_clearly_non_exponential_data() {
    // a tight cluster around 1 is nothing like an exponential
    let mut content = String::new();
    for i in 0..40 {
        content.push_str(&format!("{}\n", 1.0 + 0.001 * i as f64));
    }
    let file = write_temp("cluster", &content);
    let output = exptest()
        .args(["test"])
        .arg(&file)
        .args(["--k", "2", "--method", "asymptotic", "--alpha", "0.05,0.01"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    assert!(stdout(&output).contains("reject"));
}

#[test]
fn negative_entry_is_line_numbered_and_exits_one() {
    let file = write_temp("negative", "1.0\n2.0\n-0.5\n3.0\n");
    let output = exptest().args(["test"]).arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unparseable_row_is_line_numbered() {
    let file = write_temp("garbled", "1.0\n\noops\n");
    let output = exptest().args(["test"]).arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn empty_file_fails() {
    let file = write_temp("empty", "\n\n");
    let output = exptest().args(["test"]).arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn csv_column_selection_with_header() {
    let file = write_temp("csv", "id,value\n1,0.5\n2,1.5\n3,0.2\n4,2.5\n5,0.9\n");
    let output = exptest()
        .args(["test"])
        .arg(&file)
        .args(["--column", "2", "--method", "none", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(json["result"]["n"], 5);
    assert!(json["result"]["p_value"].is_null());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = [
        "critvals", "--kind", "kolmogorov", "--k", "2", "--n", "20", "--reps", "500",
        "--seed", "9", "--format", "json",
    ];
    let a = exptest().args(args).output().unwrap();
    let b = exptest().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn critvals_json_round_trips() {
    let output = exptest()
        .args([
            "critvals", "--kind", "integral", "--k", "2", "--n", "20", "--reps", "400",
            "--seed", "3", "--format", "json",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let table: exptest::CriticalValueTable = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(table.n, 20);
    assert_eq!(table.entries.len(), 5);
    // upper quantiles decrease as alpha grows
    let mut sorted = table.entries.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in sorted.windows(2) {
        assert!(pair[0].1 >= pair[1].1);
    }
}

#[test]
fn tuple_budget_error_surfaces_verbatim() {
    let file = exp_quantile_file(100, "budget");
    let output = exptest()
        .args(["test"])
        .arg(&file)
        .args(["--k", "4", "--method", "none"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("budget"), "{err}");

    // the sampled strategy is the documented way out
    let output = exptest()
        .args(["test"])
        .arg(&file)
        .args(["--k", "4", "--method", "none", "--tuples", "20000", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
}

#[test]
fn lao_curve_integrates_to_one() {
    let output = exptest()
        .args([
            "lao", "--kind", "integral", "--k", "2", "--theta", "0.1", "--x-max", "40",
            "--points", "20001",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let points: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|line| {
            let (x, g) = line.split_once(',').unwrap();
            (x.parse().unwrap(), g.parse().unwrap())
        })
        .collect();
    let mut integral = 0.0;
    for pair in points.windows(2) {
        integral += 0.5 * (pair[1].0 - pair[0].0) * (pair[0].1 + pair[1].1);
    }
    assert!((integral - 1.0).abs() < 1e-6, "trapezoid mass {integral}");
}

#[test]
fn efficiency_reports_all_families() {
    let output = exptest()
        .args(["efficiency", "--kind", "integral", "--k", "2", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let reports: Vec<exptest::EfficiencyReport> =
        serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(reports.len(), 4);
    for r in &reports {
        assert!(r.efficiency > 0.0 && r.efficiency <= 1.0 + 1e-6);
    }
}

#[test]
fn efficiency_tables_reproduce_reference() {
    let output = exptest()
        .args(["tables", "--which", "efficiency-kolmogorov", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let reports: Vec<exptest::tables::TableReport> =
        serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(reports.len(), 2);
    for report in &reports {
        assert!(
            report.max_abs_delta() <= 0.005,
            "{}: {}",
            report.name,
            report.max_abs_delta()
        );
    }
}

#[test]
fn asymptotic_p_value_size_across_seeds() {
    // null-data size at the asymptotic p-value: most seeds fail to reject
    let mut fail_to_reject = 0;
    let trials = 40;
    for seed in 0..trials {
        let mut state = 0x243F_6A88_85A3_08D3u64 ^ (seed as u64).wrapping_mul(0x9E37);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64
        };
        let mut content = String::new();
        for _ in 0..100 {
            content.push_str(&format!("{}\n", -(1.0f64 - next()).ln()));
        }
        let file = write_temp(&format!("seed{seed}"), &content);
        let output = exptest()
            .args(["test"])
            .arg(&file)
            .args(["--k", "2", "--method", "asymptotic", "--alpha", "0.05"])
            .output()
            .unwrap();
        match output.status.code() {
            Some(0) => fail_to_reject += 1,
            Some(2) => {}
            other => panic!("unexpected exit {other:?}"),
        }
    }
    assert!(
        fail_to_reject >= 34,
        "only {fail_to_reject}/{trials} runs failed to reject"
    );
}

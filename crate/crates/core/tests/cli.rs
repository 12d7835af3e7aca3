use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use batopt::analysis::significance_label;

fn batopt(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_batopt"))
        .args(args)
        .current_dir(cwd)
        .env_remove("BATOPT_OUT_DIR")
        .output()
        .expect("spawn batopt")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn list_prints_every_objective() {
    let dir = tempfile::tempdir().unwrap();
    let first = batopt(&["list"], dir.path());
    assert!(first.status.success());
    let text = stdout(&first);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 23);
    for (i, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("F{} ", i + 1)), "{row}");
    }
    assert_eq!(stdout(&batopt(&["list"], dir.path())), text);

    let json = batopt(&["list", "--json"], dir.path());
    let parsed: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let entries = parsed.as_array().unwrap();
    assert_eq!(entries.len(), 23);
    assert_eq!(entries[16]["name"], "F17");
    assert_eq!(entries[16]["upper"][1], 15.0);
}

#[test]
fn unknown_objective_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = batopt(&["run", "--fn", "F99", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown objective"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn bad_flags_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "--fn", "F1", "--algo", "PSO"],
        vec!["run", "--fn", "F1", "--runs", "0"],
        vec!["run", "--fn", "F1", "--pop", "1"],
        vec!["run", "--fn", "F16:5"],
        vec!["run", "--fn", "F1", "--algo", "MBA", "--emit", "pvalues"],
        vec!["frobnicate"],
    ] {
        assert_eq!(batopt(&args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn summary_labels_match_their_means() {
    let dir = tempfile::tempdir().unwrap();
    let out = batopt(
        &[
            "run", "--fn", "F1:5,F9:5,F16", "--iters", "40", "--runs", "4", "--seed", "3", "--pop", "10",
            "--emit", "summary,pvalues", "--out", "o",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/summary.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# per-run seed = base_seed + run_index"));
    assert_eq!(lines.next().unwrap(), "function,ba_mean,ba_std,mba_mean,mba_std,p_value,label");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), ["F1:5", "F9:5", "F16"]);
    for r in &rows {
        let ba: f64 = r[1].parse().unwrap();
        let mba: f64 = r[3].parse().unwrap();
        let p: f64 = r[5].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(r[6], significance_label(mba, ba).to_string());
    }

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/summary.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    assert_eq!(json["base_seed"], 3);
    assert!(dir.path().join("o/pvalues.csv").exists());
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_batopt"))
        .args(["run", "--fn", "F2:3", "--algo", "BA", "--iters", "5", "--runs", "2", "--emit", "history"])
        .current_dir(dir.path())
        .env("BATOPT_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    let history = fs::read_to_string(target.join("history/F2_d3_BA_seed1.csv")).unwrap();
    assert_eq!(history.lines().count(), 6);
    assert!(history.starts_with("t,best_fitness,div\n1,"));
}

#[test]
fn assign_reports_oracle_and_handle_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = batopt(&["assign", "--algo", "MBA", "--pop", "30", "--iters", "1000", "--out", "a"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("oracle total:   1163 s"), "{text}");
    assert!(text.contains("achieved total: 1163 s"), "{text}");
    assert!(text.contains("290.75 s per call"), "{text}");
    let csv = fs::read_to_string(dir.path().join("a/assignment.csv")).unwrap();
    assert!(csv.ends_with("total,,1163\n"));
    assert!(dir.path().join("a/assign_history_MBA_seed0.csv").exists());
}

#[test]
fn assign_rejects_malformed_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("negative.csv", ",a,b,c\nx,1,2,3\ny,4,-5,6\nz,7,8,9\n"),
        ("ragged.csv", ",a,b\nx,1,2\ny,3\n"),
        ("text.csv", ",a,b\nx,1,two\ny,3,4\n"),
        ("wide.csv", ",a,b,c\nx,1,2,3\ny,4,5,6\n"),
    ];
    for (name, body) in cases {
        fs::write(dir.path().join(name), body).unwrap();
        let out = batopt(&["assign", name, "--iters", "5"], dir.path());
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    assert_eq!(batopt(&["assign", "missing.csv"], dir.path()).status.code(), Some(2));
}

#[test]
fn single_cell_matrix_has_no_gap() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("one.csv"), ",Agent\nCaller,5\n").unwrap();
    let out = batopt(&["assign", "one.csv", "--iters", "1", "--out", "o"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("(gap 0 s)"));
}

#[test]
fn wilcoxon_reads_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("w.csv"), "mba,ba\n1,4\n2,5\n3,6\n").unwrap();
    let out = batopt(&["wilcoxon", "w.csv"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.1");

    fs::write(dir.path().join("uneven.csv"), "1,10\n2,11\n3,12\n,13\n").unwrap();
    let p: f64 = stdout(&batopt(&["wilcoxon", "uneven.csv"], dir.path())).trim().parse().unwrap();
    assert!((p - 2.0 / 35.0).abs() < 1e-15, "{p}");

    fs::write(dir.path().join("bad.csv"), "1,2\n3,x\n").unwrap();
    assert_eq!(batopt(&["wilcoxon", "bad.csv"], dir.path()).status.code(), Some(2));
}

use std::fs;
use std::process::Command;

use nonherm_core::cli::run_with_io;
use nonherm_core::output::{OutputTable, STANDARD_COLUMNS};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with_io(std::iter::once("nonherm").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn list_names_every_builtin() {
    let (code, out, _) = cli(&["list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 8);
    assert!(out.lines().next().unwrap().starts_with("fig1: "));
    let (code, out, _) = cli(&["list", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(cli(&["list", "bogus"]).0, 2);
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(cli(&["run"]).0, 2);
    assert_eq!(cli(&["run", "--scenario", "fig2", "--config", "x.toml"]).0, 2);
    assert_eq!(cli(&["run", "--scenario", "nope"]).0, 2);
    assert_eq!(cli(&["run", "--scenario", "fig2", "--steps", "10"]).0, 2);
    assert_eq!(cli(&["run", "--scenario", "fig2", "--format", "xml"]).0, 2);
    assert_eq!(cli(&["check", "--filter", "no-such-check"]).0, 2);
    assert_eq!(cli(&["sweep", "--scenario", "fig2", "--param", "colour", "--values", "1"]).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[scenario]\nname = \"x\"\n[path]\nw0 = 1.0\n").unwrap();
    let (code, _, err) = cli(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    fs::write(&bad, "[scenario]\nname = \"x\"\nbase = \"fig2\"\n[path]\nsigma = -1.0\n").unwrap();
    assert_eq!(cli(&["run", "--config", bad.to_str().unwrap()]).0, 2);
    assert_eq!(cli(&["run", "--config", "/nonexistent/x.toml"]).0, 2);
}

#[test]
fn help_and_version_exit_0() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["run", "list", "sweep", "check"] {
        assert!(out.contains(sub));
    }
    assert_eq!(cli(&["--version"]).0, 0);
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ep.toml");
    // A pulse that drives w and z through the exceptional point w = 0, z = 0.
    fs::write(
        &cfg,
        "[scenario]\nname = \"through-ep\"\n[path]\nkind = \"custom_table\"\ntable = \"t.csv\"\nT = 10\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("t.csv"),
        "s,re_w,im_w,re_z,im_z\n0,1,0,0.5,0\n0.5,0,0,0,0\n1,1,0,0.5,0\n",
    )
    .unwrap();
    let (code, _, err) = cli(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("EP_DEGENERATE"), "{err}");
}

#[test]
fn csv_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let (code, stdout, err) = cli(&["run", "--scenario", "fig2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.is_empty());
    assert!(err.contains("FALSE_INVERSION"));

    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let header: Vec<_> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header, STANDARD_COLUMNS);
    assert_eq!(text.lines().count(), 10_002);
    // e is undefined only for non-symmetric paths; fig2 has real w.
    assert!(!text.lines().nth(1).unwrap().contains("nan"));

    let table = OutputTable::read_csv(text.as_bytes()).unwrap();
    assert_eq!(table.to_csv_string(), text);
    let s = table.column("s").unwrap();
    assert_eq!(s[0], 0.0);
    assert_eq!(*s.last().unwrap(), 1.0);
}

#[test]
fn non_symmetric_run_writes_nan_for_e() {
    let (code, out, _) = cli(&["run", "--scenario", "fig7", "--steps", "2000"]);
    assert_eq!(code, 0);
    let row = out.lines().nth(1).unwrap();
    let cells: Vec<_> = row.split(',').collect();
    let idx = STANDARD_COLUMNS.iter().position(|c| *c == "abs_e1").unwrap();
    assert_eq!(cells[idx], "nan");
    assert_eq!(cells[idx + 1], "nan");
}

#[test]
fn doubling_steps_changes_final_d_below_1e6() {
    let final_d = |steps: &str| {
        let (code, out, _) = cli(&["run", "--scenario", "fig2", "--steps", steps]);
        assert_eq!(code, 0);
        let table = OutputTable::read_csv(out.as_bytes()).unwrap();
        [table.column("abs_d1").unwrap(), table.column("abs_d2").unwrap()].map(|c| *c.last().unwrap())
    };
    let coarse = final_d("10000");
    let fine = final_d("20000");
    for a in 0..2 {
        assert!((coarse[a] - fine[a]).abs() < 1e-6, "{coarse:?} vs {fine:?}");
    }
}

#[test]
fn runs_are_bitwise_deterministic() {
    let a = cli(&["run", "--scenario", "fig5", "--steps", "3000"]);
    let b = cli(&["run", "--scenario", "fig5", "--steps", "3000"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn json_run_carries_summary_and_columns() {
    let (code, out, _) = cli(&["run", "--scenario", "fig5", "--steps", "2000", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["flip"], "ADIABATIC_FLIP");
    assert!(v.to_string().contains("abs_d1"));
}

#[test]
fn config_file_inherits_from_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    fs::write(&cfg, "[scenario]\nname = \"short\"\nbase = \"fig2\"\n[numerics]\nsteps = 2000\n").unwrap();
    let (code, out, err) = cli(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 2002);
    assert!(err.starts_with("short: 2000 steps"));
}

#[test]
fn sweep_reports_one_row_per_value() {
    let (code, out, err) = cli(&["sweep", "--scenario", "fig2", "--param", "gamma", "--values", "0.05,0.1,0.2"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("gamma,") && lines[2].contains("FALSE_INVERSION"));
}

#[test]
fn check_passes_and_filters() {
    let (code, out, _) = cli(&["check"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 9);
    assert!(out.lines().all(|l| l.starts_with("PASS ")));
    let (code, out, _) = cli(&["check", "--filter", "holonomy", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["name"], "holonomy_exchange");
}

#[test]
fn binary_exit_codes_and_logging() {
    let bin = env!("CARGO_BIN_EXE_nonherm");
    let ok = Command::new(bin).arg("list").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["run", "--scenario", "nope"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let verbose = Command::new(bin)
        .args(["run", "--scenario", "fig1", "--steps", "1000"])
        .env("NONHERM_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(verbose.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&verbose.stderr).contains("INFO"));
}

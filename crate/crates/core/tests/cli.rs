use std::fs;
use std::process::Command;

use mmwave_ent::scenario::{run, ScenarioKind, SweepSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmwave-ent"))
}

#[test]
fn fig2_writes_csv_with_units_and_footer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let status = bin()
        .args(["fig2", "--points", "11", "--freq-ghz", "30,300", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "freq_ghz,temp_k,tau,nbar,omega,e_ln_bits,tau_eb"
    );
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 2 * 11
    );
    assert!(text.contains("# tau_eb at 300 GHz = 0.953141"));
}

#[test]
fn reruns_and_config_round_trip_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SweepSpec::default_for(ScenarioKind::Fig4Relay);
    spec.axis.steps = 17;
    spec.frequencies_ghz = vec![15.0, 300.0];
    let cfg = dir.path().join("sweep.ini");
    fs::write(&cfg, spec.to_ini_string()).unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = bin()
            .arg("fig4")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let in_process = run(&spec).unwrap().to_csv_string().unwrap();
    assert_eq!(outputs[0], in_process.into_bytes());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    fs::write(&cfg, "[fig2-channel]\npoints = 1\n").unwrap();
    let out = bin()
        .arg("fig2")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 2 steps"));
    let out = bin()
        .args(["link-budget", "--freq-ghz", "15"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args([
            "fig3",
            "--absorption-table",
            "/nonexistent/table.txt",
            "--points",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "fig3 ignores the absorption table"
    );
    let out = bin()
        .args([
            "eb-thresholds",
            "--absorption-table",
            "/nonexistent/table.txt",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_with_3_and_keeps_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.ini");
    fs::write(
        &cfg,
        "[fig3]\naxis_min = 0.98\npoints = 2\ncutoff = 4\nmax_cutoff = 8\ntol = 1e-15\n",
    )
    .unwrap();
    let out_csv = dir.path().join("fig3.csv");
    let out = bin()
        .arg("fig3")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let text = fs::read_to_string(&out_csv).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",false,")));
    assert!(text.contains("# non-converged rows = 2"));
}

#[test]
fn custom_absorption_table_reaches_lower_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("alpha.txt");
    fs::write(&table, "# GHz dB/km\n10 0.01\n300 2.0\n").unwrap();
    let out = bin()
        .args(["eb-thresholds", "--freq-ghz", "15", "--absorption-table"])
        .arg(&table)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let single = text.lines().find(|l| l.contains(",single,")).unwrap();
    assert!(!single.ends_with(','), "{single}");
}

#[test]
fn link_budget_prints_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("lb.csv");
    let out = bin()
        .arg("link-budget")
        .arg("--out")
        .arg(&out_csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("300.0 GHz, 300.0 K, 200.0 m hop"));
    assert!(report.contains("(BEYOND)"));
}

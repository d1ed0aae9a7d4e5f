use std::fs;

use wavekin::commands::{cmd_converge, cmd_oracle, cmd_run, cmd_sweep, manifest_for, oracle_check};
use wavekin::config::{parse_config, SweepAxis};
use wavekin::oracle::max_relative_deviation;
use wavekin::SimConfig;

fn rows(path: &std::path::Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|x| x.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn run_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let m = manifest_for(SimConfig::test_case_1(), dir.path());
    cmd_run(&m).unwrap();
    let ts = rows(&dir.path().join("timeseries.csv"));
    assert_eq!(ts.len(), 301);
    assert_eq!(ts[0][0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(ts[300][0].parse::<f64>().unwrap(), 30.0);
    let header = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert!(header.starts_with("t,mass,energy,m3,negativity_events\n"));
}

#[test]
fn zero_end_time_gives_single_row_and_snapshot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sim = SimConfig {
        t_end: 0.0,
        snapshot_times: vec![0.0],
        ..SimConfig::test_case_1()
    };
    let files = cmd_run(&manifest_for(sim, dir.path())).unwrap();
    assert_eq!(files.len(), 2);
    assert_eq!(rows(&dir.path().join("timeseries.csv")).len(), 1);
    let snap = dir.path().join("density_0.0000.csv");
    let text = fs::read_to_string(&snap).unwrap();
    assert!(text.starts_with("omega,f,N\n"));
    assert_eq!(rows(&snap).len(), 30);
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sim = SimConfig {
        t_end: 2.0,
        snapshot_times: vec![1.0, 2.0],
        ..SimConfig::test_case_2()
    };
    cmd_run(&manifest_for(sim.clone(), a.path())).unwrap();
    cmd_run(&manifest_for(sim, b.path())).unwrap();
    for name in ["timeseries.csv", "density_1.0000.csv", "density_2.0000.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn zero_strength_energy_column_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let m = parse_config(&format!(
        "c1 = 0\nc2 = 0\nt_end = 1\nout = {}\n",
        dir.path().display()
    ))
    .unwrap();
    cmd_run(&m).unwrap();
    let ts = rows(&dir.path().join("timeseries.csv"));
    assert!(ts.iter().all(|r| r[2] == ts[0][2]));
}

#[test]
fn sweep_writes_member_files_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "t_end = 1\nsweep = c1c2\nsweep_tuples = 1,1; 1,0; 0,1\nout = {}\n",
        dir.path().display()
    );
    let m = parse_config(&text).unwrap();
    let out = cmd_sweep(&m).unwrap();
    assert_eq!(out.len(), 3);
    let summary = rows(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), 3);
    let series = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            let name = e.as_ref().unwrap().file_name().into_string().unwrap();
            name.ends_with("_timeseries.csv")
        })
        .count();
    assert_eq!(series, 3);
    assert!(dir.path().join("c1_1.0_c2_0.0_timeseries.csv").exists());
}

#[test]
fn single_member_sweep_reproduces_run() {
    let sweep_dir = tempfile::tempdir().unwrap();
    let run_dir = tempfile::tempdir().unwrap();
    let mut m = manifest_for(
        SimConfig {
            t_end: 1.0,
            ..SimConfig::test_case_1()
        },
        sweep_dir.path(),
    );
    m.sweep = SweepAxis::C1C2;
    m.tuples = vec![(1.0, 1.0)];
    cmd_sweep(&m).unwrap();
    m.out_dir = run_dir.path().to_path_buf();
    cmd_run(&m).unwrap();
    assert_eq!(
        fs::read(sweep_dir.path().join("c1_1.0_c2_1.0_timeseries.csv")).unwrap(),
        fs::read(run_dir.path().join("timeseries.csv")).unwrap()
    );
}

#[test]
fn zero_tuple_is_flagged_constant() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = manifest_for(
        SimConfig {
            t_end: 1.0,
            ..SimConfig::test_case_1()
        },
        dir.path(),
    );
    m.sweep = SweepAxis::C1C2;
    m.tuples = vec![(0.0, 0.0), (1.0, 1.0)];
    let out = cmd_sweep(&m).unwrap();
    assert!(out[0].constant_energy);
    assert!(!out[1].constant_energy);
    let summary = rows(&dir.path().join("summary.csv"));
    assert_eq!(summary[0][7], "true");
}

#[test]
fn sweep_without_axis_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(cmd_sweep(&manifest_for(SimConfig::default(), dir.path())).is_err());
}

#[test]
fn converge_two_levels_reports_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = manifest_for(SimConfig::test_case_1(), dir.path());
    m.levels = vec![16, 32];
    let table = cmd_converge(&m).unwrap();
    let order = table[1].1.unwrap();
    assert!((0.7..=1.4).contains(&order), "{order}");
    let csv_rows = rows(&dir.path().join("convergence.csv"));
    assert_eq!(csv_rows.len(), 2);
    assert_eq!(csv_rows[0][3], "");
    assert!(!csv_rows[1][3].is_empty());
}

#[test]
fn converge_without_interactions_has_no_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut sim = SimConfig::test_case_1();
    sim.params.c1 = 0.0;
    sim.params.c2 = 0.0;
    let mut m = manifest_for(sim, dir.path());
    m.levels = vec![8, 16];
    let table = cmd_converge(&m).unwrap();
    assert!(table.iter().all(|(lv, o)| lv.eps_l1 == 0.0 && o.is_none()));
    assert!(rows(&dir.path().join("convergence.csv"))
        .iter()
        .all(|r| r[3].is_empty()));
    m.levels = vec![8];
    assert!(cmd_converge(&m).is_err());
}

#[test]
fn oracle_passes_and_catches_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let m = manifest_for(SimConfig::default(), dir.path());
    let report = cmd_oracle(&m, 100, 8).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(rows(&dir.path().join("oracle.csv")).len(), 100);
    assert!(!oracle_check(&m, 20, 8, 1e-6).unwrap().pass);
    assert!(cmd_oracle(&m, 1, 21).is_err());
    assert_eq!(max_relative_deviation(&[0.0; 4], &[0.0; 4]), 0.0);
}

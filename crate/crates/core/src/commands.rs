//! Drivers behind the `wavekin` subcommands and their CSV output.
//!
//! All floating-point fields are written in scientific notation with 17
//! significant digits and a `.` decimal separator, so identical runs produce
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::collision::CollisionOperator;
use crate::config::{RunManifest, SweepAxis};
use crate::consistency::{
    consistency_study, observed_orders, ConsistencyLevel, ReferenceQuadrature,
};
use crate::error::{Error, Result};
use crate::kernels::{Dispersion, KernelParams, Kernels};
use crate::mesh::Grid;
use crate::oracle::{brute_force_rhs, max_relative_deviation};
use crate::simulation::{run, ObservableSeries, RunOutput, SimConfig, Snapshot};

/// Oracle comparisons pass below this componentwise relative deviation.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

pub fn write_timeseries(path: &Path, s: &ObservableSeries) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "mass", "energy", "m3", "negativity_events"])?;
    for k in 0..s.len() {
        w.write_record([
            fmt_f64(s.times[k]),
            fmt_f64(s.mass[k]),
            fmt_f64(s.energy[k]),
            fmt_f64(s.m3[k]),
            s.negativity_events[k].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["omega", "f", "N"])?;
    for i in 0..snap.omega.len() {
        w.write_record([
            fmt_f64(snap.omega[i]),
            fmt_f64(snap.density[i]),
            fmt_f64(snap.mass[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn snapshot_file_name(time: f64) -> String {
    format!("density_{time:.4}.csv")
}

fn write_run(dir: &Path, prefix: &str, out: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let ts = dir.join(format!("{prefix}timeseries.csv"));
    write_timeseries(&ts, &out.series)?;
    files.push(ts);
    for snap in &out.snapshots {
        let p = dir.join(format!("{prefix}{}", snapshot_file_name(snap.time)));
        write_snapshot(&p, snap)?;
        files.push(p);
    }
    Ok(files)
}

/// Single run; writes `timeseries.csv` and one `density_<t>.csv` per
/// snapshot time into the output directory.
pub fn cmd_run(manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let out = run(&manifest.sim)?;
    let files = write_run(&manifest.out_dir, "", &out)?;
    info!(
        "run finished: {} steps, E(0) = {}, E(T) = {}",
        out.series.len() - 1,
        out.series.energy[0],
        out.series.energy[out.series.len() - 1]
    );
    Ok(files)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub slug: String,
    pub a: f64,
    pub b: f64,
    pub e0: f64,
    pub e_end: f64,
    pub m3_0: f64,
    pub m3_end: f64,
    pub constant_energy: bool,
}

/// One run per sweep tuple, each writing `<slug>_timeseries.csv` (and its
/// snapshots), then `summary.csv`. Members run on the rayon pool. Failed
/// tuples are reported after the summary of the successful ones is written.
pub fn cmd_sweep(manifest: &RunManifest) -> Result<Vec<SweepRow>> {
    if manifest.sweep == SweepAxis::None || manifest.tuples.is_empty() {
        return Err(Error::Precondition(
            "sweep needs `sweep` and at least one tuple".into(),
        ));
    }
    fs::create_dir_all(&manifest.out_dir)?;
    let results: Vec<(String, (f64, f64), Result<SweepRow>)> = manifest
        .tuples
        .par_iter()
        .map(|&tuple| {
            let slug = manifest.sweep.slug(tuple);
            let config = manifest.sweep.apply(&manifest.sim, tuple);
            let r = run(&config).and_then(|out| {
                write_run(&manifest.out_dir, &format!("{slug}_"), &out)?;
                let s = &out.series;
                let last = s.len() - 1;
                Ok(SweepRow {
                    slug: slug.clone(),
                    a: tuple.0,
                    b: tuple.1,
                    e0: s.energy[0],
                    e_end: s.energy[last],
                    m3_0: s.m3[0],
                    m3_end: s.m3[last],
                    constant_energy: s.energy.iter().all(|&e| e == s.energy[0]),
                })
            });
            (slug, tuple, r)
        })
        .collect();

    let (a_name, b_name) = match manifest.sweep {
        SweepAxis::SigmaGamma => ("sigma", "gamma"),
        _ => ("c1", "c2"),
    };
    let mut w = writer(&manifest.out_dir.join("summary.csv"))?;
    w.write_record([
        "tuple",
        a_name,
        b_name,
        "E0",
        "ET",
        "M3_0",
        "M3_T",
        "constant_energy",
    ])?;
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (slug, _, r) in results {
        match r {
            Ok(row) => {
                w.write_record([
                    row.slug.clone(),
                    fmt_f64(row.a),
                    fmt_f64(row.b),
                    fmt_f64(row.e0),
                    fmt_f64(row.e_end),
                    fmt_f64(row.m3_0),
                    fmt_f64(row.m3_end),
                    row.constant_energy.to_string(),
                ])?;
                rows.push(row);
            }
            Err(e) => failed.push(format!("{slug}: {e}")),
        }
    }
    w.flush()?;
    if !failed.is_empty() {
        return Err(Error::Precondition(format!(
            "{} sweep member(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )));
    }
    Ok(rows)
}

/// Consistency study over `manifest.levels`; writes `convergence.csv` with
/// columns `cells, delta_omega, eps_l1, observed_order` (empty order on the
/// first row and wherever it is undefined).
pub fn cmd_converge(manifest: &RunManifest) -> Result<Vec<(ConsistencyLevel, Option<f64>)>> {
    converge_with(manifest, &ReferenceQuadrature::default())
}

pub fn converge_with(
    manifest: &RunManifest,
    quad: &ReferenceQuadrature,
) -> Result<Vec<(ConsistencyLevel, Option<f64>)>> {
    if manifest.levels.len() < 2 {
        return Err(Error::Precondition(
            "need at least two refinement levels".into(),
        ));
    }
    let sim = &manifest.sim;
    let kernels = sim.kernels()?;
    let ic = sim.ic.clone();
    let density = |w: f64| ic.density(w);
    let levels = consistency_study(
        &density,
        &|g: &Grid| ic.project(g),
        &kernels,
        sim.omega_min,
        sim.omega_max,
        &manifest.levels,
        quad,
    )?;
    let orders = observed_orders(&levels);

    fs::create_dir_all(&manifest.out_dir)?;
    let mut w = writer(&manifest.out_dir.join("convergence.csv"))?;
    w.write_record(["cells", "delta_omega", "eps_l1", "observed_order"])?;
    let mut table = Vec::new();
    for (k, lv) in levels.iter().enumerate() {
        let order = if k == 0 { None } else { orders[k - 1] };
        w.write_record([
            lv.cells.to_string(),
            fmt_f64(lv.delta_omega),
            fmt_f64(lv.eps_l1),
            order.map(fmt_f64).unwrap_or_default(),
        ])?;
        table.push((*lv, order));
    }
    w.flush()?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub trials: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compares the table-driven operator with the exhaustive one on random
/// grids, parameters and states; writes `oracle.csv` with one row per trial.
pub fn cmd_oracle(manifest: &RunManifest, trials: usize, max_cells: usize) -> Result<OracleReport> {
    oracle_check(manifest, trials, max_cells, 0.0)
}

/// [`cmd_oracle`] with `K4` scaled by `1 + perturbation` in the table-driven
/// path only.
#[doc(hidden)]
pub fn oracle_check(
    manifest: &RunManifest,
    trials: usize,
    max_cells: usize,
    perturbation: f64,
) -> Result<OracleReport> {
    if !(2..=20).contains(&max_cells) {
        return Err(Error::Precondition(format!(
            "max_cells must lie in 2..=20, got {max_cells}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(manifest.seed);
    let choice = |rng: &mut ChaCha8Rng, xs: &[f64]| xs[rng.gen_range(0..xs.len())];
    fs::create_dir_all(&manifest.out_dir)?;
    let mut w = writer(&manifest.out_dir.join("oracle.csv"))?;
    w.write_record([
        "trial",
        "cells",
        "rho",
        "sigma",
        "gamma",
        "c1",
        "c2",
        "max_rel_dev",
    ])?;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let cells = rng.gen_range(2..=max_cells);
        let rho = choice(&mut rng, &[1.0, 2.0, 3.0]);
        let params = KernelParams {
            c1: choice(&mut rng, &[0.0, 0.5, 1.0]),
            c2: choice(&mut rng, &[0.0, 0.5, 1.0]),
            sigma: choice(&mut rng, &[0.0, 0.5, 1.0]),
            gamma: choice(&mut rng, &[0.0, 0.5, 1.0]),
        };
        let grid = Grid::uniform(manifest.sim.omega_min, manifest.sim.omega_max, cells)?;
        let op = CollisionOperator::new(grid, Kernels::new(Dispersion::new(rho)?, params))
            .with_k4_perturbation(perturbation);
        let n: Vec<f64> = (0..cells).map(|_| rng.gen::<f64>()).collect();
        let dev = max_relative_deviation(&op.rhs(&n)?, &brute_force_rhs(&op, &n)?);
        worst = worst.max(dev);
        w.write_record([
            t.to_string(),
            cells.to_string(),
            fmt_f64(rho),
            fmt_f64(params.sigma),
            fmt_f64(params.gamma),
            fmt_f64(params.c1),
            fmt_f64(params.c2),
            fmt_f64(dev),
        ])?;
    }
    w.flush()?;
    Ok(OracleReport {
        trials,
        max_deviation: worst,
        pass: worst < ORACLE_TOLERANCE,
    })
}

/// Convenience for callers that already hold a [`SimConfig`].
pub fn manifest_for(sim: SimConfig, out_dir: impl Into<PathBuf>) -> RunManifest {
    RunManifest {
        sim,
        out_dir: out_dir.into(),
        ..RunManifest::default()
    }
}

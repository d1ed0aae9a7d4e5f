//! Command-line front end: `wavekin run | sweep | converge | oracle`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{error, info};

use wavekin::commands::{cmd_converge, cmd_oracle, cmd_run, cmd_sweep};
use wavekin::config::{parse_config, RunManifest};

#[derive(Parser, Debug)]
#[command(
    name = "wavekin",
    version,
    about = "Finite-volume solver for the mixed 3/4-wave kinetic equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single time integration; writes timeseries.csv and density snapshots.
    Run(Common),
    /// One run per parameter tuple plus summary.csv.
    Sweep(Common),
    /// Consistency study over the configured refinement levels.
    Converge(Common),
    /// Compare the table-driven operator with exhaustive evaluation.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Number of random trials (overrides `trials` in the config).
        #[arg(long)]
        trials: Option<usize>,
        /// Largest cell count drawn per trial, at most 20.
        #[arg(long)]
        max_cells: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Key-value configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the random generator used by randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "WAVEKIN_THREADS")]
    threads: Option<usize>,
    /// Force the sequential, bit-reproducible operator evaluation.
    #[arg(long)]
    deterministic: bool,
}

impl Common {
    fn manifest(&self) -> anyhow::Result<RunManifest> {
        let mut m = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                parse_config(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunManifest::default(),
        };
        if let Some(out) = &self.out {
            m.out_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            m.seed = seed;
        }
        if let Some(t) = self.threads {
            if t == 0 {
                bail!("--threads must be at least 1");
            }
            m.sim.threads = t;
        }
        if self.deterministic {
            m.sim.deterministic = true;
        }
        Ok(m)
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let common = match &cli.command {
        Command::Run(c) | Command::Sweep(c) | Command::Converge(c) => c,
        Command::Oracle { common, .. } => common,
    };
    let manifest = common.manifest()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.sim.threads)
        .build()
        .context("building thread pool")?;

    pool.install(|| match &cli.command {
        Command::Run(_) => {
            let files = cmd_run(&manifest)?;
            info!(
                "wrote {} files to {}",
                files.len(),
                manifest.out_dir.display()
            );
            Ok(())
        }
        Command::Sweep(_) => {
            let rows = cmd_sweep(&manifest)?;
            info!(
                "sweep of {} members written to {}",
                rows.len(),
                manifest.out_dir.display()
            );
            Ok(())
        }
        Command::Converge(_) => {
            let table = cmd_converge(&manifest)?;
            for (lv, order) in table {
                println!(
                    "cells={} delta_omega={:.6e} eps_l1={:.6e} order={}",
                    lv.cells,
                    lv.delta_omega,
                    lv.eps_l1,
                    order.map(|o| format!("{o:.4}")).unwrap_or_default()
                );
            }
            Ok(())
        }
        Command::Oracle {
            trials, max_cells, ..
        } => {
            let report = cmd_oracle(
                &manifest,
                trials.unwrap_or(manifest.trials),
                max_cells.unwrap_or(manifest.max_cells),
            )?;
            println!(
                "oracle: {} trials, max relative deviation {:e}: {}",
                report.trials,
                report.max_deviation,
                if report.pass { "pass" } else { "FAIL" }
            );
            if !report.pass {
                bail!("oracle deviation above tolerance");
            }
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}

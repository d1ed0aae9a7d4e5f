//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unset keys take the defaults of [`SimConfig::default`] (test case I).
//!
//! ```text
//! # test case III
//! ic = monodisperse
//! omega_max = 2
//! cells = 20
//! sweep = c1c2
//! sweep_tuples = 1,1; 1,0; 0,1
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::simulation::{InitialCondition, Integrator, SimConfig};

/// Parameter pairs varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepAxis {
    #[default]
    None,
    /// `(c1, c2)` pairs.
    C1C2,
    /// `(sigma, gamma)` pairs.
    SigmaGamma,
}

impl SweepAxis {
    pub fn default_tuples(&self) -> Vec<(f64, f64)> {
        match self {
            Self::None => Vec::new(),
            Self::C1C2 => vec![(1.0, 1.0), (1.0, 0.5), (0.5, 1.0), (1.0, 0.0), (0.0, 1.0)],
            Self::SigmaGamma => vec![(0.0, 0.0), (0.25, 0.25), (0.5, 0.5), (1.0, 1.0)],
        }
    }

    pub fn slug(&self, (a, b): (f64, f64)) -> String {
        match self {
            Self::None => "run".to_string(),
            Self::C1C2 => format!("c1_{a:?}_c2_{b:?}"),
            Self::SigmaGamma => format!("sigma_{a:?}_gamma_{b:?}"),
        }
    }

    /// `base` with the pair applied.
    pub fn apply(&self, base: &SimConfig, (a, b): (f64, f64)) -> SimConfig {
        let mut c = base.clone();
        match self {
            Self::None => {}
            Self::C1C2 => {
                c.params.c1 = a;
                c.params.c2 = b;
            }
            Self::SigmaGamma => {
                c.params.sigma = a;
                c.params.gamma = b;
            }
        }
        c
    }
}

/// Everything a CLI command needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub sim: SimConfig,
    pub out_dir: PathBuf,
    pub sweep: SweepAxis,
    pub tuples: Vec<(f64, f64)>,
    /// Seed of the ChaCha8 generator used by randomized checks.
    pub seed: u64,
    /// Cell counts of the consistency study.
    pub levels: Vec<usize>,
    pub trials: usize,
    pub max_cells: usize,
}

impl Default for RunManifest {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            out_dir: PathBuf::from("out"),
            sweep: SweepAxis::None,
            tuples: Vec::new(),
            seed: 42,
            levels: vec![16, 32, 64],
            trials: 100,
            max_cells: 12,
        }
    }
}

fn err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn number<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| {
        err(
            line,
            key,
            format!("cannot parse `{v}` as {}", std::any::type_name::<T>()),
        )
    })
}

fn finite(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = number(line, key, v)?;
    if !x.is_finite() {
        return Err(err(line, key, "must be finite"));
    }
    Ok(x)
}

fn non_negative(line: usize, key: &str, v: &str) -> Result<f64> {
    let x = finite(line, key, v)?;
    if x < 0.0 {
        return Err(err(line, key, format!("must be >= 0, got {x}")));
    }
    Ok(x)
}

fn positive(line: usize, key: &str, v: &str) -> Result<f64> {
    let x = finite(line, key, v)?;
    if x <= 0.0 {
        return Err(err(line, key, format!("must be > 0, got {x}")));
    }
    Ok(x)
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, key, format!("expected true or false, got `{v}`"))),
    }
}

fn list<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(line, key, s))
        .collect()
}

fn pairs(line: usize, key: &str, v: &str, sep: char) -> Result<Vec<(f64, f64)>> {
    v.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (a, b) = s
                .split_once(sep)
                .ok_or_else(|| err(line, key, format!("expected `a{sep}b`, got `{s}`")))?;
            Ok((finite(line, key, a.trim())?, finite(line, key, b.trim())?))
        })
        .collect()
}

/// Parses a configuration document.
pub fn parse_config(text: &str) -> Result<RunManifest> {
    let mut m = RunManifest::default();
    let mut seen: Vec<(String, usize)> = Vec::new();
    let mut ic_name: Option<(String, usize)> = None;
    let mut ic_table: Option<(Vec<(f64, f64)>, usize)> = None;
    let mut tuples: Option<(Vec<(f64, f64)>, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, content, "expected `key = value`"))?;
        let (key, v) = (key.trim(), value.trim());
        if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
            return Err(err(
                line,
                key,
                format!("duplicate key, first set on line {first}"),
            ));
        }
        seen.push((key.to_string(), line));

        let s = &mut m.sim;
        match key {
            "rho" => {
                let x = finite(line, key, v)?;
                if x < 1.0 {
                    return Err(err(line, key, format!("must be >= 1, got {x}")));
                }
                s.rho = x;
            }
            "sigma" => s.params.sigma = non_negative(line, key, v)?,
            "gamma" => s.params.gamma = non_negative(line, key, v)?,
            "c1" => s.params.c1 = non_negative(line, key, v)?,
            "c2" => s.params.c2 = non_negative(line, key, v)?,
            "omega_min" => s.omega_min = positive(line, key, v)?,
            "omega_max" => s.omega_max = positive(line, key, v)?,
            "cells" => {
                s.cells = number(line, key, v)?;
                if s.cells < 2 {
                    return Err(err(line, key, "need at least 2 cells"));
                }
            }
            "dt" => s.dt = positive(line, key, v)?,
            "t_end" => s.t_end = non_negative(line, key, v)?,
            "ic" => ic_name = Some((v.to_string(), line)),
            "ic_table" => ic_table = Some((pairs(line, key, v, ':')?, line)),
            "integrator" => {
                s.integrator = match v {
                    "euler" => Integrator::Euler,
                    "rk4" => Integrator::Rk4,
                    _ => return Err(err(line, key, format!("expected euler or rk4, got `{v}`"))),
                }
            }
            "snapshot_times" => {
                s.snapshot_times = list(line, key, v)?;
                if s.snapshot_times.iter().any(|t: &f64| !(*t >= 0.0)) {
                    return Err(err(line, key, "snapshot times must be >= 0"));
                }
            }
            "deterministic" => s.deterministic = boolean(line, key, v)?,
            "negativity_clamp" => s.negativity_clamp = boolean(line, key, v)?,
            "threads" => s.threads = number(line, key, v)?,
            "sweep" => {
                m.sweep = match v {
                    "none" => SweepAxis::None,
                    "c1c2" | "c1c2-pairs" => SweepAxis::C1C2,
                    "sigma_gamma" | "sigma-gamma-pairs" => SweepAxis::SigmaGamma,
                    _ => {
                        return Err(err(
                            line,
                            key,
                            format!("expected none, c1c2 or sigma_gamma, got `{v}`"),
                        ))
                    }
                }
            }
            "sweep_tuples" => tuples = Some((pairs(line, key, v, ',')?, line)),
            "seed" => m.seed = number(line, key, v)?,
            "levels" => {
                m.levels = list(line, key, v)?;
                if m.levels.iter().any(|&c| c < 2) {
                    return Err(err(line, key, "levels need at least 2 cells"));
                }
            }
            "trials" => m.trials = number(line, key, v)?,
            "max_cells" => {
                m.max_cells = number(line, key, v)?;
                if !(2..=20).contains(&m.max_cells) {
                    return Err(err(line, key, "must lie in 2..=20"));
                }
            }
            "out" => m.out_dir = PathBuf::from(v),
            _ => return Err(err(line, key, "unknown key")),
        }
    }

    let line_of = |key: &str| seen.iter().find(|(k, _)| k == key).map_or(0, |(_, l)| *l);

    if let Some((name, line)) = ic_name {
        m.sim.ic = match name.as_str() {
            "exp_decay" => InitialCondition::ExpDecay,
            "bump" => InitialCondition::Bump,
            "monodisperse" => InitialCondition::Monodisperse,
            "tabulated" => {
                let (table, _) = ic_table
                    .take()
                    .ok_or_else(|| err(line, "ic", "tabulated initial data needs `ic_table`"))?;
                tabulated(table, line_of("ic_table"))?
            }
            _ => {
                return Err(err(
                    line,
                    "ic",
                    format!("expected exp_decay, bump, monodisperse or tabulated, got `{name}`"),
                ))
            }
        };
    }
    if let Some((_, line)) = ic_table {
        if !matches!(m.sim.ic, InitialCondition::Tabulated(_)) {
            return Err(err(line, "ic_table", "only valid with `ic = tabulated`"));
        }
    }

    if m.sim.omega_max <= m.sim.omega_min {
        return Err(err(
            line_of("omega_max"),
            "omega_max",
            format!("must exceed omega_min = {}", m.sim.omega_min),
        ));
    }
    if let Some(&t) = m.sim.snapshot_times.iter().find(|&&t| t > m.sim.t_end) {
        return Err(err(
            line_of("snapshot_times"),
            "snapshot_times",
            format!("{t} lies beyond t_end = {}", m.sim.t_end),
        ));
    }

    m.tuples = match tuples {
        Some((t, line)) => {
            if m.sweep == SweepAxis::None {
                return Err(err(line, "sweep_tuples", "set `sweep` to use sweep tuples"));
            }
            if t.is_empty() {
                return Err(err(line, "sweep_tuples", "no tuples given"));
            }
            if t.iter().any(|&(a, b)| a < 0.0 || b < 0.0) {
                return Err(err(line, "sweep_tuples", "parameters must be >= 0"));
            }
            t
        }
        None => m.sweep.default_tuples(),
    };

    m.sim
        .validate()
        .map_err(|e| err(0, "config", e.to_string()))?;
    Ok(m)
}

fn tabulated(mut table: Vec<(f64, f64)>, line: usize) -> Result<InitialCondition> {
    if table.len() < 2 {
        return Err(err(line, "ic_table", "need at least two samples"));
    }
    if table.iter().any(|&(_, f)| f < 0.0) {
        return Err(err(line, "ic_table", "densities must be >= 0"));
    }
    table.sort_by(|a, b| a.0.total_cmp(&b.0));
    if table.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(err(line, "ic_table", "duplicate frequency"));
    }
    Ok(InitialCondition::Tabulated(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let m = parse_config("").unwrap();
        let s = &m.sim;
        assert_eq!(s.rho, 2.0);
        assert_eq!((s.params.sigma, s.params.gamma), (0.5, 0.5));
        assert_eq!((s.params.c1, s.params.c2), (1.0, 1.0));
        assert_eq!((s.omega_min, s.omega_max, s.cells), (1e-9, 10.0, 30));
        assert_eq!((s.dt, s.t_end), (0.1, 30.0));
        assert_eq!(s.ic, InitialCondition::ExpDecay);
        assert_eq!(s.integrator, Integrator::Euler);
        assert!(s.deterministic);
        assert!(!s.negativity_clamp);
        assert_eq!(m.sweep, SweepAxis::None);
    }

    #[test]
    fn test_case_three_setup() {
        let m = parse_config("ic = monodisperse\nomega_max = 2\ncells = 20\n").unwrap();
        assert_eq!(m.sim, SimConfig::test_case_3());
    }

    #[test]
    fn range_error_names_key_and_line() {
        match parse_config("# comment\ndt = -1\n") {
            Err(Error::Config { line, key, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(key, "dt");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_and_malformed_keys() {
        assert!(matches!(parse_config("foo = 1"), Err(Error::Config { .. })));
        assert!(matches!(
            parse_config("cells = many"),
            Err(Error::Config { .. })
        ));
        assert!(matches!(parse_config("cells"), Err(Error::Config { .. })));
        assert!(matches!(
            parse_config("c1 = 1\nc1 = 2"),
            Err(Error::Config { .. })
        ));
        assert!(parse_config("omega_max = 1e-10").is_err());
        assert!(parse_config("t_end = 1\nsnapshot_times = 0, 2").is_err());
        assert!(parse_config("sweep_tuples = 1,1").is_err());
    }

    #[test]
    fn sweeps_and_tables() {
        let m = parse_config("sweep = c1c2\nsweep_tuples = 1,1; 1,0 ;0,1").unwrap();
        assert_eq!(m.tuples, vec![(1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(m.sweep.slug((1.0, 0.5)), "c1_1.0_c2_0.5");
        let m = parse_config("sweep = sigma_gamma").unwrap();
        assert_eq!(m.tuples.len(), 4);
        let m = parse_config("ic = tabulated\nic_table = 0:0; 1:2; 2:0").unwrap();
        assert!(matches!(m.sim.ic, InitialCondition::Tabulated(ref t) if t.len() == 3));
        assert!(parse_config("ic = tabulated").is_err());
        assert!(parse_config("ic_table = 0:1; 1:1").is_err());
    }
}

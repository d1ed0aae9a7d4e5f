//! Initial data, time stepping and observables.

use std::fmt;

use log::warn;

use crate::collision::{l1_norm, CollisionOperator};
use crate::error::{Error, Result};
use crate::kernels::{Dispersion, KernelParams, Kernels};
use crate::mesh::Grid;

/// Simpson subintervals per cell used when projecting smooth initial data.
pub const PROJECTION_SUBINTERVALS: usize = 64;

/// `w e^{-w}`.
pub fn ic_exp_decay(omega: f64) -> f64 {
    omega * (-omega).exp()
}

/// Smooth bump `exp(5 / ((w - 5)^2 - 1))` supported on `|w - 5| < 1`.
pub fn ic_bump(omega: f64) -> f64 {
    let d2 = (omega - 5.0) * (omega - 5.0);
    if d2 < 1.0 {
        (5.0 / (d2 - 1.0)).exp()
    } else {
        0.0
    }
}

/// Indicator of `[0.5, 1.5]`.
pub fn ic_monodisperse(omega: f64) -> f64 {
    if (omega - 1.0).abs() <= 0.5 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    ExpDecay,
    Bump,
    Monodisperse,
    /// Piecewise-linear through `(omega, f)` samples sorted by `omega`,
    /// zero outside the sampled range.
    Tabulated(Vec<(f64, f64)>),
}

impl InitialCondition {
    pub fn density(&self, omega: f64) -> f64 {
        match self {
            Self::ExpDecay => ic_exp_decay(omega),
            Self::Bump => ic_bump(omega),
            Self::Monodisperse => ic_monodisperse(omega),
            Self::Tabulated(table) => interpolate(table, omega),
        }
    }

    /// Cell masses `N_i = integral of f over cell i`.
    pub fn project(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Self::Monodisperse => Ok(project_indicator(0.5, 1.5, 1.0, grid)),
            _ => project_initial_condition(|w| self.density(w), grid),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ExpDecay => "exp_decay",
            Self::Bump => "bump",
            Self::Monodisperse => "monodisperse",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

fn interpolate(table: &[(f64, f64)], omega: f64) -> f64 {
    let idx = table.partition_point(|&(w, _)| w <= omega);
    if idx == 0 || table.is_empty() {
        return 0.0;
    }
    if idx == table.len() {
        let (w, f) = table[idx - 1];
        return if omega == w { f } else { 0.0 };
    }
    let (w0, f0) = table[idx - 1];
    let (w1, f1) = table[idx];
    f0 + (f1 - f0) * (omega - w0) / (w1 - w0)
}

/// Cell integrals of `f` by composite Simpson with
/// [`PROJECTION_SUBINTERVALS`] subintervals per cell.
pub fn project_initial_condition(f: impl Fn(f64) -> f64, grid: &Grid) -> Result<Vec<f64>> {
    let m = PROJECTION_SUBINTERVALS;
    grid.edges()
        .windows(2)
        .map(|e| {
            let (a, b) = (e[0], e[1]);
            let h = (b - a) / m as f64;
            let mut acc = 0.0;
            for s in 0..=m {
                let x = if s == m { b } else { a + s as f64 * h };
                let v = f(x);
                if v < 0.0 || v.is_nan() {
                    return Err(Error::NegativeDensity { omega: x, value: v });
                }
                let weight = if s == 0 || s == m {
                    1.0
                } else if s % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += weight * v;
            }
            Ok(acc * h / 3.0)
        })
        .collect()
}

/// Exact cell integrals of `height` times the indicator of `[lo, hi]`.
pub fn project_indicator(lo: f64, hi: f64, height: f64, grid: &Grid) -> Vec<f64> {
    grid.edges()
        .windows(2)
        .map(|e| height * (hi.min(e[1]) - lo.max(e[0])).max(0.0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// `sum |k|^2 |k|' N_i`; not part of the classical moment pair, same
    /// measure weight as `energy` and `m3`.
    pub mass: f64,
    pub energy: f64,
    pub m3: f64,
}

pub fn observables(n: &[f64], grid: &Grid, disp: &Dispersion) -> Observables {
    let mut o = Observables {
        mass: 0.0,
        energy: 0.0,
        m3: 0.0,
    };
    for (&w, &ni) in grid.pivots().iter().zip(n) {
        let weighted = disp.measure(w) * ni;
        o.mass += weighted;
        o.energy += w * weighted;
        o.m3 += w * w * w * weighted;
    }
    o
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Euler,
    Rk4,
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Euler => "euler",
            Self::Rk4 => "rk4",
        })
    }
}

/// Advances `state` by one step of size `dt`. Returns the number of
/// negative components after the update; with `clamp` they are reset to zero.
pub fn step(
    op: &CollisionOperator,
    state: &mut [f64],
    dt: f64,
    method: Integrator,
    clamp: bool,
) -> Result<usize> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive",
        });
    }
    let n = state.len();
    match method {
        Integrator::Euler => {
            let r = op.rhs(state)?;
            for (s, ri) in state.iter_mut().zip(&r) {
                *s += dt * ri;
            }
        }
        Integrator::Rk4 => {
            let k1 = op.rhs(state)?;
            let stage = |k: &[f64], c: f64| -> Vec<f64> {
                state.iter().zip(k).map(|(s, ki)| s + c * dt * ki).collect()
            };
            let k2 = op.rhs(&stage(&k1, 0.5))?;
            let k3 = op.rhs(&stage(&k2, 0.5))?;
            let k4 = op.rhs(&stage(&k3, 1.0))?;
            for i in 0..n {
                state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    if let Some(cell) = state.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "time step",
            cell,
        });
    }
    let mut negative = 0;
    for s in state.iter_mut() {
        if *s < 0.0 {
            negative += 1;
            if clamp {
                *s = 0.0;
            }
        }
    }
    Ok(negative)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub rho: f64,
    pub params: KernelParams,
    pub omega_min: f64,
    pub omega_max: f64,
    pub cells: usize,
    pub dt: f64,
    pub t_end: f64,
    pub ic: InitialCondition,
    pub integrator: Integrator,
    pub snapshot_times: Vec<f64>,
    pub deterministic: bool,
    pub negativity_clamp: bool,
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            rho: 2.0,
            params: KernelParams {
                c1: 1.0,
                c2: 1.0,
                sigma: 0.5,
                gamma: 0.5,
            },
            omega_min: 1e-9,
            omega_max: 10.0,
            cells: 30,
            dt: 0.1,
            t_end: 30.0,
            ic: InitialCondition::ExpDecay,
            integrator: Integrator::Euler,
            snapshot_times: Vec::new(),
            deterministic: true,
            negativity_clamp: false,
            threads: 1,
        }
    }
}

impl SimConfig {
    /// Test case I: `w e^{-w}` on `[1e-9, 10]` with 30 cells.
    pub fn test_case_1() -> Self {
        Self::default()
    }

    /// Test case II: the smooth bump on the same domain as test case I.
    pub fn test_case_2() -> Self {
        Self {
            ic: InitialCondition::Bump,
            ..Self::default()
        }
    }

    /// Test case III: monodisperse data on `[1e-9, 2]` with 20 cells.
    pub fn test_case_3() -> Self {
        Self {
            ic: InitialCondition::Monodisperse,
            omega_max: 2.0,
            cells: 20,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        Dispersion::new(self.rho)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "must be positive",
            });
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: self.t_end,
                reason: "must be non-negative",
            });
        }
        if let Some(&t) = self
            .snapshot_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.t_end))
        {
            return Err(Error::InvalidParameter {
                name: "snapshot_times",
                value: t,
                reason: "snapshot times must lie in [0, t_end]",
            });
        }
        Grid::uniform(self.omega_min, self.omega_max, self.cells)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(self.omega_min, self.omega_max, self.cells)
    }

    pub fn kernels(&self) -> Result<Kernels> {
        self.params.validate()?;
        Ok(Kernels::new(Dispersion::new(self.rho)?, self.params))
    }

    pub fn operator(&self) -> Result<CollisionOperator> {
        Ok(CollisionOperator::new(self.grid()?, self.kernels()?)
            .with_parallel(!self.deterministic && self.threads > 1))
    }

    /// Number of fixed steps from 0 to `t_end`.
    pub fn steps(&self) -> usize {
        let s = self.t_end / self.dt;
        let r = s.round();
        if (s - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            s.ceil() as usize
        }
    }

    /// Time after `k` steps; the last step is shortened to land on `t_end`.
    pub fn time_at(&self, k: usize) -> f64 {
        if k >= self.steps() {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }
}

/// Per-step diagnostics of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub m3: Vec<f64>,
    pub negativity_events: Vec<usize>,
    /// `||N||_1`.
    pub l1: Vec<f64>,
    /// `min_i N_i`.
    pub min_cell: Vec<f64>,
}

impl ObservableSeries {
    fn record(&mut self, t: f64, n: &[f64], grid: &Grid, disp: &Dispersion, negative: usize) {
        let o = observables(n, grid, disp);
        self.times.push(t);
        self.mass.push(o.mass);
        self.energy.push(o.energy);
        self.m3.push(o.m3);
        self.negativity_events.push(negative);
        self.l1.push(l1_norm(n));
        self.min_cell
            .push(n.iter().copied().fold(f64::INFINITY, f64::min));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Reconstructed density `f_i = N_i / dw_i` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
    pub mass: Vec<f64>,
}

impl Snapshot {
    pub fn new(time: f64, n: &[f64], grid: &Grid) -> Self {
        Self {
            time,
            omega: grid.pivots().to_vec(),
            density: n.iter().zip(grid.widths()).map(|(m, w)| m / w).collect(),
            mass: n.to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: ObservableSeries,
    pub snapshots: Vec<Snapshot>,
    pub initial_state: Vec<f64>,
    pub final_state: Vec<f64>,
}

/// Fixed-step march from `t = 0` to `t_end`, recording observables after
/// every step.
pub fn run(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let op = config.operator()?;
    let grid = op.grid().clone();
    let disp = op.kernels().disp;
    let initial_state = config.ic.project(&grid)?;
    let mut state = initial_state.clone();
    let steps = config.steps();

    let snapshot_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&t| ((t / config.dt).round() as usize).min(steps))
        .collect();
    let mut snapshots = Vec::new();
    let mut take_snapshots = |k: usize, state: &[f64]| {
        for (&s, &t) in snapshot_steps.iter().zip(&config.snapshot_times) {
            if s == k {
                snapshots.push(Snapshot::new(t, state, &grid));
            }
        }
    };

    let mut series = ObservableSeries::default();
    series.record(0.0, &state, &grid, &disp, 0);
    take_snapshots(0, &state);
    let mut total_negative = 0usize;
    for k in 1..=steps {
        let dt = config.time_at(k) - config.time_at(k - 1);
        let negative = step(
            &op,
            &mut state,
            dt,
            config.integrator,
            config.negativity_clamp,
        )?;
        total_negative += negative;
        series.record(config.time_at(k), &state, &grid, &disp, negative);
        take_snapshots(k, &state);
    }
    if steps > 0 && total_negative as f64 > 0.01 * (steps * grid.len()) as f64 {
        warn!(
            "{total_negative} negative components over {steps} steps of {} cells; consider a smaller dt",
            grid.len()
        );
    }
    Ok(RunOutput {
        series,
        snapshots,
        initial_state,
        final_state: state,
    })
}

//! The discrete collision operator: right-hand side of the semi-discrete
//! finite-volume system `dN/dt = J(N)`.
//!
//! Component `i` is the sum of seventeen terms `Q1..Q17`, grouped in four
//! blocks that can be switched off independently:
//!
//! * `Q1..Q4`: 4-wave interactions with all partners below `w[i]` (kernel `K1`),
//! * `Q5..Q8`: 4-wave interactions straddling `w[i]` (kernel `K2`),
//! * `Q9..Q12`: 4-wave interactions with partners above `w[i]` (kernel `K3`),
//! * `Q13..Q17`: 3-wave interactions (kernels `K4..K7`).
//!
//! Kernels are evaluated at the exact pivot combinations selected by the
//! resonance sets (e.g. `K1((w[l] + w[k]) - w[j], w[j], w[k])`), never
//! re-snapped to a pivot. Every term is accumulated in ascending index order
//! and the seventeen partial sums are added in order, so each component is
//! a fixed sequence of floating-point operations; evaluating components in
//! parallel does not change the result.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::Kernels;
use crate::mesh::{Grid, IndexTables};

pub const TERM_COUNT: usize = 17;

/// Which term blocks contribute to the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blocks {
    /// `Q1..Q4`
    pub low: bool,
    /// `Q5..Q8`
    pub cross: bool,
    /// `Q9..Q12`
    pub high: bool,
    /// `Q13..Q17`
    pub three_wave: bool,
}

impl Blocks {
    pub const ALL: Blocks = Blocks {
        low: true,
        cross: true,
        high: true,
        three_wave: true,
    };

    /// Whether term `q` (1-based, `1..=17`) is switched on.
    pub fn includes(&self, q: usize) -> bool {
        match q {
            1..=4 => self.low,
            5..=8 => self.cross,
            9..=12 => self.high,
            13..=17 => self.three_wave,
            _ => false,
        }
    }
}

impl Default for Blocks {
    fn default() -> Self {
        Self::ALL
    }
}

/// Third kernel argument of the `Q6` gain term.
///
/// The term counts quartets `(w[i], mu, w[k], w[l])` with `mu = w[l] + w[k] - w[i]`;
/// the kernel's `eta` slot belongs to `w[k]`. `Target` places `w[i]` there
/// instead; it is not first-order consistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossGainArgument {
    #[default]
    Partner,
    Target,
}

/// Per-evaluation diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RhsStats {
    /// Kernel evaluations skipped because a composite frequency argument was
    /// not positive.
    pub guard_hits: u64,
}

/// Grid, kernels and resonance tables; immutable after construction.
#[derive(Debug, Clone)]
pub struct CollisionOperator {
    grid: Grid,
    kernels: Kernels,
    tables: IndexTables,
    blocks: Blocks,
    cross_gain: CrossGainArgument,
    parallel: bool,
    k4_perturbation: f64,
}

impl CollisionOperator {
    pub fn new(grid: Grid, kernels: Kernels) -> Self {
        let tables = IndexTables::new(&grid);
        Self {
            grid,
            kernels,
            tables,
            blocks: Blocks::ALL,
            cross_gain: CrossGainArgument::default(),
            parallel: false,
            k4_perturbation: 0.0,
        }
    }

    pub fn with_blocks(mut self, blocks: Blocks) -> Self {
        self.blocks = blocks;
        self
    }

    pub fn with_cross_gain(mut self, reading: CrossGainArgument) -> Self {
        self.cross_gain = reading;
        self
    }

    /// Evaluate components on the rayon pool.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    /// Scales `K4` by `1 + eps` in the table-driven path only. Exists so the
    /// oracle comparison can be shown to detect a broken transcription.
    #[doc(hidden)]
    pub fn with_k4_perturbation(mut self, eps: f64) -> Self {
        self.k4_perturbation = eps;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kernels(&self) -> &Kernels {
        &self.kernels
    }

    pub fn blocks(&self) -> Blocks {
        self.blocks
    }

    pub fn cross_gain(&self) -> CrossGainArgument {
        self.cross_gain
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn check_len(&self, n: &[f64]) -> Result<()> {
        if n.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: n.len(),
            });
        }
        Ok(())
    }

    /// `J(N)`.
    pub fn rhs(&self, n: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.rhs_into(n, &mut out)?;
        Ok(out)
    }

    /// `J(N)` written into `out`.
    pub fn rhs_into(&self, n: &[f64], out: &mut [f64]) -> Result<RhsStats> {
        self.check_len(n)?;
        self.check_len(out)?;
        let guard_hits: u64 = if self.parallel {
            out.par_iter_mut()
                .enumerate()
                .map(|(i, o)| {
                    let (terms, hits) = self.terms_with_stats(i, n);
                    *o = sum_terms(&terms);
                    hits
                })
                .sum()
        } else {
            out.iter_mut()
                .enumerate()
                .map(|(i, o)| {
                    let (terms, hits) = self.terms_with_stats(i, n);
                    *o = sum_terms(&terms);
                    hits
                })
                .sum()
        };
        if let Some(cell) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "collision operator",
                cell,
            });
        }
        Ok(RhsStats { guard_hits })
    }

    /// Component `i` of `J(N)`.
    pub fn component(&self, i: usize, n: &[f64]) -> Result<f64> {
        self.check_len(n)?;
        let v = sum_terms(&self.terms_with_stats(i, n).0);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "collision operator",
                cell: i,
            });
        }
        Ok(v)
    }

    /// The seventeen terms of component `i`; entry `q - 1` holds `Qq`.
    pub fn terms(&self, i: usize, n: &[f64]) -> Result<[f64; TERM_COUNT]> {
        self.check_len(n)?;
        Ok(self.terms_with_stats(i, n).0)
    }

    fn terms_with_stats(&self, i: usize, n: &[f64]) -> ([f64; TERM_COUNT], u64) {
        let g = &self.grid;
        let w = g.pivots();
        let kk = &self.kernels;
        let cells = g.len();
        let mut q = [0.0; TERM_COUNT];
        let mut hits = 0u64;
        let mut guarded = |x: f64| {
            if x > 0.0 {
                true
            } else {
                hits += 1;
                false
            }
        };

        if self.blocks.low {
            for j in 0..i.saturating_sub(1) {
                for k in j + 1..i {
                    for l in g.theta_bar(i, k, j) {
                        let om = (w[l] + w[k]) - w[j];
                        if guarded(om) {
                            q[0] += kk.k1_raw(om, w[j], w[k]) * n[j] * n[k] * n[l];
                        }
                    }
                }
            }
            for j in 1..i {
                for k in 0..j {
                    for l in g.theta_bar(k, j, i) {
                        let mu = (w[l] + w[j]) - w[i];
                        if guarded(mu) {
                            q[1] += kk.k1_raw(w[i], mu, w[j]) * n[i] * n[j] * n[l];
                        }
                    }
                }
            }
            for j in 0..i.saturating_sub(1) {
                for k in j + 1..i {
                    q[2] -= kk.k1_raw(w[i], w[j], w[k]) * n[i] * n[j] * n[k];
                }
            }
            for j in 0..i.saturating_sub(1) {
                for k in j + 1..i {
                    for l in g.theta_hat(k, i, j) {
                        let eta = (w[i] + w[j]) - w[l];
                        if guarded(eta) {
                            q[3] -= kk.k1_raw(w[i], w[j], eta) * n[i] * n[j] * n[l];
                        }
                    }
                }
            }
        }

        if self.blocks.cross {
            for j in i + 1..cells {
                for k in 0..i {
                    for l in self.tables.theta_tilde(j, k) {
                        for m in g.theta_hat(i, l, k) {
                            let om = (w[l] + w[k]) - w[m];
                            if guarded(om) {
                                q[4] += kk.k2_raw(om, w[m], w[k]) * n[k] * n[l] * n[m];
                            }
                        }
                    }
                }
            }
            for j in i + 1..cells {
                for k in 0..i {
                    for l in self.tables.theta_tilde(j, k) {
                        let mu = (w[l] + w[k]) - w[i];
                        let eta = match self.cross_gain {
                            CrossGainArgument::Partner => w[k],
                            CrossGainArgument::Target => w[i],
                        };
                        if guarded(mu) && guarded(w[i] + mu - eta) {
                            q[5] += kk.k2_raw(w[i], mu, eta) * n[i] * n[k] * n[l];
                        }
                    }
                }
            }
            for j in i + 1..cells {
                for k in 0..i {
                    for l in self.tables.theta_tilde(j, i) {
                        q[6] -= kk.k2_raw(w[i], w[l], w[k]) * n[i] * n[k] * n[l];
                    }
                }
            }
            for j in i + 1..cells {
                for k in 0..i {
                    for l in self.tables.theta_tilde(j, i) {
                        for m in g.theta_hat(k, l, i) {
                            let eta = (w[l] + w[i]) - w[m];
                            if guarded(eta) {
                                q[7] -= kk.k2_raw(w[i], w[l], eta) * n[i] * n[l] * n[m];
                            }
                        }
                    }
                }
            }
        }

        if self.blocks.high {
            for j in i + 2..cells {
                for k in i + 1..j {
                    for l in g.theta_bar(i, k, j) {
                        let om = (w[l] + w[k]) - w[j];
                        if guarded(om) {
                            q[8] += kk.k3_raw(om, w[j], w[k]) * n[j] * n[k] * n[l];
                        }
                    }
                }
            }
            for j in i + 1..cells {
                for k in j + 1..cells {
                    for m in g.theta_bar(k, j, i) {
                        let mu = (w[m] + w[j]) - w[i];
                        if guarded(mu) {
                            q[9] += kk.k3_raw(w[i], mu, w[j]) * n[i] * n[j] * n[m];
                        }
                    }
                }
            }
            for j in i + 2..cells {
                for k in i + 1..j {
                    q[10] -= kk.k3_raw(w[i], w[j], w[k]) * n[i] * n[j] * n[k];
                }
            }
            for j in i + 2..cells {
                for k in i + 1..j {
                    for l in g.theta_hat(k, i, j) {
                        let eta = (w[i] + w[j]) - w[l];
                        if guarded(eta) {
                            q[11] -= kk.k3_raw(w[i], w[j], eta) * n[i] * n[j] * n[l];
                        }
                    }
                }
            }
        }

        if self.blocks.three_wave {
            let k4_scale = 1.0 + self.k4_perturbation;
            for &(j, k) in &self.tables.pair_sum[i] {
                q[12] += k4_scale * kk.k4_raw(w[k] + w[j], w[j]) * n[j] * n[k];
            }
            for j in 0..cells {
                q[13] -= kk.k5_raw(w[i], w[j]) * n[i] * n[j];
            }
            for j in 0..i {
                q[14] -= kk.k6_raw(w[i], w[j]) * n[i] * n[j];
            }
            for j in i + 1..cells {
                q[15] += kk.k7_raw(w[i], w[j]) * n[i] * n[j];
            }
            for &(j, k) in &self.tables.pair_diff[i] {
                q[16] += kk.k7_raw(w[j] - w[k], w[j]) * n[j] * n[k];
            }
        }

        (q, hits)
    }

    /// Component `i` of `J(N)` for a non-negative state with `N_i = 0`.
    /// The scheme is non-negative when this is never below zero.
    pub fn positivity_flux_check(&self, n: &[f64], i: usize) -> Result<f64> {
        self.check_len(n)?;
        if i >= self.len() {
            return Err(Error::Precondition(format!("cell {i} out of range")));
        }
        if let Some(c) = n.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::Precondition(format!(
                "state must be non-negative, cell {c} holds {}",
                n[c]
            )));
        }
        if n[i] != 0.0 {
            return Err(Error::Precondition(format!(
                "cell {i} must be empty, holds {}",
                n[i]
            )));
        }
        self.component(i, n)
    }
}

/// Adds the seventeen terms in order `Q1 + Q2 + ... + Q17`.
#[inline]
pub fn sum_terms(q: &[f64; TERM_COUNT]) -> f64 {
    q.iter().sum()
}

/// Discrete L1 norm `sum |N_i|`.
pub fn l1_norm(n: &[f64]) -> f64 {
    n.iter().map(|v| v.abs()).sum()
}

/// Random non-negative state with `||N||_1 = target`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, cells: usize, target: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..cells).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x *= target / s);
    }
    v
}

/// Largest observed `||J(N) - J(M)||_1 / ||N - M||_1` over `trials` random
/// pairs of non-negative states inside the L1 ball of radius `ball_radius`.
pub fn lipschitz_estimate<R: Rng + ?Sized>(
    op: &CollisionOperator,
    ball_radius: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(ball_radius > 0.0) || trials == 0 {
        return Err(Error::Precondition(
            "ball radius must be positive and trials at least one".into(),
        ));
    }
    let cells = op.len();
    let mut best = 0.0f64;
    for _ in 0..trials {
        let ra = ball_radius * (1.0 - rng.gen::<f64>());
        let rb = ball_radius * (1.0 - rng.gen::<f64>());
        let a = random_state(rng, cells, ra);
        let b = random_state(rng, cells, rb);
        let ja = op.rhs(&a)?;
        let jb = op.rhs(&b)?;
        let num: f64 = ja.iter().zip(&jb).map(|(x, y)| (x - y).abs()).sum();
        let den: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        if den > 0.0 {
            best = best.max(num / den);
        }
    }
    Ok(best)
}

//! Spatial consistency of the discrete operator.
//!
//! For a given density `f` the truncated equation defines exact cell fluxes
//! `F_i`, the cell integrals of the collision integrals. The consistency
//! residual is `eps_i = |F_i - J_i(N)|` where `N` holds the exact cell
//! masses of `f`. Its L1 norm should shrink linearly with the mesh width.
//!
//! The exact fluxes are computed by nested composite Gauss-Legendre
//! quadrature, independently of the index sets used by the scheme.

use rayon::prelude::*;

use crate::collision::CollisionOperator;
use crate::error::{Error, Result};
use crate::kernels::Kernels;
use crate::mesh::Grid;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct ReferenceQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Panels per cell for the outer (cell) integral.
    pub outer_panels: usize,
    /// Panels spanning the whole domain for inner integrals; shorter ranges
    /// get a proportional share, at least one.
    pub inner_panels: usize,
}

impl ReferenceQuadrature {
    pub fn new(order: usize, outer_panels: usize, inner_panels: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self {
            nodes,
            weights,
            outer_panels: outer_panels.max(1),
            inner_panels: inner_panels.max(1),
        }
    }

    /// Nodes and weights covering `[a, b]` with `panels` equal panels.
    fn rule(&self, a: f64, b: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = (b - a) / panels as f64;
        (0..panels).flat_map(move |p| {
            let lo = a + p as f64 * h;
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(move |(x, w)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * w))
        })
    }

    fn inner_rule(&self, a: f64, b: f64, span: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let panels = ((self.inner_panels as f64 * (b - a) / span).ceil() as usize).max(1);
        self.rule(a, b, panels)
    }
}

impl Default for ReferenceQuadrature {
    fn default() -> Self {
        Self::new(6, 2, 48)
    }
}

/// Integrand of the outer cell integral: the collision integrals of the
/// truncated equation at frequency `w`.
fn collision_density(
    f: &(dyn Fn(f64) -> f64 + Sync),
    kk: &Kernels,
    w: f64,
    lo: f64,
    r: f64,
    quad: &ReferenceQuadrature,
) -> f64 {
    let span = r - lo;
    let fw = f(w);
    // f(eta) f(nu) (f(mu) + f(w)) - f(w) f(mu) (f(eta) + f(nu)), nu = w + mu - eta
    let bracket = |fm: f64, fe: f64, fnu: f64| fe * fnu * (fm + fw) - fw * fm * (fe + fnu);
    let mut total = 0.0;

    if kk.params.c1 != 0.0 {
        // mu < eta < w
        for (mu, wm) in quad.inner_rule(lo, w, span) {
            let fm = f(mu);
            for (eta, we) in quad.inner_rule(mu, w, span) {
                let fnu = f(w + mu - eta);
                total += wm * we * kk.k1_raw(w, mu, eta) * bracket(fm, f(eta), fnu);
            }
        }
        // eta < w, w + mu < R
        if r - w > lo {
            for (mu, wm) in quad.inner_rule(lo, r - w, span) {
                let fm = f(mu);
                for (eta, we) in quad.inner_rule(lo, w, span) {
                    let fnu = f(w + mu - eta);
                    total += wm * we * kk.k2_raw(w, mu, eta) * bracket(fm, f(eta), fnu);
                }
            }
        }
        // w < eta < mu < R
        for (mu, wm) in quad.inner_rule(w, r, span) {
            let fm = f(mu);
            for (eta, we) in quad.inner_rule(w, mu, span) {
                let fnu = f(w + mu - eta);
                total += wm * we * kk.k3_raw(w, mu, eta) * bracket(fm, f(eta), fnu);
            }
        }
    }

    if kk.params.c2 != 0.0 {
        for (mu, wm) in quad.inner_rule(lo, w, span) {
            let fm = f(mu);
            total += wm * (kk.k4_raw(w, mu) * fm * f(w - mu) - kk.k6_raw(w, mu) * fw * fm);
        }
        for (mu, wm) in quad.inner_rule(lo, r, span) {
            total -= wm * kk.k5_raw(w, mu) * fw * f(mu);
        }
        for (mu, wm) in quad.inner_rule(w, r, span) {
            let fm = f(mu);
            total += wm * kk.k7_raw(w, mu) * (fw * fm + fm * f(mu - w));
        }
    }
    total
}

/// Exact cell fluxes `F_i` of density `f` on `grid`.
pub fn exact_flux(
    f: &(dyn Fn(f64) -> f64 + Sync),
    grid: &Grid,
    kernels: &Kernels,
    quad: &ReferenceQuadrature,
) -> Vec<f64> {
    let lo = grid.omega_min();
    let r = grid.omega_max();
    grid.edges()
        .par_windows(2)
        .map(|e| {
            quad.rule(e[0], e[1], quad.outer_panels)
                .map(|(w, ww)| ww * collision_density(f, kernels, w, lo, r, quad))
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyLevel {
    pub cells: usize,
    pub delta_omega: f64,
    pub eps_l1: f64,
}

/// `||F - J(N)||_1` on uniform grids of the given sizes.
pub fn consistency_study(
    f: &(dyn Fn(f64) -> f64 + Sync),
    project: &dyn Fn(&Grid) -> Result<Vec<f64>>,
    kernels: &Kernels,
    omega_min: f64,
    omega_max: f64,
    levels: &[usize],
    quad: &ReferenceQuadrature,
) -> Result<Vec<ConsistencyLevel>> {
    if levels.is_empty() {
        return Err(Error::Precondition(
            "at least one refinement level required".into(),
        ));
    }
    levels
        .iter()
        .map(|&cells| {
            let grid = Grid::uniform(omega_min, omega_max, cells)?;
            let n = project(&grid)?;
            let exact = exact_flux(f, &grid, kernels, quad);
            let op = CollisionOperator::new(grid.clone(), *kernels).with_parallel(true);
            let discrete = op.rhs(&n)?;
            let eps_l1 = exact
                .iter()
                .zip(&discrete)
                .map(|(a, b)| (a - b).abs())
                .sum();
            Ok(ConsistencyLevel {
                cells,
                delta_omega: grid.max_width(),
                eps_l1,
            })
        })
        .collect()
}

/// `log2(eps_k / eps_{k+1}) / log2(dw_k / dw_{k+1})` for successive levels;
/// `None` where either residual vanishes.
pub fn observed_orders(levels: &[ConsistencyLevel]) -> Vec<Option<f64>> {
    levels
        .windows(2)
        .map(|p| {
            let (a, b) = (&p[0], &p[1]);
            if a.eps_l1 > 0.0 && b.eps_l1 > 0.0 {
                Some((a.eps_l1 / b.eps_l1).ln() / (a.delta_omega / b.delta_omega).ln())
            } else {
                None
            }
        })
        .collect()
}

//! Truncated frequency mesh and the resonance index sets of the discrete
//! collision operator.
//!
//! Cells are indexed from zero. Cell `i` is the half-open interval
//! `[edges[i], edges[i + 1])`; the last cell is closed on the right so that
//! the truncation point `R` itself belongs to the mesh. Ties at interior
//! edges therefore resolve to the cell on the right.
//!
//! Every set below is defined by a single floating-point expression on the
//! pivots, and membership is always decided by [`Grid::contains`] on that
//! exact expression:
//!
//! | set                     | members          | expression                 |
//! |-------------------------|------------------|----------------------------|
//! | `pair_sum(i)`           | `(j, k)`         | `w[j] + w[k]`              |
//! | `pair_diff(i)`          | `(j, k)`, `j > k`| `w[j] - w[k]`              |
//! | `theta_tilde(i, j)`     | `k`              | `w[j] + w[k]`              |
//! | `theta_bar(i, j, k)`    | `l`              | `(w[l] + w[j]) - w[k]`     |
//! | `theta_hat(i, j, k)`    | `l`              | `(w[j] + w[k]) - w[l]`     |
//!
//! Each expression is monotone in the free index, so every theta set is a
//! contiguous index range found by two binary searches.

use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    edges: Vec<f64>,
    pivots: Vec<f64>,
    widths: Vec<f64>,
}

impl Grid {
    /// Uniform mesh of `cells` cells on `[omega_min, omega_max]`.
    pub fn uniform(omega_min: f64, omega_max: f64, cells: usize) -> Result<Self> {
        if !(omega_min > 0.0 && omega_min.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "omega_min must be positive and finite, got {omega_min}"
            )));
        }
        if !(omega_max > omega_min && omega_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "omega_max ({omega_max}) must exceed omega_min ({omega_min})"
            )));
        }
        if cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {cells}"
            )));
        }
        let h = (omega_max - omega_min) / cells as f64;
        let mut edges: Vec<f64> = (0..=cells).map(|i| omega_min + i as f64 * h).collect();
        edges[cells] = omega_max;
        Self::from_edges(edges)
    }

    /// Mesh from explicit, strictly increasing cell edges with a positive
    /// first edge.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 edges, got {}",
                edges.len()
            )));
        }
        if !(edges[0] > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "first edge must be positive, got {}",
                edges[0]
            )));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidGrid("edges must be finite".into()));
        }
        if let Some(w) = edges.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "edges not strictly increasing at index {w}"
            )));
        }
        let pivots = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let widths = edges.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            edges,
            pivots,
            widths,
        })
    }

    /// Number of cells `I`.
    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn omega_min(&self) -> f64 {
        self.edges[0]
    }

    /// Truncation point `R`.
    pub fn omega_max(&self) -> f64 {
        self.edges[self.len()]
    }

    pub fn max_width(&self) -> f64 {
        self.widths.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_width(&self) -> f64 {
        self.widths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` lies in cell `i`.
    #[inline]
    pub fn contains(&self, i: usize, x: f64) -> bool {
        self.edges[i] <= x
            && (x < self.edges[i + 1] || (i + 1 == self.len() && x <= self.edges[i + 1]))
    }

    /// Cell containing `x`, or `None` outside `[omega_min, R]`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let n = self.len();
        if !(x >= self.edges[0] && x <= self.edges[n]) {
            return None;
        }
        // number of edges <= x, minus one
        let idx = self.edges.partition_point(|&e| e <= x);
        Some((idx - 1).min(n - 1))
    }

    /// Indices `l` in `0..I` with `value(l)` in cell `i`, where `value` is
    /// monotone non-decreasing (`increasing = true`) or non-increasing in `l`.
    fn monotone_members(
        &self,
        i: usize,
        increasing: bool,
        value: impl Fn(usize) -> f64,
    ) -> Range<usize> {
        let n = self.len();
        let lo = self.edges[i];
        let hi = self.edges[i + 1];
        let last = i + 1 == n;
        let below_hi = |x: f64| x < hi || (last && x <= hi);
        let (start, end) = if increasing {
            (
                partition_point(n, |l| value(l) < lo),
                partition_point(n, |l| below_hi(value(l))),
            )
        } else {
            (
                partition_point(n, |l| !below_hi(value(l))),
                partition_point(n, |l| value(l) >= lo),
            )
        };
        if start < end {
            start..end
        } else {
            0..0
        }
    }

    /// `k` with `w[j] + w[k]` in cell `i`.
    pub fn theta_tilde(&self, i: usize, j: usize) -> Range<usize> {
        let w = &self.pivots;
        self.monotone_members(i, true, |k| w[j] + w[k])
    }

    /// `l` with `(w[l] + w[j]) - w[k]` in cell `i`.
    pub fn theta_bar(&self, i: usize, j: usize, k: usize) -> Range<usize> {
        let w = &self.pivots;
        self.monotone_members(i, true, |l| (w[l] + w[j]) - w[k])
    }

    /// `l` with `(w[j] + w[k]) - w[l]` in cell `i`.
    pub fn theta_hat(&self, i: usize, j: usize, k: usize) -> Range<usize> {
        let w = &self.pivots;
        self.monotone_members(i, false, |l| (w[j] + w[k]) - w[l])
    }

    /// Ordered pairs `(j, k)` with `w[j] + w[k]` in cell `i`, sorted.
    pub fn pair_sum_set(&self, i: usize) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|j| self.theta_tilde(i, j).map(move |k| (j, k)))
            .collect()
    }

    /// Ordered pairs `(j, k)`, `j > k`, with `w[j] - w[k]` in cell `i`, sorted.
    pub fn pair_diff_set(&self, i: usize) -> Vec<(usize, usize)> {
        let w = &self.pivots;
        (0..self.len())
            .flat_map(|j| {
                self.monotone_members(i, false, move |k| w[j] - w[k])
                    .filter(move |&k| k < j)
                    .map(move |k| (j, k))
            })
            .collect()
    }
}

/// First index in `0..n` for which `pred` is false, assuming `pred` is true
/// on a prefix.
fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Per-grid precomputed resonance tables: the pair lists for every cell and
/// the `theta_tilde` ranges for every `(i, j)`.
#[derive(Debug, Clone)]
pub struct IndexTables {
    pub pair_sum: Vec<Vec<(usize, usize)>>,
    pub pair_diff: Vec<Vec<(usize, usize)>>,
    theta_tilde: Vec<Range<usize>>,
    cells: usize,
}

impl IndexTables {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.len();
        let pair_sum = (0..n).map(|i| grid.pair_sum_set(i)).collect();
        let pair_diff = (0..n).map(|i| grid.pair_diff_set(i)).collect();
        let theta_tilde = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| grid.theta_tilde(i, j))
            .collect();
        Self {
            pair_sum,
            pair_diff,
            theta_tilde,
            cells: n,
        }
    }

    #[inline]
    pub fn theta_tilde(&self, i: usize, j: usize) -> Range<usize> {
        self.theta_tilde[i * self.cells + j].clone()
    }
}

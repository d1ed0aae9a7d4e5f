//! Exhaustive reference evaluation of the collision operator.
//!
//! Every resonance set is enumerated by scanning all candidate indices and
//! testing the raw cell inequalities; no binary search and no precomputed
//! tables. Cost is `O(I^5)`, so this is meant for grids of at most ~20 cells.

use crate::collision::{sum_terms, CollisionOperator, CrossGainArgument, TERM_COUNT};
use crate::error::{Error, Result};

struct Cells<'a> {
    edges: &'a [f64],
}

impl Cells<'_> {
    #[inline]
    fn inside(&self, i: usize, x: f64) -> bool {
        let last = i + 2 == self.edges.len();
        self.edges[i] <= x && (x < self.edges[i + 1] || (last && x <= self.edges[i + 1]))
    }
}

/// The seventeen terms of component `i`, by exhaustive enumeration.
pub fn brute_force_terms(op: &CollisionOperator, i: usize, n: &[f64]) -> [f64; TERM_COUNT] {
    let g = op.grid();
    let w = g.pivots();
    let c = Cells { edges: g.edges() };
    let kk = op.kernels();
    let blocks = op.blocks();
    let cells = g.len();
    let mut q = [0.0; TERM_COUNT];

    if blocks.low {
        for j in 0..i {
            for k in j + 1..i {
                for l in 0..cells {
                    let om = (w[l] + w[k]) - w[j];
                    if c.inside(i, om) && om > 0.0 {
                        q[0] += kk.k1_raw(om, w[j], w[k]) * n[j] * n[k] * n[l];
                    }
                }
            }
        }
        for j in 1..i {
            for k in 0..j {
                for l in 0..cells {
                    let mu = (w[l] + w[j]) - w[i];
                    if c.inside(k, mu) && mu > 0.0 {
                        q[1] += kk.k1_raw(w[i], mu, w[j]) * n[i] * n[j] * n[l];
                    }
                }
            }
        }
        for j in 0..i {
            for k in j + 1..i {
                q[2] -= kk.k1_raw(w[i], w[j], w[k]) * n[i] * n[j] * n[k];
            }
        }
        for j in 0..i {
            for k in j + 1..i {
                for l in 0..cells {
                    let eta = (w[i] + w[j]) - w[l];
                    if c.inside(k, eta) && eta > 0.0 {
                        q[3] -= kk.k1_raw(w[i], w[j], eta) * n[i] * n[j] * n[l];
                    }
                }
            }
        }
    }

    if blocks.cross {
        for j in i + 1..cells {
            for k in 0..i {
                for l in 0..cells {
                    if !c.inside(j, w[k] + w[l]) {
                        continue;
                    }
                    for m in 0..cells {
                        let om = (w[l] + w[k]) - w[m];
                        if c.inside(i, om) && om > 0.0 {
                            q[4] += kk.k2_raw(om, w[m], w[k]) * n[k] * n[l] * n[m];
                        }
                    }
                }
            }
        }
        for j in i + 1..cells {
            for k in 0..i {
                for l in 0..cells {
                    if !c.inside(j, w[k] + w[l]) {
                        continue;
                    }
                    let mu = (w[l] + w[k]) - w[i];
                    let eta = match op.cross_gain() {
                        CrossGainArgument::Partner => w[k],
                        CrossGainArgument::Target => w[i],
                    };
                    if mu > 0.0 && w[i] + mu - eta > 0.0 {
                        q[5] += kk.k2_raw(w[i], mu, eta) * n[i] * n[k] * n[l];
                    }
                }
            }
        }
        for j in i + 1..cells {
            for k in 0..i {
                for l in 0..cells {
                    if c.inside(j, w[i] + w[l]) {
                        q[6] -= kk.k2_raw(w[i], w[l], w[k]) * n[i] * n[k] * n[l];
                    }
                }
            }
        }
        for j in i + 1..cells {
            for k in 0..i {
                for l in 0..cells {
                    if !c.inside(j, w[i] + w[l]) {
                        continue;
                    }
                    for m in 0..cells {
                        let eta = (w[l] + w[i]) - w[m];
                        if c.inside(k, eta) && eta > 0.0 {
                            q[7] -= kk.k2_raw(w[i], w[l], eta) * n[i] * n[l] * n[m];
                        }
                    }
                }
            }
        }
    }

    if blocks.high {
        for j in i + 2..cells {
            for k in i + 1..j {
                for l in 0..cells {
                    let om = (w[l] + w[k]) - w[j];
                    if c.inside(i, om) && om > 0.0 {
                        q[8] += kk.k3_raw(om, w[j], w[k]) * n[j] * n[k] * n[l];
                    }
                }
            }
        }
        for j in i + 1..cells {
            for k in j + 1..cells {
                for m in 0..cells {
                    let mu = (w[m] + w[j]) - w[i];
                    if c.inside(k, mu) && mu > 0.0 {
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
                for l in 0..cells {
                    let eta = (w[i] + w[j]) - w[l];
                    if c.inside(k, eta) && eta > 0.0 {
                        q[11] -= kk.k3_raw(w[i], w[j], eta) * n[i] * n[j] * n[l];
                    }
                }
            }
        }
    }

    if blocks.three_wave {
        for j in 0..cells {
            for k in 0..cells {
                if c.inside(i, w[j] + w[k]) {
                    q[12] += kk.k4_raw(w[k] + w[j], w[j]) * n[j] * n[k];
                }
            }
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
        for j in 0..cells {
            for k in 0..j {
                if c.inside(i, w[j] - w[k]) {
                    q[16] += kk.k7_raw(w[j] - w[k], w[j]) * n[j] * n[k];
                }
            }
        }
    }

    q
}

/// `J(N)` by exhaustive enumeration.
pub fn brute_force_rhs(op: &CollisionOperator, n: &[f64]) -> Result<Vec<f64>> {
    if n.len() != op.len() {
        return Err(Error::DimensionMismatch {
            expected: op.len(),
            got: n.len(),
        });
    }
    let out: Vec<f64> = (0..op.len())
        .map(|i| sum_terms(&brute_force_terms(op, i, n)))
        .collect();
    if let Some(cell) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "brute-force collision operator",
            cell,
        });
    }
    Ok(out)
}

/// Componentwise relative deviation `|a - b| / max(|a|, |b|)`, zero when
/// both entries vanish.
pub fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

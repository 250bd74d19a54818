//! Two-phase dense simplex with Bland's anti-cycling rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` with `b >= 0`. The artificial
//! columns of phase one are kept in the tableau so the final basis inverse
//! (and hence the dual vector) can be read off them.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;

pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual vector y with y.A <= c componentwise and y.b = objective.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

pub struct DenseLp {
    pub rows: usize,
    pub cols: usize,
    /// Row-major constraint matrix.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl DenseLp {
    pub fn solve(&self) -> Result<LpSolution> {
        let (rows, cols) = (self.rows, self.cols);
        let width = cols + rows; // structural + artificial
        let mut t = vec![0.0; rows * width];
        let mut rhs = self.b.clone();
        for r in 0..rows {
            debug_assert!(rhs[r] >= 0.0);
            t[r * width..r * width + cols]
                .copy_from_slice(&self.a[r * cols..(r + 1) * cols]);
            t[r * width + cols + r] = 1.0;
        }
        let mut basis: Vec<usize> = (cols..width).collect();
        let mut iterations = 0;

        // Phase one: minimize the sum of artificials.
        let phase1_cost: Vec<f64> = (0..width).map(|j| if j >= cols { 1.0 } else { 0.0 }).collect();
        iterations += run_simplex(
            &mut t, &mut rhs, &mut basis, rows, width, &phase1_cost, cols, true,
        );
        let infeas: f64 = basis
            .iter()
            .zip(&rhs)
            .filter(|(&bi, _)| bi >= cols)
            .map(|(_, &v)| v)
            .sum();
        if infeas > 1e-7 {
            return Err(Error::InfeasibleMarginals(alloc::format!(
                "phase-one residual {infeas}"
            )));
        }

        // Phase two over the structural columns only.
        let mut cost = vec![0.0; width];
        cost[..cols].copy_from_slice(&self.c);
        iterations += run_simplex(
            &mut t, &mut rhs, &mut basis, rows, width, &cost, cols, false,
        );

        let mut x = vec![0.0; cols];
        for (r, &bi) in basis.iter().enumerate() {
            if bi < cols {
                x[bi] = rhs[r].max(0.0);
            }
        }
        let objective: f64 = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();

        // The artificial columns carry B^{-1}; y = c_B B^{-1}.
        let mut duals = vec![0.0; rows];
        for (i, d) in duals.iter_mut().enumerate() {
            *d = basis
                .iter()
                .enumerate()
                .map(|(r, &bi)| cost[bi] * t[r * width + cols + i])
                .sum();
        }

        Ok(LpSolution {
            x,
            objective,
            duals,
            iterations,
        })
    }
}

/// Runs Bland-rule simplex iterations until optimality; returns pivot count.
///
/// In phase one artificial columns may enter; afterwards they are barred.
#[allow(clippy::too_many_arguments)]
fn run_simplex(
    t: &mut [f64],
    rhs: &mut [f64],
    basis: &mut [usize],
    rows: usize,
    width: usize,
    cost: &[f64],
    structural: usize,
    phase_one: bool,
) -> usize {
    let mut iterations = 0;
    loop {
        // Reduced costs r_j = c_j - c_B . column_j; Bland: lowest index wins.
        let mut entering = None;
        let limit = if phase_one { width } else { structural };
        for j in 0..limit {
            if basis.contains(&j) {
                continue;
            }
            let mut r = cost[j];
            for (row, &bi) in basis.iter().enumerate() {
                r -= cost[bi] * t[row * width + j];
            }
            if r < -PIVOT_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            return iterations;
        };

        // Ratio test; ties broken by the lowest basic-variable index.
        let mut leaving: Option<(usize, f64)> = None;
        for row in 0..rows {
            let a = t[row * width + j];
            if a > PIVOT_TOL {
                let ratio = rhs[row] / a;
                match leaving {
                    None => leaving = Some((row, ratio)),
                    Some((best_row, best)) => {
                        if ratio < best - 1e-12
                            || (ratio <= best + 1e-12 && basis[row] < basis[best_row])
                        {
                            leaving = Some((row, ratio.min(best)));
                        }
                    }
                }
            }
        }
        let Some((pivot_row, _)) = leaving else {
            // Transportation polytopes are bounded; unboundedness here would
            // be a construction bug.
            return iterations;
        };

        pivot(t, rhs, rows, width, pivot_row, j);
        basis[pivot_row] = j;
        iterations += 1;
    }
}

fn pivot(t: &mut [f64], rhs: &mut [f64], rows: usize, width: usize, prow: usize, pcol: usize) {
    let p = t[prow * width + pcol];
    for v in &mut t[prow * width..(prow + 1) * width] {
        *v /= p;
    }
    rhs[prow] /= p;
    for r in 0..rows {
        if r == prow {
            continue;
        }
        let f = t[r * width + pcol];
        if f == 0.0 {
            continue;
        }
        for jj in 0..width {
            t[r * width + jj] -= f * t[prow * width + jj];
        }
        rhs[r] -= f * rhs[prow];
        if rhs[r] < 0.0 && rhs[r] > -1e-12 {
            rhs[r] = 0.0;
        }
    }
}

//! Shortest-augmenting-path assignment solver, O(n^3), with dual potentials.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub struct AssignmentSolution {
    /// `perm[i]` is the column assigned to row i.
    pub perm: Vec<usize>,
    pub value: f64,
    /// Row potentials u and column potentials v with `u_i + v_j <= c_ij`
    /// and equality on the assignment (min sense).
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
}

/// Minimizes `sum_i cost[i][perm[i]]` over permutations.
pub fn solve_min(cost: &[Vec<f64>]) -> Result<AssignmentSolution> {
    let n = cost.len();
    for row in cost {
        if row.len() != n {
            return Err(Error::NonSquare {
                rows: n,
                cols: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { index: j, value: v });
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptySupport);
    }

    // 1-based Jonker-Volgenant style augmentation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1]; // p[j]: row assigned to column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    let value = (0..n).map(|i| cost[i][perm[i]]).sum();
    Ok(AssignmentSolution {
        perm,
        value,
        row_potentials: u[1..].to_vec(),
        col_potentials: v[1..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_dominant_matrix() {
        let cost = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let sol = solve_min(&cost).unwrap();
        assert_eq!(sol.perm, vec![0, 1, 2]);
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn monotone_matching_beats_all_permutations() {
        // 1-d quadratic cost between sorted points: sorted matching wins.
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.5, 1.5, 2.5];
        let cost: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| ys.iter().map(|y| (x - y) * (x - y)).collect())
            .collect();
        let sol = solve_min(&cost).unwrap();
        assert_eq!(sol.perm, vec![0, 1, 2]);
        // Exhaustive check over all 3! permutations.
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            let v: f64 = (0..3).map(|i| cost[i][p[i]]).sum();
            assert!(sol.value <= v + 1e-12);
        }
    }

    #[test]
    fn row_constant_shift_keeps_argmin() {
        let cost = vec![
            vec![3.0, 1.0, 2.0],
            vec![0.5, 2.5, 1.5],
            vec![2.0, 2.0, 0.1],
        ];
        let shifted: Vec<Vec<f64>> = cost
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|v| v + i as f64 * 10.0).collect())
            .collect();
        let a = solve_min(&cost).unwrap();
        let b = solve_min(&shifted).unwrap();
        assert_eq!(a.perm, b.perm);
    }

    #[test]
    fn potentials_are_feasible_and_tight() {
        let cost = vec![
            vec![1.0, 4.0, 2.0],
            vec![3.0, 0.5, 2.5],
            vec![2.0, 2.0, 5.0],
        ];
        let sol = solve_min(&cost).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(sol.row_potentials[i] + sol.col_potentials[j] <= cost[i][j] + 1e-9);
            }
            let j = sol.perm[i];
            assert!(
                (sol.row_potentials[i] + sol.col_potentials[j] - cost[i][j]).abs() < 1e-9
            );
        }
    }

    #[test]
    fn rejects_non_square() {
        let cost = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(solve_min(&cost), Err(Error::NonSquare { .. })));
    }
}

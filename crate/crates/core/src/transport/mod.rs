//! Exact Kantorovich solves, the symmetric problem, assignment, Sinkhorn,
//! and the Wasserstein distance.

mod assignment;
mod simplex;
mod sinkhorn;

pub use assignment::{solve_min as assignment_min, AssignmentSolution};
pub use sinkhorn::{sinkhorn_mm, SinkhornResult};

use alloc::vec;
use alloc::vec::Vec;

use crate::costs::{sq_dist, symmetrize_cost, CostTensor};
use crate::duality::DualPotentials;
use crate::measures::{symmetrize_plan, CouplingPlan, DiscreteMeasure};
use crate::tensor::Tensor;
use crate::{Error, Result};

use simplex::DenseLp;

pub const DUALITY_GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// An exact solve: optimal plan, matching dual certificate, and the gap
/// between them.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub plan: CouplingPlan,
    pub primal_value: f64,
    pub dual: DualPotentials,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub sense: Sense,
}

/// Solves the multi-marginal Kantorovich LP over couplings with the given
/// marginals, returning an optimal vertex and dual potentials.
///
/// Two uniform marginals of equal size are routed to the O(n^3) assignment
/// solver; everything else goes through the simplex.
pub fn solve_mm(
    cost: &CostTensor,
    marginals: &[&DiscreteMeasure],
    sense: Sense,
) -> Result<SolveResult> {
    let m = cost.arity();
    if marginals.len() != m {
        return Err(Error::AxisOutOfRange {
            axis: marginals.len(),
            arity: m,
        });
    }
    for (ax, mu) in marginals.iter().enumerate() {
        if mu.len() != cost.support_sizes()[ax] {
            return Err(Error::InfeasibleMarginals(alloc::format!(
                "axis {ax}: measure has {} atoms but cost expects {}",
                mu.len(),
                cost.support_sizes()[ax]
            )));
        }
    }

    if m == 2
        && marginals[0].len() == marginals[1].len()
        && marginals[0].is_uniform()
        && marginals[1].is_uniform()
    {
        return solve_uniform_assignment(cost, marginals, sense);
    }
    solve_simplex(cost, marginals, sense)
}

fn solve_uniform_assignment(
    cost: &CostTensor,
    marginals: &[&DiscreteMeasure],
    sense: Sense,
) -> Result<SolveResult> {
    let n = marginals[0].len();
    let sign = match sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| sign * cost.values().get(&[i, j])).collect())
        .collect();
    let sol = assignment::solve_min(&matrix)?;

    let mut mass = Tensor::zeros(&[n, n])?;
    for (i, &j) in sol.perm.iter().enumerate() {
        mass.set(&[i, j], 1.0 / n as f64);
    }
    let plan = CouplingPlan::new(mass)?;
    let primal_value = cost.pair(&plan)?;
    let u0: Vec<f64> = sol.row_potentials.iter().map(|&v| sign * v).collect();
    let u1: Vec<f64> = sol.col_potentials.iter().map(|&v| sign * v).collect();
    let dual_value = (u0.iter().sum::<f64>() + u1.iter().sum::<f64>()) / n as f64;
    let dual = DualPotentials::new(vec![u0, u1]);
    Ok(SolveResult {
        plan,
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        dual,
        iterations: n,
        sense,
    })
}

fn solve_simplex(
    cost: &CostTensor,
    marginals: &[&DiscreteMeasure],
    sense: Sense,
) -> Result<SolveResult> {
    let m = cost.arity();
    let shape = cost.support_sizes();
    let cols = cost.values().len();
    let rows: usize = shape.iter().sum();

    let mut a = vec![0.0; rows * cols];
    let mut offsets = vec![0usize; m];
    for ax in 1..m {
        offsets[ax] = offsets[ax - 1] + shape[ax - 1];
    }
    for (flat, (idx, _)) in cost.values().iter_indexed().enumerate() {
        for (ax, &i) in idx.iter().enumerate() {
            a[(offsets[ax] + i) * cols + flat] = 1.0;
        }
    }
    let mut b = Vec::with_capacity(rows);
    for mu in marginals {
        b.extend_from_slice(mu.weights());
    }
    let sign = match sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let c: Vec<f64> = cost.values().data().iter().map(|&v| sign * v).collect();

    let lp = DenseLp {
        rows,
        cols,
        a,
        b,
        c,
    };
    let sol = lp.solve()?;

    let mass = Tensor::from_data(shape, sol.x.clone())?;
    let plan = CouplingPlan::new(mass)?;
    let primal_value = cost.pair(&plan)?;
    debug_assert!((sign * primal_value - sol.objective).abs() < 1e-7);
    let potentials: Vec<Vec<f64>> = (0..m)
        .map(|ax| {
            sol.duals[offsets[ax]..offsets[ax] + shape[ax]]
                .iter()
                .map(|&y| sign * y)
                .collect()
        })
        .collect();
    let dual = DualPotentials::new(potentials);
    let dual_value = dual.objective(marginals);
    Ok(SolveResult {
        plan,
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        dual,
        iterations: sol.iterations,
        sense,
    })
}

/// Solves the symmetric problem: the LP over couplings whose marginals all
/// equal `mu`, using the symmetrized cost, then returns the symmetrized
/// optimal plan (sigma-invariant, same objective).
pub fn solve_sym(cost: &CostTensor, mu: &DiscreteMeasure, sense: Sense) -> Result<SolveResult> {
    let m = cost.arity();
    if cost.support_sizes().iter().any(|&s| s != mu.len()) {
        return Err(Error::HeterogeneousSupports {
            sizes: cost.support_sizes().to_vec(),
        });
    }
    let sym = symmetrize_cost(cost)?;
    let marginals: Vec<&DiscreteMeasure> = (0..m).map(|_| mu).collect();
    let mut result = solve_mm(&sym, &marginals, sense)?;
    // Averaging over the sigma-orbit keeps optimality: the shifted plans are
    // admissible and attain the same symmetrized objective.
    result.plan = symmetrize_plan(&result.plan)?;
    result.primal_value = sym.pair(&result.plan)?;
    result.gap = (result.primal_value - result.dual_value).abs();
    Ok(result)
}

pub struct AssignmentResult {
    pub perm: Vec<usize>,
    pub value: f64,
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
}

/// Optimal permutation for a square cost matrix.
pub fn solve_assignment(cost: &[Vec<f64>], sense: Sense) -> Result<AssignmentResult> {
    let sign = match sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let matrix: Vec<Vec<f64>> = cost
        .iter()
        .map(|row| row.iter().map(|&v| sign * v).collect())
        .collect();
    let sol = assignment::solve_min(&matrix)?;
    let value = cost
        .iter()
        .enumerate()
        .map(|(i, row)| row[sol.perm[i]])
        .sum();
    Ok(AssignmentResult {
        perm: sol.perm,
        value,
        row_potentials: sol.row_potentials.iter().map(|&v| sign * v).collect(),
        col_potentials: sol.col_potentials.iter().map(|&v| sign * v).collect(),
    })
}

/// The squared 2-Wasserstein distance between two discrete measures
/// (the optimal transport value for squared Euclidean cost).
pub fn wasserstein2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: nu.dim(),
        });
    }
    let values = Tensor::build(&[mu.len(), nu.len()], |idx| {
        sq_dist(mu.point(idx[0]), nu.point(idx[1]))
    })?;
    let cost = CostTensor::new(values)?;
    let result = solve_mm(&cost, &[mu, nu], Sense::Min)?;
    Ok(result.primal_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::quadratic_cost;
    use crate::costs::{vector_field_cost, SampledVectorField};

    fn uniform_1d(xs: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::uniform(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn quadratic_identical_marginals_give_diagonal() {
        let mu = uniform_1d(&[0.0, 1.0]);
        let cost = quadratic_cost(&[&mu, &mu]).unwrap();
        let res = solve_mm(&cost, &[&mu, &mu], Sense::Min).unwrap();
        assert!(res.primal_value.abs() < 1e-12);
        assert!((res.plan.mass().get(&[0, 0]) - 0.5).abs() < 1e-12);
        assert!(res.gap <= DUALITY_GAP_TOL);
    }

    #[test]
    fn anti_diagonal_cost() {
        let values = Tensor::from_data(&[2, 2], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let cost = CostTensor::new(values).unwrap();
        let mu = uniform_1d(&[0.0, 1.0]);
        let res = solve_mm(&cost, &[&mu, &mu], Sense::Min).unwrap();
        assert!(res.primal_value.abs() < 1e-12);
    }

    #[test]
    fn simplex_path_matches_assignment_path() {
        // Force the simplex by using non-uniform weights that are actually
        // uniform values but perturbed, then compare against assignment on
        // the uniform version.
        let mu = uniform_1d(&[0.0, 1.0, 2.0]);
        let cost = quadratic_cost(&[&mu, &mu]).unwrap();
        let assignment_result = solve_mm(&cost, &[&mu, &mu], Sense::Min).unwrap();
        let lp = solve_simplex(&cost, &[&mu, &mu], Sense::Min).unwrap();
        assert!((assignment_result.primal_value - lp.primal_value).abs() < 1e-9);
        assert!(lp.gap <= DUALITY_GAP_TOL);
    }

    #[test]
    fn three_marginal_brute_force_oracle() {
        // n=3, m=3 pseudo-random cost; compare the LP value to the
        // exhaustive minimum over all permutation-pair couplings, which are
        // the integral vertices for uniform marginals.
        let mu = uniform_1d(&[0.0, 1.0, 2.0]);
        let values = Tensor::build(&[3, 3, 3], |idx| {
            let h = idx[0] * 49 + idx[1] * 13 + idx[2] * 5;
            ((h * 2654435761) % 97) as f64 / 97.0
        })
        .unwrap();
        let cost = CostTensor::new(values).unwrap();
        let res = solve_mm(&cost, &[&mu, &mu, &mu], Sense::Min).unwrap();

        let perms = [
            [0usize, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut best = f64::INFINITY;
        for p in &perms {
            for q in &perms {
                let v: f64 = (0..3)
                    .map(|i| cost.values().get(&[i, p[i], q[i]]))
                    .sum::<f64>()
                    / 3.0;
                best = best.min(v);
            }
        }
        assert!(
            (res.primal_value - best).abs() < 1e-9,
            "lp {} vs brute {}",
            res.primal_value,
            best
        );
        assert!(res.gap <= DUALITY_GAP_TOL);
    }

    #[test]
    fn vertex_integrality_for_uniform_marginals() {
        let mu = uniform_1d(&[0.0, 0.7, 1.9, 3.1]);
        let values = Tensor::build(&[4, 4], |idx| {
            (((idx[0] * 31 + idx[1] * 17) * 2654435761) % 101) as f64
        })
        .unwrap();
        let cost = CostTensor::new(values).unwrap();
        let res = solve_simplex(&cost, &[&mu, &mu], Sense::Min).unwrap();
        for &v in res.plan.mass().data() {
            assert!(v.abs() < 1e-10 || (v - 0.25).abs() < 1e-10, "entry {v}");
        }
    }

    #[test]
    fn solve_sym_plan_is_sigma_invariant() {
        let mu = uniform_1d(&[-1.0, 1.0]);
        let u = SampledVectorField::new(
            mu.clone(),
            mu.points().iter().map(|p| vec![-p[0]]).collect(),
        )
        .unwrap();
        let cost = vector_field_cost(&[&u], &[&mu, &mu]).unwrap();
        let res = solve_sym(&cost, &mu, Sense::Max).unwrap();
        // u = -id on {-1,1}: the swap involution attains value 1.
        assert!((res.primal_value - 1.0).abs() < 1e-9);
        let shifted = crate::measures::cyclic_shift_plan(&res.plan).unwrap();
        for (a, b) in res.plan.mass().data().iter().zip(shifted.mass().data()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn solve_sym_identity_field_diagonal() {
        let mu = uniform_1d(&[-1.0, 1.0]);
        let u = SampledVectorField::new(mu.clone(), mu.points().to_vec()).unwrap();
        let cost = vector_field_cost(&[&u], &[&mu, &mu]).unwrap();
        let res = solve_sym(&cost, &mu, Sense::Max).unwrap();
        assert!((res.primal_value - 1.0).abs() < 1e-9);
        assert!((res.plan.mass().get(&[0, 0]) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn solve_sym_constant_cost() {
        let mu = uniform_1d(&[0.0, 1.0, 2.0]);
        let values = Tensor::from_data(&[3, 3], vec![4.25; 9]).unwrap();
        let cost = CostTensor::new(values).unwrap();
        let res = solve_sym(&cost, &mu, Sense::Min).unwrap();
        assert!((res.primal_value - 4.25).abs() < 1e-10);
    }

    #[test]
    fn wasserstein_basics() {
        let mu = uniform_1d(&[0.0, 1.0]);
        assert!(wasserstein2(&mu, &mu).unwrap().abs() < 1e-12);
        let a = uniform_1d(&[0.0]);
        let b = uniform_1d(&[3.0]);
        assert!((wasserstein2(&a, &b).unwrap() - 9.0).abs() < 1e-12);
        let nu = uniform_1d(&[0.0, 2.0]);
        // couplings: {0->0,1->2} cost (0+1)/2, {0->2,1->0} cost (4+1)/2
        assert!((wasserstein2(&mu, &nu).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn max_sense_flips_objective() {
        let mu = uniform_1d(&[0.0, 1.0]);
        let cost = quadratic_cost(&[&mu, &mu]).unwrap();
        let res = solve_mm(&cost, &[&mu, &mu], Sense::Max).unwrap();
        assert!((res.primal_value - 1.0).abs() < 1e-12);
        assert!(res.gap <= DUALITY_GAP_TOL);
    }

    #[test]
    fn non_uniform_weights_exercise_simplex() {
        let mu = DiscreteMeasure::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0.2, 0.3, 0.5],
        )
        .unwrap();
        let nu = DiscreteMeasure::new(vec![vec![0.5], vec![1.5]], vec![0.6, 0.4]).unwrap();
        let values = Tensor::build(&[3, 2], |idx| {
            sq_dist(mu.point(idx[0]), nu.point(idx[1]))
        })
        .unwrap();
        let cost = CostTensor::new(values).unwrap();
        let res = solve_mm(&cost, &[&mu, &nu], Sense::Min).unwrap();
        assert!(res.gap <= DUALITY_GAP_TOL);
        res.plan.check_marginal(0, &mu).unwrap();
        res.plan.check_marginal(1, &nu).unwrap();
    }
}

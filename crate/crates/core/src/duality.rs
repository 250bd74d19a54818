//! Dual potentials, c-transforms, complementary slackness, graph
//! concentration, convex potential maps, and barycenter measures.

use alloc::vec;
use alloc::vec::Vec;

use crate::costs::{dot, CostTensor};
use crate::measures::{CouplingPlan, DiscreteMeasure};
use crate::transport::{wasserstein2, SolveResult, Sense, DUALITY_GAP_TOL};
use crate::{Error, Result};

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const SLACKNESS_TOL: f64 = 1e-8;
pub const SUPPORT_MASS_TOL: f64 = 1e-12;

/// One potential array per marginal, in cost units.
#[derive(Debug, Clone)]
pub struct DualPotentials {
    potentials: Vec<Vec<f64>>,
}

impl DualPotentials {
    pub fn new(potentials: Vec<Vec<f64>>) -> Self {
        DualPotentials { potentials }
    }

    pub fn arity(&self) -> usize {
        self.potentials.len()
    }

    pub fn potential(&self, axis: usize) -> &[f64] {
        &self.potentials[axis]
    }

    pub fn potentials(&self) -> &[Vec<f64>] {
        &self.potentials
    }

    /// Shifts u_0 to zero mean, moving the constant into u_1. Potentials are
    /// only determined up to constants summing to zero, so this pins a
    /// reproducible representative.
    pub fn normalize(&mut self) {
        if self.potentials.len() < 2 || self.potentials[0].is_empty() {
            return;
        }
        let mean = self.potentials[0].iter().sum::<f64>() / self.potentials[0].len() as f64;
        for v in &mut self.potentials[0] {
            *v -= mean;
        }
        for v in &mut self.potentials[1] {
            *v += mean;
        }
    }

    /// The dual objective sum_i integral of u_i against mu_i.
    pub fn objective(&self, marginals: &[&DiscreteMeasure]) -> f64 {
        self.potentials
            .iter()
            .zip(marginals)
            .map(|(u, mu)| dot(u, mu.weights()))
            .sum()
    }

    /// Worst signed slack of the dual constraints: max over tuples of
    /// sum_i u_i(x_i) − c(x) for min-sense (feasible when ≤ FEASIBILITY_TOL),
    /// negated for max-sense.
    pub fn max_violation(&self, cost: &CostTensor, sense: Sense) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (idx, c) in cost.values().iter_indexed() {
            let s: f64 = idx
                .iter()
                .enumerate()
                .map(|(ax, &i)| self.potentials[ax][i])
                .sum();
            let slack = match sense {
                Sense::Min => s - c,
                Sense::Max => c - s,
            };
            worst = worst.max(slack);
        }
        worst
    }

    pub fn is_feasible(&self, cost: &CostTensor, sense: Sense) -> bool {
        self.max_violation(cost, sense) <= FEASIBILITY_TOL
    }
}

/// Normalized dual potentials from an exact solve.
pub fn extract_duals(result: &SolveResult) -> Result<DualPotentials> {
    if result.gap > DUALITY_GAP_TOL {
        return Err(Error::NotExactSolve { gap: result.gap });
    }
    let mut dual = result.dual.clone();
    dual.normalize();
    Ok(dual)
}

/// Replaces u_i by its c-transform: the pointwise infimum of
/// c(x_0,…,x_{m-1}) − sum_{j≠i} u_j(x_j) over all tuples with x_i fixed.
/// This is a dual ascent step for the min-sense problem.
pub fn c_transform(
    potentials: &DualPotentials,
    axis: usize,
    cost: &CostTensor,
) -> Result<DualPotentials> {
    let m = cost.arity();
    if axis >= m {
        return Err(Error::AxisOutOfRange { axis, arity: m });
    }
    let n = cost.support_sizes()[axis];
    let mut new_u = vec![f64::INFINITY; n];
    for (idx, c) in cost.values().iter_indexed() {
        let rest: f64 = idx
            .iter()
            .enumerate()
            .filter(|(ax, _)| *ax != axis)
            .map(|(ax, &i)| potentials.potential(ax)[i])
            .sum();
        let cand = c - rest;
        if cand < new_u[idx[axis]] {
            new_u[idx[axis]] = cand;
        }
    }
    let mut out = potentials.potentials().to_vec();
    out[axis] = new_u;
    Ok(DualPotentials::new(out))
}

/// Support tuples carrying mass where the dual constraint is not tight.
/// Empty exactly when complementary slackness holds.
pub fn slackness_report(
    plan: &CouplingPlan,
    potentials: &DualPotentials,
    cost: &CostTensor,
) -> Result<Vec<Vec<usize>>> {
    if plan.mass().shape() != cost.support_sizes() {
        return Err(Error::GridMismatch(alloc::format!(
            "plan shape {:?} does not match cost shape {:?}",
            plan.mass().shape(),
            cost.support_sizes()
        )));
    }
    let mut violations = Vec::new();
    for ((idx, mass), (_, c)) in plan.mass().iter_indexed().zip(cost.values().iter_indexed()) {
        if mass <= SUPPORT_MASS_TOL {
            continue;
        }
        let s: f64 = idx
            .iter()
            .enumerate()
            .map(|(ax, &i)| potentials.potential(ax)[i])
            .sum();
        if (s - c).abs() > SLACKNESS_TOL {
            violations.push(idx);
        }
    }
    Ok(violations)
}

/// Index maps from axis 0 to each other axis, with the fraction of plan mass
/// sitting on that graph.
#[derive(Debug, Clone)]
pub struct MongeMaps {
    pub maps: Vec<Vec<usize>>,
    pub concentration: f64,
    pub is_graph: bool,
}

/// For each axis-0 index, picks the heaviest tuple (ties to the lowest
/// index) and measures how much mass the resulting graph carries.
pub fn graph_test(plan: &CouplingPlan, threshold: f64) -> MongeMaps {
    let shape = plan.mass().shape().to_vec();
    let m = shape.len();
    let n0 = shape[0];
    let mut best_mass = vec![f64::NEG_INFINITY; n0];
    let mut best_idx: Vec<Vec<usize>> = vec![Vec::new(); n0];
    for (idx, mass) in plan.mass().iter_indexed() {
        let i0 = idx[0];
        // Strict inequality keeps the first (lexicographically lowest) tuple
        // on ties.
        if mass > best_mass[i0] {
            best_mass[i0] = mass;
            best_idx[i0] = idx;
        }
    }
    let concentration: f64 = best_mass.iter().filter(|v| v.is_finite()).sum();
    let mut maps = vec![vec![0usize; n0]; m.saturating_sub(1)];
    for (i0, idx) in best_idx.iter().enumerate() {
        for ax in 1..m {
            maps[ax - 1][i0] = idx.get(ax).copied().unwrap_or(0);
        }
    }
    MongeMaps {
        maps,
        concentration,
        is_graph: concentration >= threshold,
    }
}

/// Convex potential arrays phi_i and f_i recovered from optimal duals on a
/// quadratic-cost instance.
#[derive(Debug, Clone)]
pub struct PotentialMaps {
    pub phi: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
    /// Per axis, whether second differences on the sorted 1-d support are
    /// ≥ −1e-8. Reported only for 1-d supports, None otherwise.
    pub convex_1d: Vec<Option<bool>>,
}

/// Builds phi_i(x) = (m−1)/2·|x|² − u_i(x) and f_i(x) = |x|²/2 + phi_i(x)
/// from dual potentials. The cost must be the pairwise squared-distance sum
/// on the given supports.
pub fn gs_potential_maps(
    potentials: &DualPotentials,
    supports: &[&DiscreteMeasure],
    cost: &CostTensor,
) -> Result<PotentialMaps> {
    let reference = crate::costs::quadratic_cost(supports)?;
    let matches = reference
        .values()
        .data()
        .iter()
        .zip(cost.values().data())
        .all(|(a, b)| (a - b).abs() <= 1e-9);
    if !matches {
        let deviation = reference
            .values()
            .data()
            .iter()
            .zip(cost.values().data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        return Err(Error::NotQuadraticCost { deviation });
    }
    let m = supports.len() as f64;
    let mut phi = Vec::with_capacity(supports.len());
    let mut f = Vec::with_capacity(supports.len());
    let mut convex_1d = Vec::with_capacity(supports.len());
    for (ax, mu) in supports.iter().enumerate() {
        let u = potentials.potential(ax);
        let mut phi_i = Vec::with_capacity(mu.len());
        let mut f_i = Vec::with_capacity(mu.len());
        for (k, p) in mu.points().iter().enumerate() {
            let sq = dot(p, p);
            let ph = (m - 1.0) / 2.0 * sq - u[k];
            phi_i.push(ph);
            f_i.push(sq / 2.0 + ph);
        }
        convex_1d.push(if mu.dim() == 1 {
            Some(second_differences_nonneg(mu, &f_i))
        } else {
            None
        });
        phi.push(phi_i);
        f.push(f_i);
    }
    Ok(PotentialMaps { phi, f, convex_1d })
}

fn second_differences_nonneg(mu: &DiscreteMeasure, values: &[f64]) -> bool {
    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|&a, &b| mu.point(a)[0].partial_cmp(&mu.point(b)[0]).unwrap());
    for w in order.windows(3) {
        let (x0, x1, x2) = (mu.point(w[0])[0], mu.point(w[1])[0], mu.point(w[2])[0]);
        let (v0, v1, v2) = (values[w[0]], values[w[1]], values[w[2]]);
        if x1 - x0 <= 0.0 || x2 - x1 <= 0.0 {
            continue;
        }
        let slope_left = (v1 - v0) / (x1 - x0);
        let slope_right = (v2 - v1) / (x2 - x1);
        if slope_right - slope_left < -1e-8 {
            return false;
        }
    }
    true
}

/// Pushforward of the plan by the barycentric map
/// (x_0,…,x_{m-1}) ↦ (1/m) Σ x_i; atoms with identical coordinates merge.
pub fn barycenter_measure(
    plan: &CouplingPlan,
    supports: &[&DiscreteMeasure],
) -> Result<DiscreteMeasure> {
    let shape = plan.mass().shape();
    if supports.len() != shape.len() {
        return Err(Error::DimensionMismatch {
            left: supports.len(),
            right: shape.len(),
        });
    }
    let dim = supports[0].dim();
    for mu in supports {
        if mu.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: mu.dim(),
            });
        }
    }
    let m = supports.len() as f64;
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (idx, mass) in plan.mass().iter_indexed() {
        if mass <= 0.0 {
            continue;
        }
        let mut bary = vec![0.0; dim];
        for (ax, &i) in idx.iter().enumerate() {
            for (d, v) in supports[ax].point(i).iter().enumerate() {
                bary[d] += v / m;
            }
        }
        if let Some(pos) = points.iter().position(|p| p == &bary) {
            weights[pos] += mass;
        } else {
            points.push(bary);
            weights.push(mass);
        }
    }
    DiscreteMeasure::new(points, weights)
}

#[derive(Debug, Clone)]
pub struct BarycenterProbe {
    pub nu_value: f64,
    pub candidate_values: Vec<f64>,
    /// Indices of candidates strictly better than nu by more than 1e-8.
    pub better: Vec<usize>,
}

/// Compares sum_i W2²(mu_i, nu) against the same sum for each candidate.
pub fn barycenter_optimality_probe(
    nu: &DiscreteMeasure,
    marginals: &[&DiscreteMeasure],
    candidates: &[&DiscreteMeasure],
) -> Result<BarycenterProbe> {
    let total = |target: &DiscreteMeasure| -> Result<f64> {
        let mut s = 0.0;
        for mu in marginals {
            s += wasserstein2(mu, target)?;
        }
        Ok(s)
    };
    let nu_value = total(nu)?;
    let mut candidate_values = Vec::with_capacity(candidates.len());
    let mut better = Vec::new();
    for (k, cand) in candidates.iter().enumerate() {
        let v = total(cand)?;
        if v < nu_value - 1e-8 {
            better.push(k);
        }
        candidate_values.push(v);
    }
    Ok(BarycenterProbe {
        nu_value,
        candidate_values,
        better,
    })
}

/// For a two-marginal symmetric cost with equal marginals, averages each
/// potential with its partner's swap. Feasibility and the objective are
/// preserved, and the result satisfies u_0 = u_1.
pub fn swap_average_pair(potentials: &DualPotentials) -> Result<DualPotentials> {
    if potentials.arity() != 2 {
        return Err(Error::AxisOutOfRange {
            axis: potentials.arity(),
            arity: 2,
        });
    }
    let u0 = potentials.potential(0);
    let u1 = potentials.potential(1);
    if u0.len() != u1.len() {
        return Err(Error::DimensionMismatch {
            left: u0.len(),
            right: u1.len(),
        });
    }
    let avg: Vec<f64> = u0.iter().zip(u1).map(|(a, b)| (a + b) / 2.0).collect();
    Ok(DualPotentials::new(vec![avg.clone(), avg]))
}

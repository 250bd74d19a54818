//! Discrete measures, couplings, marginals, and pushforwards.

use alloc::vec;
use alloc::vec::Vec;

use crate::tensor::Tensor;
use crate::{Error, Result};

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const MASS_TOL: f64 = 1e-10;
pub const MARGINAL_TOL: f64 = 1e-9;

/// A weighted point cloud in `R^d` with weights summing to one.
///
/// Validation happens once at construction; values are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let m = DiscreteMeasure { points, weights };
        m.validate()?;
        Ok(m)
    }

    /// Uniform weights `1/n` on the given points.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        let n = points.len();
        DiscreteMeasure::new(points, vec![1.0 / n as f64; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() || self.points.len() != self.weights.len() {
            return Err(Error::EmptySupport);
        }
        let d = self.points[0].len();
        for p in &self.points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: p.len(),
                });
            }
        }
        for (i, &w) in self.weights.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeWeight {
                    index: i,
                    weight: w,
                });
            }
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NonNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&x| (x - w).abs() <= 1e-12)
    }

    /// Second moment `sum_i w_i |x_i|^2`.
    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * p.iter().map(|c| c * c).sum::<f64>())
            .sum()
    }
}

/// Validates a measure without constructing one; mirrors the constructor.
pub fn validate(measure: &DiscreteMeasure) -> Result<()> {
    measure.validate()
}

/// An m-way nonnegative mass array with total mass one.
///
/// The marginal constraints are the caller's contract; [`CouplingPlan::check_marginal`]
/// verifies them against a prescribed measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingPlan {
    mass: Tensor,
}

impl CouplingPlan {
    pub fn new(mass: Tensor) -> Result<Self> {
        mass.check_finite()?;
        for (i, &v) in mass.data().iter().enumerate() {
            if v < -MASS_TOL {
                return Err(Error::NegativeWeight {
                    index: i,
                    weight: v,
                });
            }
        }
        let total: f64 = mass.data().iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::NonNormalized {
                sum: total,
                tol: MASS_TOL,
            });
        }
        Ok(CouplingPlan { mass })
    }

    /// The product coupling of the given marginals.
    pub fn product(marginals: &[&DiscreteMeasure]) -> Result<Self> {
        let shape: Vec<usize> = marginals.iter().map(|m| m.len()).collect();
        let mass = Tensor::build(&shape, |idx| {
            idx.iter()
                .enumerate()
                .map(|(ax, &i)| marginals[ax].weights()[i])
                .product()
        })?;
        CouplingPlan::new(mass)
    }

    /// The plan `(I, S, S^2, ..., S^{m-1})_# mu` for uniform `mu`, given the
    /// index permutation `s`.
    pub fn from_permutation_orbit(s: &[usize], arity: usize) -> Result<Self> {
        let n = s.len();
        let mut mass = Tensor::zeros(&vec![n; arity])?;
        let mut idx = vec![0usize; arity];
        for i in 0..n {
            idx[0] = i;
            let mut j = i;
            for k in 1..arity {
                j = *s.get(j).ok_or(Error::InvalidPermutation(
                    alloc::format!("index {j} out of range"),
                ))?;
                idx[k] = j;
            }
            let flat = mass.flat_index(&idx);
            mass.data_mut()[flat] = 1.0 / n as f64;
        }
        CouplingPlan::new(mass)
    }

    pub fn arity(&self) -> usize {
        self.mass.arity()
    }

    pub fn support_sizes(&self) -> &[usize] {
        self.mass.shape()
    }

    pub fn mass(&self) -> &Tensor {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.data().iter().sum()
    }

    /// Sums mass over all axes except `axis`.
    pub fn marginal(&self, axis: usize) -> Result<Vec<f64>> {
        let m = self.arity();
        if axis >= m {
            return Err(Error::AxisOutOfRange { axis, arity: m });
        }
        let mut out = vec![0.0; self.mass.shape()[axis]];
        for (idx, v) in self.mass.iter_indexed() {
            out[idx[axis]] += v;
        }
        Ok(out)
    }

    /// Verifies the axis marginal against a prescribed measure's weights.
    pub fn check_marginal(&self, axis: usize, measure: &DiscreteMeasure) -> Result<()> {
        let got = self.marginal(axis)?;
        if got.len() != measure.len() {
            return Err(Error::MarginalMismatch {
                axis,
                deviation: f64::INFINITY,
            });
        }
        let deviation = got
            .iter()
            .zip(measure.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if deviation > MARGINAL_TOL {
            return Err(Error::MarginalMismatch { axis, deviation });
        }
        Ok(())
    }
}

/// Pushforward of the plan under the cyclic coordinate shift `sigma`:
/// mass at `(i_0, ..., i_{m-1})` moves to `(i_1, ..., i_{m-1}, i_0)`.
/// Requires all axes to share one support.
pub fn cyclic_shift_plan(plan: &CouplingPlan) -> Result<CouplingPlan> {
    Ok(CouplingPlan {
        mass: plan.mass.cyclic_shift()?,
    })
}

/// The average `(1/m) sum_k sigma^k_# plan`; sigma-invariant and
/// marginal-preserving.
pub fn symmetrize_plan(plan: &CouplingPlan) -> Result<CouplingPlan> {
    let m = plan.arity();
    let mut acc = plan.mass.clone();
    let mut shifted = plan.mass.clone();
    for _ in 1..m {
        shifted = shifted.cyclic_shift()?;
        for (a, b) in acc.data_mut().iter_mut().zip(shifted.data()) {
            *a += b;
        }
    }
    for a in acc.data_mut() {
        *a /= m as f64;
    }
    Ok(CouplingPlan { mass: acc })
}

/// Pushforward of a measure by an index map into the same support:
/// mass at atom `i` moves to atom `map[i]`, weights at a common target add.
pub fn pushforward_indices(measure: &DiscreteMeasure, map: &[usize]) -> Result<DiscreteMeasure> {
    let n = measure.len();
    if map.len() != n {
        return Err(Error::MapOutOfRange {
            index: map.len(),
            target: 0,
            size: n,
        });
    }
    let mut weights = vec![0.0; n];
    for (i, &t) in map.iter().enumerate() {
        if t >= n {
            return Err(Error::MapOutOfRange {
                index: i,
                target: t,
                size: n,
            });
        }
        weights[t] += measure.weights()[i];
    }
    // Drop atoms that received no mass to keep supports minimal.
    let mut points = Vec::new();
    let mut kept = Vec::new();
    for (p, &w) in measure.points().iter().zip(&weights) {
        if w > 0.0 {
            points.push(p.clone());
            kept.push(w);
        }
    }
    DiscreteMeasure::new(points, kept)
}

/// Pushforward by a point map; atoms landing on exactly equal coordinates
/// are merged with weights added.
pub fn pushforward_points(
    measure: &DiscreteMeasure,
    map: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<DiscreteMeasure> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (p, &w) in measure.points().iter().zip(measure.weights()) {
        let q = map(p);
        match points.iter().position(|r| r == &q) {
            Some(k) => weights[k] += w,
            None => {
                points.push(q);
                weights.push(w);
            }
        }
    }
    DiscreteMeasure::new(points, weights)
}

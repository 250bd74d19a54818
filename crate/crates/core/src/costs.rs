//! Cost tensors: the pairwise quadratic family, the vector-field family,
//! cyclic symmetrization, and the m=3 graph embedding with its reduction
//! identity.

#[cfg(test)]
use alloc::vec;
use alloc::vec::Vec;

use crate::measures::{CouplingPlan, DiscreteMeasure};
use crate::tensor::Tensor;
use crate::{Error, Result};

/// An m-way array of finite cost values over support indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTensor {
    values: Tensor,
}

impl CostTensor {
    pub fn new(values: Tensor) -> Result<Self> {
        values.check_finite()?;
        Ok(CostTensor { values })
    }

    pub fn arity(&self) -> usize {
        self.values.arity()
    }

    pub fn support_sizes(&self) -> &[usize] {
        self.values.shape()
    }

    pub fn values(&self) -> &Tensor {
        &self.values
    }

    /// `<c, theta>`, the transport objective of a plan under this cost.
    pub fn pair(&self, plan: &CouplingPlan) -> Result<f64> {
        self.values.dot(plan.mass())
    }
}

/// Values `u(x_i)` attached to the support points of a base measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVectorField {
    base: DiscreteMeasure,
    values: Vec<Vec<f64>>,
}

impl SampledVectorField {
    pub fn new(base: DiscreteMeasure, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != base.len() {
            return Err(Error::DimensionMismatch {
                left: base.len(),
                right: values.len(),
            });
        }
        for v in &values {
            if v.len() != base.dim() {
                return Err(Error::DimensionMismatch {
                    left: base.dim(),
                    right: v.len(),
                });
            }
            for (i, &c) in v.iter().enumerate() {
                if !c.is_finite() {
                    return Err(Error::NonFiniteEntry { index: i, value: c });
                }
            }
        }
        Ok(SampledVectorField { base, values })
    }

    pub fn base(&self) -> &DiscreteMeasure {
        &self.base
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of the first pair of exactly equal values, if any. The
    /// discrete stand-in for a degeneracy report; pairwise-distinct values
    /// are required wherever a field must be inverted as a permutation.
    pub fn duplicate_values(&self) -> Option<(usize, usize)> {
        for i in 0..self.values.len() {
            for j in (i + 1)..self.values.len() {
                if self.values[i] == self.values[j] {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The Gangbo-Swiech pairwise quadratic cost
/// `c(x_0,...,x_{m-1}) = sum_{i<j} |x_i - x_j|^2`.
pub fn quadratic_cost(supports: &[&DiscreteMeasure]) -> Result<CostTensor> {
    let d = supports[0].dim();
    for s in supports {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: s.dim(),
            });
        }
    }
    let shape: Vec<usize> = supports.iter().map(|s| s.len()).collect();
    let m = supports.len();
    let values = Tensor::build(&shape, |idx| {
        let mut c = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                c += sq_dist(supports[i].point(idx[i]), supports[j].point(idx[j]));
            }
        }
        c
    })?;
    CostTensor::new(values)
}

/// The vector-field cost
/// `c(x_0,...,x_{m-1}) = sum_{k=1}^{m-1} <u_k(x_0), x_k>`.
///
/// All fields must be sampled on the axis-0 support.
pub fn vector_field_cost(
    fields: &[&SampledVectorField],
    supports: &[&DiscreteMeasure],
) -> Result<CostTensor> {
    let m = supports.len();
    if fields.len() != m - 1 {
        return Err(Error::BaseMismatch);
    }
    for f in fields {
        if f.base() != supports[0] {
            return Err(Error::BaseMismatch);
        }
    }
    let d = supports[0].dim();
    for s in supports {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: s.dim(),
            });
        }
    }
    let shape: Vec<usize> = supports.iter().map(|s| s.len()).collect();
    let values = Tensor::build(&shape, |idx| {
        (1..m)
            .map(|k| dot(fields[k - 1].value(idx[0]), supports[k].point(idx[k])))
            .sum()
    })?;
    CostTensor::new(values)
}

/// The cyclic symmetrization `c~(x) = (1/m) sum_i c(sigma^i x)`.
pub fn symmetrize_cost(cost: &CostTensor) -> Result<CostTensor> {
    let m = cost.arity();
    let mut acc = cost.values.clone();
    let mut shifted = cost.values.clone();
    for _ in 1..m {
        // c(sigma x) as a tensor is the inverse-shift pushforward of c, and
        // summing over all powers makes the orientation immaterial.
        shifted = shifted.cyclic_shift()?;
        for (a, b) in acc.data_mut().iter_mut().zip(shifted.data()) {
            *a += b;
        }
    }
    for a in acc.data_mut() {
        *a /= m as f64;
    }
    CostTensor::new(acc)
}

/// The m=3 embedding of base points and two sampled fields into `R^{6d}`:
/// `P(x) = (x, x, u_1(x), 0, 0, u_2(x))`.
#[derive(Debug, Clone)]
pub struct GraphEmbedding {
    base: DiscreteMeasure,
    embedded: Vec<Vec<f64>>,
}

impl GraphEmbedding {
    pub fn base(&self) -> &DiscreteMeasure {
        &self.base
    }

    pub fn embedded_points(&self) -> &[Vec<f64>] {
        &self.embedded
    }

    /// The embedded measure: uniform weights on the embedded points.
    pub fn embedded_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::uniform(self.embedded.clone())
    }
}

/// Applies the block 3-cycle on `R^{2d} x R^{2d} x R^{2d}` to a 6d-point,
/// moving block k to block k-1 so that `sigma^3 = Id`.
pub fn block_shift_m3(point: &[f64]) -> Vec<f64> {
    let b = point.len() / 3;
    let mut out = Vec::with_capacity(point.len());
    out.extend_from_slice(&point[b..]);
    out.extend_from_slice(&point[..b]);
    out
}

pub fn embed_graph_m3(
    u1: &SampledVectorField,
    u2: &SampledVectorField,
) -> Result<GraphEmbedding> {
    if u1.base() != u2.base() {
        return Err(Error::BaseMismatch);
    }
    let base = u1.base().clone();
    if !base.is_uniform() {
        return Err(Error::NonUniformWeights);
    }
    let d = base.dim();
    let mut embedded = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut p = Vec::with_capacity(6 * d);
        p.extend_from_slice(base.point(i));
        p.extend_from_slice(base.point(i));
        p.extend_from_slice(u1.value(i));
        p.extend(core::iter::repeat(0.0).take(2 * d));
        p.extend_from_slice(u2.value(i));
        embedded.push(p);
    }
    Ok(GraphEmbedding { base, embedded })
}

/// The two objectives and the marginal constant of the m=3 reduction
/// identity `C + 2 D = const`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    /// Embedded Gangbo-Swiech quadratic objective C(plan).
    pub gs_objective: f64,
    /// Symmetrized vector-field objective D(plan).
    pub sym_objective: f64,
    /// Marginal-only second-moment constant.
    pub moment_constant: f64,
    /// `|C + 2 D - const|`.
    pub residual: f64,
}

/// Evaluates the embedded quadratic objective, the symmetrized vector-field
/// objective, and the second-moment constant on a 3-way plan whose marginals
/// are all the uniform base measure of the fields.
///
/// Expanding the six squared differences of the embedded quadratic cost
/// leaves cross terms `-2 D` plus moments of `x`, `u_1`, `u_2` against the
/// marginals, so the residual vanishes for every admissible plan.
pub fn reduction_identity(
    u1: &SampledVectorField,
    u2: &SampledVectorField,
    plan: &CouplingPlan,
) -> Result<ReductionReport> {
    if u1.base() != u2.base() {
        return Err(Error::BaseMismatch);
    }
    let base = u1.base();
    if plan.arity() != 3 {
        return Err(Error::AxisOutOfRange {
            axis: plan.arity(),
            arity: 3,
        });
    }
    for axis in 0..3 {
        plan.check_marginal(axis, base)?;
    }

    let x = base.points();
    let v1 = u1.values();
    let v2 = u2.values();

    let mut gs = 0.0;
    let mut sym = 0.0;
    for (idx, w) in plan.mass().iter_indexed() {
        if w == 0.0 {
            continue;
        }
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        // ||P(x) - sigma P(y)||^2 + ||sigma P(y) - sigma^2 P(z)||^2
        //   + ||sigma^2 P(z) - P(x)||^2 expanded blockwise.
        let c = sq_dist(&x[i], &v1[j])
            + dot(&x[i], &x[i])
            + dot(&v1[i], &v1[i])
            + dot(&v2[j], &v2[j])
            + dot(&x[j], &x[j])
            + sq_dist(&v2[i], &x[j])
            + dot(&v1[j], &v1[j])
            + dot(&v2[k], &v2[k])
            + dot(&x[k], &x[k])
            + sq_dist(&v2[j], &x[k])
            + sq_dist(&x[j], &v1[k])
            + dot(&x[j], &x[j])
            + dot(&x[i], &x[i])
            + sq_dist(&x[i], &v2[k])
            + sq_dist(&v1[i], &x[k])
            + dot(&x[k], &x[k])
            + dot(&v1[k], &v1[k])
            + dot(&v2[i], &v2[i]);
        gs += w * c;
        let d = dot(&v1[j], &x[i])
            + dot(&v2[i], &x[j])
            + dot(&v2[j], &x[k])
            + dot(&v1[k], &x[j])
            + dot(&v2[k], &x[i])
            + dot(&v1[i], &x[k]);
        sym += w * d;
    }

    let n = base.len() as f64;
    let m2: f64 = x.iter().map(|p| dot(p, p)).sum::<f64>() / n;
    let mu1: f64 = v1.iter().map(|p| dot(p, p)).sum::<f64>() / n;
    let mu2: f64 = v2.iter().map(|p| dot(p, p)).sum::<f64>() / n;
    let constant = 12.0 * m2 + 6.0 * mu1 + 6.0 * mu2;

    Ok(ReductionReport {
        gs_objective: gs,
        sym_objective: sym,
        moment_constant: constant,
        residual: (gs + 2.0 * sym - constant).abs(),
    })
}

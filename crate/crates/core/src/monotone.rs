//! Monotonicity and cyclic monotonicity tests, the Fitzpatrick function,
//! self-dual interpolation, partial Legendre transforms, and
//! antisymmetrization on tabulated grids.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::costs::{dot, sq_dist, vector_field_cost, SampledVectorField};
use crate::involution::enumerate_m_involutions;
use crate::measures::DiscreteMeasure;
use crate::tensor::Tensor;
use crate::transport::{solve_sym, Sense};
use crate::{Error, Result, DENSE_CAP};

pub const MONOTONE_TOL: f64 = 1e-10;

/// A finite sample of an operator graph: pairs (x_k, p_k) with p_k the
/// operator value at x_k.
#[derive(Debug, Clone)]
pub struct GraphSample {
    points: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
}

impl GraphSample {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                left: points.len(),
                right: values.len(),
            });
        }
        let dim = points[0].len();
        for (k, (x, p)) in points.iter().zip(&values).enumerate() {
            if x.len() != dim || p.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: x.len(),
                    right: p.len(),
                });
            }
            if let Some(&bad) = x.iter().chain(p.iter()).find(|v| !v.is_finite()) {
                return Err(Error::NonFiniteEntry {
                    index: k,
                    value: bad,
                });
            }
        }
        Ok(GraphSample { points, values })
    }

    pub fn from_field(u: &SampledVectorField) -> Result<Self> {
        GraphSample::new(u.base().points().to_vec(), u.values().to_vec())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k]
    }
}

#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub monotone: bool,
    /// The pair with the smallest product ⟨x_i−x_j, p_i−p_j⟩.
    pub worst_pair: Option<(usize, usize)>,
    pub worst_value: f64,
}

/// Pairwise monotonicity: ⟨x_i−x_j, p_i−p_j⟩ ≥ −1e-10 for all pairs.
pub fn is_monotone(sample: &GraphSample) -> MonotoneReport {
    let n = sample.len();
    let mut worst_pair = None;
    let mut worst_value = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = sample
                .point(i)
                .iter()
                .zip(sample.point(j))
                .zip(sample.value(i).iter().zip(sample.value(j)))
                .map(|((xi, xj), (pi, pj))| (xi - xj) * (pi - pj))
                .sum();
            if v < worst_value {
                worst_value = v;
                worst_pair = Some((i, j));
            }
        }
    }
    if worst_pair.is_none() {
        worst_value = 0.0;
    }
    MonotoneReport {
        monotone: worst_value >= -MONOTONE_TOL,
        worst_pair,
        worst_value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleMode {
    Exhaustive,
    Random { trials: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct CycleReport {
    pub monotone: bool,
    /// The cycle of sample indices with the smallest cyclic sum.
    pub worst_cycle: Vec<usize>,
    pub worst_value: f64,
}

fn cycle_sum(sample: &GraphSample, cycle: &[usize]) -> f64 {
    let m = cycle.len();
    let mut total = 0.0;
    for k in 0..m {
        let next = cycle[(k + 1) % m];
        let prev = cycle[k];
        total += sample
            .value(next)
            .iter()
            .zip(sample.point(next).iter().zip(sample.point(prev)))
            .map(|(p, (a, b))| p * (a - b))
            .sum::<f64>();
    }
    total
}

/// m-cyclic monotonicity: Σ_k ⟨p_{k+1}, x_{k+1} − x_k⟩ ≥ −1e-10 over closed
/// chains of m sample points, scanned exhaustively or by seeded sampling.
pub fn is_m_cyclically_monotone(
    sample: &GraphSample,
    m: usize,
    mode: CycleMode,
) -> Result<CycleReport> {
    let n = sample.len();
    if m == 0 {
        return Err(Error::AxisOutOfRange { axis: 0, arity: 0 });
    }
    let mut worst_value = f64::INFINITY;
    let mut worst_cycle = Vec::new();
    match mode {
        CycleMode::Exhaustive => {
            let mut size: usize = 1;
            for _ in 0..m {
                size = size.saturating_mul(n);
                if size > DENSE_CAP {
                    return Err(Error::CapExceeded {
                        n: size,
                        cap: DENSE_CAP,
                    });
                }
            }
            let mut cycle = vec![0usize; m];
            loop {
                let v = cycle_sum(sample, &cycle);
                if v < worst_value {
                    worst_value = v;
                    worst_cycle = cycle.clone();
                }
                let mut ax = m;
                loop {
                    if ax == 0 {
                        break;
                    }
                    ax -= 1;
                    cycle[ax] += 1;
                    if cycle[ax] < n {
                        break;
                    }
                    cycle[ax] = 0;
                }
                if cycle.iter().all(|&c| c == 0) {
                    break;
                }
            }
        }
        CycleMode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials.max(1) {
                let cycle: Vec<usize> =
                    (0..m).map(|_| (rng.next_u64() % n as u64) as usize).collect();
                let v = cycle_sum(sample, &cycle);
                if v < worst_value {
                    worst_value = v;
                    worst_cycle = cycle;
                }
            }
        }
    }
    Ok(CycleReport {
        monotone: worst_value >= -MONOTONE_TOL,
        worst_cycle,
        worst_value,
    })
}

/// The Fitzpatrick function of the sampled graph at (p, x):
/// max_k ⟨p, x_k⟩ + ⟨p_k, x − x_k⟩.
pub fn fitzpatrick(sample: &GraphSample, p: &[f64], x: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut best = f64::NEG_INFINITY;
    for k in 0..sample.len() {
        let y = sample.point(k);
        let q = sample.value(k);
        let diff: f64 = q.iter().zip(x.iter().zip(y)).map(|(qi, (xi, yi))| qi * (xi - yi)).sum();
        best = best.max(dot(p, y) + diff);
    }
    Ok(best)
}

/// A function tabulated on a product of strictly increasing 1-d axes.
#[derive(Debug, Clone)]
pub struct GridFunction {
    axes: Vec<Vec<f64>>,
    values: Tensor,
}

impl GridFunction {
    pub fn new(axes: Vec<Vec<f64>>, values: Tensor) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        if shape != values.shape() {
            return Err(Error::GridMismatch(alloc::format!(
                "axes sizes {:?} do not match value shape {:?}",
                shape,
                values.shape()
            )));
        }
        for (ax, axis) in axes.iter().enumerate() {
            if axis.is_empty() {
                return Err(Error::GridMismatch(alloc::format!("empty axis")));
            }
            if let Some(&bad) = axis.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFiniteEntry {
                    index: ax,
                    value: bad,
                });
            }
            if axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::GridMismatch(alloc::format!(
                    "axes must be strictly increasing"
                )));
            }
        }
        values.check_finite()?;
        Ok(GridFunction { axes, values })
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &Tensor {
        &self.values
    }

    pub fn arity(&self) -> usize {
        self.axes.len()
    }

    fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(ax, &i)| self.axes[ax][i])
            .collect()
    }

    /// Discretization tolerance: max grid spacing times a Lipschitz
    /// estimate from finite differences along each axis.
    pub fn tolerance(&self) -> f64 {
        let mut max_spacing: f64 = 0.0;
        for axis in &self.axes {
            for w in axis.windows(2) {
                max_spacing = max_spacing.max(w[1] - w[0]);
            }
        }
        let mut lipschitz: f64 = 0.0;
        for (idx, v) in self.values.iter_indexed() {
            for ax in 0..self.axes.len() {
                if idx[ax] + 1 < self.axes[ax].len() {
                    let mut next = idx.clone();
                    next[ax] += 1;
                    let dv = self.values.get(&next) - v;
                    let dx = self.axes[ax][idx[ax] + 1] - self.axes[ax][idx[ax]];
                    lipschitz = lipschitz.max((dv / dx).abs());
                }
            }
        }
        max_spacing * lipschitz
    }
}

/// For each grid node v, the minimum over node pairs (a, b) with midpoint v
/// of (1/2)N(a) + (1/2)N*(b) + (1/8)|a − b|². Only splittings whose both
/// endpoints are grid nodes are searched.
pub fn selfdual_interpolation(n: &GridFunction, nstar: &GridFunction) -> Result<GridFunction> {
    if n.axes() != nstar.axes() {
        return Err(Error::GridMismatch(alloc::format!(
            "interpolation inputs are tabulated on different grids"
        )));
    }
    let axes = n.axes().to_vec();
    // For each axis and target index, the admissible (ia, ib) index pairs
    // whose coordinates average to the target coordinate.
    let snap = 1e-9;
    let mut pairs_per_axis: Vec<Vec<Vec<(usize, usize)>>> = Vec::with_capacity(axes.len());
    for axis in &axes {
        let len = axis.len();
        let mut per_target = vec![Vec::new(); len];
        for t in 0..len {
            for ia in 0..len {
                for ib in 0..len {
                    if ((axis[ia] + axis[ib]) / 2.0 - axis[t]).abs() <= snap {
                        per_target[t].push((ia, ib));
                    }
                }
            }
        }
        pairs_per_axis.push(per_target);
    }
    let values = Tensor::build(n.values().shape(), |idx| {
        let mut best = f64::INFINITY;
        let mut a = vec![0usize; idx.len()];
        let mut b = vec![0usize; idx.len()];
        // Depth-first product over the admissible pairs of every axis.
        fn scan(
            ax: usize,
            idx: &[usize],
            pairs_per_axis: &[Vec<Vec<(usize, usize)>>],
            a: &mut Vec<usize>,
            b: &mut Vec<usize>,
            n: &GridFunction,
            nstar: &GridFunction,
            best: &mut f64,
        ) {
            if ax == idx.len() {
                let ca = n.coords(a);
                let cb = n.coords(b);
                let v = 0.5 * n.values().get(a)
                    + 0.5 * nstar.values().get(b)
                    + sq_dist(&ca, &cb) / 8.0;
                if v < *best {
                    *best = v;
                }
                return;
            }
            for &(ia, ib) in &pairs_per_axis[ax][idx[ax]] {
                a[ax] = ia;
                b[ax] = ib;
                scan(ax + 1, idx, pairs_per_axis, a, b, n, nstar, best);
            }
        }
        scan(0, idx, &pairs_per_axis, &mut a, &mut b, n, nstar, &mut best);
        best
    })?;
    GridFunction::new(axes, values)
}

/// Legendre transform over a contiguous block of axes: the output at a node
/// whose block coordinates are y is sup over block nodes p of
/// ⟨y, p⟩ − L(…, p, …), tabulated on the same grid.
pub fn partial_legendre(l: &GridFunction, transform_axes: &[usize]) -> Result<GridFunction> {
    let m = l.arity();
    if transform_axes.is_empty() {
        return Err(Error::GridMismatch(alloc::format!("no transform axes")));
    }
    for w in transform_axes.windows(2) {
        if w[1] != w[0] + 1 {
            return Err(Error::GridMismatch(alloc::format!(
                "transform axes must be contiguous"
            )));
        }
    }
    if *transform_axes.last().unwrap() >= m {
        return Err(Error::GridMismatch(alloc::format!(
            "transform axis out of range"
        )));
    }
    let values = Tensor::build(l.values().shape(), |idx| {
        let y: Vec<f64> = transform_axes.iter().map(|&ax| l.axes()[ax][idx[ax]]).collect();
        let mut best = f64::NEG_INFINITY;
        let mut probe = idx.to_vec();
        // Walk the product of the transform axes' grids.
        let sizes: Vec<usize> = transform_axes.iter().map(|&ax| l.axes()[ax].len()).collect();
        let mut counter = vec![0usize; sizes.len()];
        loop {
            let mut inner = 0.0;
            for (k, &ax) in transform_axes.iter().enumerate() {
                probe[ax] = counter[k];
                inner += y[k] * l.axes()[ax][counter[k]];
            }
            let v = inner - l.values().get(&probe);
            if v > best {
                best = v;
            }
            let mut pos = sizes.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                counter[pos] += 1;
                if counter[pos] < sizes[pos] {
                    break;
                }
                counter[pos] = 0;
            }
            if counter.iter().all(|&c| c == 0) {
                break;
            }
        }
        best
    })?;
    GridFunction::new(l.axes().to_vec(), values)
}

/// H(x, y) = (K(x, y) − K(y, x)) / 2 on a square grid; antisymmetric with
/// zero diagonal exactly.
pub fn antisymmetrize(k: &GridFunction) -> Result<GridFunction> {
    let arity = k.arity();
    if arity % 2 != 0 {
        return Err(Error::NonSquareGrid);
    }
    let half = arity / 2;
    if k.axes()[..half] != k.axes()[half..] {
        return Err(Error::NonSquareGrid);
    }
    let values = Tensor::build(k.values().shape(), |idx| {
        let mut swapped = idx.to_vec();
        for ax in 0..half {
            swapped.swap(ax, half + ax);
        }
        (k.values().get(idx) - k.values().get(&swapped)) / 2.0
    })?;
    GridFunction::new(k.axes().to_vec(), values)
}

pub const EQUIVALENCE_CAP: usize = 8;

/// The four equivalent monotonicity statements, each evaluated directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Pairwise monotone.
    pub monotone: bool,
    /// max over involutions S of (1/n) Σ ⟨u(x_i), x_{S(i)} − x_i⟩ is zero.
    pub involution_sup_zero: bool,
    /// The closest involution graph to u (least squares) is the identity.
    pub projection_identity: bool,
    /// The symmetric LP maximum equals the diagonal value.
    pub lp_diagonal: bool,
}

impl EquivalenceReport {
    pub fn all(&self) -> bool {
        self.monotone && self.involution_sup_zero && self.projection_identity && self.lp_diagonal
    }

    pub fn consistent(&self) -> bool {
        let v = self.monotone;
        self.involution_sup_zero == v && self.projection_identity == v && self.lp_diagonal == v
    }
}

/// Evaluates the four characterizations of monotonicity for a sampled field
/// on a uniform measure, with the involution sups taken exhaustively.
pub fn monotone_equivalence_report(u: &SampledVectorField) -> Result<EquivalenceReport> {
    let base = u.base();
    if !base.is_uniform() {
        return Err(Error::NonUniformWeights);
    }
    let n = base.len();
    if n > EQUIVALENCE_CAP {
        return Err(Error::CapExceeded {
            n,
            cap: EQUIVALENCE_CAP,
        });
    }
    let sample = GraphSample::from_field(u)?;
    let monotone = is_monotone(&sample).monotone;

    let involutions = enumerate_m_involutions(n, 2)?;
    let mut sup_displacement = f64::NEG_INFINITY;
    let mut min_distance = f64::INFINITY;
    let mut identity_distance = 0.0;
    for s in &involutions {
        let mut displacement = 0.0;
        let mut distance = 0.0;
        for i in 0..n {
            let target = base.point(s.apply(i));
            displacement += dot(u.value(i), target) - dot(u.value(i), base.point(i));
            distance += sq_dist(u.value(i), target);
        }
        displacement /= n as f64;
        sup_displacement = sup_displacement.max(displacement);
        min_distance = min_distance.min(distance);
        if s.perm().iter().enumerate().all(|(i, &v)| i == v) {
            identity_distance = distance;
        }
    }
    let involution_sup_zero = sup_displacement.abs() <= 1e-9;
    let projection_identity = identity_distance <= min_distance + 1e-12;

    let supports: Vec<&DiscreteMeasure> = vec![base, base];
    let cost = vector_field_cost(&[u], &supports)?;
    let lp = solve_sym(&cost, base, Sense::Max)?;
    let diagonal: f64 = (0..n)
        .map(|i| dot(u.value(i), base.point(i)))
        .sum::<f64>()
        / n as f64;
    let lp_diagonal = (lp.primal_value - diagonal).abs() <= 1e-9;

    Ok(EquivalenceReport {
        monotone,
        involution_sup_zero,
        projection_identity,
        lp_diagonal,
    })
}

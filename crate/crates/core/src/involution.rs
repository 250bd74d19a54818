//! Permutations of finite order dividing m, search for the best one under a
//! vector-field objective, and the discrete polar decomposition pipelines.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::costs::{dot, sq_dist, symmetrize_cost, vector_field_cost, SampledVectorField};
use crate::duality::{extract_duals, DualPotentials};
use crate::measures::{CouplingPlan, DiscreteMeasure};
use crate::transport::{assignment_min, solve_sym, Sense, SolveResult};
use crate::{Error, Result, ENUMERATION_CAP};

/// A permutation whose m-th power is the identity, equivalently one whose
/// cycle lengths all divide m. Acts as a measure-preserving map on a uniform
/// discrete measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MInvolution {
    perm: Vec<usize>,
    order: usize,
}

impl MInvolution {
    pub fn new(perm: Vec<usize>, order: usize) -> Result<Self> {
        validate_permutation(&perm)?;
        if order == 0 {
            return Err(Error::InvalidPermutation(alloc::format!(
                "order divisor must be positive"
            )));
        }
        let mut current: Vec<usize> = (0..perm.len()).collect();
        for _ in 0..order {
            current = current.iter().map(|&i| perm[i]).collect();
        }
        if current.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::NotAnInvolution {
                len: perm.len(),
                m: order,
            });
        }
        Ok(MInvolution { perm, order })
    }

    pub fn identity(n: usize, order: usize) -> Self {
        MInvolution {
            perm: (0..n).collect(),
            order: order.max(1),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// The k-th power of the permutation as an index array.
    pub fn power(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.perm.len()).collect();
        for _ in 0..k {
            out = out.iter().map(|&i| self.perm[i]).collect();
        }
        out
    }

    /// The orbit plan (I, S, S^2, …, S^{order-1})_# of the uniform measure.
    pub fn plan(&self) -> Result<CouplingPlan> {
        CouplingPlan::from_permutation_orbit(&self.perm, self.order)
    }
}

pub fn validate_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return Err(Error::InvalidPermutation(alloc::format!(
                "not a permutation of 0..{n}"
            )));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Cycle decomposition, each cycle starting at its smallest element, cycles
/// ordered by that element.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut j = perm[start];
        while j != start {
            seen[j] = true;
            cycle.push(j);
            j = perm[j];
        }
        out.push(cycle);
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of the cycle lengths: the order of the permutation.
pub fn permutation_order(perm: &[usize]) -> usize {
    cycles(perm)
        .iter()
        .fold(1usize, |acc, c| acc / gcd(acc, c.len()) * c.len())
}

/// All permutations of {0,…,k−1} whose cycle lengths divide m, in a fixed
/// deterministic order. No size cap; callers enforce their own.
fn perms_with_cycles_dividing(k: usize, m: usize) -> Vec<Vec<usize>> {
    let divisors: Vec<usize> = (1..=m).filter(|d| m % d == 0).collect();
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; k];
    let mut used = vec![false; k];
    fn place(
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        divisors: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        let start = match used.iter().position(|&u| !u) {
            None => {
                out.push(perm.clone());
                return;
            }
            Some(a) => a,
        };
        used[start] = true;
        for &d in divisors {
            extend_cycle(start, start, d - 1, perm, used, divisors, out);
        }
        used[start] = false;
    }
    fn extend_cycle(
        start: usize,
        prev: usize,
        remaining: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        divisors: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            perm[prev] = start;
            place(perm, used, divisors, out);
            perm[prev] = usize::MAX;
            return;
        }
        for b in 0..perm.len() {
            if used[b] {
                continue;
            }
            used[b] = true;
            perm[prev] = b;
            extend_cycle(start, b, remaining - 1, perm, used, divisors, out);
            perm[prev] = usize::MAX;
            used[b] = false;
        }
    }
    place(&mut perm, &mut used, &divisors, &mut out);
    out
}

/// Every permutation of {0,…,n−1} whose cycle lengths divide m, each exactly
/// once. Exhaustive, so n is capped.
pub fn enumerate_m_involutions(n: usize, m: usize) -> Result<Vec<MInvolution>> {
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    if m == 0 {
        return Err(Error::InvalidPermutation(alloc::format!(
            "order divisor must be positive"
        )));
    }
    Ok(perms_with_cycles_dividing(n, m)
        .into_iter()
        .map(|perm| MInvolution { perm, order: m })
        .collect())
}

fn check_uniform_base(fields: &[&SampledVectorField]) -> Result<()> {
    for f in fields {
        if !f.base().is_uniform() {
            return Err(Error::NonUniformWeights);
        }
    }
    if fields.is_empty() {
        return Err(Error::EmptySupport);
    }
    for f in &fields[1..] {
        if f.base().points() != fields[0].base().points() {
            return Err(Error::BaseMismatch);
        }
    }
    Ok(())
}

/// (1/n) Σ_i Σ_k ⟨u_k(x_i), x_{S^k(i)}⟩: the objective of the orbit plan of
/// S under the vector-field cost.
pub fn involution_objective(fields: &[&SampledVectorField], s: &MInvolution) -> Result<f64> {
    check_uniform_base(fields)?;
    let base = fields[0].base();
    let n = base.len();
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            left: s.len(),
            right: n,
        });
    }
    objective_of_perm(fields, &s.perm)
}

fn objective_of_perm(fields: &[&SampledVectorField], perm: &[usize]) -> Result<f64> {
    let base = fields[0].base();
    let n = base.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut target = i;
        for f in fields {
            target = perm[target];
            total += dot(f.value(i), base.point(target));
        }
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Matching,
    LocalSearch,
}

/// Outcome of a polar-type search: the permutation found, a companion index
/// map, the combinatorial objective, and the LP relaxation bound that
/// certifies it.
#[derive(Debug, Clone)]
pub struct PolarResult {
    pub s: MInvolution,
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub lp_bound: f64,
    pub certificate_gap: f64,
}

impl PolarResult {
    /// True when the LP relaxation value is met by the permutation, i.e. the
    /// continuum attainment statement holds on this discrete instance.
    pub fn attained(&self, tol: f64) -> bool {
        self.certificate_gap <= tol
    }
}

pub const LOCAL_SEARCH_RESTARTS: usize = 50;
pub const LOCAL_SEARCH_SEED: u64 = 0x5f3c_9a1e_22b4_7d06;

/// Maximizes the vector-field objective over permutations S with S^m = id.
///
/// All modes also solve the symmetric LP relaxation to report `lp_bound`;
/// exhaustive mode returns the global combinatorial optimum, the other modes
/// the best permutation they reached. A positive `certificate_gap` in
/// non-exhaustive mode means the relaxation was not attained at the tested
/// permutations, which is a report, not a failure.
pub fn best_involution(
    fields: &[&SampledVectorField],
    m: usize,
    mode: SearchMode,
) -> Result<PolarResult> {
    check_uniform_base(fields)?;
    if fields.len() + 1 != m {
        return Err(Error::DimensionMismatch {
            left: fields.len() + 1,
            right: m.saturating_sub(1),
        });
    }
    let base = fields[0].base();
    let n = base.len();
    let supports: Vec<&DiscreteMeasure> = (0..m).map(|_| base).collect();
    let cost = vector_field_cost(fields, &supports)?;
    let relax = solve_sym(&cost, base, Sense::Max)?;
    let lp_bound = relax.primal_value;

    let best_perm = match mode {
        SearchMode::Exhaustive => {
            if n > ENUMERATION_CAP {
                return Err(Error::CapExceeded {
                    n,
                    cap: ENUMERATION_CAP,
                });
            }
            let mut best: Option<(f64, Vec<usize>)> = None;
            for perm in perms_with_cycles_dividing(n, m) {
                let v = objective_of_perm(fields, &perm)?;
                if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                    best = Some((v, perm));
                }
            }
            best.expect("enumeration is never empty").1
        }
        SearchMode::Matching => {
            let start = matching_start(fields, m, &relax)?;
            hill_climb(fields, m, start)?
        }
        SearchMode::LocalSearch => {
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut rng = ChaCha8Rng::seed_from_u64(LOCAL_SEARCH_SEED);
            for _ in 0..LOCAL_SEARCH_RESTARTS {
                let start = random_m_involution(n, m, &mut rng);
                let candidate = hill_climb(fields, m, start)?;
                let v = objective_of_perm(fields, &candidate)?;
                let replace = match &best {
                    None => true,
                    Some((bv, bp)) => v > *bv + 1e-12 || ((v - bv).abs() <= 1e-12 && candidate < *bp),
                };
                if replace {
                    best = Some((v, candidate));
                }
            }
            best.expect("at least one restart").1
        }
    };

    let objective = objective_of_perm(fields, &best_perm)?;
    let s = MInvolution::new(best_perm, m)?;
    Ok(PolarResult {
        assignment: s.perm.clone(),
        s,
        objective,
        lp_bound,
        certificate_gap: lp_bound - objective,
    })
}

/// Repairs a start permutation derived from a relaxation (assignment for
/// m=2, LP graph maps otherwise) into an m-involution.
fn matching_start(
    fields: &[&SampledVectorField],
    m: usize,
    relax: &SolveResult,
) -> Result<Vec<usize>> {
    let base = fields[0].base();
    let n = base.len();
    let candidate: Vec<usize> = if m == 2 {
        // Max assignment on the symmetrized pair weight; the negation turns
        // it into the min problem the solver expects.
        let u = fields[0];
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        -(dot(u.value(i), base.point(j)) + dot(u.value(j), base.point(i))) / 2.0
                    })
                    .collect()
            })
            .collect();
        assignment_min(&matrix)?.perm
    } else {
        let maps = crate::duality::graph_test(&relax.plan, 0.0);
        let t1 = maps.maps[0].clone();
        if validate_permutation(&t1).is_ok() {
            t1
        } else {
            (0..n).collect()
        }
    };
    // Break any cycle whose length does not divide m into fixed points; the
    // hill climb rebuilds structure from there.
    let mut repaired: Vec<usize> = (0..n).collect();
    for cycle in cycles(&candidate) {
        if m % cycle.len() == 0 {
            for w in 0..cycle.len() {
                repaired[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
        }
    }
    Ok(repaired)
}

/// Deterministic hill climb: repeatedly takes the union of two cycles
/// (fixed points included) and replaces it by the best sub-permutation with
/// cycle lengths dividing m, until no pairwise move improves. For m=2 this
/// is exactly 2-opt over pairings.
fn hill_climb(fields: &[&SampledVectorField], m: usize, start: Vec<usize>) -> Result<Vec<usize>> {
    const MAX_UNION: usize = 8;
    let mut perm = start;
    let mut current = objective_of_perm(fields, &perm)?;
    loop {
        let cs = cycles(&perm);
        let mut improved = false;
        'outer: for a in 0..cs.len() {
            for b in a + 1..cs.len() {
                let mut union: Vec<usize> = cs[a].clone();
                union.extend_from_slice(&cs[b]);
                if union.len() > MAX_UNION {
                    continue;
                }
                for sub in perms_with_cycles_dividing(union.len(), m) {
                    let mut candidate = perm.clone();
                    for (pos, &elem) in union.iter().enumerate() {
                        candidate[elem] = union[sub[pos]];
                    }
                    let v = objective_of_perm(fields, &candidate)?;
                    if v > current + 1e-12 {
                        perm = candidate;
                        current = v;
                        improved = true;
                        break 'outer;
                    }
                }
            }
        }
        if !improved {
            return Ok(perm);
        }
    }
}

fn random_m_involution(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let divisors: Vec<usize> = (1..=m).filter(|d| m % d == 0).collect();
    let mut pool: Vec<usize> = (0..n).collect();
    // Fisher-Yates shuffle, then consume the pool in random cycle lengths.
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        pool.swap(i, j);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pos = 0;
    while pos < n {
        let feasible: Vec<usize> = divisors.iter().copied().filter(|&d| d <= n - pos).collect();
        let d = feasible[(rng.next_u64() % feasible.len() as u64) as usize];
        for k in 0..d {
            perm[pool[pos + k]] = pool[pos + (k + 1) % d];
        }
        pos += d;
    }
    perm
}

/// The three equivalent statements of the characterization of involutions,
/// evaluated on a discrete uniform measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacterizationReport {
    /// The pair plan (I,S)_# of mu equals its coordinate swap.
    pub plan_symmetric: bool,
    /// S is a permutation with S∘S = id.
    pub is_involution: bool,
    /// Σ_i H(S x_i, x_i) = 0 for every antisymmetric basis matrix H over
    /// the support indices.
    pub antisymmetric_null: bool,
}

impl CharacterizationReport {
    pub fn consistent(&self) -> bool {
        self.plan_symmetric == self.is_involution && self.is_involution == self.antisymmetric_null
    }
}

/// Checks the discrete characterization of involutions three ways and
/// reports each verdict; the three always agree.
pub fn characterization_check(perm: &[usize], mu: &DiscreteMeasure) -> Result<CharacterizationReport> {
    if !mu.is_uniform() {
        return Err(Error::NonUniformWeights);
    }
    validate_permutation(perm)?;
    if perm.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            left: perm.len(),
            right: mu.len(),
        });
    }
    let n = perm.len();

    let plan = CouplingPlan::from_permutation_orbit(perm, 2)?;
    let mut plan_symmetric = true;
    for i in 0..n {
        for j in 0..n {
            if (plan.mass().get(&[i, j]) - plan.mass().get(&[j, i])).abs() > 1e-15 {
                plan_symmetric = false;
            }
        }
    }

    let is_involution = (0..n).all(|i| perm[perm[i]] == i);

    // With H = E_{jk} − E_{kj}, the sum Σ_i H(S x_i, x_i) counts
    // [S(k) = j] − [S(j) = k]; spanning all j < k tests every antisymmetric H.
    let mut antisymmetric_null = true;
    for j in 0..n {
        for k in j + 1..n {
            let s = i32::from(perm[k] == j) - i32::from(perm[j] == k);
            if s != 0 {
                antisymmetric_null = false;
            }
        }
    }

    Ok(CharacterizationReport {
        plan_symmetric,
        is_involution,
        antisymmetric_null,
    })
}

/// The transposition of two indices, the discrete analog of the ball swap
/// used in the monotonicity argument.
pub fn swap_involution(i: usize, j: usize, n: usize) -> Result<MInvolution> {
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            size: n,
        });
    }
    if i == j {
        return Err(Error::InvalidPermutation(alloc::format!(
            "swap indices must differ"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(i, j);
    MInvolution::new(perm, 2)
}

/// Discrete polar factorization u = (gradient map) ∘ S: solves the
/// quadratic assignment from base points to field values to get the
/// monotone map T, and returns S = T⁻¹ so that T(S(i)) = i exactly.
pub fn polar_brenier(u: &SampledVectorField) -> Result<PolarResult> {
    if !u.base().is_uniform() {
        return Err(Error::NonUniformWeights);
    }
    if let Some((i, j)) = u.duplicate_values() {
        return Err(Error::DegenerateField { i, j });
    }
    let base = u.base();
    let n = base.len();
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| sq_dist(base.point(i), u.value(j))).collect())
        .collect();
    let t = assignment_min(&matrix)?.perm;
    let mut s_perm = vec![0usize; n];
    for (i, &ti) in t.iter().enumerate() {
        s_perm[ti] = i;
    }
    for i in 0..n {
        debug_assert_eq!(t[s_perm[i]], i);
    }
    let order = permutation_order(&s_perm);
    let s = MInvolution::new(s_perm, order)?;
    // Both are (1/n) max Σ ⟨x_i, v_{T(i)}⟩, so the gap vanishes by
    // construction.
    let objective: f64 = (0..n)
        .map(|i| dot(u.value(i), base.point(s.apply(i))))
        .sum::<f64>()
        / n as f64;
    let lp_bound: f64 = (0..n)
        .map(|i| dot(base.point(i), u.value(t[i])))
        .sum::<f64>()
        / n as f64;
    Ok(PolarResult {
        s,
        assignment: t,
        objective,
        lp_bound,
        certificate_gap: lp_bound - objective,
    })
}

/// Output of the Hamiltonian polar pipeline: the search result, the dual
/// potentials of the symmetric LP, and the dual-constraint residual on each
/// graph tuple (i, S i, …, S^{m-1} i).
#[derive(Debug, Clone)]
pub struct HamiltonianResult {
    pub polar: PolarResult,
    pub duals: DualPotentials,
    pub graph_residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Searches for the best S, solves the symmetric LP, and verifies the
/// representation through complementary slackness on the graph of S. A
/// residual within 1e-8 on every tuple is the computable form of the
/// gradient identity for the multi-marginal Hamiltonian.
pub fn polar_hamiltonian(fields: &[&SampledVectorField], m: usize) -> Result<HamiltonianResult> {
    check_uniform_base(fields)?;
    let base = fields[0].base();
    let n = base.len();
    let mode = if n <= ENUMERATION_CAP {
        SearchMode::Exhaustive
    } else {
        SearchMode::LocalSearch
    };
    let polar = best_involution(fields, m, mode)?;
    let supports: Vec<&DiscreteMeasure> = (0..m).map(|_| base).collect();
    let cost = vector_field_cost(fields, &supports)?;
    let sym = symmetrize_cost(&cost)?;
    let solved = solve_sym(&cost, base, Sense::Max)?;
    let duals = extract_duals(&solved)?;
    let powers: Vec<Vec<usize>> = (0..m).map(|k| polar.s.power(k)).collect();
    let mut graph_residuals = Vec::with_capacity(n);
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        let tuple: Vec<usize> = powers.iter().map(|p| p[i]).collect();
        let dual_sum: f64 = tuple
            .iter()
            .enumerate()
            .map(|(ax, &idx)| duals.potential(ax)[idx])
            .sum();
        let residual = (dual_sum - sym.values().get(&tuple)).abs();
        max_residual = max_residual.max(residual);
        graph_residuals.push(residual);
    }
    Ok(HamiltonianResult {
        polar,
        duals,
        graph_residuals,
        max_residual,
    })
}

//! End-to-end acceptance suite: ten desk-scale properties of the toolkit,
//! one test per property, each printing a single pass/fail line.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use symot_core::costs::{
    dot, quadratic_cost, reduction_identity, sq_dist, vector_field_cost, CostTensor,
    SampledVectorField,
};
use symot_core::duality::{
    barycenter_measure, extract_duals, slackness_report, swap_average_pair,
};
use symot_core::involution::{
    best_involution, characterization_check, enumerate_m_involutions, polar_brenier, SearchMode,
};
use symot_core::measures::{cyclic_shift_plan, symmetrize_plan, CouplingPlan, DiscreteMeasure};
use symot_core::monotone::{
    fitzpatrick, is_m_cyclically_monotone, monotone_equivalence_report, partial_legendre,
    CycleMode, GraphSample, GridFunction,
};
use symot_core::tensor::Tensor;
use symot_core::transport::{sinkhorn_mm, solve_mm, solve_sym, wasserstein2, Sense};

fn report(label: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match &outcome {
        Ok(()) => println!("{label}: pass"),
        Err(_) => println!("{label}: FAIL"),
    }
    if let Err(e) = outcome {
        std::panic::resume_unwind(e);
    }
}

fn uniform_1d(rng: &mut StdRng, n: usize) -> DiscreteMeasure {
    let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    xs.sort_by(f64::total_cmp);
    for i in 1..n {
        if xs[i] - xs[i - 1] < 1e-3 {
            xs[i] = xs[i - 1] + 1e-3;
        }
    }
    DiscreteMeasure::uniform(xs.into_iter().map(|x| vec![x]).collect()).unwrap()
}

fn random_weights(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn random_cost(rng: &mut StdRng, shape: &[usize]) -> CostTensor {
    let size: usize = shape.iter().product();
    let data: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
    CostTensor::new(Tensor::from_data(shape, data).unwrap()).unwrap()
}

#[test]
fn criterion_01_strong_duality() {
    report("criterion 1 (strong duality, empty slackness)", || {
        let mut rng = StdRng::seed_from_u64(101);
        for trial in 0..50 {
            let m = if trial % 2 == 0 { 2 } else { 3 };
            let n = 3 + trial % 3;
            let shape = vec![n; m];
            let cost = random_cost(&mut rng, &shape);
            let measures: Vec<DiscreteMeasure> = (0..m)
                .map(|_| {
                    let pts = (0..n).map(|i| vec![i as f64]).collect();
                    DiscreteMeasure::new(pts, random_weights(&mut rng, n)).unwrap()
                })
                .collect();
            let refs: Vec<&DiscreteMeasure> = measures.iter().collect();
            let sense = if trial % 3 == 0 { Sense::Max } else { Sense::Min };
            let res = solve_mm(&cost, &refs, sense).unwrap();
            assert!(res.gap <= 1e-8, "trial {trial}: gap {}", res.gap);
            let duals = extract_duals(&res).unwrap();
            let violations = slackness_report(&res.plan, &duals, &cost).unwrap();
            assert!(violations.is_empty(), "trial {trial}: {violations:?}");
        }
    });
}

#[test]
fn criterion_02_symmetric_attainment() {
    report("criterion 2 (attainment at m-involutions)", || {
        let mut rng = StdRng::seed_from_u64(202);
        for trial in 0..25 {
            let (m, n) = if trial % 2 == 0 {
                (2, 4 + trial % 4)
            } else {
                (3, 3 + trial % 3)
            };
            let base = uniform_1d(&mut rng, n);
            let all = enumerate_m_involutions(n, m).unwrap();
            let r = &all[rng.random_range(0..all.len())];
            // Fields of the form u_k = w_k composed with r^k, w_k increasing,
            // so the relaxation is attained at the involution r itself.
            let fields: Vec<SampledVectorField> = (1..m)
                .map(|k| {
                    let a = rng.random_range(0.5..2.0);
                    let b = rng.random_range(-1.0..1.0);
                    let rk = r.power(k);
                    let values = (0..n)
                        .map(|i| vec![a * base.point(rk[i])[0] + b])
                        .collect();
                    SampledVectorField::new(base.clone(), values).unwrap()
                })
                .collect();
            let refs: Vec<&SampledVectorField> = fields.iter().collect();
            let res = best_involution(&refs, m, SearchMode::Exhaustive).unwrap();
            assert!(
                res.certificate_gap.abs() <= 1e-9,
                "trial {trial} m={m} n={n}: gap {}",
                res.certificate_gap
            );
        }
    });
}

#[test]
fn criterion_03_monotone_equivalence() {
    report("criterion 3 (four-way monotone equivalence)", || {
        let mut rng = StdRng::seed_from_u64(303);
        for trial in 0..20 {
            // Monotone: PSD-linear in 2-d or an increasing 1-d sample.
            let field = if trial % 2 == 0 {
                let (a, b, c) = (
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.1..1.0),
                );
                // A = B^T B + c I is positive definite.
                let (m00, m01, m11) = (a * a + c, a * b, b * b + c);
                let pts: Vec<Vec<f64>> = (0..5)
                    .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                    .collect();
                let vals = pts
                    .iter()
                    .map(|p| vec![m00 * p[0] + m01 * p[1], m01 * p[0] + m11 * p[1]])
                    .collect();
                let base = DiscreteMeasure::uniform(pts).unwrap();
                SampledVectorField::new(base, vals).unwrap()
            } else {
                let base = uniform_1d(&mut rng, 5);
                let mut v = rng.random_range(-1.0..0.0);
                let vals = (0..5)
                    .map(|_| {
                        v += rng.random_range(0.0..0.5);
                        vec![v]
                    })
                    .collect();
                SampledVectorField::new(base, vals).unwrap()
            };
            let rep = monotone_equivalence_report(&field).unwrap();
            assert!(rep.consistent(), "monotone trial {trial}: {rep:?}");
            assert!(rep.all(), "monotone trial {trial}: {rep:?}");
            // Identity is an optimal 2-involution within 1e-9.
            let refs = [&field];
            let res = best_involution(&refs, 2, SearchMode::Exhaustive).unwrap();
            let diag: f64 = (0..field.len())
                .map(|i| dot(field.value(i), field.base().point(i)))
                .sum::<f64>()
                / field.len() as f64;
            assert!(
                (res.objective - diag).abs() <= 1e-9,
                "trial {trial}: best {} vs diagonal {diag}",
                res.objective
            );
        }
        for trial in 0..20 {
            // Non-monotone: a strictly decreasing 1-d sample.
            let base = uniform_1d(&mut rng, 5);
            let mut v = rng.random_range(0.0..1.0);
            let vals = (0..5)
                .map(|_| {
                    v -= rng.random_range(0.1..0.5);
                    vec![v]
                })
                .collect();
            let field = SampledVectorField::new(base, vals).unwrap();
            let rep = monotone_equivalence_report(&field).unwrap();
            assert!(rep.consistent(), "non-monotone trial {trial}: {rep:?}");
            assert!(!rep.monotone, "non-monotone trial {trial}: {rep:?}");
        }
    });
}

#[test]
fn criterion_04_cyclic_polar_cost() {
    report("criterion 4 (gradient fields solve the twisted pairing)", || {
        let mut rng = StdRng::seed_from_u64(404);
        for trial in 0..10 {
            let n = 3 + trial % 4;
            let base = uniform_1d(&mut rng, n);
            // Subgradients of a convex piecewise-linear function: a
            // nondecreasing slope sequence, read off at the sample points.
            let mut slope = rng.random_range(-1.0..0.0);
            let values: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    slope += rng.random_range(0.0..0.7);
                    vec![slope]
                })
                .collect();
            let diag: f64 = (0..n)
                .map(|i| values[i][0] * base.point(i)[0])
                .sum::<f64>()
                / n as f64;
            for m in [2usize, 3] {
                // Cost pairs u at the first coordinate with the last point.
                let shape = vec![n; m];
                let size: usize = shape.iter().product();
                let mut data = vec![0.0; size];
                let mut idx = vec![0usize; m];
                for (flat, slot) in data.iter_mut().enumerate() {
                    let mut r = flat;
                    for ax in (0..m).rev() {
                        idx[ax] = r % n;
                        r /= n;
                    }
                    *slot = values[idx[0]][0] * base.point(idx[m - 1])[0];
                }
                let cost = CostTensor::new(Tensor::from_data(&shape, data).unwrap()).unwrap();
                let res = solve_sym(&cost, &base, Sense::Max).unwrap();
                assert!(
                    (res.primal_value - diag).abs() <= 1e-9,
                    "trial {trial} m={m}: {} vs {diag}",
                    res.primal_value
                );
            }
        }
    });
}

#[test]
fn criterion_05_reduction_identity() {
    report("criterion 5 (three-marginal reduction identity)", || {
        let mut rng = StdRng::seed_from_u64(505);
        for pair in 0..10 {
            let n = 3 + pair % 2;
            let base = uniform_1d(&mut rng, n);
            let field = |rng: &mut StdRng, base: &DiscreteMeasure| {
                let values = (0..n)
                    .map(|_| vec![rng.random_range(-2.0..2.0)])
                    .collect();
                SampledVectorField::new(base.clone(), values).unwrap()
            };
            let u1 = field(&mut rng, &base);
            let u2 = field(&mut rng, &base);
            for _ in 0..100 {
                // Convex mix of the product coupling and a permutation pair;
                // both have uniform marginals.
                let lambda: f64 = rng.random_range(0.0..1.0);
                let mut mass = Tensor::zeros(&[n, n, n]).unwrap();
                for v in mass.data_mut() {
                    *v = lambda / (n * n * n) as f64;
                }
                let mut p: Vec<usize> = (0..n).collect();
                let mut q: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    p.swap(i, rng.random_range(0..=i));
                    q.swap(i, rng.random_range(0..=i));
                }
                for i in 0..n {
                    let idx = [i, p[i], q[i]];
                    let v = mass.get(&idx) + (1.0 - lambda) / n as f64;
                    mass.set(&idx, v);
                }
                let plan = CouplingPlan::new(mass).unwrap();
                let rep = reduction_identity(&u1, &u2, &plan).unwrap();
                assert!(rep.residual <= 1e-9, "pair {pair}: residual {}", rep.residual);
            }
        }
    });
}

#[test]
fn criterion_06_polar_round_trip() {
    report("criterion 6 (polar factorization round trip)", || {
        let mut rng = StdRng::seed_from_u64(606);
        for trial in 0..25 {
            let n = [8usize, 16, 32, 64][trial % 4];
            let d = 1 + trial % 2;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..d)
                        .map(|k| i as f64 * 0.1 + k as f64 + rng.random_range(0.0..0.01))
                        .collect()
                })
                .collect();
            let vals: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let base = DiscreteMeasure::uniform(pts).unwrap();
            let field = match SampledVectorField::new(base.clone(), vals) {
                Ok(f) if f.duplicate_values().is_none() => f,
                _ => continue,
            };
            let res = polar_brenier(&field).unwrap();
            for i in 0..n {
                assert_eq!(res.assignment[res.s.apply(i)], i, "trial {trial} index {i}");
            }
            if n == 8 {
                // The optimal-assignment graph is m-cyclically monotone.
                let graph_vals: Vec<Vec<f64>> = (0..n)
                    .map(|i| field.value(res.assignment[i]).to_vec())
                    .collect();
                let sample = GraphSample::new(base.points().to_vec(), graph_vals).unwrap();
                for m in 2..=4 {
                    let rep = is_m_cyclically_monotone(&sample, m, CycleMode::Exhaustive).unwrap();
                    assert!(rep.monotone, "trial {trial} m={m}: {:?}", rep.worst_cycle);
                }
            }
        }
    });
}

#[test]
fn criterion_07_swap_symmetry() {
    report("criterion 7 (dual and barycenter symmetry)", || {
        let mut rng = StdRng::seed_from_u64(707);
        for trial in 0..10 {
            let n = 3 + trial % 3;
            let base = uniform_1d(&mut rng, n);
            let values = (0..n)
                .map(|_| vec![rng.random_range(-2.0..2.0)])
                .collect();
            let field = SampledVectorField::new(base.clone(), values).unwrap();
            let supports = [&base, &base];
            let cost = vector_field_cost(&[&field], &supports).unwrap();
            let res = solve_sym(&cost, &base, Sense::Max).unwrap();

            // Swap-averaged potentials stay feasible and keep the optimal
            // value: the transfer relation for the coordinate swap.
            let duals = extract_duals(&res).unwrap();
            let swapped = swap_average_pair(&duals).unwrap();
            let sym = symot_core::costs::symmetrize_cost(&cost).unwrap();
            assert!(
                swapped.max_violation(&sym, Sense::Max) <= 1e-8,
                "trial {trial}: transfer relation violated"
            );
            assert!(
                (swapped.objective(&supports) - res.dual_value).abs() <= 1e-8,
                "trial {trial}: swapped dual value moved"
            );

            // The symmetrized plan's barycenter is swap-invariant.
            let symmetric = symmetrize_plan(&res.plan).unwrap();
            let nu = barycenter_measure(&symmetric, &supports).unwrap();
            let shifted = cyclic_shift_plan(&symmetric).unwrap();
            let nu_shifted = barycenter_measure(&shifted, &supports).unwrap();
            let dist = wasserstein2(&nu, &nu_shifted).unwrap();
            assert!(dist <= 1e-10, "trial {trial}: barycenter moved by {dist}");
        }
    });
}

#[test]
fn criterion_08_characterization() {
    report("criterion 8 (plan symmetry characterization)", || {
        for n in 1..=6usize {
            let mu = DiscreteMeasure::uniform((0..n).map(|i| vec![i as f64]).collect()).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            // Heap's algorithm over all n! permutations.
            let mut c = vec![0usize; n];
            let check = |p: &[usize]| {
                let rep = characterization_check(p, &mu).unwrap();
                assert!(rep.consistent(), "n={n} perm {p:?}: {rep:?}");
            };
            check(&perm);
            let mut i = 0;
            while i < n {
                if c[i] < i {
                    if i % 2 == 0 {
                        perm.swap(0, i);
                    } else {
                        perm.swap(c[i], i);
                    }
                    check(&perm);
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
        }
    });
}

#[test]
fn criterion_09_fitzpatrick_sandwich() {
    report("criterion 9 (Fitzpatrick value and sandwich)", || {
        let nodes = 101usize;
        let axis: Vec<f64> = (0..nodes).map(|i| -1.0 + 2.0 * i as f64 / 100.0).collect();
        let pts: Vec<Vec<f64>> = axis.iter().map(|&x| vec![x]).collect();
        let sample = GraphSample::new(pts.clone(), pts).unwrap();
        // The sup sits at x* = (p + x) / 2; a grid of spacing h misses the
        // true value by at most (h / 2)^2 with unit curvature.
        let grid_tol = (0.02f64 / 2.0).powi(2) + 1e-12;

        let mut n_values = Vec::with_capacity(nodes * nodes);
        for &p in &axis {
            for &x in &axis {
                let val = fitzpatrick(&sample, &[p], &[x]).unwrap();
                if (p + x) / 2.0 >= -1.0 && (p + x) / 2.0 <= 1.0 {
                    let exact = (p + x) * (p + x) / 4.0;
                    assert!(
                        (val - exact).abs() <= grid_tol,
                        "N({p},{x}) = {val}, expected {exact}"
                    );
                }
                n_values.push(val);
            }
        }
        let shape = vec![nodes, nodes];
        let n_grid = GridFunction::new(
            vec![axis.clone(), axis.clone()],
            Tensor::from_data(&shape, n_values).unwrap(),
        )
        .unwrap();
        let full = partial_legendre(&n_grid, &[0, 1]).unwrap();
        for (ip, &p) in axis.iter().enumerate() {
            for (ix, &x) in axis.iter().enumerate() {
                let n = n_grid.values().get(&[ip, ix]);
                let l = (x * x + p * p) / 2.0;
                // The adjoint swaps the two arguments of the transform.
                let nstar = full.values().get(&[ix, ip]);
                assert!(n <= l + 1e-12, "N > L at ({p},{x})");
                assert!(l <= nstar + 1e-12, "L > N* at ({p},{x})");
            }
        }
    });
}

#[test]
fn criterion_10_sinkhorn_consistency() {
    report("criterion 10 (entropic values approach the LP)", || {
        let mut rng = StdRng::seed_from_u64(1010);
        for trial in 0..5 {
            let n = 4;
            let cost = random_cost(&mut rng, &[n, n]);
            let lo = cost.values().data().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = cost.values().data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mu = uniform_1d(&mut rng, n);
            let nu = uniform_1d(&mut rng, n);
            let refs = [&mu, &nu];
            let exact = solve_mm(&cost, &refs, Sense::Min).unwrap().primal_value;
            let mut last = f64::INFINITY;
            let mut final_value = f64::INFINITY;
            for eps in [1.0, 0.1, 0.01] {
                let res = sinkhorn_mm(&cost, &refs, eps, 1e-8, 500_000).unwrap();
                assert!(
                    res.marginal_error <= 1e-5,
                    "trial {trial} eps {eps}: marginal error {}",
                    res.marginal_error
                );
                assert!(
                    res.value <= last + 1e-6,
                    "trial {trial}: value rose from {last} to {} at eps {eps}",
                    res.value
                );
                last = res.value;
                final_value = res.value;
            }
            let range = hi - lo;
            assert!(
                (final_value - exact).abs() <= 0.05 * range,
                "trial {trial}: entropic {final_value} vs exact {exact}, range {range}"
            );
        }
    });
}

// Spot-check from the quadratic family: the distance between shifted copies
// of the same two-point measure, used as an anchor for the suite above.
#[test]
fn anchor_wasserstein_shift() {
    let mu = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
    let nu = DiscreteMeasure::uniform(vec![vec![0.0], vec![2.0]]).unwrap();
    let d = wasserstein2(&mu, &nu).unwrap();
    assert!((d - 0.5).abs() < 1e-12);
    let cost = quadratic_cost(&[&mu, &nu]).unwrap();
    assert!((cost.values().get(&[1, 1]) - sq_dist(&[1.0], &[2.0])).abs() < 1e-12);
}

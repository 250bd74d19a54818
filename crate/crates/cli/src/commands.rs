//! Subcommand implementations: each consumes a scenario config and emits a
//! report plus optional CSV and JSON artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use symot_core::costs::{
    dot, quadratic_cost, reduction_identity, vector_field_cost, CostTensor, SampledVectorField,
};
use symot_core::duality::{
    barycenter_measure, barycenter_optimality_probe, extract_duals, graph_test, slackness_report,
};
use symot_core::involution::{best_involution, polar_brenier, polar_hamiltonian, SearchMode};
use symot_core::measures::{cyclic_shift_plan, CouplingPlan, DiscreteMeasure};
use symot_core::monotone::{
    fitzpatrick, is_m_cyclically_monotone, is_monotone, monotone_equivalence_report,
    partial_legendre, CycleMode, GraphSample,
};
use symot_core::tensor::Tensor;
use symot_core::transport::{solve_assignment, solve_mm, solve_sym, wasserstein2, Sense};

use crate::formats;
use crate::scenario::{finalize, load_scenario, Report, Scenario, Tolerances};

type Checks = BTreeMap<String, bool>;

struct Context_<'a> {
    scenario: &'a Scenario,
    config_dir: PathBuf,
    out_dir: PathBuf,
    tol: f64,
}

impl<'a> Context_<'a> {
    fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.config_dir.join(p)
        }
    }

    fn measure(&self, rel: &str) -> Result<DiscreteMeasure> {
        formats::load_measure(&self.resolve(rel))
    }

    fn field(&self, rel: &str) -> Result<SampledVectorField> {
        formats::load_field(&self.resolve(rel))
    }

    fn fields(&self) -> Result<Vec<SampledVectorField>> {
        let paths = self
            .scenario
            .inputs
            .fields
            .as_ref()
            .context("missing inputs.fields")?;
        paths.iter().map(|p| self.field(p)).collect()
    }

    fn single_field(&self) -> Result<SampledVectorField> {
        let path = self
            .scenario
            .inputs
            .field
            .as_ref()
            .context("missing inputs.field")?;
        self.field(path)
    }

    fn sense(&self) -> Result<Sense> {
        match self.scenario.options.sense.as_deref() {
            None | Some("min") => Ok(Sense::Min),
            Some("max") => Ok(Sense::Max),
            Some(other) => bail!("unknown sense {other:?}, expected \"min\" or \"max\""),
        }
    }

    fn artifact(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}.{}", self.scenario.name, suffix))
    }
}

/// Builds the cost tensor a solve scenario asks for: the pairwise quadratic
/// family, a vector-field cost, or a tensor loaded from file.
fn build_cost(ctx: &Context_, supports: &[&DiscreteMeasure]) -> Result<CostTensor> {
    match ctx.scenario.options.cost_kind.as_deref() {
        Some("quadratic") => quadratic_cost(supports).map_err(|e| anyhow::anyhow!("{e}")),
        None | Some("fields") => {
            let fields = ctx.fields()?;
            let refs: Vec<&SampledVectorField> = fields.iter().collect();
            vector_field_cost(&refs, supports).map_err(|e| anyhow::anyhow!("{e}"))
        }
        Some("tensor") => {
            let path = ctx
                .scenario
                .inputs
                .cost
                .as_ref()
                .context("cost_kind \"tensor\" needs inputs.cost")?;
            formats::load_cost(&ctx.resolve(path))
        }
        Some(other) => bail!("unknown cost_kind {other:?}"),
    }
}

fn sigma_pushforward(mu: &DiscreteMeasure, sigma: &[usize]) -> Result<DiscreteMeasure> {
    if sigma.len() != mu.dim() {
        bail!(
            "sigma permutes {} coordinates but points have {}",
            sigma.len(),
            mu.dim()
        );
    }
    let points: Vec<Vec<f64>> = mu
        .points()
        .iter()
        .map(|p| sigma.iter().map(|&c| p[c]).collect())
        .collect();
    DiscreteMeasure::new(points, mu.weights().to_vec()).map_err(|e| anyhow::anyhow!("{e}"))
}

fn certificate(
    primal: f64,
    dual: f64,
    gap: f64,
    concentration: f64,
    violations: &[Vec<usize>],
) -> serde_json::Value {
    json!({
        "primal": primal,
        "dual": dual,
        "gap": gap,
        "concentration": concentration,
        "violations": violations,
    })
}

pub fn run_scenario_file(config: &Path, out: &Path, tol: f64) -> Result<Report> {
    let (scenario, hash) = load_scenario(config)?;
    let ctx = Context_ {
        scenario: &scenario,
        config_dir: config.parent().map(PathBuf::from).unwrap_or_default(),
        out_dir: out.to_path_buf(),
        tol,
    };
    let (results, checks) = dispatch(&ctx)?;
    let report = finalize(
        &scenario,
        &hash,
        Tolerances::with_report_tol(tol),
        results,
        checks,
    );
    formats::write_json(&ctx.artifact("report.json"), &report)?;
    Ok(report)
}

fn dispatch(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    match ctx.scenario.command.as_str() {
        "solve-mm" => cmd_solve_mm(ctx),
        "solve-sym" => cmd_solve_sym(ctx),
        "assign" => cmd_assign(ctx),
        "wasserstein" => cmd_wasserstein(ctx),
        "involution-search" => cmd_involution_search(ctx),
        "polar-brenier" => cmd_polar_brenier(ctx),
        "polar-hamiltonian" => cmd_polar_hamiltonian(ctx),
        "check-monotone" => cmd_check_monotone(ctx),
        "check-cyclic" => cmd_check_cyclic(ctx),
        "fitzpatrick" => cmd_fitzpatrick(ctx),
        "legendre" => cmd_legendre(ctx),
        "reduction-check" => cmd_reduction_check(ctx),
        "barycenter" => cmd_barycenter(ctx),
        other => bail!("unknown command {other:?}"),
    }
}

fn solve_report(
    ctx: &Context_,
    cost: &CostTensor,
    marginals: &[&DiscreteMeasure],
    result: symot_core::transport::SolveResult,
    mut checks: Checks,
) -> Result<(serde_json::Value, Checks)> {
    let duals = extract_duals(&result).map_err(|e| anyhow::anyhow!("{e}"))?;
    let violations = slackness_report(&result.plan, &duals, cost)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let maps = graph_test(&result.plan, ctx.scenario.options.threshold.unwrap_or(0.999));
    checks.insert("gap_within_tol".into(), result.gap <= ctx.tol.max(1e-8));
    checks.insert("slackness_empty".into(), violations.is_empty());
    let marginals_ok = (0..marginals.len())
        .all(|ax| result.plan.check_marginal(ax, marginals[ax]).is_ok());
    checks.insert("marginals_match".into(), marginals_ok);

    formats::write_plan_csv(&ctx.artifact("plan.csv"), &result.plan)?;
    formats::write_json(
        &ctx.artifact("plan.json"),
        &formats::PlanFile::from_plan(&result.plan),
    )?;

    let results = json!({
        "value": result.primal_value,
        "certificate": certificate(
            result.primal_value,
            result.dual_value,
            result.gap,
            maps.concentration,
            &violations,
        ),
        "duals": duals.potentials(),
        "graph_maps": maps.maps,
        "is_graph": maps.is_graph,
        "iterations": result.iterations,
    });
    Ok((results, checks))
}

fn cmd_solve_mm(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let paths = ctx
        .scenario
        .inputs
        .marginals
        .as_ref()
        .context("solve-mm needs inputs.marginals")?;
    let measures: Vec<DiscreteMeasure> =
        paths.iter().map(|p| ctx.measure(p)).collect::<Result<_>>()?;
    let refs: Vec<&DiscreteMeasure> = measures.iter().collect();
    let cost = build_cost(ctx, &refs)?;
    let result = solve_mm(&cost, &refs, ctx.sense()?).map_err(|e| anyhow::anyhow!("{e}"))?;
    solve_report(ctx, &cost, &refs, result, Checks::new())
}

fn cmd_solve_sym(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let path = ctx
        .scenario
        .inputs
        .measure
        .as_ref()
        .context("solve-sym needs inputs.measure")?;
    let mu = ctx.measure(path)?;
    let m = match (ctx.scenario.options.m, &ctx.scenario.inputs.fields) {
        (Some(m), _) => m,
        (None, Some(fields)) => fields.len() + 1,
        (None, None) => bail!("solve-sym needs options.m"),
    };
    let supports: Vec<&DiscreteMeasure> = (0..m).map(|_| &mu).collect();
    let cost = build_cost(ctx, &supports)?;
    let result = solve_sym(&cost, &mu, ctx.sense()?).map_err(|e| anyhow::anyhow!("{e}"))?;

    let shifted = cyclic_shift_plan(&result.plan).map_err(|e| anyhow::anyhow!("{e}"))?;
    let sigma_invariant = result
        .plan
        .mass()
        .data()
        .iter()
        .zip(shifted.mass().data())
        .all(|(a, b)| (a - b).abs() <= 1e-12);

    let sym = symot_core::costs::symmetrize_cost(&cost).map_err(|e| anyhow::anyhow!("{e}"))?;
    let maps = graph_test(&result.plan, ctx.scenario.options.threshold.unwrap_or(0.999));
    let perm = if maps.is_graph && !maps.maps.is_empty() {
        Some(maps.maps[0].clone())
    } else {
        None
    };
    let (mut results, mut checks) = solve_report(ctx, &sym, &supports, result, Checks::new())?;
    checks.insert("plan_sigma_invariant".into(), sigma_invariant);
    if let Some(p) = perm {
        results["perm"] = json!(p);
    }
    Ok((results, checks))
}

fn cmd_assign(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let path = ctx
        .scenario
        .inputs
        .cost
        .as_ref()
        .context("assign needs inputs.cost (a square tensor file)")?;
    let cost = formats::load_cost(&ctx.resolve(path))?;
    if cost.arity() != 2 || cost.support_sizes()[0] != cost.support_sizes()[1] {
        bail!("assign needs a square two-axis cost");
    }
    let n = cost.support_sizes()[0];
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| cost.values().get(&[i, j])).collect())
        .collect();
    let sense = ctx.sense()?;
    let sol = solve_assignment(&matrix, sense).map_err(|e| anyhow::anyhow!("{e}"))?;

    let sign = match sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let mut feasible = true;
    let mut tight = true;
    for i in 0..n {
        for j in 0..n {
            let slack = sign * (matrix[i][j] - sol.row_potentials[i] - sol.col_potentials[j]);
            if slack < -1e-9 {
                feasible = false;
            }
        }
        let on = sign
            * (matrix[i][sol.perm[i]] - sol.row_potentials[i] - sol.col_potentials[sol.perm[i]]);
        if on.abs() > 1e-9 {
            tight = false;
        }
    }
    let mut checks = Checks::new();
    checks.insert("duals_feasible".into(), feasible);
    checks.insert("duals_tight".into(), tight);
    let results = json!({
        "value": sol.value,
        "perm": sol.perm,
        "row_potentials": sol.row_potentials,
        "col_potentials": sol.col_potentials,
    });
    Ok((results, checks))
}

fn cmd_wasserstein(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let paths = ctx
        .scenario
        .inputs
        .marginals
        .as_ref()
        .context("wasserstein needs inputs.marginals with two entries")?;
    if paths.len() != 2 {
        bail!("wasserstein needs exactly two marginals, got {}", paths.len());
    }
    let mu = ctx.measure(&paths[0])?;
    let nu = ctx.measure(&paths[1])?;
    let forward = wasserstein2(&mu, &nu).map_err(|e| anyhow::anyhow!("{e}"))?;
    let backward = wasserstein2(&nu, &mu).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut checks = Checks::new();
    checks.insert("nonnegative".into(), forward >= -1e-12);
    checks.insert("symmetric".into(), (forward - backward).abs() <= 1e-9);
    Ok((json!({ "value": forward }), checks))
}

fn search_mode(ctx: &Context_) -> Result<SearchMode> {
    match ctx.scenario.options.mode.as_deref() {
        None | Some("exhaustive") => Ok(SearchMode::Exhaustive),
        Some("matching") => Ok(SearchMode::Matching),
        Some("local-search") => Ok(SearchMode::LocalSearch),
        Some(other) => bail!("unknown search mode {other:?}"),
    }
}

fn cmd_involution_search(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let fields = ctx.fields()?;
    let refs: Vec<&SampledVectorField> = fields.iter().collect();
    let m = ctx.scenario.options.m.unwrap_or(refs.len() + 1);
    let mode = search_mode(ctx)?;
    let res = best_involution(&refs, m, mode).map_err(|e| anyhow::anyhow!("{e}"))?;
    let attained = res.attained(1e-6);
    let mut checks = Checks::new();
    checks.insert("relaxation_attained".into(), attained);
    checks.insert(
        "objective_below_bound".into(),
        res.objective <= res.lp_bound + 1e-9,
    );
    let mut results = json!({
        "value": res.objective,
        "perm": res.s.perm(),
        "order": res.s.order(),
        "lp_bound": res.lp_bound,
        "certificate_gap": res.certificate_gap,
    });
    if !attained && mode != SearchMode::Exhaustive {
        results["note"] = json!("relaxation not attained at tested involutions");
    }
    Ok((results, checks))
}

fn cmd_polar_brenier(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let u = ctx.single_field()?;
    let res = polar_brenier(&u).map_err(|e| anyhow::anyhow!("{e}"))?;
    let round_trip = (0..res.s.len()).all(|i| res.assignment[res.s.apply(i)] == i);
    let mut checks = Checks::new();
    checks.insert("round_trip_exact".into(), round_trip);
    checks.insert("gap_within_tol".into(), res.certificate_gap.abs() <= 1e-9);
    let results = json!({
        "value": res.objective,
        "perm": res.s.perm(),
        "order": res.s.order(),
        "assignment": res.assignment,
        "lp_bound": res.lp_bound,
        "certificate_gap": res.certificate_gap,
    });
    Ok((results, checks))
}

fn cmd_polar_hamiltonian(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let fields = ctx.fields()?;
    let refs: Vec<&SampledVectorField> = fields.iter().collect();
    let m = ctx.scenario.options.m.unwrap_or(refs.len() + 1);
    let res = polar_hamiltonian(&refs, m).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut checks = Checks::new();
    checks.insert(
        "graph_slackness_within_tol".into(),
        res.max_residual <= 1e-8,
    );
    checks.insert("relaxation_attained".into(), res.polar.attained(1e-6));
    let results = json!({
        "value": res.polar.objective,
        "perm": res.polar.s.perm(),
        "lp_bound": res.polar.lp_bound,
        "certificate_gap": res.polar.certificate_gap,
        "duals": res.duals.potentials(),
        "graph_residuals": res.graph_residuals,
        "max_residual": res.max_residual,
    });
    Ok((results, checks))
}

fn cmd_check_monotone(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let u = ctx.single_field()?;
    let sample = GraphSample::from_field(&u).map_err(|e| anyhow::anyhow!("{e}"))?;
    let pairwise = is_monotone(&sample);
    let report = monotone_equivalence_report(&u).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut checks = Checks::new();
    checks.insert("monotone".into(), report.monotone);
    checks.insert("equivalences_consistent".into(), report.consistent());
    checks.insert("all_four_true".into(), report.all());
    let results = json!({
        "monotone": report.monotone,
        "involution_sup_zero": report.involution_sup_zero,
        "projection_identity": report.projection_identity,
        "lp_diagonal": report.lp_diagonal,
        "all_four_equivalent": report.consistent(),
        "worst_pair": pairwise.worst_pair,
        "worst_value": pairwise.worst_value,
    });
    Ok((results, checks))
}

fn cmd_check_cyclic(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let u = ctx.single_field()?;
    let sample = GraphSample::from_field(&u).map_err(|e| anyhow::anyhow!("{e}"))?;
    let m = ctx.scenario.options.m.context("check-cyclic needs options.m")?;
    let mode = match ctx.scenario.options.mode.as_deref() {
        None | Some("exhaustive") => CycleMode::Exhaustive,
        Some("random") => CycleMode::Random {
            trials: ctx.scenario.options.trials.unwrap_or(1000),
            seed: ctx.scenario.options.seed.unwrap_or(0),
        },
        Some(other) => bail!("unknown cycle mode {other:?}"),
    };
    let report = is_m_cyclically_monotone(&sample, m, mode).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut checks = Checks::new();
    checks.insert("cyclically_monotone".into(), report.monotone);
    let results = json!({
        "cyclically_monotone": report.monotone,
        "worst_cycle": report.worst_cycle,
        "worst_value": report.worst_value,
    });
    Ok((results, checks))
}

fn cmd_fitzpatrick(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let u = ctx.single_field()?;
    let sample = GraphSample::from_field(&u).map_err(|e| anyhow::anyhow!("{e}"))?;
    let p = ctx.scenario.options.p.as_ref().context("fitzpatrick needs options.p")?;
    let x = ctx.scenario.options.x.as_ref().context("fitzpatrick needs options.x")?;
    let value = fitzpatrick(&sample, p, x).map_err(|e| anyhow::anyhow!("{e}"))?;

    // On the sampled graph N equals the pairing exactly, and for a monotone
    // sample it dominates the pairing everywhere on the sample.
    let mut equality_residual: f64 = 0.0;
    let mut minorizes = true;
    for k in 0..sample.len() {
        let n = fitzpatrick(&sample, sample.value(k), sample.point(k))
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let pairing = dot(sample.point(k), sample.value(k));
        equality_residual = equality_residual.max((n - pairing).abs());
        if n < pairing - 1e-10 {
            minorizes = false;
        }
    }
    let monotone = is_monotone(&sample).monotone;
    let mut checks = Checks::new();
    checks.insert("graph_equality".into(), equality_residual <= 1e-10 || !monotone);
    checks.insert("dominates_pairing_on_sample".into(), minorizes);
    let results = json!({
        "value": value,
        "graph_equality_residual": equality_residual,
        "sample_monotone": monotone,
    });
    Ok((results, checks))
}

fn cmd_legendre(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let path = ctx
        .scenario
        .inputs
        .grid
        .as_ref()
        .context("legendre needs inputs.grid")?;
    let grid = formats::load_grid(&ctx.resolve(path))?;
    let axes = ctx
        .scenario
        .options
        .axes
        .as_ref()
        .context("legendre needs options.axes")?;
    let transformed = partial_legendre(&grid, axes).map_err(|e| anyhow::anyhow!("{e}"))?;
    let double = partial_legendre(&transformed, axes).map_err(|e| anyhow::anyhow!("{e}"))?;
    let dominated = double
        .values()
        .data()
        .iter()
        .zip(grid.values().data())
        .all(|(d, o)| *d <= o + 1e-9);
    let max_roundtrip = double
        .values()
        .data()
        .iter()
        .zip(grid.values().data())
        .map(|(d, o)| (d - o).abs())
        .fold(0.0_f64, f64::max);
    formats::write_json(
        &ctx.artifact("grid.json"),
        &formats::GridFile::from_grid(&transformed),
    )?;
    let mut checks = Checks::new();
    checks.insert("double_transform_dominated".into(), dominated);
    checks.insert(
        "double_transform_within_grid_tol".into(),
        max_roundtrip <= grid.tolerance() + 1e-12,
    );
    let results = json!({
        "grid_tolerance": grid.tolerance(),
        "double_transform_max_deviation": max_roundtrip,
    });
    Ok((results, checks))
}

fn cmd_reduction_check(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let fields = ctx.fields()?;
    if fields.len() != 2 {
        bail!("reduction-check needs exactly two fields, got {}", fields.len());
    }
    let base = fields[0].base().clone();
    let n = base.len();
    let plans = ctx.scenario.options.plans.unwrap_or(100);
    let seed = ctx.scenario.options.seed.unwrap_or(0);
    let mut rng = StdRng::seed_from_u64(seed);

    let mut max_residual: f64 = 0.0;
    for _ in 0..plans {
        // Random admissible plan: mix the product coupling with a random
        // permutation-pair coupling, both of which have uniform marginals.
        let mut mass = Tensor::zeros(&[n, n, n]).map_err(|e| anyhow::anyhow!("{e}"))?;
        let lambda: f64 = rng.random_range(0.0..1.0);
        let product = 1.0 / (n * n * n) as f64;
        for v in mass.data_mut() {
            *v = lambda * product;
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
        let plan = CouplingPlan::new(mass).map_err(|e| anyhow::anyhow!("{e}"))?;
        let report = reduction_identity(&fields[0], &fields[1], &plan)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        max_residual = max_residual.max(report.residual);
    }
    let mut checks = Checks::new();
    checks.insert("residual_within_tol".into(), max_residual <= 1e-9);
    let results = json!({
        "plans": plans,
        "seed": seed,
        "max_residual": max_residual,
    });
    Ok((results, checks))
}

fn cmd_barycenter(ctx: &Context_) -> Result<(serde_json::Value, Checks)> {
    let plan_path = ctx
        .scenario
        .inputs
        .plan
        .as_ref()
        .context("barycenter needs inputs.plan")?;
    let plan = formats::load_plan(&ctx.resolve(plan_path))?;
    let paths = ctx
        .scenario
        .inputs
        .marginals
        .as_ref()
        .context("barycenter needs inputs.marginals")?;
    let measures: Vec<DiscreteMeasure> =
        paths.iter().map(|p| ctx.measure(p)).collect::<Result<_>>()?;
    let refs: Vec<&DiscreteMeasure> = measures.iter().collect();
    let nu = barycenter_measure(&plan, &refs).map_err(|e| anyhow::anyhow!("{e}"))?;
    formats::write_json(
        &ctx.artifact("barycenter.json"),
        &formats::MeasureFile::from_measure(&nu),
    )?;

    let mut checks = Checks::new();
    let total: f64 = nu.weights().iter().sum();
    checks.insert("total_mass_one".into(), (total - 1.0).abs() <= 1e-10);

    let mut results = json!({
        "atoms": nu.len(),
        "total_mass": total,
    });

    if let Some(sigma) = &ctx.scenario.options.sigma {
        let pushed = sigma_pushforward(&nu, sigma)?;
        let dist = wasserstein2(&nu, &pushed).map_err(|e| anyhow::anyhow!("{e}"))?;
        checks.insert("sigma_invariant".into(), dist <= 1e-10);
        results["sigma_distance"] = json!(dist);
    }

    if let Some(candidate_paths) = &ctx.scenario.inputs.candidates {
        let candidates: Vec<DiscreteMeasure> = candidate_paths
            .iter()
            .map(|p| ctx.measure(p))
            .collect::<Result<_>>()?;
        let cand_refs: Vec<&DiscreteMeasure> = candidates.iter().collect();
        let probe = barycenter_optimality_probe(&nu, &refs, &cand_refs)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        checks.insert("no_candidate_better".into(), probe.better.is_empty());
        results["nu_value"] = json!(probe.nu_value);
        results["candidate_values"] = json!(probe.candidate_values);
        results["better_candidates"] = json!(probe.better);
    }

    Ok((results, checks))
}

//! Scenario configs, report envelopes, and the directory suite runner.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub command: String,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub options: Options,
    /// Names of boolean checks that must come out true for exit code 0.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct Inputs {
    pub measure: Option<String>,
    pub marginals: Option<Vec<String>>,
    pub field: Option<String>,
    pub fields: Option<Vec<String>>,
    pub cost: Option<String>,
    pub plan: Option<String>,
    pub grid: Option<String>,
    pub candidates: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct Options {
    pub sense: Option<String>,
    pub m: Option<usize>,
    pub cost_kind: Option<String>,
    pub mode: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub axes: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub plans: Option<usize>,
    /// Coordinate permutation defining the symmetry to check against.
    pub sigma: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Expectation {
    pub value: Option<f64>,
    pub tol: Option<f64>,
    pub perm: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub report_tol: f64,
    pub gap_tol: f64,
    pub slackness_tol: f64,
    pub sigma_tol: f64,
}

impl Tolerances {
    pub fn with_report_tol(tol: f64) -> Self {
        Tolerances {
            report_tol: tol,
            gap_tol: symot_core::transport::DUALITY_GAP_TOL,
            slackness_tol: symot_core::duality::SLACKNESS_TOL,
            sigma_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub tolerances: Tolerances,
    pub results: serde_json::Value,
    pub checks: BTreeMap<String, bool>,
    pub passed: bool,
}

pub fn load_scenario(path: &Path) -> Result<(Scenario, String)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let scenario: Scenario = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    let hash = hex_digest(text.as_bytes());
    Ok((scenario, hash))
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Finalizes a report: verifies every expected check, applies value and
/// permutation expectations, and sets the pass flag.
pub fn finalize(
    scenario: &Scenario,
    config_hash: &str,
    tolerances: Tolerances,
    results: serde_json::Value,
    mut checks: BTreeMap<String, bool>,
) -> Report {
    if let Some(expect) = &scenario.expect {
        if let Some(target) = expect.value {
            let tol = expect.tol.unwrap_or(tolerances.report_tol);
            let got = results.get("value").and_then(|v| v.as_f64());
            checks.insert(
                "expected_value".into(),
                got.map_or(false, |v| (v - target).abs() <= tol),
            );
        }
        if let Some(perm) = &expect.perm {
            let got: Option<Vec<usize>> = results
                .get("perm")
                .and_then(|v| v.as_array())
                .map(|a| a.iter().filter_map(|v| v.as_u64().map(|u| u as usize)).collect());
            checks.insert("expected_perm".into(), got.as_ref() == Some(perm));
        }
    }
    let mut passed = true;
    let mut required: Vec<String> = scenario.checks.clone();
    if scenario.expect.is_some() {
        for name in ["expected_value", "expected_perm"] {
            if checks.contains_key(name) {
                required.push(name.to_string());
            }
        }
    }
    for name in &required {
        match checks.get(name) {
            Some(true) => {}
            Some(false) => passed = false,
            None => {
                checks.insert(name.clone(), false);
                passed = false;
            }
        }
    }
    Report {
        name: scenario.name.clone(),
        command: scenario.command.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash.to_string(),
        tolerances,
        results,
        checks,
        passed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub scenarios: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

/// Runs every `*.json` scenario in the directory across `workers` threads
/// and writes one report per scenario plus a summary. Input errors abort
/// the suite.
pub fn run_suite(dir: &Path, out: &Path, workers: usize, tol: f64) -> Result<SuiteSummary> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map_or(false, |e| e == "json"))
        .collect();
    paths.sort();

    let workers = workers.max(1).min(paths.len().max(1));
    let (job_tx, job_rx) = mpsc::channel::<(usize, PathBuf)>();
    let job_rx = std::sync::Arc::new(std::sync::Mutex::new(job_rx));
    let (result_tx, result_rx) = mpsc::channel::<(usize, Result<Report>)>();
    for (k, p) in paths.iter().enumerate() {
        job_tx.send((k, p.clone())).unwrap();
    }
    drop(job_tx);

    let out_dir = out.to_path_buf();
    thread::scope(|scope| {
        for _ in 0..workers {
            let job_rx = job_rx.clone();
            let result_tx = result_tx.clone();
            let out_dir = out_dir.clone();
            scope.spawn(move || loop {
                let job = { job_rx.lock().unwrap().recv() };
                let (k, path) = match job {
                    Ok(j) => j,
                    Err(_) => break,
                };
                let outcome = crate::commands::run_scenario_file(&path, &out_dir, tol);
                let _ = result_tx.send((k, outcome));
            });
        }
    });
    drop(result_tx);

    let mut reports: Vec<(usize, Result<Report>)> = result_rx.into_iter().collect();
    reports.sort_by_key(|(k, _)| *k);

    let mut summary = SuiteSummary {
        scenarios: paths.len(),
        passed: 0,
        failed: 0,
        failures: Vec::new(),
    };
    for ((_, outcome), path) in reports.into_iter().zip(&paths) {
        let report = outcome.with_context(|| format!("scenario {}", path.display()))?;
        if report.passed {
            summary.passed += 1;
        } else {
            summary.failed += 1;
            summary.failures.push(report.name.clone());
        }
    }
    crate::formats::write_json(&out.join("suite.summary.json"), &summary)?;
    Ok(summary)
}

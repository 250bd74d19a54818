//! JSON file formats for measures, plans, vector fields, grids, and cost
//! tensors, with conversions into the core types.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use symot_core::costs::{CostTensor, SampledVectorField};
use symot_core::measures::{CouplingPlan, DiscreteMeasure};
use symot_core::monotone::GridFunction;
use symot_core::tensor::Tensor;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFile {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl MeasureFile {
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.points.clone(), self.weights.clone())
            .map_err(|e| anyhow::anyhow!("invalid measure: {e}"))
    }

    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        MeasureFile {
            points: mu.points().to_vec(),
            weights: mu.weights().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanFile {
    pub arity: usize,
    /// Rows [i_0, …, i_{m-1}, mass].
    pub entries: Vec<Vec<serde_json::Value>>,
    /// Support sizes per axis; required to rebuild the dense tensor.
    pub shape: Vec<usize>,
}

impl PlanFile {
    pub fn to_plan(&self) -> Result<CouplingPlan> {
        if self.shape.len() != self.arity {
            bail!("plan shape has {} axes, arity says {}", self.shape.len(), self.arity);
        }
        let mut mass = Tensor::zeros(&self.shape).map_err(|e| anyhow::anyhow!("{e}"))?;
        for row in &self.entries {
            if row.len() != self.arity + 1 {
                bail!("plan entry has {} columns, expected {}", row.len(), self.arity + 1);
            }
            let idx: Vec<usize> = row[..self.arity]
                .iter()
                .map(|v| {
                    v.as_u64()
                        .map(|u| u as usize)
                        .context("plan index is not an unsigned integer")
                })
                .collect::<Result<_>>()?;
            let value = row[self.arity].as_f64().context("plan mass is not a number")?;
            for (ax, &i) in idx.iter().enumerate() {
                if i >= self.shape[ax] {
                    bail!("plan index {i} out of range on axis {ax}");
                }
            }
            mass.set(&idx, value);
        }
        CouplingPlan::new(mass).map_err(|e| anyhow::anyhow!("invalid plan: {e}"))
    }

    pub fn from_plan(plan: &CouplingPlan) -> Self {
        let mut entries = Vec::new();
        for (idx, mass) in plan.mass().iter_indexed() {
            if mass == 0.0 {
                continue;
            }
            let mut row: Vec<serde_json::Value> =
                idx.iter().map(|&i| serde_json::json!(i)).collect();
            row.push(serde_json::json!(mass));
            entries.push(row);
        }
        PlanFile {
            arity: plan.arity(),
            entries,
            shape: plan.support_sizes().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldFile {
    /// Path to the measure file carrying the base points, relative to this
    /// file's directory.
    pub measure: String,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub axes: Vec<Vec<f64>>,
    /// Flattened row-major values.
    pub values: Vec<f64>,
}

impl GridFile {
    pub fn to_grid(&self) -> Result<GridFunction> {
        let shape: Vec<usize> = self.axes.iter().map(|a| a.len()).collect();
        let tensor = Tensor::from_data(&shape, self.values.clone())
            .map_err(|e| anyhow::anyhow!("invalid grid values: {e}"))?;
        GridFunction::new(self.axes.clone(), tensor).map_err(|e| anyhow::anyhow!("invalid grid: {e}"))
    }

    pub fn from_grid(g: &GridFunction) -> Self {
        GridFile {
            axes: g.axes().to_vec(),
            values: g.values().data().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostFile {
    pub shape: Vec<usize>,
    /// Flattened row-major values.
    pub values: Vec<f64>,
}

impl CostFile {
    pub fn to_cost(&self) -> Result<CostTensor> {
        let tensor = Tensor::from_data(&self.shape, self.values.clone())
            .map_err(|e| anyhow::anyhow!("invalid cost values: {e}"))?;
        CostTensor::new(tensor).map_err(|e| anyhow::anyhow!("invalid cost: {e}"))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn load_measure(path: &Path) -> Result<DiscreteMeasure> {
    read_json::<MeasureFile>(path)?.to_measure()
}

pub fn load_plan(path: &Path) -> Result<CouplingPlan> {
    read_json::<PlanFile>(path)?.to_plan()
}

pub fn load_grid(path: &Path) -> Result<GridFunction> {
    read_json::<GridFile>(path)?.to_grid()
}

pub fn load_cost(path: &Path) -> Result<CostTensor> {
    read_json::<CostFile>(path)?.to_cost()
}

pub fn load_field(path: &Path) -> Result<SampledVectorField> {
    let file: FieldFile = read_json(path)?;
    let base_dir = path.parent().map(PathBuf::from).unwrap_or_default();
    let measure = load_measure(&base_dir.join(&file.measure))?;
    SampledVectorField::new(measure, file.values)
        .map_err(|e| anyhow::anyhow!("invalid field {}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_plan_csv(path: &Path, plan: &CouplingPlan) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = String::new();
    for ax in 0..plan.arity() {
        out.push_str(&format!("i{ax},"));
    }
    out.push_str("mass\n");
    for (idx, mass) in plan.mass().iter_indexed() {
        if mass == 0.0 {
            continue;
        }
        for &i in &idx {
            out.push_str(&format!("{i},"));
        }
        out.push_str(&format!("{mass}\n"));
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

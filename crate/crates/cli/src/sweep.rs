//! Grid sweeps and threshold search.

use std::collections::BTreeMap;

use ecs_core::entanglement::monogamy_threshold;
use rayon::prelude::*;
use serde_json::{Map, Number, Value};

use crate::config::{AxisSpec, SweepSection, ThresholdSection};
use crate::error::{config, CliResult};
use crate::params::{check_value, evaluate, is_integer_param, resolve, Quantity};

/// A validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub fixed: BTreeMap<String, f64>,
    pub axes: Vec<AxisSpec>,
    pub output_path: Option<String>,
}

impl SweepSpec {
    pub fn new(section: &SweepSection) -> CliResult<SweepSpec> {
        let q = section.quantity;
        if section.axes.is_empty() || section.axes.len() > 2 {
            return Err(config(format!("axes: expected 1 or 2 swept parameters, got {}", section.axes.len())));
        }
        for (i, a) in section.axes.iter().enumerate() {
            if a.steps < 2 {
                return Err(config(format!("{}: steps must be at least 2, got {}", a.name, a.steps)));
            }
            if section.fixed.contains_key(&a.name) {
                return Err(config(format!("{}: both fixed and swept", a.name)));
            }
            if section.axes[..i].iter().any(|b| b.name == a.name) {
                return Err(config(format!("{}: swept twice", a.name)));
            }
            for v in a.values() {
                check_value(&a.name, v)?;
            }
        }
        let mut fixed = section.fixed.clone();
        let swept: Vec<String> = section.axes.iter().map(|a| a.name.clone()).collect();
        resolve(q, &mut fixed, &swept)?;
        Ok(SweepSpec { quantity: q, fixed, axes: section.axes.clone(), output_path: section.output.clone() })
    }

    /// Sorted-key JSON of the fixed values and axes.
    pub fn canonical_params(&self) -> String {
        let mut m = Map::new();
        m.insert("fixed".into(), params_value(&self.fixed));
        let axes = self
            .axes
            .iter()
            .map(|a| {
                let mut o = Map::new();
                o.insert("name".into(), Value::String(a.name.clone()));
                o.insert("start".into(), num(&a.name, a.start));
                o.insert("stop".into(), num(&a.name, a.stop));
                o.insert("steps".into(), Value::Number(a.steps.into()));
                Value::Object(o)
            })
            .collect();
        m.insert("axes".into(), Value::Array(axes));
        Value::Object(m).to_string()
    }
}

/// Integer-typed parameters print without a fractional part.
pub fn num(name: &str, v: f64) -> Value {
    if is_integer_param(name) && v.fract() == 0.0 && v >= 0.0 {
        Value::Number((v as u64).into())
    } else {
        Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
    }
}

pub fn params_value(p: &BTreeMap<String, f64>) -> Value {
    Value::Object(p.iter().map(|(k, &v)| (k.clone(), num(k, v))).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axes: Vec<f64>,
    pub value: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub quantity: Quantity,
    pub params: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# quantity={} params={}\n", self.quantity, self.params);
        out.push_str(&self.columns.join(","));
        out.push_str(",value,status\n");
        for r in &self.rows {
            for a in &r.axes {
                out.push_str(&format!("{a},"));
            }
            if let Some(v) = r.value {
                out.push_str(&v.to_string());
            }
            out.push(',');
            out.push_str(&r.status);
            out.push('\n');
        }
        out
    }
}

fn pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| config(format!("jobs: {e}")))
}

/// Evaluates every grid point, first axis slowest. Points the physics
/// rejects keep their row with an empty value and the error kind as status.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> CliResult<Table> {
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for g in &grids {
        points = points.iter().flat_map(|p| g.iter().map(move |&x| [p.as_slice(), &[x]].concat())).collect();
    }
    let rows = pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|axes| {
                let mut values = spec.fixed.clone();
                for (a, &x) in spec.axes.iter().zip(axes) {
                    values.insert(a.name.clone(), x);
                }
                match evaluate(spec.quantity, &values) {
                    Ok(v) if v.is_finite() => Row { axes: axes.clone(), value: Some(v), status: "ok".into() },
                    Ok(_) => Row { axes: axes.clone(), value: None, status: "non_finite".into() },
                    Err(e) => Row { axes: axes.clone(), value: None, status: e.kind().into() },
                }
            })
            .collect()
    });
    Ok(Table {
        quantity: spec.quantity,
        params: spec.canonical_params(),
        columns: spec.axes.iter().map(|a| a.name.clone()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSpec {
    pub fixed: BTreeMap<String, f64>,
    pub axis: String,
    pub bracket: [f64; 2],
    pub tol: f64,
}

impl ThresholdSpec {
    pub fn new(section: &ThresholdSection) -> CliResult<ThresholdSpec> {
        let [lo, hi] = section.bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(config(format!("bracket: need lo < hi, got ({lo}, {hi})")));
        }
        if !(section.tol > 0.0) {
            return Err(config(format!("tol: must be positive, got {}", section.tol)));
        }
        if section.fixed.contains_key(&section.axis) {
            return Err(config(format!("{}: both fixed and the search axis", section.axis)));
        }
        if is_integer_param(&section.axis) {
            return Err(config(format!("{}: cannot search over an integer parameter", section.axis)));
        }
        let mut fixed = section.fixed.clone();
        resolve(Quantity::Tau, &mut fixed, std::slice::from_ref(&section.axis))?;
        Ok(ThresholdSpec { fixed, axis: section.axis.clone(), bracket: section.bracket, tol: section.tol })
    }

    pub fn canonical_params(&self) -> String {
        let mut m = Map::new();
        m.insert("fixed".into(), params_value(&self.fixed));
        m.insert("axis".into(), Value::String(self.axis.clone()));
        m.insert("bracket".into(), Value::Array(self.bracket.iter().map(|&b| num("", b)).collect()));
        m.insert("tol".into(), num("", self.tol));
        Value::Object(m).to_string()
    }

    pub fn tau_at(&self, x: f64) -> ecs_core::Result<f64> {
        let mut values = self.fixed.clone();
        values.insert(self.axis.clone(), x);
        evaluate(Quantity::Tau, &values)
    }
}

/// Root of `τ` along the search axis.
pub fn find_threshold(spec: &ThresholdSpec) -> CliResult<f64> {
    Ok(monogamy_threshold(|x| spec.tau_at(x), spec.bracket[0], spec.bracket[1], spec.tol)?)
}

pub fn threshold_csv(spec: &ThresholdSpec, root: f64) -> String {
    format!("# quantity=tau params={}\naxis,root\n{},{}\n", spec.canonical_params(), spec.axis, root)
}

//! JSON run configuration and `--set key=value` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{config, CliError, CliResult};
use crate::params::{check_value, Quantity};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ECS_OUT_DIR";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl AxisSpec {
    /// `steps` evenly spaced values, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == last { self.stop } else { self.start + (self.stop - self.start) * i as f64 / last as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub quantity: Quantity,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub axes: Vec<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub axis: String,
    pub bracket: [f64; 2],
    #[serde(default = "default_threshold_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_threshold_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    /// Mix of single-branch and fully weighted draws.
    Mixed,
    /// Only the first weight nonzero.
    ZeroTail,
    /// First weight one, second `1e-6`, the rest zero.
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_audit_tol")]
    pub tol: f64,
    #[serde(default = "default_mode")]
    pub mode: AuditMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_trials() -> usize {
    1000
}
fn default_d_max() -> usize {
    4
}
fn default_n_max() -> usize {
    20
}
fn default_audit_tol() -> f64 {
    1e-9
}
fn default_mode() -> AuditMode {
    AuditMode::Mixed
}

impl Default for AuditSection {
    fn default() -> Self {
        AuditSection {
            trials: default_trials(),
            d_max: default_d_max(),
            n_max: default_n_max(),
            tol: default_audit_tol(),
            mode: default_mode(),
            output: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub lambda: f64,
    /// `[re, im]`
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub factors: Vec<FactorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        ProtocolSection { modes: 2, cutoff: None, factors: Vec::new(), output: None }
    }
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))
    }
}

/// Which section `--set` overrides land in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Sweep,
    Threshold,
    Audit,
    Protocol,
}

pub fn split_assignment(s: &str) -> CliResult<(&str, &str)> {
    let (k, v) = s.split_once('=').ok_or_else(|| config(format!("--set {s}: expected key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(config(format!("--set {s}: empty key")));
    }
    Ok((k, v.trim()))
}

fn number(key: &str, v: &str) -> CliResult<f64> {
    v.parse::<f64>().map_err(|_| config(format!("{key}: {v:?} is not a number")))
}

fn integer(key: &str, v: &str) -> CliResult<usize> {
    v.parse::<usize>().map_err(|_| config(format!("{key}: {v:?} is not a non-negative integer")))
}

/// `start:stop:steps`
fn axis(key: &str, v: &str) -> CliResult<AxisSpec> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() != 3 {
        return Err(config(format!("{key}: axis must be start:stop:steps, got {v:?}")));
    }
    Ok(AxisSpec {
        name: key.to_string(),
        start: number(key, parts[0])?,
        stop: number(key, parts[1])?,
        steps: integer(key, parts[2])?,
    })
}

/// `re` or `re,im`
fn complex(key: &str, v: &str) -> CliResult<[f64; 2]> {
    match v.split_once(',') {
        Some((re, im)) => Ok([number(key, re.trim())?, number(key, im.trim())?]),
        None => Ok([number(key, v)?, 0.0]),
    }
}

impl Config {
    /// Applies one `key=value` override to `section`.
    ///
    /// In sweeps a numeric value on a swept name replaces that axis by a fixed
    /// value, and `start:stop:steps` turns a name into an axis.
    pub fn apply_set(&mut self, section: Section, assignment: &str) -> CliResult<()> {
        let (key, v) = split_assignment(assignment)?;
        match (section, key) {
            (_, "seed") => self.seed = Some(integer(key, v)? as u64),
            (_, "jobs") => self.jobs = Some(integer(key, v)?),
            (Section::Sweep, "quantity") => {
                let q: Quantity = v.parse().map_err(config)?;
                match &mut self.sweep {
                    Some(s) => s.quantity = q,
                    None => self.sweep = Some(SweepSection { quantity: q, fixed: BTreeMap::new(), axes: Vec::new(), output: None }),
                }
            }
            (Section::Sweep, "output") => self.sweep_mut()?.output = Some(v.to_string()),
            (Section::Sweep, _) => {
                let s = self.sweep_mut()?;
                if v.contains(':') {
                    let a = axis(key, v)?;
                    s.fixed.remove(key);
                    match s.axes.iter_mut().find(|x| x.name == key) {
                        Some(existing) => *existing = a,
                        None => s.axes.push(a),
                    }
                } else {
                    let x = number(key, v)?;
                    check_value(key, x)?;
                    s.axes.retain(|a| a.name != key);
                    s.fixed.insert(key.to_string(), x);
                }
            }
            (Section::Threshold, _) => {
                let t = self
                    .threshold
                    .as_mut()
                    .ok_or_else(|| config("threshold: no threshold section in the configuration"))?;
                match key {
                    "axis" => t.axis = v.to_string(),
                    "tol" => t.tol = number(key, v)?,
                    "output" => t.output = Some(v.to_string()),
                    "bracket" => {
                        let (lo, hi) =
                            v.split_once(':').ok_or_else(|| config(format!("bracket: expected lo:hi, got {v:?}")))?;
                        t.bracket = [number(key, lo)?, number(key, hi)?];
                    }
                    _ => {
                        let x = number(key, v)?;
                        check_value(key, x)?;
                        t.fixed.insert(key.to_string(), x);
                    }
                }
            }
            (Section::Audit, _) => {
                let a = self.audit.get_or_insert_with(AuditSection::default);
                match key {
                    "trials" => a.trials = integer(key, v)?,
                    "d_max" => a.d_max = integer(key, v)?,
                    "n_max" => a.n_max = integer(key, v)?,
                    "tol" => a.tol = number(key, v)?,
                    "output" => a.output = Some(v.to_string()),
                    "mode" => {
                        a.mode = serde_json::from_value(serde_json::Value::String(v.to_string()))
                            .map_err(|_| config(format!("mode: {v:?} is not one of mixed, zero_tail, perturbed")))?
                    }
                    _ => return Err(config(format!("{key}: not an audit setting"))),
                }
            }
            (Section::Protocol, _) => {
                let p = self.protocol.get_or_insert_with(ProtocolSection::default);
                match key {
                    "modes" => p.modes = integer(key, v)?,
                    "cutoff" => p.cutoff = Some(integer(key, v)?),
                    "output" => p.output = Some(v.to_string()),
                    "lambda" | "alpha" | "beta" => {
                        if p.factors.len() > 1 {
                            return Err(config(format!("{key}: only applies to single-factor protocols")));
                        }
                        if p.factors.is_empty() {
                            p.factors.push(FactorSpec { lambda: 0.0, alpha: [0.0; 2], beta: [0.0; 2] });
                        }
                        let f = &mut p.factors[0];
                        match key {
                            "lambda" => f.lambda = number(key, v)?,
                            "alpha" => f.alpha = complex(key, v)?,
                            _ => f.beta = complex(key, v)?,
                        }
                    }
                    _ => return Err(config(format!("{key}: not a protocol setting"))),
                }
            }
        }
        Ok(())
    }

    fn sweep_mut(&mut self) -> CliResult<&mut SweepSection> {
        self.sweep.as_mut().ok_or_else(|| config("quantity: no sweep section; pass --set quantity=<name>"))
    }
}

/// `--out`, else the section's `output` (relative to the default directory
/// when one is set), else `$ECS_OUT_DIR/<default_name>`, else `None` for
/// standard output.
pub fn output_path(flag: Option<&Path>, section: Option<&str>, default_name: &str) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match (section, dir) {
        (Some(s), Some(d)) => Some(d.join(s)),
        (Some(s), None) => Some(PathBuf::from(s)),
        (None, Some(d)) => Some(d.join(default_name)),
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_cfg() -> Config {
        serde_json::from_str(
            r#"{"sweep": {"quantity": "qubit_concurrence", "fixed": {"N": 2, "m": 1},
                "axes": [{"name": "mu", "start": -1, "stop": 1, "steps": 3},
                         {"name": "p", "start": 0, "stop": 0.5, "steps": 2}]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let a = AxisSpec { name: "x".into(), start: -10.0, stop: 10.0, steps: 7 };
        let v = a.values();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], -10.0);
        assert_eq!(v[6], 10.0);
    }

    #[test]
    fn set_on_swept_name_replaces_axis() {
        let mut c = sweep_cfg();
        c.apply_set(Section::Sweep, "p=0.3").unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.axes.len(), 1);
        assert_eq!(s.fixed["p"], 0.3);
    }

    #[test]
    fn set_can_create_axis() {
        let mut c = sweep_cfg();
        c.apply_set(Section::Sweep, "m=1:1:2").unwrap();
        let s = c.sweep.unwrap();
        assert!(!s.fixed.contains_key("m"));
        assert_eq!(s.axes.len(), 3);
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<Config>(r#"{"sweeps": {}}"#).unwrap_err();
        assert!(err.to_string().contains("sweeps"));
    }

    #[test]
    fn protocol_shortcuts() {
        let mut c = Config::default();
        c.apply_set(Section::Protocol, "alpha=1,0.5").unwrap();
        c.apply_set(Section::Protocol, "lambda=0.3").unwrap();
        let p = c.protocol.unwrap();
        assert_eq!(p.factors[0].alpha, [1.0, 0.5]);
        assert_eq!(p.factors[0].lambda, 0.3);
    }

    #[test]
    fn malformed_assignments() {
        let mut c = sweep_cfg();
        for bad in ["mu", "=3", "mu=abc", "mu=1:2", "N=2.5"] {
            assert!(c.apply_set(Section::Sweep, bad).is_err(), "{bad}");
        }
    }
}

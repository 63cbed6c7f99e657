//! Protocol simulation runs.

use std::time::{Duration, Instant};

use ecs_core::fock::{generate_protocol, VFactor};
use ecs_core::{CoherentLabel, C64};
use serde_json::{Map, Value};

use crate::config::ProtocolSection;
use crate::error::{config, CliResult};
use crate::params::protocol_default_cutoff;
use crate::sweep::num;

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub modes: usize,
    pub cutoff: usize,
    pub prep_cutoff: usize,
    pub fidelity: f64,
    pub leak: f64,
    pub elapsed: Duration,
    params: String,
}

impl ProtocolReport {
    /// Result table; the wall time is left out so reruns are byte-identical.
    pub fn to_csv(&self) -> String {
        format!(
            "# quantity=protocol_fidelity params={}\nmodes,cutoff,prep_cutoff,fidelity,leak\n{},{},{},{},{}\n",
            self.params, self.modes, self.cutoff, self.prep_cutoff, self.fidelity, self.leak
        )
    }

    pub fn summary(&self) -> String {
        format!(
            "fidelity={} infidelity={:e} leak={:e} wall_time_s={:.3}",
            self.fidelity,
            1.0 - self.fidelity,
            self.leak,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn factors(section: &ProtocolSection) -> CliResult<Vec<VFactor>> {
    if section.factors.is_empty() {
        return Err(config("factors: at least one V factor is needed"));
    }
    section
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let label = |v: [f64; 2], name: &str| {
                CoherentLabel::new(C64::new(v[0], v[1])).map_err(|e| config(format!("factors[{i}].{name}: {e}")))
            };
            if !f.lambda.is_finite() {
                return Err(config(format!("factors[{i}].lambda: not finite")));
            }
            Ok(VFactor { lambda: f.lambda, alpha: label(f.alpha, "alpha")?, beta: label(f.beta, "beta")? })
        })
        .collect()
}

pub fn run_protocol(section: &ProtocolSection) -> CliResult<ProtocolReport> {
    let fs = factors(section)?;
    if section.modes < 2 || !section.modes.is_power_of_two() {
        return Err(config(format!("modes: must be a power of two ≥ 2, got {}", section.modes)));
    }
    let cutoff = section.cutoff.unwrap_or_else(|| protocol_default_cutoff(&fs));
    let mut m = Map::new();
    m.insert("cutoff".into(), cutoff.into());
    m.insert(
        "factors".into(),
        Value::Array(
            section
                .factors
                .iter()
                .map(|f| {
                    let mut o = Map::new();
                    o.insert("alpha".into(), Value::Array(f.alpha.iter().map(|&x| num("", x)).collect()));
                    o.insert("beta".into(), Value::Array(f.beta.iter().map(|&x| num("", x)).collect()));
                    o.insert("lambda".into(), num("", f.lambda));
                    Value::Object(o)
                })
                .collect(),
        ),
    );
    m.insert("modes".into(), section.modes.into());
    let start = Instant::now();
    let run = generate_protocol(&fs, section.modes, cutoff)?;
    Ok(ProtocolReport {
        modes: section.modes,
        cutoff,
        prep_cutoff: run.prep_cutoff,
        fidelity: run.fidelity,
        leak: run.leak,
        elapsed: start.elapsed(),
        params: Value::Object(m).to_string(),
    })
}

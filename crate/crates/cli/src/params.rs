//! Named parameters of the sweepable quantities and their evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use ecs_core::entanglement::{concurrence_qubit_from_overlap, concurrence_qutrit_closed, monogamy, MonogamyReport};
use ecs_core::fock::{default_cutoff, generate_protocol, VFactor};
use ecs_core::{BalancedEcs, CoherentLabel, EcsError, C64};
use serde::{Deserialize, Serialize};

use crate::error::{config, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    QubitConcurrence,
    QutritConcurrence,
    MixedCab,
    MixedCad,
    Tau,
    ProtocolFidelity,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::QubitConcurrence,
        Quantity::QutritConcurrence,
        Quantity::MixedCab,
        Quantity::MixedCad,
        Quantity::Tau,
        Quantity::ProtocolFidelity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::QubitConcurrence => "qubit_concurrence",
            Quantity::QutritConcurrence => "qutrit_concurrence",
            Quantity::MixedCab => "mixed_cab",
            Quantity::MixedCad => "mixed_cad",
            Quantity::Tau => "tau",
            Quantity::ProtocolFidelity => "protocol_fidelity",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| {
            let names: Vec<_> = Quantity::ALL.iter().map(|q| q.name()).collect();
            format!("unknown quantity {s:?}, expected one of {}", names.join(", "))
        })
    }
}

pub const INTEGER_PARAMS: [&str; 7] = ["N", "m", "m1", "m2", "d", "modes", "cutoff"];

/// Required and optional parameter names, with defaults for the optional ones.
pub struct Signature {
    pub required: &'static [&'static str],
    pub optional: &'static [(&'static str, f64)],
}

/// The mixed-state family is chosen by `d` (2 or 3), which must be fixed.
pub fn signature(q: Quantity, d: usize) -> CliResult<Signature> {
    Ok(match q {
        Quantity::QubitConcurrence => Signature { required: &["N", "m", "mu", "p"], optional: &[] },
        Quantity::QutritConcurrence => {
            Signature { required: &["N", "m", "mu1", "mu2", "p1", "p2", "p3"], optional: &[] }
        }
        Quantity::MixedCab | Quantity::MixedCad | Quantity::Tau => match d {
            2 => Signature { required: &["N", "m1", "m2", "mu", "p"], optional: &[("d", 2.0)] },
            3 => Signature {
                required: &["N", "m1", "m2", "mu1", "mu2", "p1"],
                optional: &[("d", 2.0), ("p2", 0.0), ("p3", 0.0)],
            },
            _ => return Err(config(format!("d: {q} supports d = 2 or d = 3, got {d}"))),
        },
        Quantity::ProtocolFidelity => Signature {
            required: &["modes", "lambda", "alpha", "beta"],
            optional: &[("alpha_im", 0.0), ("beta_im", 0.0), ("cutoff", 0.0)],
        },
    })
}

/// Checks names against the quantity, fills defaults into `fixed`, and
/// returns the family dimension.
pub fn resolve(q: Quantity, fixed: &mut BTreeMap<String, f64>, swept: &[String]) -> CliResult<()> {
    if swept.iter().any(|s| s == "d") {
        return Err(config("d: the family dimension cannot be swept"));
    }
    let d = match fixed.get("d") {
        Some(&v) => as_index("d", v)?,
        None => 2,
    };
    let sig = signature(q, d)?;
    let known: BTreeSet<&str> = sig.required.iter().copied().chain(sig.optional.iter().map(|o| o.0)).collect();
    for name in fixed.keys().chain(swept.iter()) {
        if !known.contains(name.as_str()) {
            return Err(config(format!("{name}: not a parameter of {q}")));
        }
    }
    for name in sig.required {
        if !fixed.contains_key(*name) && !swept.iter().any(|s| s == name) {
            return Err(config(format!("{name}: required by {q} but not given")));
        }
    }
    for (name, default) in sig.optional {
        if !swept.iter().any(|s| s == name) && !(q == Quantity::ProtocolFidelity && *name == "cutoff") {
            fixed.entry(name.to_string()).or_insert(*default);
        }
    }
    for (name, &v) in fixed.iter() {
        check_value(name, v)?;
    }
    Ok(())
}

pub fn is_integer_param(name: &str) -> bool {
    INTEGER_PARAMS.contains(&name)
}

pub fn check_value(name: &str, v: f64) -> CliResult<()> {
    if !v.is_finite() {
        return Err(config(format!("{name}: value {v} is not finite")));
    }
    if is_integer_param(name) {
        as_index(name, v)?;
    }
    Ok(())
}

fn as_index(name: &str, v: f64) -> CliResult<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
        Ok(v as usize)
    } else {
        Err(config(format!("{name}: expected a non-negative integer, got {v}")))
    }
}

/// One point of parameter space.
pub struct Point<'a>(pub &'a BTreeMap<String, f64>);

impl Point<'_> {
    fn f(&self, name: &str) -> f64 {
        self.0[name]
    }

    fn u(&self, name: &str) -> usize {
        self.0[name] as usize
    }
}

fn mixed_family(p: &Point) -> Result<MonogamyReport, EcsError> {
    let (n, m1, m2) = (p.u("N"), p.u("m1"), p.u("m2"));
    let state = if p.u("d") == 3 {
        BalancedEcs::qutrit(p.f("mu1"), p.f("mu2"), p.f("p1"), p.f("p2"), p.f("p3"), n)?
    } else {
        BalancedEcs::qubit(p.f("mu"), p.f("p"), n)?
    };
    monogamy(&state, m1, m2)
}

/// Evaluates `q` at a fully specified point.
pub fn evaluate(q: Quantity, values: &BTreeMap<String, f64>) -> Result<f64, EcsError> {
    let p = Point(values);
    match q {
        Quantity::QubitConcurrence => {
            let overlap = p.f("p");
            if !(0.0..1.0).contains(&overlap) {
                return Err(EcsError::ConstraintViolation(format!("p = {overlap} outside [0, 1)")));
            }
            concurrence_qubit_from_overlap(C64::new(p.f("mu"), 0.0), C64::new(overlap, 0.0), p.u("N"), p.u("m"))
        }
        Quantity::QutritConcurrence => concurrence_qutrit_closed(
            p.f("mu1"),
            p.f("mu2"),
            p.f("p1"),
            p.f("p2"),
            p.f("p3"),
            p.u("N"),
            p.u("m"),
        ),
        Quantity::MixedCab => mixed_family(&p).map(|r| r.c2_ab.sqrt()),
        Quantity::MixedCad => mixed_family(&p).map(|r| r.c2_ad.sqrt()),
        Quantity::Tau => mixed_family(&p).map(|r| r.tau),
        Quantity::ProtocolFidelity => {
            let factor = VFactor {
                lambda: p.f("lambda"),
                alpha: CoherentLabel::new(C64::new(p.f("alpha"), p.f("alpha_im")))?,
                beta: CoherentLabel::new(C64::new(p.f("beta"), p.f("beta_im")))?,
            };
            let cutoff = match values.get("cutoff") {
                Some(&c) if c > 0.0 => c as usize,
                _ => protocol_default_cutoff(&[factor]),
            };
            Ok(generate_protocol(&[factor], p.u("modes"), cutoff)?.fidelity)
        }
    }
}

/// Cutoff rule applied to the largest final branch amplitude.
pub fn protocol_default_cutoff(factors: &[VFactor]) -> usize {
    let largest = ecs_core::fock::protocol_branches(factors).iter().fold(0.0f64, |m, b| m.max(b.1.norm()));
    default_cutoff(largest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        assert!("concurrence".parse::<Quantity>().is_err());
    }

    #[test]
    fn resolve_reports_offending_field() {
        let mut f = map(&[("N", 2.0), ("m", 1.0), ("mu", -1.0)]);
        let err = resolve(Quantity::QubitConcurrence, &mut f, &[]).unwrap_err();
        assert!(err.to_string().starts_with("p:"), "{err}");

        let mut f = map(&[("N", 2.0), ("m", 1.0), ("mu", -1.0), ("p", 0.5), ("mu2", 1.0)]);
        assert!(resolve(Quantity::QubitConcurrence, &mut f, &[]).unwrap_err().to_string().starts_with("mu2:"));

        let mut f = map(&[("N", 2.5), ("m", 1.0), ("mu", -1.0), ("p", 0.5)]);
        assert!(resolve(Quantity::QubitConcurrence, &mut f, &[]).unwrap_err().to_string().starts_with("N:"));
    }

    #[test]
    fn defaults_fill_in() {
        let mut f = map(&[("d", 3.0), ("N", 20.0), ("m1", 1.0), ("m2", 2.0), ("mu2", 0.4), ("p1", 0.7)]);
        resolve(Quantity::Tau, &mut f, &["mu1".to_string()]).unwrap();
        assert_eq!(f["p2"], 0.0);
        assert_eq!(f["p3"], 0.0);
    }

    #[test]
    fn qubit_point_values() {
        let f = map(&[("N", 2.0), ("m", 1.0), ("mu", -1.0), ("p", 0.6)]);
        assert!((evaluate(Quantity::QubitConcurrence, &f).unwrap() - 1.0).abs() < 1e-12);
        let f = map(&[("N", 2.0), ("m", 1.0), ("mu", -1.0), ("p", 1.0)]);
        assert_eq!(evaluate(Quantity::QubitConcurrence, &f).unwrap_err().kind(), "constraint_violation");
    }
}

//! Randomized check of the separability criterion.

use ecs_core::entanglement::separability_check;
use ecs_core::{BalancedEcs, CoherentLabel, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{AuditMode, AuditSection};
use crate::error::{config, CliResult};

const MIN_LABEL_GAP: f64 = 0.3;
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub weights: Vec<C64>,
    pub labels: Vec<CoherentLabel>,
    pub modes: usize,
    pub split: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub draw: Draw,
    pub concurrence: f64,
    pub expected_separable: bool,
    pub computed_separable: bool,
}

impl Trial {
    pub fn agrees(&self) -> bool {
        self.expected_separable == self.computed_separable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub seed: u64,
    pub settings: AuditSection,
    pub trials: Vec<Trial>,
    /// Draws thrown away because the frame was degenerate.
    pub redraws: usize,
}

impl AuditReport {
    pub fn agreements(&self) -> usize {
        self.trials.iter().filter(|t| t.agrees()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut m = Map::new();
        let s = &self.settings;
        m.insert("d_max".into(), s.d_max.into());
        m.insert("mode".into(), serde_json::to_value(s.mode).unwrap_or(Value::Null));
        m.insert("n_max".into(), s.n_max.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("tol".into(), crate::sweep::num("", s.tol));
        m.insert("trials".into(), s.trials.into());
        let mut out = format!("# quantity=separability_audit params={}\n", Value::Object(m));
        out.push_str("trial,d,N,m,nonzero_weights,concurrence,expected_separable,computed_separable,agree\n");
        for (i, t) in self.trials.iter().enumerate() {
            let nonzero = t.draw.weights.iter().filter(|w| w.norm() != 0.0).count();
            out.push_str(&format!(
                "{i},{},{},{},{nonzero},{},{},{},{}\n",
                t.draw.labels.len(),
                t.draw.modes,
                t.draw.split,
                t.concurrence,
                t.expected_separable,
                t.computed_separable,
                t.agrees()
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!("agree={}/{} redraws={}", self.agreements(), self.trials.len(), self.redraws)
    }
}

fn random_weight(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_labels(rng: &mut ChaCha8Rng, d: usize) -> Vec<CoherentLabel> {
    loop {
        let amps: Vec<C64> = (0..d).map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let spread = amps.iter().enumerate().all(|(i, a)| amps[i + 1..].iter().all(|b| (a - b).norm() > MIN_LABEL_GAP));
        if spread {
            return amps.into_iter().map(|a| CoherentLabel::new(a).expect("finite")).collect();
        }
    }
}

fn random_weights(rng: &mut ChaCha8Rng, d: usize, mode: AuditMode) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    match mode {
        AuditMode::ZeroTail => {
            let mut w = vec![zero; d];
            w[0] = random_weight(rng);
            w
        }
        AuditMode::Perturbed => {
            let mut w = vec![zero; d];
            w[0] = C64::new(1.0, 0.0);
            w[1] = C64::new(1e-6, 0.0);
            w
        }
        AuditMode::Mixed => {
            if rng.gen_bool(1.0 / 3.0) {
                let mut w = vec![zero; d];
                w[rng.gen_range(0..d)] = random_weight(rng);
                w
            } else {
                loop {
                    let w: Vec<C64> =
                        (0..d).map(|_| if rng.gen_bool(0.25) { zero } else { random_weight(rng) }).collect();
                    if w.iter().filter(|x| x.norm() != 0.0).count() >= 2 {
                        return w;
                    }
                }
            }
        }
    }
}

/// Draws are generated sequentially from the seed, then evaluated in
/// parallel; the report does not depend on the worker count.
pub fn audit_separability(settings: &AuditSection, seed: u64, jobs: Option<usize>) -> CliResult<AuditReport> {
    if settings.trials == 0 {
        return Err(config("trials: must be at least 1"));
    }
    if !(2..=8).contains(&settings.d_max) {
        return Err(config(format!("d_max: must lie in 2..=8, got {}", settings.d_max)));
    }
    if settings.n_max < 2 {
        return Err(config(format!("n_max: must be at least 2, got {}", settings.n_max)));
    }
    if !(settings.tol > 0.0) {
        return Err(config(format!("tol: must be positive, got {}", settings.tol)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(settings.trials);
    let mut redraws = 0;
    while draws.len() < settings.trials {
        let d = rng.gen_range(2..=settings.d_max);
        let modes = rng.gen_range(2..=settings.n_max);
        let split = rng.gen_range(1..modes);
        let labels = random_labels(&mut rng, d);
        let weights = random_weights(&mut rng, d, settings.mode);
        let ok = BalancedEcs::new(weights.clone(), &labels, modes)
            .and_then(|s| ecs_core::bipartite_tensor(&s, split).map(|_| ()))
            .is_ok();
        if ok {
            draws.push(Draw { weights, labels, modes, split });
        } else {
            redraws += 1;
            if redraws > MAX_REDRAWS {
                return Err(config("d_max/n_max: too many degenerate draws"));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| config(format!("jobs: {e}")))?;
    let tol = settings.tol;
    let trials = pool.install(|| {
        draws
            .into_par_iter()
            .map(|draw| {
                let s = BalancedEcs::new(draw.weights.clone(), &draw.labels, draw.modes)?;
                let v = separability_check(&s, draw.split, tol)?;
                Ok(Trial { draw, concurrence: v.concurrence, expected_separable: v.expected, computed_separable: v.computed })
            })
            .collect::<ecs_core::Result<Vec<_>>>()
    })?;
    Ok(AuditReport { seed, settings: settings.clone(), trials, redraws })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(trials: usize, mode: AuditMode) -> AuditSection {
        AuditSection { trials, mode, ..AuditSection::default() }
    }

    #[test]
    fn zero_tail_is_always_separable() {
        let r = audit_separability(&settings(200, AuditMode::ZeroTail), 3, None).unwrap();
        assert!(r.trials.iter().all(|t| t.computed_separable && t.expected_separable));
    }

    #[test]
    fn tiny_perturbation_entangles() {
        let r = audit_separability(&settings(200, AuditMode::Perturbed), 5, None).unwrap();
        assert!(r.trials.iter().all(|t| !t.computed_separable && t.concurrence > 1e-9));
        assert_eq!(r.agreements(), 200);
    }

    #[test]
    fn same_seed_same_report() {
        let a = audit_separability(&settings(50, AuditMode::Mixed), 11, Some(1)).unwrap().to_csv();
        let b = audit_separability(&settings(50, AuditMode::Mixed), 11, Some(4)).unwrap().to_csv();
        assert_eq!(a, b);
        let c = audit_separability(&settings(50, AuditMode::Mixed), 12, Some(4)).unwrap().to_csv();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_zero_trials() {
        assert_eq!(audit_separability(&settings(0, AuditMode::Mixed), 1, None).unwrap_err().kind(), "config_error");
    }
}

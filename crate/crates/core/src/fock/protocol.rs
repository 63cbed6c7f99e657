//! Two-branch-per-factor preparation: a product of `V` operators on mode 0,
//! then a beam-splitter cascade spreading the amplitude evenly over all modes.

use super::ops::{beam_splitter, v_op};
use super::{check_cutoff, default_cutoff, fidelity, FockVector, MAX_LEAK};
use crate::coherent::CoherentLabel;
use crate::error::{EcsError, Result};
use crate::C64;

/// One `V(α, β, λ)` factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VFactor {
    pub lambda: f64,
    pub alpha: CoherentLabel,
    pub beta: CoherentLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub state: FockVector,
    pub target: FockVector,
    pub fidelity: f64,
    /// Weight lost when the prepared single-mode state is cut down to the
    /// register cutoff.
    pub leak: f64,
    /// Cutoff used while applying the `V` factors.
    pub prep_cutoff: usize,
}

/// Exact single-mode branches `Σ w_b |x_b⟩` of `V_k ⋯ V_1 |0⟩`, factors
/// applied in list order.
///
/// Uses `D(α)|x⟩ = e^{i Im(α x*)} |α + x⟩` and `Π|x⟩ = |-x⟩`.
pub fn protocol_branches(factors: &[VFactor]) -> Vec<(C64, C64)> {
    branches_with_peak(factors).0
}

/// Branches plus the largest label amplitude met along the way, including
/// the reflected-and-shifted labels inside each `U`.
fn branches_with_peak(factors: &[VFactor]) -> (Vec<(C64, C64)>, f64) {
    let mut peak = 0.0f64;
    let mut branches = vec![(C64::new(1.0, 0.0), C64::new(0.0, 0.0))];
    let shift = |a: C64, x: C64| (C64::from_polar(1.0, (a * x.conj()).im), a + x);
    for f in factors {
        let (a, delta) = (f.alpha.amplitude(), f.beta.amplitude() - f.alpha.amplitude());
        let (c, s) = (f.lambda.cos(), f.lambda.sin());
        let mut next = Vec::with_capacity(2 * branches.len());
        for &(w, x) in &branches {
            // U(λ, δ)|x⟩ = cos λ |x⟩ + i sin λ D(δ)|-x⟩, then D(α)
            let (ph1, x1) = shift(a, x);
            next.push((w * c * ph1, x1));
            let (ph2, y) = shift(delta, -x);
            let (ph3, x2) = shift(a, y);
            peak = peak.max(y.norm()).max(x1.norm()).max(x2.norm()).max(delta.norm()).max(a.norm());
            next.push((w * C64::new(0.0, s) * ph2 * ph3, x2));
        }
        branches = next;
    }
    (branches, peak)
}

/// `Σ_b w_b |x_b/√n⟩^{⊗n}` for the branches of [`protocol_branches`].
pub fn protocol_target(factors: &[VFactor], n_modes: usize, cutoff: usize) -> Result<FockVector> {
    let branches = protocol_branches(factors);
    let scale = 1.0 / (n_modes as f64).sqrt();
    let weights: Vec<C64> = branches.iter().map(|b| b.0).collect();
    let labels = branches.iter().map(|b| CoherentLabel::new(b.1 * scale)).collect::<Result<Vec<_>>>()?;
    FockVector::balanced(&weights, &labels, n_modes, cutoff)
}

/// Runs the `V` product on mode 0 of an `n_modes`-mode vacuum and then
/// `B_{k,k+1}(arccos(1/√(n-k)))` for `k = 0, …, n-2`.
///
/// The single-mode stage runs at a cutoff large enough for every
/// intermediate label and is then cut to `cutoff`; the weight lost there is
/// the reported leak.
pub fn generate_protocol(factors: &[VFactor], n_modes: usize, cutoff: usize) -> Result<ProtocolRun> {
    if n_modes < 2 || !n_modes.is_power_of_two() {
        return Err(EcsError::InvalidState(format!("mode count {n_modes} is not a power of two ≥ 2")));
    }
    let (branches, peak) = branches_with_peak(factors);
    let largest = branches.iter().fold(0.0f64, |m, b| m.max(b.1.norm()));
    check_cutoff(largest, cutoff)?;
    let prep_cutoff = cutoff.max(default_cutoff(peak));

    let mut single = FockVector::vacuum(prep_cutoff, 1)?;
    for f in factors {
        single = v_op(f.alpha, f.beta, f.lambda, prep_cutoff)?.apply(&single)?;
    }
    let single = FockVector::new(cutoff, 1, single.amps()[..=cutoff].to_vec())?;
    let leak = single.leak();
    if leak > MAX_LEAK {
        return Err(EcsError::CutoffTooSmall { cutoff, amplitude: largest, leak });
    }
    let mut state = single;
    for _ in 1..n_modes {
        state = state.tensor(&FockVector::vacuum(cutoff, 1)?)?;
    }
    for k in 0..n_modes - 1 {
        let theta = (1.0 / ((n_modes - k) as f64).sqrt()).acos();
        state = beam_splitter(theta, (k, k + 1), n_modes, cutoff)?.apply(&state)?;
    }
    let target = protocol_target(factors, n_modes, cutoff)?;
    let fidelity = fidelity(&state, &target)?;
    Ok(ProtocolRun { state, target, fidelity, leak, prep_cutoff })
}

#[cfg(test)]
mod tests {
    use super::super::fock_embed;
    use super::*;

    fn lab(re: f64, im: f64) -> CoherentLabel {
        CoherentLabel::new(C64::new(re, im)).unwrap()
    }

    #[test]
    fn branch_algebra_matches_operators() {
        let c = 50;
        let factors = [
            VFactor { lambda: 0.7, alpha: lab(0.5, -0.2), beta: lab(-0.6, 0.4) },
            VFactor { lambda: 1.2, alpha: lab(-0.3, 0.1), beta: lab(0.2, 0.7) },
        ];
        let mut v = FockVector::vacuum(c, 1).unwrap();
        for f in &factors {
            v = v_op(f.alpha, f.beta, f.lambda, c).unwrap().apply(&v).unwrap();
        }
        let mut expect = vec![C64::new(0.0, 0.0); c + 1];
        for (w, x) in protocol_branches(&factors) {
            for (e, a) in expect.iter_mut().zip(fock_embed(lab(x.re, x.im), c).unwrap().amps()) {
                *e += w * a;
            }
        }
        let diff = v.amps().iter().zip(&expect).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn single_branch_two_modes() {
        let a = lab(1.1, -0.4);
        let run = generate_protocol(&[VFactor { lambda: std::f64::consts::FRAC_PI_2, alpha: a, beta: a }], 2, 30).unwrap();
        let h = lab(1.1 / 2f64.sqrt(), -0.4 / 2f64.sqrt());
        let product = fock_embed(h, 30).unwrap().tensor(&fock_embed(h, 30).unwrap()).unwrap();
        assert!(fidelity(&run.state, &product).unwrap() >= 1.0 - 1e-8);
        assert!(run.fidelity >= 1.0 - 1e-8);
    }

    #[test]
    fn two_branches_two_modes() {
        let f = VFactor { lambda: 0.6, alpha: lab(1.0, 0.5), beta: lab(-0.7, 0.2) };
        let run = generate_protocol(&[f], 2, 30).unwrap();
        assert!(run.fidelity >= 1.0 - 1e-6, "{}", run.fidelity);
    }

    #[test]
    fn rejects_bad_mode_counts_and_cutoffs() {
        let f = VFactor { lambda: 0.6, alpha: lab(2.0, 0.0), beta: lab(-0.7, 0.2) };
        assert!(matches!(generate_protocol(&[f], 3, 30), Err(EcsError::InvalidState(_))));
        assert!(matches!(generate_protocol(&[f], 2, 5), Err(EcsError::CutoffTooSmall { .. })));
    }
}

//! Truncated number-basis simulator.
//!
//! Each mode keeps photon numbers `0..=cutoff`. Multimode amplitudes are
//! stored row-major over the mode indices with mode 0 slowest, so the flat
//! index of `|n_0, …, n_{k-1}⟩` is `Σ n_i (cutoff+1)^{k-1-i}`.

mod ops;
mod protocol;

pub use ops::{beam_splitter, cat_unitary, displacement, parity, v_op, FockOperator};
pub use protocol::{generate_protocol, protocol_branches, protocol_target, ProtocolRun, VFactor};

use crate::coherent::CoherentLabel;
use crate::error::{EcsError, Result};
use crate::C64;

/// Largest leak accepted before a cutoff counts as too small.
pub const MAX_LEAK: f64 = 1e-6;

/// `ceil(|α|² + 10|α| + 20)`, enough for a coherent-tail leak below 1e-10
/// when `|α| ≤ 3`.
pub fn default_cutoff(amplitude: f64) -> usize {
    (amplitude * amplitude + 10.0 * amplitude + 20.0).ceil() as usize
}

/// Poisson weight `Σ_{n > cutoff} e^{-x} x^n / n!` with `x = |α|²`, summed
/// directly so it stays accurate far below machine epsilon.
pub fn coherent_leak(amplitude: f64, cutoff: usize) -> f64 {
    let x = amplitude * amplitude;
    if x == 0.0 {
        return 0.0;
    }
    // log of the first omitted term
    let n0 = cutoff + 1;
    let mut log_term = -x + n0 as f64 * x.ln() - ln_factorial(n0);
    let mut sum = 0.0;
    let mut n = n0;
    loop {
        let term = log_term.exp();
        sum += term;
        if n as f64 > x && term < sum * 1e-17 {
            break;
        }
        n += 1;
        log_term += x.ln() - (n as f64).ln();
        if n > n0 + 100_000 {
            break;
        }
    }
    sum.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub(crate) fn check_cutoff(amplitude: f64, cutoff: usize) -> Result<f64> {
    let leak = coherent_leak(amplitude, cutoff);
    if leak > MAX_LEAK {
        return Err(EcsError::CutoffTooSmall { cutoff, amplitude, leak });
    }
    Ok(leak)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    modes: usize,
    amps: Vec<C64>,
    leak: f64,
}

impl FockVector {
    /// Takes ownership of raw amplitudes; the leak is `1 - ‖amps‖²`.
    pub fn new(cutoff: usize, modes: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = full_dim(cutoff, modes)?;
        if amps.len() != dim {
            return Err(EcsError::ShapeMismatch(format!("{} amplitudes for dimension {dim}", amps.len())));
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr > 1.0 + 1e-9 {
            return Err(EcsError::InvalidState(format!("norm² {norm_sqr} exceeds 1")));
        }
        Ok(FockVector { cutoff, modes, amps, leak: (1.0 - norm_sqr).max(0.0) })
    }

    pub fn vacuum(cutoff: usize, modes: usize) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); full_dim(cutoff, modes)?];
        amps[0] = C64::new(1.0, 0.0);
        Ok(FockVector { cutoff, modes, amps, leak: 0.0 })
    }

    /// `|n⟩` in a single mode.
    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(EcsError::ShapeMismatch(format!("|{n}⟩ beyond cutoff {cutoff}")));
        }
        let mut v = Self::vacuum(cutoff, 1)?;
        v.amps.swap(0, n);
        Ok(v)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Probability weight missing from the truncated expansion.
    pub fn leak(&self) -> f64 {
        self.leak
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.same_shape(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product, `self` on the slower modes.
    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        if self.cutoff != other.cutoff {
            return Err(EcsError::ShapeMismatch(format!("cutoffs {} and {}", self.cutoff, other.cutoff)));
        }
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        let leak = 1.0 - (1.0 - self.leak) * (1.0 - other.leak);
        Ok(FockVector { cutoff: self.cutoff, modes: self.modes + other.modes, amps, leak })
    }

    /// `Σ_b w_b |x_b⟩^{⊗modes}`, normalized by the analytic overlaps.
    pub fn balanced(weights: &[C64], labels: &[CoherentLabel], modes: usize, cutoff: usize) -> Result<FockVector> {
        if weights.len() != labels.len() || weights.is_empty() {
            return Err(EcsError::ShapeMismatch(format!("{} weights for {} labels", weights.len(), labels.len())));
        }
        let mut norm = C64::new(0.0, 0.0);
        for (wi, li) in weights.iter().zip(labels) {
            for (wj, lj) in weights.iter().zip(labels) {
                norm += wi.conj() * wj * crate::coherent::overlap(*li, *lj).powu(modes as u32);
            }
        }
        if !(norm.re > 1e-300) {
            return Err(EcsError::NonPositiveNorm(norm.re));
        }
        let scale = 1.0 / norm.re.sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); full_dim(cutoff, modes)?];
        for (w, l) in weights.iter().zip(labels) {
            let single = fock_embed_unchecked(*l, cutoff);
            let mut branch = vec![w * scale];
            for _ in 0..modes {
                branch = branch.iter().flat_map(|a| single.amps.iter().map(move |b| a * b)).collect();
            }
            for (acc, b) in amps.iter_mut().zip(branch) {
                *acc += b;
            }
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        Ok(FockVector { cutoff, modes, amps, leak: (1.0 - norm_sqr).max(0.0) })
    }

    fn same_shape(&self, other: &FockVector) -> Result<()> {
        if self.cutoff != other.cutoff || self.modes != other.modes {
            return Err(EcsError::ShapeMismatch(format!(
                "cutoff/modes {}/{} vs {}/{}",
                self.cutoff, self.modes, other.cutoff, other.modes
            )));
        }
        Ok(())
    }
}

pub(crate) fn full_dim(cutoff: usize, modes: usize) -> Result<usize> {
    (cutoff + 1)
        .checked_pow(modes as u32)
        .ok_or_else(|| EcsError::ShapeMismatch(format!("(cutoff+1)^{modes} overflows")))
}

fn fock_embed_unchecked(a: CoherentLabel, cutoff: usize) -> FockVector {
    let alpha = a.amplitude();
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(amp);
    for n in 1..=cutoff {
        amp = amp * alpha / (n as f64).sqrt();
        amps.push(amp);
    }
    FockVector { cutoff, modes: 1, amps, leak: coherent_leak(alpha.norm(), cutoff) }
}

/// `e^{-|α|²/2} Σ_{n ≤ cutoff} αⁿ/√(n!) |n⟩`.
pub fn fock_embed(a: CoherentLabel, cutoff: usize) -> Result<FockVector> {
    check_cutoff(a.norm(), cutoff)?;
    Ok(fock_embed_unchecked(a, cutoff))
}

/// `|⟨u|v⟩|² / (‖u‖² ‖v‖²)`.
pub fn fidelity(u: &FockVector, v: &FockVector) -> Result<f64> {
    let ip = u.inner(v)?;
    let denom = u.norm_sqr() * v.norm_sqr();
    if !(denom > 0.0) {
        return Err(EcsError::InvalidState("fidelity of a zero vector".into()));
    }
    Ok((ip.norm_sqr() / denom).min(1.0))
}

use super::mixed::{qudit_mixed_concurrence, wootters_concurrence};
use super::pure::concurrence_pure;
use super::MonogamyReport;
use crate::error::{EcsError, Result};
use crate::state::{bipartite_tensor, reduce, tripartite_tensor, BalancedEcs, DensityMatrix};

fn pair_concurrence(rho: &DensityMatrix) -> Result<f64> {
    match rho.dims() {
        [2, 2] => wootters_concurrence(rho),
        &[d1, d2] => Ok(qudit_mixed_concurrence(rho, (d1, d2))?.value),
        other => Err(EcsError::InvalidDensity(format!("expected two parts, got {other:?}"))),
    }
}

/// Monogamy residual for the split `A = m1`, `B = m2`, `D = N - m1 - m2`.
///
/// Two-qubit pairs use the Wootters formula, larger pairs the concurrence
/// vector.
pub fn monogamy(s: &BalancedEcs, m1: usize, m2: usize) -> Result<MonogamyReport> {
    let t = tripartite_tensor(s, m1, m2)?;
    let c_a_bd = concurrence_pure(&t.group(1))?.value;
    let c_ab = pair_concurrence(&reduce(&t, &[0, 1])?)?;
    let c_ad = pair_concurrence(&reduce(&t, &[0, 2])?)?;
    let (c2_a_bd, c2_ab, c2_ad) = (c_a_bd * c_a_bd, c_ab * c_ab, c_ad * c_ad);
    Ok(MonogamyReport { c2_a_bd, c2_ab, c2_ad, tau: c2_a_bd - c2_ab - c2_ad })
}

/// Bisection for the root of `tau` on `[lo, hi]`, to within `tol` in the
/// argument.
pub fn monogamy_threshold<F>(tau: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi && tol > 0.0) {
        return Err(EcsError::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (tau(a)?, tau(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(EcsError::NoSignChange { lo, hi, tau_lo: fa, tau_hi: fb });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = tau(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityVerdict {
    pub concurrence: f64,
    /// Concurrence below the tolerance.
    pub computed: bool,
    /// At most one nonzero weight, which for distinct labels is the
    /// separability condition.
    pub expected: bool,
    /// All labels pairwise distinct, so the criterion applies.
    pub theorem_applies: bool,
}

impl SeparabilityVerdict {
    pub fn agrees(&self) -> bool {
        !self.theorem_applies || self.computed == self.expected
    }
}

/// Compares the numerical bipartite concurrence across `(m | N - m)` with
/// the weight criterion.
pub fn separability_check(s: &BalancedEcs, m: usize, tol: f64) -> Result<SeparabilityVerdict> {
    let concurrence = concurrence_pure(&bipartite_tensor(s, m)?)?.value;
    let nonzero = s.weights().iter().filter(|w| w.norm() != 0.0).count();
    Ok(SeparabilityVerdict {
        concurrence,
        computed: concurrence < tol,
        expected: nonzero <= 1,
        theorem_applies: s.gram().labels_distinct(),
    })
}

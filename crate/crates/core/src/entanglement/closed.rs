//! Closed-form concurrences for two- and three-branch states.

use crate::coherent::CoherentLabel;
use crate::error::{EcsError, Result};
use crate::C64;

/// Two-branch state `(|α…α⟩ + μ|β…β⟩)/√M` split `(m | N - m)`:
///
/// `C = 2|μ| √|(1-|p|^{2m})(1-|p|^{2(N-m)})| / (1 + |μ|² + 2R|μ|cos(φ + A))`
///
/// with `μ = |μ|e^{iφ}`, `A = N|α||β|sin(θ₂-θ₁)` and
/// `R = exp(-N(|α|² + |β|² - 2|α||β|cos(θ₂-θ₁))/2)`.
pub fn concurrence_qubit_closed(mu: C64, alpha: CoherentLabel, beta: CoherentLabel, n: usize, m: usize) -> Result<f64> {
    check_split(n, m)?;
    let (ra, t1) = alpha.amplitude().to_polar();
    let (rb, t2) = beta.amplitude().to_polar();
    let nf = n as f64;
    let a = nf * ra * rb * (t2 - t1).sin();
    let exponent = ra * ra + rb * rb - 2.0 * ra * rb * (t2 - t1).cos();
    let r = (-0.5 * nf * exponent).exp();
    let p2m = (-(m as f64) * exponent).exp();
    let p2nm = (-((n - m) as f64) * exponent).exp();
    Ok(qubit_formula(mu, r, a, p2m, p2nm))
}

/// Same formula driven by the overlap `p = ⟨α|β⟩` directly, so that the
/// orthogonal limit `p = 0` is reachable.
pub fn concurrence_qubit_from_overlap(mu: C64, p: C64, n: usize, m: usize) -> Result<f64> {
    check_split(n, m)?;
    let (rp, arg) = p.to_polar();
    if rp > 1.0 {
        return Err(EcsError::InvalidGram(format!("|p| = {rp} exceeds 1")));
    }
    let r = rp.powi(n as i32);
    let a = n as f64 * arg;
    Ok(qubit_formula(mu, r, a, rp.powi(2 * m as i32), rp.powi(2 * (n - m) as i32)))
}

fn qubit_formula(mu: C64, r: f64, a: f64, p2m: f64, p2nm: f64) -> f64 {
    let (rmu, phi) = mu.to_polar();
    let num = 2.0 * rmu * ((1.0 - p2m) * (1.0 - p2nm)).abs().sqrt();
    num / (1.0 + rmu * rmu + 2.0 * r * rmu * (phi + a).cos())
}

fn check_split(n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(EcsError::InvalidPartition(format!("need 1 <= m <= N-1, got m={m}, N={n}")));
    }
    Ok(())
}

/// Open interval `(λ₋, λ₊)` that `p3^k` must lie in for three real overlaps
/// to describe linearly independent `k`-mode blocks.
pub fn overlap_interval(p1: f64, p2: f64, k: usize) -> (f64, f64) {
    let (a, b) = (p1.powi(k as i32), p2.powi(k as i32));
    let centre = a * b;
    let radius = (1.0 - a * a - b * b + centre * centre).max(0.0).sqrt();
    (centre - radius, centre + radius)
}

/// Frame entries of a `k`-mode block for real overlaps `p1 = ⟨α|β⟩`,
/// `p2 = ⟨γ|β⟩`, `p3 = ⟨γ|α⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritBlock {
    pub n1: f64,
    pub n2: f64,
    pub x: f64,
    pub y: f64,
}

impl QutritBlock {
    pub fn new(p1: f64, p2: f64, p3: f64, k: usize) -> Result<Self> {
        let ki = k as i32;
        let (a, b, c) = (p1.powi(ki), p2.powi(ki), p3.powi(ki));
        let n1_sq = 1.0 - a * a;
        if !(n1_sq > 0.0) {
            return Err(EcsError::ConstraintViolation(format!("p1^{k} = {a} leaves no second direction")));
        }
        let (lo, hi) = overlap_interval(p1, p2, k);
        if !(c > lo && c < hi) {
            return Err(EcsError::ConstraintViolation(format!(
                "p3^{k} = {c} outside ({lo}, {hi}) for p1 = {p1}, p2 = {p2}"
            )));
        }
        let x = (a * c - b) / n1_sq;
        let y = (a * b - c) / n1_sq;
        let n2_sq = 1.0 - c * c - x * x * n1_sq;
        Ok(QutritBlock { n1: n1_sq.sqrt(), n2: n2_sq.max(0.0).sqrt(), x, y })
    }
}

/// Three-branch bipartite concurrence from the nine squared minors of the
/// two-qutrit coefficient matrix, for real parameters.
pub fn concurrence_qutrit_closed(mu1: f64, mu2: f64, p1: f64, p2: f64, p3: f64, n: usize, m: usize) -> Result<f64> {
    check_split(n, m)?;
    let b = QutritBlock::new(p1, p2, p3, m)?;
    let bp = QutritBlock::new(p1, p2, p3, n - m)?;
    let (mi, nmi, ni) = (m as i32, (n - m) as i32, n as i32);
    let (n1, n1p, n2, n2p) = (b.n1, bp.n1, b.n2, bp.n2);
    let (x, xp, y, yp) = (b.x, bp.x, b.y, bp.y);
    let p1n = p1.powi(ni);
    let p3n = p3.powi(ni);
    let (p1m, p1nm) = (p1.powi(mi), p1.powi(nmi));
    let (p3m, p3nm) = (p3.powi(mi), p3.powi(nmi));
    let mm = mu1 * mu2;

    let terms = [
        n1 * n1p * (mu1 + mu2 * x * xp) + mm * n1 * n1p * (x * xp * p1n + p3n + xp * p3m * p1nm + x * p3nm * p1m),
        n1 * n2p * (mu2 * x + mm * x * p1n + mm * p3m * p1nm),
        n1p * n2 * (mu2 * xp + mm * xp * p1n + mm * p3nm * p1m),
        mu2 * n2 * n2p * (1.0 + mu1 * p1n),
        mm * n1 * n1p * n2p * y,
        mm * n1p * n2 * n2p * p1m,
        mm * n1 * n1p * n2 * yp,
        mm * n1 * n2 * n2p * p1nm,
        mm * n1 * n1p * n2 * n2p,
    ];
    let norm = 1.0 + mu1 * mu1 + mu2 * mu2 + 2.0 * mu1 * p1n + 2.0 * mu2 * p3n + 2.0 * mm * p2.powi(ni);
    Ok(2.0 * terms.iter().map(|t| t * t).sum::<f64>().sqrt() / norm)
}

/// The `p2 = p3 = 0` special case (third label orthogonal to both others).
pub fn concurrence_qutrit_orthogonal_gamma(mu1: f64, mu2: f64, p1: f64, n: usize, m: usize) -> Result<f64> {
    check_split(n, m)?;
    let (mi, nmi, ni) = (m as i32, (n - m) as i32, n as i32);
    let n1 = (1.0 - p1.powi(2 * mi)).sqrt();
    let n1p = (1.0 - p1.powi(2 * nmi)).sqrt();
    let p1n = p1.powi(ni);
    let mm = mu1 * mu2;
    let terms = [
        mu1 * n1 * n1p,
        mu2 * (1.0 + mu1 * p1n),
        mm * n1p * p1.powi(mi),
        mm * n1 * p1.powi(nmi),
        mm * n1 * n1p,
    ];
    let norm = 1.0 + mu1 * mu1 + mu2 * mu2 + 2.0 * mu1 * p1n;
    Ok(2.0 * terms.iter().map(|t| t * t).sum::<f64>().sqrt() / norm)
}

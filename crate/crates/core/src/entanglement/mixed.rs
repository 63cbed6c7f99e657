//! Mixed-state concurrences.
//!
//! For every pair of antisymmetric generators `L_a = |i⟩⟨j| - |j⟩⟨i|`
//! (`i < j`) on each side, `S = L_a ⊗ L_b` and the spectrum of
//! `√ρ S ρ* S √ρ` gives `λ₁ ≥ λ₂ ≥ …` (square roots of its eigenvalues).
//! The component is `max{0, λ₁ - Σ_{i≥2} λ_i}`. On two qubits the only pair
//! is `S = -σ_y ⊗ σ_y`, which is Wootters' spin flip.
//!
//! The eigenvalues of `ρρ̃` are read off the Hermitian matrix `√ρ ρ̃ √ρ`,
//! which is similar to it; one square root is needed instead of three.

use super::pure::max_concurrence;
use super::ConcurrenceReport;
use crate::error::{EcsError, Result};
use crate::linalg::{hermitian_eigenvalues, psd_sqrt, CMatrix};
use crate::state::DensityMatrix;
use crate::C64;

const EIG_CLAMP: f64 = 1e-10;
const NOISE_FLOOR: f64 = 1e-13;

/// Antisymmetric generators of rotations on `d` letters, ordered by `(i, j)`.
pub fn antisymmetric_generators(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            let mut g = CMatrix::zeros(d, d);
            g[(i, j)] = C64::new(1.0, 0.0);
            g[(j, i)] = C64::new(-1.0, 0.0);
            out.push(g);
        }
    }
    out
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Decreasing `λ_i` for one flip operator.
fn flip_spectrum(sqrt_rho: &CMatrix, rho_conj: &CMatrix, flip: &CMatrix) -> Vec<f64> {
    let t = sqrt_rho * flip * rho_conj * flip.transpose() * sqrt_rho;
    let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
    let values = hermitian_eigenvalues(&t);
    // Eigenvalues at roundoff level would otherwise survive as ~1e-8 after the root.
    let floor = NOISE_FLOOR * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut lambdas: Vec<f64> =
        values.into_iter().map(|v| if v > floor { v.sqrt() } else { 0.0 }).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas
}

fn component(lambdas: &[f64]) -> f64 {
    (lambdas[0] - lambdas[1..].iter().sum::<f64>()).max(0.0)
}

fn sqrt_of(rho: &DensityMatrix) -> Result<CMatrix> {
    psd_sqrt(rho.entries(), EIG_CLAMP).ok_or_else(|| EcsError::InvalidDensity("negative eigenvalue".into()))
}

/// Wootters concurrence `max{0, λ₁ - λ₂ - λ₃ - λ₄}` of a two-qubit state.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    rho.validate()?;
    if rho.dim() != 4 || (rho.dims().len() == 2 && rho.dims() != [2, 2]) {
        return Err(EcsError::InvalidDensity(format!("need a 2x2 split, got dims {:?}", rho.dims())));
    }
    Ok(component(&wootters_spectrum(rho)?))
}

/// The four decreasing `λ_i` of the Wootters construction.
pub fn wootters_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let sy = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    );
    let flip = kron(&sy, &sy);
    let sqrt_rho = sqrt_of(rho)?;
    Ok(flip_spectrum(&sqrt_rho, &rho.entries().conjugate(), &flip))
}

/// Concurrence vector of a `d1 × d2` mixed state.
pub fn qudit_mixed_concurrence(rho: &DensityMatrix, dims: (usize, usize)) -> Result<ConcurrenceReport> {
    rho.validate()?;
    let (d1, d2) = dims;
    if d1 * d2 != rho.dim() {
        return Err(EcsError::InvalidDensity(format!("{d1} x {d2} does not match dimension {}", rho.dim())));
    }
    let sqrt_rho = sqrt_of(rho)?;
    let rho_conj = rho.entries().conjugate();
    let (ga, gb) = (antisymmetric_generators(d1), antisymmetric_generators(d2));
    let mut components = Vec::with_capacity(ga.len() * gb.len());
    for a in &ga {
        for b in &gb {
            components.push(component(&flip_spectrum(&sqrt_rho, &rho_conj, &kron(a, b))));
        }
    }
    let value = components.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(ConcurrenceReport { value, components, max_possible: max_concurrence(d1, d2) })
}

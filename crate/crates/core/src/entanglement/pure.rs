use super::ConcurrenceReport;
use crate::error::{EcsError, Result};
use crate::state::CoeffTensor;

pub fn max_concurrence(d1: usize, d2: usize) -> f64 {
    let d = d1.min(d2) as f64;
    (2.0 * (d - 1.0) / d).sqrt()
}

/// `C = 2 √(Σ_{i<j} Σ_{k<l} |a_ik a_jl - a_il a_jk|²)` for a bipartite pure
/// state. Components are `2|minor|`, ordered by row pair then column pair.
pub fn concurrence_pure(t: &CoeffTensor) -> Result<ConcurrenceReport> {
    if t.parts() != 2 {
        return Err(EcsError::ShapeMismatch(format!("pure concurrence needs 2 parts, got {}", t.parts())));
    }
    let a = t.as_matrix(1);
    let (d1, d2) = (a.nrows(), a.ncols());
    let mut components = Vec::with_capacity(d1 * (d1.saturating_sub(1)) / 2 * d2 * (d2.saturating_sub(1)) / 2);
    for i in 0..d1 {
        for j in i + 1..d1 {
            for k in 0..d2 {
                for l in k + 1..d2 {
                    let minor = a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)];
                    components.push(2.0 * minor.norm());
                }
            }
        }
    }
    let value = components.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(ConcurrenceReport { value, components, max_possible: max_concurrence(d1, d2) })
}

//! Concurrence of pure and mixed qudit states built from balanced
//! entangled coherent states, the monogamy residual and the separability
//! criterion.

mod closed;
mod mixed;
mod monogamy;
mod pure;

pub use closed::{
    concurrence_qubit_closed, concurrence_qubit_from_overlap, concurrence_qutrit_closed,
    concurrence_qutrit_orthogonal_gamma, overlap_interval, QutritBlock,
};
pub use mixed::{antisymmetric_generators, qudit_mixed_concurrence, wootters_concurrence, wootters_spectrum};
pub use monogamy::{monogamy, monogamy_threshold, separability_check, SeparabilityVerdict};
pub use pure::{concurrence_pure, max_concurrence};

/// Concurrence value with its vector components.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceReport {
    pub value: f64,
    /// `|C_ab|` per generator pair, row-major over `(a, b)`.
    pub components: Vec<f64>,
    /// `√(2(d-1)/d)` with `d` the smaller part dimension.
    pub max_possible: f64,
}

/// Squared concurrences entering `τ = C²_{A(BD)} - C²_{AB} - C²_{AD}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonogamyReport {
    pub c2_a_bd: f64,
    pub c2_ab: f64,
    pub c2_ad: f64,
    pub tau: f64,
}

//! Balanced multimode entangled coherent states.
//!
//! States of the form `(1/√M) Σ_i μ_i |α_i⟩^{⊗N}` are rewritten as qudit
//! coefficient tensors by orthonormalizing the nonorthogonal block states,
//! after which pure- and mixed-state concurrences, monogamy residuals and a
//! separability audit are available. [`fock`] provides a truncated
//! number-basis simulator for the parity/displacement/beam-splitter
//! generation protocol.

pub mod coherent;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod state;

#[cfg(test)]
mod properties;

pub use coherent::{
    block_gram, build_frame, build_frame_reduced, gram, overlap, BlockFrame, CoherentLabel, GramMatrix,
    DEFAULT_FRAME_TOL,
};
pub use error::{EcsError, Result};
pub use num_complex::Complex64 as C64;
pub use state::{
    bipartite_tensor, coeff_tensor, norm_constant, reduce, tripartite_tensor, BalancedEcs, CoeffTensor,
    DensityMatrix, FramePolicy, Partition,
};

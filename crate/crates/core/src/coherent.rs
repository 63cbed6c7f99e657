//! Overlap algebra of Glauber coherent states and orthonormal frames for
//! blocks of identical modes.
//!
//! A block of `m` modes all carrying the label `α_i` is the product state
//! `|α_i⟩^{⊗m}`, so the block Gram matrix is the elementwise `m`-th power of
//! the single-mode Gram matrix. The frame is the unpivoted Cholesky factor of
//! that matrix taken in label order: the first block state is the first basis
//! vector, the second is orthogonalized against it, and so on.

use crate::error::{EcsError, Result};
use crate::linalg::{hermitian_defect, hermitian_eigenvalues, CMatrix};
use num_complex::Complex64 as C64;

/// Default threshold on the squared Cholesky pivot.
pub const DEFAULT_FRAME_TOL: f64 = 1e-10;

const GRAM_TOL: f64 = 1e-12;

/// Complex amplitude `α` of a Glauber state `|α⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel(C64);

impl CoherentLabel {
    pub fn new(amplitude: C64) -> Result<Self> {
        if amplitude.re.is_finite() && amplitude.im.is_finite() {
            Ok(CoherentLabel(amplitude))
        } else {
            Err(EcsError::NonFiniteLabel(amplitude.to_string()))
        }
    }

    /// # Panics
    /// On non-finite input; intended for literals.
    pub fn real(x: f64) -> Self {
        Self::new(C64::new(x, 0.0)).expect("finite amplitude")
    }

    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(C64::from_polar(r, theta))
    }

    pub fn amplitude(&self) -> C64 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// A real label whose overlap with the vacuum label `0` equals `p`,
    /// for `0 < p ≤ 1`.
    pub fn with_vacuum_overlap(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(EcsError::InvalidGram(format!(
                "overlap {p} not reachable with a finite label"
            )));
        }
        Self::new(C64::new((-2.0 * p.ln()).sqrt(), 0.0))
    }
}

impl From<CoherentLabel> for C64 {
    fn from(l: CoherentLabel) -> C64 {
        l.0
    }
}

/// `⟨a|b⟩ = exp(-(|a|² + |b|² - 2 a* b) / 2)`.
pub fn overlap(a: CoherentLabel, b: CoherentLabel) -> C64 {
    let (a, b) = (a.0, b.0);
    (-0.5 * (C64::from(a.norm_sqr() + b.norm_sqr()) - 2.0 * a.conj() * b)).exp()
}

/// Matrix of pairwise overlaps `entries[i][j] = ⟨α_i|α_j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: CMatrix,
    labels: Option<Vec<CoherentLabel>>,
}

impl GramMatrix {
    /// Wraps explicit overlaps. This is how orthogonal limits (`p = 0`,
    /// reachable only as a label goes to infinity) enter the library.
    pub fn from_overlaps(entries: CMatrix) -> Result<Self> {
        let g = GramMatrix { entries, labels: None };
        g.validate()?;
        Ok(g)
    }

    /// Real symmetric overlaps given row-major.
    pub fn from_real(d: usize, values: &[f64]) -> Result<Self> {
        if values.len() != d * d {
            return Err(EcsError::InvalidGram(format!("expected {} entries, got {}", d * d, values.len())));
        }
        Self::from_overlaps(CMatrix::from_row_iterator(d, d, values.iter().map(|&v| C64::new(v, 0.0))))
    }

    /// Two labels with real overlap `p`.
    pub fn qubit(p: f64) -> Result<Self> {
        Self::from_real(2, &[1.0, p, p, 1.0])
    }

    /// Three labels `α, β, γ` with real overlaps `p1 = ⟨α|β⟩`,
    /// `p2 = ⟨γ|β⟩`, `p3 = ⟨γ|α⟩`.
    pub fn qutrit(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        Self::from_real(3, &[1.0, p1, p3, p1, 1.0, p2, p3, p2, 1.0])
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.entries;
        let d = e.nrows();
        if d == 0 || d != e.ncols() {
            return Err(EcsError::InvalidGram(format!("shape {}x{}", e.nrows(), e.ncols())));
        }
        if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(EcsError::InvalidGram("non-finite entry".into()));
        }
        for i in 0..d {
            if (e[(i, i)] - C64::new(1.0, 0.0)).norm() > GRAM_TOL {
                return Err(EcsError::InvalidGram(format!("diagonal entry {i} is {}", e[(i, i)])));
            }
        }
        if hermitian_defect(e) > GRAM_TOL {
            return Err(EcsError::InvalidGram("not Hermitian".into()));
        }
        let min = hermitian_eigenvalues(e)[0];
        if min < -GRAM_TOL {
            return Err(EcsError::InvalidGram(format!("not positive semidefinite (eigenvalue {min:e})")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn labels(&self) -> Option<&[CoherentLabel]> {
        self.labels.as_deref()
    }

    /// True when no two distinct rows describe the same state (|overlap| < 1).
    pub fn labels_distinct(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i + 1..d).all(|j| self.entries[(i, j)].norm() < 1.0 - 1e-12))
    }
}

pub fn gram(labels: &[CoherentLabel]) -> Result<GramMatrix> {
    if labels.is_empty() {
        return Err(EcsError::EmptyLabels);
    }
    let d = labels.len();
    let entries = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(1.0, 0.0) } else { overlap(labels[i], labels[j]) });
    Ok(GramMatrix { entries, labels: Some(labels.to_vec()) })
}

/// Gram matrix of the `m`-fold product states: elementwise `m`-th power.
pub fn block_gram(g: &GramMatrix, m: usize) -> Result<GramMatrix> {
    if m == 0 {
        return Err(EcsError::InvalidPartition("block size must be positive".into()));
    }
    let entries = g.entries.map(|z| z.powu(m as u32));
    Ok(GramMatrix { entries, labels: g.labels.clone() })
}

/// Orthonormal-basis coefficients of a set of block states.
///
/// `coeffs` is lower triangular (after dropping columns in the reduced-rank
/// case) with `coeffs · coeffs† = G` where `G[i][j] = ⟨v_i|v_j⟩`. The ket of
/// block state `i` in the frame basis is the complex conjugate of row `i`,
/// see [`BlockFrame::state`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFrame {
    block_size: usize,
    coeffs: CMatrix,
    rank: usize,
}

impl BlockFrame {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of block states (rows).
    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.nrows() == 0
    }

    /// Amplitudes `⟨e_k|v_i⟩` of block state `i` in the frame basis.
    ///
    /// For two labels with overlap `p` this is `(p^m, √(1-|p|^{2m}))`.
    pub fn state(&self, i: usize) -> Vec<C64> {
        self.coeffs.row(i).iter().map(|z| z.conj()).collect()
    }

    /// `coeffs · coeffs†`, which reproduces the block Gram matrix.
    pub fn reconstruct(&self) -> CMatrix {
        &self.coeffs * self.coeffs.adjoint()
    }
}

/// Unpivoted Cholesky frame of `block_gram(g, m)`.
///
/// Fails with [`EcsError::DegenerateFrame`] on the first row whose squared
/// pivot is below `tol`.
pub fn build_frame(g: &GramMatrix, m: usize, tol: f64) -> Result<BlockFrame> {
    factor(g, m, tol, false)
}

/// Like [`build_frame`] but degenerate rows are absorbed into the span of the
/// earlier ones and the frame is returned at reduced rank.
pub fn build_frame_reduced(g: &GramMatrix, m: usize, tol: f64) -> Result<BlockFrame> {
    factor(g, m, tol, true)
}

fn factor(g: &GramMatrix, m: usize, tol: f64, allow_reduced: bool) -> Result<BlockFrame> {
    let bg = block_gram(g, m)?;
    let a = &bg.entries;
    let d = a.nrows();
    let mut l = CMatrix::zeros(d, d);
    let mut kept = Vec::with_capacity(d);
    for j in 0..d {
        let mut s = a[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)].conj();
        }
        let pivot_sq = s.re;
        if pivot_sq <= tol || !pivot_sq.is_finite() {
            if allow_reduced {
                continue;
            }
            return Err(EcsError::DegenerateFrame { row: j, pivot_sq, tol });
        }
        let pivot = pivot_sq.sqrt();
        l[(j, j)] = C64::new(pivot, 0.0);
        for i in j + 1..d {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
        kept.push(j);
    }
    let rank = kept.len();
    let coeffs = if rank == d {
        l
    } else {
        CMatrix::from_fn(d, rank, |r, c| l[(r, kept[c])])
    };
    Ok(BlockFrame { block_size: m, coeffs, rank })
}

//! Small dense helpers on top of nalgebra shared by the frame, density-matrix
//! and Fock-space code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix. Only the
/// lower triangle is read.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues above `-clamp` are clamped to zero first.
pub fn psd_sqrt(m: &CMatrix, clamp: f64) -> Option<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    if values.iter().any(|&v| v < -clamp) {
        return None;
    }
    let roots = values.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0));
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(values.len(), roots));
    Some(&vectors * diag * vectors.adjoint())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Matrix exponential of a generator, computed block by block over the
/// connected components of its sparsity pattern. Each block goes through a
/// dense scaling-and-squaring Padé exponential.
///
/// Photon-number conserving generators (beam splitters) split into many
/// small blocks; tridiagonal ones (displacement) form a single block.
pub fn expm_blockwise(gen: &CMatrix) -> CMatrix {
    let n = gen.nrows();
    assert_eq!(n, gen.ncols(), "generator must be square");
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for r in 0..n {
        for c in 0..n {
            if r != c && gen[(r, c)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }

    let mut out = CMatrix::zeros(n, n);
    for idx in blocks.values() {
        let k = idx.len();
        let sub = CMatrix::from_fn(k, k, |r, c| gen[(idx[r], idx[c])]);
        let e = if k == 1 { CMatrix::from_element(1, 1, sub[(0, 0)].exp()) } else { sub.exp() };
        for r in 0..k {
            for c in 0..k {
                out[(idx[r], idx[c])] = e[(r, c)];
            }
        }
    }
    out
}

//! Balanced N-mode states written as qudit coefficient tensors.
//!
//! Splitting the `N` modes into consecutive blocks, each branch
//! `μ_i |α_i⟩^{⊗N}` becomes a product over blocks of frame states, so the
//! coefficient tensor is `a = (1/√M) Σ_i μ_i u_i ⊗ v_i (⊗ w_i)`.

use crate::coherent::{build_frame, build_frame_reduced, gram, BlockFrame, CoherentLabel, GramMatrix, DEFAULT_FRAME_TOL};
use crate::error::{EcsError, Result};
use crate::linalg::{hermitian_defect, hermitian_eigenvalues, CMatrix};
use num_complex::Complex64 as C64;

const NORM_TOL: f64 = 1e-12;

/// `(1/√M) Σ_i μ_i |α_i⟩^{⊗N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedEcs {
    weights: Vec<C64>,
    gram: GramMatrix,
    modes: usize,
    norm: f64,
}

impl BalancedEcs {
    pub fn new(weights: Vec<C64>, labels: &[CoherentLabel], modes: usize) -> Result<Self> {
        Self::from_gram(weights, gram(labels)?, modes)
    }

    pub fn from_gram(weights: Vec<C64>, gram: GramMatrix, modes: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(EcsError::InvalidState("no branches".into()));
        }
        if weights.len() != gram.dim() {
            return Err(EcsError::InvalidState(format!(
                "{} weights for {} labels",
                weights.len(),
                gram.dim()
            )));
        }
        if modes < 2 {
            return Err(EcsError::InvalidState(format!("need at least two modes, got {modes}")));
        }
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(EcsError::InvalidState("non-finite weight".into()));
        }
        let norm = raw_norm(&weights, &gram, modes);
        if !(norm > NORM_TOL) {
            return Err(EcsError::NonPositiveNorm(norm));
        }
        Ok(BalancedEcs { weights, gram, modes, norm })
    }

    /// `(|α…α⟩ + μ|β…β⟩)/√M` with real overlap `p = ⟨α|β⟩`.
    pub fn qubit(mu: f64, p: f64, modes: usize) -> Result<Self> {
        Self::from_gram(vec![C64::new(1.0, 0.0), C64::new(mu, 0.0)], GramMatrix::qubit(p)?, modes)
    }

    /// `(|α…α⟩ + μ1|β…β⟩ + μ2|γ…γ⟩)/√M` with real overlaps
    /// `p1 = ⟨α|β⟩`, `p2 = ⟨γ|β⟩`, `p3 = ⟨γ|α⟩`.
    pub fn qutrit(mu1: f64, mu2: f64, p1: f64, p2: f64, p3: f64, modes: usize) -> Result<Self> {
        Self::from_gram(
            vec![C64::new(1.0, 0.0), C64::new(mu1, 0.0), C64::new(mu2, 0.0)],
            GramMatrix::qutrit(p1, p2, p3)?,
            modes,
        )
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of branches `d`.
    pub fn branches(&self) -> usize {
        self.weights.len()
    }
}

fn raw_norm(weights: &[C64], g: &GramMatrix, modes: usize) -> f64 {
    let mut total = C64::new(0.0, 0.0);
    for (i, wi) in weights.iter().enumerate() {
        for (j, wj) in weights.iter().enumerate() {
            total += wi.conj() * wj * g.get(i, j).powu(modes as u32);
        }
    }
    total.re
}

/// `M = Σ_ij μ_i* μ_j ⟨α_i|α_j⟩^N`.
pub fn norm_constant(s: &BalancedEcs) -> Result<f64> {
    let m = raw_norm(&s.weights, &s.gram, s.modes);
    if m > NORM_TOL {
        Ok(m)
    } else {
        Err(EcsError::NonPositiveNorm(m))
    }
}

/// Consecutive blocks of modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<usize>,
}

impl Partition {
    pub fn new(blocks: Vec<usize>, modes: usize) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(EcsError::InvalidPartition("need at least two parts".into()));
        }
        if blocks.iter().any(|&b| b == 0) {
            return Err(EcsError::InvalidPartition(format!("empty block in {blocks:?}")));
        }
        let total: usize = blocks.iter().sum();
        if total != modes {
            return Err(EcsError::InvalidPartition(format!("{blocks:?} does not sum to {modes}")));
        }
        Ok(Partition { blocks })
    }

    pub fn bipartite(m: usize, modes: usize) -> Result<Self> {
        if m == 0 || m >= modes {
            return Err(EcsError::InvalidPartition(format!("need 1 <= m <= {}, got {m}", modes.saturating_sub(1))));
        }
        Self::new(vec![m, modes - m], modes)
    }

    pub fn tripartite(m1: usize, m2: usize, modes: usize) -> Result<Self> {
        if m1 == 0 || m2 == 0 || m1 + m2 >= modes {
            return Err(EcsError::InvalidPartition(format!("need m1, m2 >= 1 and m1 + m2 < {modes}")));
        }
        Self::new(vec![m1, m2, modes - m1 - m2], modes)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }
}

/// How frames are built while assembling tensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePolicy {
    pub tol: f64,
    /// Drop degenerate directions instead of failing.
    pub reduce_rank: bool,
}

impl Default for FramePolicy {
    fn default() -> Self {
        FramePolicy { tol: DEFAULT_FRAME_TOL, reduce_rank: false }
    }
}

impl FramePolicy {
    pub fn frame(&self, g: &GramMatrix, m: usize) -> Result<BlockFrame> {
        if self.reduce_rank {
            build_frame_reduced(g, m, self.tol)
        } else {
            build_frame(g, m, self.tol)
        }
    }
}

/// Dense row-major coefficient array, part 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTensor {
    dims: Vec<usize>,
    entries: Vec<C64>,
}

impl CoeffTensor {
    pub fn new(dims: Vec<usize>, entries: Vec<C64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if dims.is_empty() || len != entries.len() {
            return Err(EcsError::ShapeMismatch(format!("dims {dims:?} vs {} entries", entries.len())));
        }
        Ok(CoeffTensor { dims, entries })
    }

    /// Bipartite tensor from a matrix `a[i][j]`.
    pub fn from_matrix(a: &CMatrix) -> Self {
        let entries = (0..a.nrows()).flat_map(|i| (0..a.ncols()).map(move |j| (i, j))).map(|(i, j)| a[(i, j)]).collect();
        CoeffTensor { dims: vec![a.nrows(), a.ncols()], entries }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn parts(&self) -> usize {
        self.dims.len()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "index rank");
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| {
            assert!(i < d, "index out of range");
            acc * d + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.entries[self.offset(idx)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Matrix with parts `[0, split)` as rows and `[split, n)` as columns.
    pub fn as_matrix(&self, split: usize) -> CMatrix {
        assert!(split > 0 && split < self.dims.len(), "split inside the tensor");
        let rows: usize = self.dims[..split].iter().product();
        let cols: usize = self.dims[split..].iter().product();
        CMatrix::from_row_slice(rows, cols, &self.entries)
    }

    /// Bipartite view grouping parts `[0, split)` against the rest.
    pub fn group(&self, split: usize) -> CoeffTensor {
        CoeffTensor::from_matrix(&self.as_matrix(split))
    }

    /// Reorders the parts so that new part `k` is old part `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<CoeffTensor> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(EcsError::ShapeMismatch(format!("bad permutation {order:?}")));
        }
        let dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let mut entries = vec![C64::new(0.0, 0.0); self.entries.len()];
        let mut idx = vec![0usize; n];
        for (flat, out) in entries.iter_mut().enumerate() {
            let mut rem = flat;
            for k in (0..n).rev() {
                idx[order[k]] = rem % dims[k];
                rem /= dims[k];
            }
            *out = self.get(&idx);
        }
        Ok(CoeffTensor { dims, entries })
    }
}

/// Coefficient tensor of `s` over the blocks of `partition`.
pub fn coeff_tensor(s: &BalancedEcs, partition: &Partition, policy: FramePolicy) -> Result<CoeffTensor> {
    if partition.blocks().iter().sum::<usize>() != s.modes {
        return Err(EcsError::InvalidPartition(format!("{:?} does not cover {} modes", partition.blocks(), s.modes)));
    }
    let frames = partition.blocks().iter().map(|&m| policy.frame(&s.gram, m)).collect::<Result<Vec<_>>>()?;
    let dims: Vec<usize> = frames.iter().map(|f| f.rank()).collect();
    let len: usize = dims.iter().product();
    let scale = 1.0 / norm_constant(s)?.sqrt();
    let mut entries = vec![C64::new(0.0, 0.0); len];
    for (i, mu) in s.weights.iter().enumerate() {
        let mut branch = vec![*mu * scale];
        for f in &frames {
            let u = f.state(i);
            branch = branch.iter().flat_map(|b| u.iter().map(move |x| b * x)).collect();
        }
        for (e, b) in entries.iter_mut().zip(branch) {
            *e += b;
        }
    }
    Ok(CoeffTensor { dims, entries })
}

/// Tensor for the split `(m | N - m)`.
pub fn bipartite_tensor(s: &BalancedEcs, m: usize) -> Result<CoeffTensor> {
    coeff_tensor(s, &Partition::bipartite(m, s.modes)?, FramePolicy::default())
}

/// Tensor for the split `(m1 | m2 | N - m1 - m2)`.
pub fn tripartite_tensor(s: &BalancedEcs, m1: usize, m2: usize) -> Result<CoeffTensor> {
    coeff_tensor(s, &Partition::tripartite(m1, m2, s.modes)?, FramePolicy::default())
}

/// Density matrix over one or more parts; `dims` lists the kept part
/// dimensions in order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, entries: CMatrix) -> Result<Self> {
        let rho = DensityMatrix { dims, entries };
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_pure(t: &CoeffTensor) -> Self {
        let v = CMatrix::from_column_slice(t.entries.len(), 1, &t.entries);
        DensityMatrix { dims: t.dims.clone(), entries: &v * v.adjoint() }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.entries.nrows();
        if n != self.entries.ncols() || n != self.dims.iter().product::<usize>() {
            return Err(EcsError::InvalidDensity(format!("shape {}x{} vs dims {:?}", n, self.entries.ncols(), self.dims)));
        }
        if hermitian_defect(&self.entries) > 1e-12 {
            return Err(EcsError::InvalidDensity("not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(EcsError::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&self.entries)[0];
        if min < -1e-10 {
            return Err(EcsError::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Partial trace of the pure-state projector over every part not in `keep`.
pub fn reduce(t: &CoeffTensor, keep: &[usize]) -> Result<DensityMatrix> {
    let n = t.parts();
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() != keep.len() || sorted.len() >= n || sorted.iter().any(|&k| k >= n) {
        return Err(EcsError::InvalidPartition(format!("keep set {keep:?} is not a proper subset of {n} parts")));
    }
    let traced = (0..n).filter(|k| !sorted.contains(k));
    let order: Vec<usize> = sorted.iter().copied().chain(traced).collect();
    let a = t.permute(&order)?.as_matrix(sorted.len());
    let dims = sorted.iter().map(|&k| t.dims[k]).collect();
    Ok(DensityMatrix { dims, entries: &a * a.adjoint() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn norm_constant_examples() {
        let s = BalancedEcs::from_gram(vec![r(1.0)], GramMatrix::from_real(1, &[1.0]).unwrap(), 3).unwrap();
        assert!((norm_constant(&s).unwrap() - 1.0).abs() < 1e-15);

        let (mu, p, n) = (0.7, 0.4, 5);
        let s = BalancedEcs::qubit(mu, p, n).unwrap();
        let expect = 1.0 + mu * mu + 2.0 * mu * p.powi(n as i32);
        assert!((norm_constant(&s).unwrap() - expect).abs() < 1e-14);

        let (mu1, mu2, p1, p2, p3, n) = (0.5, -1.2, 0.6, 0.3, 0.2, 4);
        let s = BalancedEcs::qutrit(mu1, mu2, p1, p2, p3, n).unwrap();
        let ni = n as i32;
        let expect = 1.0 + mu1 * mu1 + mu2 * mu2 + 2.0 * mu1 * p1.powi(ni) + 2.0 * mu2 * p3.powi(ni) + 2.0 * mu1 * mu2 * p2.powi(ni);
        assert!((norm_constant(&s).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn cancelling_weights_are_rejected() {
        let g = GramMatrix::qubit(1.0).unwrap();
        let err = BalancedEcs::from_gram(vec![r(1.0), r(-1.0)], g, 2).unwrap_err();
        assert!(matches!(err, EcsError::NonPositiveNorm(_)));
    }

    #[test]
    fn constructor_validation() {
        assert!(BalancedEcs::qubit(1.0, 0.5, 1).is_err());
        let g = GramMatrix::qubit(0.5).unwrap();
        assert!(BalancedEcs::from_gram(vec![r(1.0)], g, 3).is_err());
    }

    #[test]
    fn orthogonal_labels_give_bell_tensor() {
        let s = BalancedEcs::qubit(1.0, 0.0, 2).unwrap();
        let t = bipartite_tensor(&s, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [h, 0.0, 0.0, h];
        for (a, b) in t.entries().iter().zip(expect) {
            assert!((a - r(b)).norm() < 1e-15);
        }
    }

    #[test]
    fn qubit_tensor_matches_closed_coefficients() {
        let (mu, p, n, m) = (-0.8, 0.65, 7usize, 3usize);
        let t = bipartite_tensor(&BalancedEcs::qubit(mu, p, n).unwrap(), m).unwrap();
        let big_m = 1.0 + mu * mu + 2.0 * mu * p.powi(n as i32);
        let sq = big_m.sqrt();
        let (pm, pnm) = (p.powi(m as i32), p.powi((n - m) as i32));
        let a00 = (1.0 + mu * p.powi(n as i32)) / sq;
        let a01 = mu * pm * (1.0 - pnm * pnm).sqrt() / sq;
        let a10 = mu * pnm * (1.0 - pm * pm).sqrt() / sq;
        let a11 = mu * ((1.0 - pm * pm) * (1.0 - pnm * pnm)).sqrt() / sq;
        for (idx, v) in [([0, 0], a00), ([0, 1], a01), ([1, 0], a10), ([1, 1], a11)] {
            assert!((t.get(&idx) - r(v)).norm() < 1e-14, "{idx:?}");
        }
    }

    #[test]
    fn qutrit_orthogonal_gamma_tensor() {
        let (mu1, mu2, p1) = (0.9, 0.4, 0.3);
        let s = BalancedEcs::qutrit(mu1, mu2, p1, 0.0, 0.0, 5).unwrap();
        let t = bipartite_tensor(&s, 2).unwrap();
        let big_m = 1.0 + mu1 * mu1 + mu2 * mu2 + 2.0 * mu1 * p1.powi(5);
        let sq = big_m.sqrt();
        let n1 = (1.0 - p1.powi(4)).sqrt();
        let n1p = (1.0 - p1.powi(6)).sqrt();
        let expect = [
            ([0, 0], (1.0 + mu1 * p1.powi(5)) / sq),
            ([1, 0], mu1 * n1 * p1.powi(3) / sq),
            ([0, 1], mu1 * n1p * p1.powi(2) / sq),
            ([1, 1], mu1 * n1 * n1p / sq),
            ([2, 2], mu2 / sq),
            ([0, 2], 0.0),
            ([2, 0], 0.0),
            ([1, 2], 0.0),
            ([2, 1], 0.0),
        ];
        for (idx, v) in expect {
            assert!((t.get(&idx) - r(v)).norm() < 1e-14, "{idx:?}");
        }
    }

    #[test]
    fn tripartite_ghz_limit() {
        let mu = 0.6;
        let t = tripartite_tensor(&BalancedEcs::qubit(mu, 0.0, 6).unwrap(), 2, 1).unwrap();
        let sq = (1.0 + mu * mu).sqrt();
        assert!((t.get(&[0, 0, 0]) - r(1.0 / sq)).norm() < 1e-15);
        assert!((t.get(&[1, 1, 1]) - r(mu / sq)).norm() < 1e-15);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tripartite_qubit_coefficient() {
        let (mu, p, n, m1, m2) = (1.3, 0.7, 9usize, 2usize, 3usize);
        let s = BalancedEcs::qubit(mu, p, n).unwrap();
        let t = tripartite_tensor(&s, m1, m2).unwrap();
        let big_m = norm_constant(&s).unwrap();
        let n1 = (1.0 - p.powi(2 * m1 as i32)).sqrt();
        let n1p = (1.0 - p.powi(2 * m2 as i32)).sqrt();
        let expect = mu * n1 * n1p * p.powi((n - m1 - m2) as i32) / big_m.sqrt();
        assert!((t.get(&[1, 1, 0]) - r(expect)).norm() < 1e-14);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::bipartite(0, 4).is_err());
        assert!(Partition::bipartite(4, 4).is_err());
        assert!(Partition::tripartite(2, 2, 4).is_err());
        assert!(Partition::new(vec![1, 2], 4).is_err());
        assert_eq!(Partition::tripartite(1, 2, 5).unwrap().blocks(), &[1, 2, 2]);
    }

    #[test]
    fn reduce_bell_is_maximally_mixed() {
        let s = BalancedEcs::qubit(1.0, 0.0, 2).unwrap();
        let rho = reduce(&bipartite_tensor(&s, 1).unwrap(), &[0]).unwrap();
        let expect = CMatrix::from_diagonal_element(2, 2, r(0.5));
        assert!(max_abs(&(rho.entries() - expect)) < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn reduce_rejects_bad_keep_sets() {
        let t = tripartite_tensor(&BalancedEcs::qubit(1.0, 0.3, 5).unwrap(), 1, 2).unwrap();
        assert!(reduce(&t, &[]).is_err());
        assert!(reduce(&t, &[0, 1, 2]).is_err());
        assert!(reduce(&t, &[3]).is_err());
        assert!(reduce(&t, &[1, 1]).is_err());
    }

    #[test]
    fn swapping_parts_transposes() {
        let s = BalancedEcs::qutrit(0.4, -0.9, 0.5, 0.2, 0.3, 7).unwrap();
        let a = bipartite_tensor(&s, 3).unwrap().as_matrix(1);
        let b = bipartite_tensor(&s, 4).unwrap().as_matrix(1);
        assert!(max_abs(&(a.transpose() - b)) < 1e-14);
    }

    #[test]
    fn reduced_rank_tensor_keeps_norm() {
        // p^m underflows at large m; the degenerate direction is dropped.
        let s = BalancedEcs::qubit(0.5, 1.0 - 1e-13, 4).unwrap();
        let policy = FramePolicy { reduce_rank: true, ..FramePolicy::default() };
        let t = coeff_tensor(&s, &Partition::bipartite(2, 4).unwrap(), policy).unwrap();
        assert_eq!(t.dims(), &[1, 1]);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(bipartite_tensor(&s, 2).is_err());
    }
}

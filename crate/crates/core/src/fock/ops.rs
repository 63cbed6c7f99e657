use super::{check_cutoff, full_dim, FockVector};
use crate::coherent::CoherentLabel;
use crate::error::{EcsError, Result};
use crate::linalg::{expm_blockwise, CMatrix};
use crate::C64;

/// A dense matrix acting on the listed local basis indices.
#[derive(Debug, Clone, PartialEq)]
struct Block {
    indices: Vec<usize>,
    matrix: CMatrix,
}

/// Operator on `targets.len()` modes of a `modes`-mode register, stored as
/// invariant blocks of the local space. Single-mode operators are one dense
/// block; beam splitters split by total photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    cutoff: usize,
    modes: usize,
    targets: Vec<usize>,
    blocks: Vec<Block>,
}

impl FockOperator {
    fn single(cutoff: usize, matrix: CMatrix) -> Self {
        FockOperator { cutoff, modes: 1, targets: vec![0], blocks: vec![Block { indices: (0..=cutoff).collect(), matrix }] }
    }

    pub fn identity(cutoff: usize) -> Self {
        Self::single(cutoff, CMatrix::identity(cutoff + 1, cutoff + 1))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    fn local_dim(&self) -> usize {
        (self.cutoff + 1).pow(self.targets.len() as u32)
    }

    /// Dense matrix on the target modes, local index row-major in target order.
    pub fn matrix(&self) -> CMatrix {
        let n = self.local_dim();
        let mut out = CMatrix::zeros(n, n);
        for b in &self.blocks {
            for (r, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    out[(i, j)] = b.matrix[(r, c)];
                }
            }
        }
        out
    }

    fn from_dense_like(&self, matrix: CMatrix) -> Self {
        let n = matrix.nrows();
        FockOperator {
            cutoff: self.cutoff,
            modes: self.modes,
            targets: self.targets.clone(),
            blocks: vec![Block { indices: (0..n).collect(), matrix }],
        }
    }

    /// Moves the operator onto `targets` of a `modes`-mode register.
    pub fn placed(mut self, targets: &[usize], modes: usize) -> Result<Self> {
        if targets.len() != self.targets.len() {
            return Err(EcsError::ShapeMismatch(format!(
                "{}-mode operator placed on {} modes",
                self.targets.len(),
                targets.len()
            )));
        }
        check_targets(targets, modes)?;
        self.targets = targets.to_vec();
        self.modes = modes;
        Ok(self)
    }

    /// `self · rhs`, both on the same modes.
    pub fn compose(&self, rhs: &FockOperator) -> Result<Self> {
        self.same_layout(rhs)?;
        Ok(self.from_dense_like(self.matrix() * rhs.matrix()))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            b.matrix = b.matrix.adjoint();
        }
        out
    }

    /// `a·self + b·rhs`.
    pub fn combine(&self, a: C64, rhs: &FockOperator, b: C64) -> Result<Self> {
        self.same_layout(rhs)?;
        Ok(self.from_dense_like(self.matrix() * a + rhs.matrix() * b))
    }

    /// `max |(U†U - I)_{ij}|` over local basis states with at most `n_low`
    /// photons in every target mode.
    pub fn unitarity_defect(&self, n_low: usize) -> f64 {
        let d = self.cutoff + 1;
        let k = self.targets.len();
        let low: Vec<usize> = (0..self.local_dim())
            .filter(|&i| (0..k).all(|t| (i / d.pow((k - 1 - t) as u32)) % d <= n_low))
            .collect();
        let mut worst = 0.0f64;
        for b in &self.blocks {
            let g = b.matrix.adjoint() * &b.matrix;
            for (r, &i) in b.indices.iter().enumerate() {
                if !low.binary_search(&i).is_ok() {
                    continue;
                }
                for (c, &j) in b.indices.iter().enumerate() {
                    if low.binary_search(&j).is_ok() {
                        let id = if r == c { 1.0 } else { 0.0 };
                        worst = worst.max((g[(r, c)] - C64::new(id, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Applies the operator to its target modes of `v`.
    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.cutoff() != self.cutoff || v.modes() != self.modes {
            return Err(EcsError::ShapeMismatch(format!(
                "operator cutoff/modes {}/{} on vector {}/{}",
                self.cutoff,
                self.modes,
                v.cutoff(),
                v.modes()
            )));
        }
        let d = self.cutoff + 1;
        let strides: Vec<usize> = self.targets.iter().map(|&t| d.pow((self.modes - 1 - t) as u32)).collect();
        let local = self.local_dim();
        let k = self.targets.len();
        let offsets: Vec<usize> = (0..local)
            .map(|q| (0..k).map(|t| ((q / d.pow((k - 1 - t) as u32)) % d) * strides[t]).sum())
            .collect();
        let amps = v.amps();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        let mut buf = vec![C64::new(0.0, 0.0); local];
        for base in 0..amps.len() {
            if strides.iter().any(|&s| (base / s) % d != 0) {
                continue;
            }
            for (q, off) in offsets.iter().enumerate() {
                buf[q] = amps[base + off];
            }
            for b in &self.blocks {
                for (r, &i) in b.indices.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (c, &j) in b.indices.iter().enumerate() {
                        let x = buf[j];
                        if x.re != 0.0 || x.im != 0.0 {
                            acc += b.matrix[(r, c)] * x;
                        }
                    }
                    out[base + offsets[i]] = acc;
                }
            }
        }
        FockVector::new(self.cutoff, self.modes, out)
    }

    fn same_layout(&self, rhs: &FockOperator) -> Result<()> {
        if self.cutoff != rhs.cutoff || self.modes != rhs.modes || self.targets != rhs.targets {
            return Err(EcsError::ShapeMismatch("operators act on different spaces".into()));
        }
        Ok(())
    }
}

fn check_targets(targets: &[usize], modes: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= modes || targets[..i].contains(&t) {
            return Err(EcsError::BadModeIndex { index: t, modes });
        }
    }
    full_dim(0, modes)?;
    Ok(())
}

/// `D(α) = exp(α a† - α* a)` cropped to the cutoff.
pub fn displacement(a: CoherentLabel, cutoff: usize) -> Result<FockOperator> {
    check_cutoff(a.norm(), cutoff)?;
    let alpha = a.amplitude();
    let d = cutoff + 1;
    if alpha.norm() == 0.0 {
        return Ok(FockOperator::identity(cutoff));
    }
    // ⟨m|D|n⟩ = √(n!/m!) α^{m-n} e^{-x/2} L_n^{(m-n)}(x) for m ≥ n, x = |α|²,
    // and ⟨n|D|m⟩ = (-1)^{m-n} conj(α)^{m-n}/α^{m-n} ⟨m|D|n⟩ above the diagonal.
    let x = alpha.norm_sqr();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..d).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let (r, phi) = alpha.to_polar();
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        // forward recurrence in n for L_n^{(k)}(x)
        let (mut prev, mut cur) = (0.0, 1.0);
        for n in 0..d - k {
            let m = n + k;
            let mag = (0.5 * (ln_fact[n] - ln_fact[m]) + k as f64 * r.ln() - 0.5 * x).exp() * cur;
            out[(m, n)] = C64::from_polar(mag, k as f64 * phi);
            if k > 0 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                out[(n, m)] = C64::from_polar(sign * mag, -(k as f64) * phi);
            }
            let next = ((2 * n + 1 + k) as f64 - x) * cur - (n + k) as f64 * prev;
            prev = cur;
            cur = next / (n + 1) as f64;
        }
    }
    Ok(FockOperator::single(cutoff, out))
}

/// `Π = diag((-1)ⁿ)`.
pub fn parity(cutoff: usize) -> FockOperator {
    let diag = nalgebra::DVector::from_fn(cutoff + 1, |n, _| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    FockOperator::single(cutoff, CMatrix::from_diagonal(&diag))
}

/// `U(λ, α) = cos λ I + i sin λ D(α) Π`.
pub fn cat_unitary(lambda: f64, a: CoherentLabel, cutoff: usize) -> Result<FockOperator> {
    let dp = displacement(a, cutoff)?.compose(&parity(cutoff))?;
    FockOperator::identity(cutoff).combine(C64::new(lambda.cos(), 0.0), &dp, C64::new(0.0, lambda.sin()))
}

/// `V(α, β, λ) = D(α) U(λ, β - α)`, taking the vacuum to
/// `cos λ |α⟩ + i sin λ e^{i Im(αβ*)} |β⟩`.
pub fn v_op(a: CoherentLabel, b: CoherentLabel, lambda: f64, cutoff: usize) -> Result<FockOperator> {
    let diff = CoherentLabel::new(b.amplitude() - a.amplitude())?;
    displacement(a, cutoff)?.compose(&cat_unitary(lambda, diff, cutoff)?)
}

/// Two-mode beam splitter on `(i, j)` of a `modes`-mode register.
///
/// The generator is `θ(a_j† a_i - a_i† a_j)`, so that the mode operators
/// rotate as `B† (a_i, a_j)ᵀ B = R(θ) (a_i, a_j)ᵀ` with
/// `R = [[cos θ, -sin θ], [sin θ, cos θ]]` and a product input `|α⟩|0⟩`
/// leaves as `|cos θ α⟩|sin θ α⟩`.
pub fn beam_splitter(theta: f64, pair: (usize, usize), modes: usize, cutoff: usize) -> Result<FockOperator> {
    let (i, j) = pair;
    check_targets(&[i, j], modes)?;
    let d = cutoff + 1;
    let mut blocks = Vec::with_capacity(2 * cutoff + 1);
    for total in 0..=2 * cutoff {
        // states |n, total - n⟩ with both occupations in range
        let lo = total.saturating_sub(cutoff);
        let hi = total.min(cutoff);
        let ns: Vec<usize> = (lo..=hi).collect();
        let size = ns.len();
        let mut gen = CMatrix::zeros(size, size);
        for (r, &n) in ns.iter().enumerate() {
            // a_j† a_i : |n, t-n⟩ -> √n √(t-n+1) |n-1, t-n+1⟩
            if n > lo {
                let amp = theta * ((n * (total - n + 1)) as f64).sqrt();
                gen[(r - 1, r)] += C64::new(amp, 0.0);
                gen[(r, r - 1)] -= C64::new(amp, 0.0);
            }
        }
        let indices = ns.iter().map(|&n| n * d + (total - n)).collect();
        blocks.push(Block { indices, matrix: expm_blockwise(&gen) });
    }
    Ok(FockOperator { cutoff, modes, targets: vec![i, j], blocks })
}

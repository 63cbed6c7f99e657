//! Property tests tying the frame, the concurrence forms and the
//! overlap constraints to independent oracles.

use crate::entanglement::{
    concurrence_pure, concurrence_qubit_closed, concurrence_qubit_from_overlap, concurrence_qutrit_closed,
    overlap_interval, wootters_concurrence, wootters_spectrum, QutritBlock,
};
use crate::{
    bipartite_tensor, block_gram, build_frame, overlap, reduce, tripartite_tensor, BalancedEcs, CoherentLabel,
    EcsError, GramMatrix, C64, DEFAULT_FRAME_TOL,
};
use proptest::prelude::*;

fn label() -> impl Strategy<Value = CoherentLabel> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| CoherentLabel::new(C64::new(re, im)).unwrap())
}

fn weight() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Distinct labels separated enough that the frames stay well conditioned.
fn labels(d: usize) -> impl Strategy<Value = Vec<CoherentLabel>> {
    prop::collection::vec(label(), d).prop_filter("labels too close", |ls| {
        ls.iter().enumerate().all(|(i, a)| ls[i + 1..].iter().all(|b| (a.amplitude() - b.amplitude()).norm() > 0.3))
    })
}

fn state() -> impl Strategy<Value = (BalancedEcs, usize)> {
    (2usize..=4)
        .prop_flat_map(|d| (labels(d), prop::collection::vec(weight(), d), 2usize..=20))
        .prop_flat_map(|(ls, ws, n)| (Just(ls), Just(ws), Just(n), 1..n))
        .prop_filter_map("degenerate state", |(ls, ws, n, m)| {
            let s = BalancedEcs::new(ws, &ls, n).ok()?;
            bipartite_tensor(&s, m).ok()?;
            Some((s, m))
        })
}

/// `Σ μ_i* μ_j μ_k* μ_l G_ij^m G_kl^(N-m) ...` form of `Tr ρ_A²` using only overlaps.
fn purity_from_overlaps(s: &BalancedEcs, m: usize) -> f64 {
    let w = s.weights();
    let n = s.modes();
    let g = |i: usize, j: usize, k: usize| s.gram().get(i, j).powu(k as u32);
    let d = w.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    acc += w[i].conj() * w[j] * w[k].conj() * w[l] * g(i, l, m) * g(k, j, m) * g(i, j, n - m)
                        * g(k, l, n - m);
                }
            }
        }
    }
    let mut norm = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            norm += w[i].conj() * w[j] * g(i, j, n);
        }
    }
    acc.re / (norm.re * norm.re)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn frame_reproduces_block_gram(ls in labels(3), m in 1usize..=10) {
        let g = crate::gram(&ls).unwrap();
        let bg = block_gram(&g, m).unwrap();
        if let Ok(f) = build_frame(&g, m, DEFAULT_FRAME_TOL) {
            let diff = (f.reconstruct() - bg.entries()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            prop_assert!(diff < 1e-12, "diff {}", diff);
        }
    }

    #[test]
    fn overlap_is_hermitian_and_contracting(a in label(), b in label()) {
        prop_assert!((overlap(a, b) - overlap(b, a).conj()).norm() < 1e-15);
        if a.amplitude() != b.amplitude() {
            prop_assert!(overlap(a, b).norm() < 1.0);
        }
    }

    #[test]
    fn qutrit_frame_entries(p1 in 0.0..0.95f64, p2 in 0.0..0.95f64, p3 in 0.0..0.95f64, n in 2usize..=12, m in 1usize..=6) {
        prop_assume!(m < n);
        let g = GramMatrix::qutrit(p1, p2, p3);
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        for k in [m, n - m] {
            let (Ok(b), Ok(f)) = (QutritBlock::new(p1, p2, p3, k), build_frame(&g, k, DEFAULT_FRAME_TOL)) else { continue };
            let l = f.coeffs();
            prop_assert!((l[(1, 1)].re - b.n1).abs() < 1e-12);
            prop_assert!((l[(2, 0)].re - p3.powi(k as i32)).abs() < 1e-12);
            prop_assert!((l[(2, 1)].re + b.x * b.n1).abs() < 1e-12);
            prop_assert!((l[(2, 2)].re - b.n2).abs() < 1e-12);
            // |2⟩ = (|γ⟩ + x|β⟩ + y|α⟩)/N2 reads off the inverse frame.
            let inv = l.clone().try_inverse().unwrap();
            let tol = 1e-12 / b.n2.powi(2).min(1.0);
            prop_assert!((inv[(2, 0)].re - b.y / b.n2).abs() < tol);
            prop_assert!((inv[(2, 1)].re - b.x / b.n2).abs() < tol);
            prop_assert!((inv[(2, 2)].re - 1.0 / b.n2).abs() < tol);
        }
    }

    #[test]
    fn tensors_are_normalized((s, m) in state()) {
        let t = bipartite_tensor(&s, m).unwrap();
        prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
        if m + 1 < s.modes() {
            let t3 = tripartite_tensor(&s, m, 1).unwrap();
            prop_assert!((t3.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn purity_is_frame_independent((s, m) in state()) {
        let rho = reduce(&bipartite_tensor(&s, m).unwrap(), &[0]).unwrap();
        prop_assert!((rho.purity() - purity_from_overlaps(&s, m)).abs() < 1e-10);
    }

    #[test]
    fn pure_concurrence_oracle_and_bound((s, m) in state()) {
        let t = bipartite_tensor(&s, m).unwrap();
        let c = concurrence_pure(&t).unwrap();
        let oracle = (2.0 * (1.0 - reduce(&t, &[0]).unwrap().purity())).max(0.0).sqrt();
        prop_assert!((c.value - oracle).abs() < 1e-10, "{} vs {}", c.value, oracle);
        let d = s.branches() as f64;
        prop_assert!(c.value <= (2.0 * (d - 1.0) / d).sqrt() + 1e-9);
    }

    #[test]
    fn swapping_parts_transposes((s, m) in state()) {
        let a = bipartite_tensor(&s, m).unwrap().as_matrix(1);
        let b = bipartite_tensor(&s, s.modes() - m).unwrap().as_matrix(1);
        if a.shape() == (b.ncols(), b.nrows()) {
            let diff = (a.transpose() - b).iter().fold(0.0f64, |x, z| x.max(z.norm()));
            prop_assert!(diff < 1e-12);
        }
    }

    #[test]
    fn qubit_closed_form_matches_generic(mu in weight(), a in label(), b in label(), n in 2usize..=20, m in 1usize..=19) {
        prop_assume!(m < n && (a.amplitude() - b.amplitude()).norm() > 0.3);
        let s = BalancedEcs::new(vec![C64::new(1.0, 0.0), mu], &[a, b], n);
        prop_assume!(s.is_ok());
        let generic = concurrence_pure(&bipartite_tensor(&s.unwrap(), m).unwrap()).unwrap().value;
        let closed = concurrence_qubit_closed(mu, a, b, n, m).unwrap();
        prop_assert!((generic - closed).abs() < 1e-9, "{} vs {}", generic, closed);
    }

    #[test]
    fn qutrit_closed_form_matches_generic(
        mu1 in -3.0..3.0f64, mu2 in -3.0..3.0f64,
        p1 in 0.0..0.95f64, p2 in 0.0..0.95f64, p3 in 0.0..0.95f64,
        n in 2usize..=20, m in 1usize..=10,
    ) {
        prop_assume!(m < n);
        let closed = concurrence_qutrit_closed(mu1, mu2, p1, p2, p3, n, m);
        let s = BalancedEcs::qutrit(mu1, mu2, p1, p2, p3, n);
        prop_assume!(closed.is_ok() && s.is_ok());
        let t = bipartite_tensor(&s.unwrap(), m);
        prop_assume!(t.is_ok());
        let generic = concurrence_pure(&t.unwrap()).unwrap().value;
        let closed = closed.unwrap();
        prop_assert!((generic - closed).abs() < 1e-9, "{} vs {}", generic, closed);
    }

    #[test]
    fn rho_ab_matches_closed_form(mu in -5.0..5.0f64, p in 0.0..0.95f64, m1 in 1usize..=4, m2 in 1usize..=4, m3 in 1usize..=4) {
        let n = m1 + m2 + m3;
        let s = BalancedEcs::qubit(mu, p, n).unwrap();
        let rho = reduce(&tripartite_tensor(&s, m1, m2).unwrap(), &[0, 1]).unwrap();
        let pw = |k: usize| p.powi(k as i32);
        let n1 = (1.0 - pw(2 * m1)).sqrt();
        let n1p = (1.0 - pw(2 * m2)).sqrt();
        let big_m = 1.0 + mu * mu + 2.0 * mu * pw(n);
        let mu2 = mu * mu;
        let expect = [
            ((0, 0), 1.0 + 2.0 * mu * pw(n) + mu2 * pw(2 * (m1 + m2))),
            ((0, 1), mu * n1p * (pw(n - m2) + mu * pw(2 * m1 + m2))),
            ((0, 2), mu * n1 * (pw(n - m1) + mu * pw(m1 + 2 * m2))),
            ((0, 3), mu * n1 * n1p * (pw(m3) + mu * pw(m1 + m2))),
            ((1, 1), mu2 * n1p * n1p * pw(2 * m1)),
            ((1, 2), mu2 * n1 * n1p * pw(m1 + m2)),
            ((1, 3), mu2 * n1 * n1p * n1p * pw(m1)),
            ((2, 2), mu2 * n1 * n1 * pw(2 * m2)),
            ((2, 3), mu2 * n1 * n1 * n1p * pw(m2)),
            ((3, 3), mu2 * n1 * n1 * n1p * n1p),
        ];
        for ((i, j), v) in expect {
            let got = rho.entries()[(i, j)];
            prop_assert!((got - C64::new(v / big_m, 0.0)).norm() < 1e-12, "({},{}) {} vs {}", i, j, got, v / big_m);
        }
    }

    #[test]
    fn rho_ab_has_two_wootters_eigenvalues(mu in -10.0..10.0f64, p in 0.0..0.95f64) {
        let s = BalancedEcs::qubit(mu, p, 10).unwrap();
        let rho = reduce(&tripartite_tensor(&s, 2, 3).unwrap(), &[0, 1]).unwrap();
        let l = wootters_spectrum(&rho).unwrap();
        prop_assert!(l[2].abs() < 1e-7 && l[3].abs() < 1e-7);
        let c = wootters_concurrence(&rho).unwrap();
        prop_assert!((c - (l[0] - l[1]).abs()).abs() < 2e-7);
    }

    #[test]
    fn partition_ordering(mu in -10.0..10.0f64) {
        let s = BalancedEcs::qubit(mu, 0.8, 10).unwrap();
        let c: Vec<f64> = (1..=5).map(|m| concurrence_pure(&bipartite_tensor(&s, m).unwrap()).unwrap().value).collect();
        for w in c.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12, "{:?}", c);
        }
    }
}

/// The squared pivot of the third direction is positive exactly inside the
/// overlap interval. The block overlaps `p^k` are fed in directly, so points
/// outside the interval are rejected either as a non-Gram matrix or as a
/// degenerate frame. Points within roundoff of an edge are skipped.
#[test]
fn frame_fails_exactly_outside_interval() {
    let steps = 40;
    let grid = |i: usize| i as f64 / steps as f64 * 0.98;
    let (mut built, mut rejected) = (0, 0);
    for k in [1usize, 2, 5] {
        for i in 0..=steps {
            for j in 0..=steps {
                for l in 0..=steps {
                    let (p1, p2, p3) = (grid(i), grid(j), grid(l));
                    let (lo, hi) = overlap_interval(p1, p2, k);
                    let (a, b, c) = (p1.powi(k as i32), p2.powi(k as i32), p3.powi(k as i32));
                    let pivot = (1.0 - a * a - b * b - c * c + 2.0 * a * b * c) / (1.0 - a * a);
                    if (pivot - DEFAULT_FRAME_TOL).abs() < 1e-9 || pivot.abs() < 1e-9 {
                        continue;
                    }
                    let inside = c > lo && c < hi;
                    match GramMatrix::qutrit(a, b, c).and_then(|g| build_frame(&g, 1, DEFAULT_FRAME_TOL)) {
                        Ok(_) => {
                            assert!(inside, "frame built outside ({lo},{hi}) at {p1},{p2},{p3},k={k}");
                            built += 1;
                        }
                        Err(EcsError::DegenerateFrame { .. }) | Err(EcsError::InvalidGram(_)) => {
                            assert!(!inside, "frame rejected inside ({lo},{hi}) at {p1},{p2},{p3},k={k}");
                            rejected += 1;
                        }
                        Err(e) => panic!("unexpected {e:?}"),
                    }
                }
            }
        }
    }
    assert!(built > 10_000 && rejected > 1_000, "{built} built, {rejected} rejected");
}

/// Over a valid single-mode triple every block power stays feasible.
#[test]
fn block_powers_of_valid_triples_stay_inside() {
    for (p1, p2, p3) in [(0.5, 0.4, 0.3), (0.9, 0.8, 0.75), (0.0, 0.2, 0.9), (0.7, 0.1, 0.2)] {
        let g = GramMatrix::qutrit(p1, p2, p3).unwrap();
        for k in 1..=20 {
            let (lo, hi) = overlap_interval(p1, p2, k);
            let c = f64::powi(p3, k as i32);
            assert!(c > lo && c < hi);
            assert!(build_frame(&g, k, DEFAULT_FRAME_TOL).is_ok());
        }
    }
}

/// Grid scan plus pattern-search refinement of `1 - C` over complex `μ` and
/// complex overlap `p`. The gap at unbalanced splits closes like `|p|^{2m}/2`
/// as `p -> 0`, so the modulus is kept in `[0.3, 0.999]`.
fn best_residual(n: usize, m: usize) -> f64 {
    let residual = |v: [f64; 4]| {
        let p = C64::from_polar(v[2].clamp(0.3, 0.999), v[3]);
        let mu = C64::from_polar(v[0].abs(), v[1]);
        concurrence_qubit_from_overlap(mu, p, n, m).map(|c| (1.0 - c).abs()).unwrap_or(f64::INFINITY)
    };
    let mut best = ([0.0; 4], f64::INFINITY);
    for i in 0..=20 {
        for j in 0..12 {
            for k in 6..=19 {
                for l in 0..6 {
                    let v = [0.25 * i as f64, j as f64 * std::f64::consts::PI / 6.0, 0.05 * k as f64, l as f64 * std::f64::consts::PI / 3.0];
                    let r = residual(v);
                    if r < best.1 {
                        best = (v, r);
                    }
                }
            }
        }
    }
    let (mut v, mut r) = best;
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for axis in 0..4 {
            for sign in [-1.0, 1.0] {
                let mut w = v;
                w[axis] += sign * step;
                let rw = residual(w);
                if rw < r {
                    (v, r, improved) = (w, rw, true);
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    r
}

#[test]
fn unit_concurrence_needs_balanced_split() {
    assert!(best_residual(2, 1) < 1e-9);
    assert!(best_residual(10, 5) < 1e-9);
    for (n, m) in [(3, 1), (5, 2), (10, 3), (10, 4), (7, 1)] {
        let r = best_residual(n, m);
        assert!(r > 1e-6, "N={n} m={m} residual {r}");
    }
}

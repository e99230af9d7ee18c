//! Cut norm and cut distance against independent brute-force oracles.

use graphonlab::metrics::{
    build_coupling, cut_distance, cut_norm, invariant_l1_distance, CutNormMode, DistanceOptions,
    ReportMode,
};
use graphonlab::StepGraphon;
use proptest::prelude::*;

/// `max_{U,V} |Σ_{i∈U, j∈V} m_i m_j W_ij|` over all subset pairs.
fn oracle_cut_norm(masses: &[f64], values: &[f64]) -> f64 {
    let n = masses.len();
    let mut best: f64 = 0.0;
    for u in 0u32..1 << n {
        for v in 0u32..1 << n {
            let mut s = 0.0;
            for i in (0..n).filter(|i| u >> i & 1 == 1) {
                for j in (0..n).filter(|j| v >> j & 1 == 1) {
                    s += masses[i] * masses[j] * values[i * n + j];
                }
            }
            best = best.max(s.abs());
        }
    }
    best
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `min_π ‖W₁ − W₂^π‖_□` for equal-mass blocks.
fn oracle_permutation_distance(n: usize, a: &[f64], b: &[f64]) -> f64 {
    let masses = vec![1.0 / n as f64; n];
    permutations(n)
        .into_iter()
        .map(|p| {
            let diff: Vec<f64> = (0..n * n)
                .map(|k| a[k] - b[p[k / n] * n + p[k % n]])
                .collect();
            oracle_cut_norm(&masses, &diff)
        })
        .fold(f64::INFINITY, f64::min)
}

fn symmetric(n: usize, raw: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = raw[i.min(j) * n + i.max(j)];
        }
    }
    v
}

prop_compose! {
    fn step_graphon(max_blocks: usize, lo: f64, hi: f64)(n in 1..=max_blocks)
        (masses in prop::collection::vec(0.1f64..1.0, n),
         raw in prop::collection::vec(lo..hi, n * n), n in Just(n))
        -> (Vec<f64>, Vec<f64>) {
        (masses, symmetric(n, &raw))
    }
}

prop_compose! {
    fn equal_mass_pair(max_blocks: usize)(n in 1..=max_blocks)
        (a in prop::collection::vec(0.0f64..1.0, n * n),
         b in prop::collection::vec(0.0f64..1.0, n * n), n in Just(n))
        -> (usize, Vec<f64>, Vec<f64>) {
        (n, symmetric(n, &a), symmetric(n, &b))
    }
}

fn equal(n: usize, values: Vec<f64>) -> StepGraphon {
    StepGraphon::from_flat(vec![1.0 / n as f64; n], values, false).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_cut_norm_matches_subset_enumeration((masses, values) in step_graphon(6, -1.0, 1.0)) {
        let expected = oracle_cut_norm(&masses, &values);
        let w = StepGraphon::from_flat(masses, values, false).unwrap();
        let got = cut_norm(&w, CutNormMode::Exact, 0).unwrap();
        prop_assert!((got.value - expected).abs() <= 1e-12);
        prop_assert!(got.exact);
    }

    #[test]
    fn heuristic_cut_norm_is_a_lower_bound((masses, values) in step_graphon(8, -1.0, 1.0), seed in any::<u64>()) {
        let w = StepGraphon::from_flat(masses, values, false).unwrap();
        let exact = cut_norm(&w, CutNormMode::Exact, 0).unwrap().value;
        let heuristic = cut_norm(&w, CutNormMode::Heuristic, seed).unwrap().value;
        prop_assert!(heuristic <= exact + 1e-12);
    }

    #[test]
    fn cut_norm_at_most_l1((masses, values) in step_graphon(6, -1.0, 1.0)) {
        let w = StepGraphon::from_flat(masses, values, false).unwrap();
        let c = cut_norm(&w, CutNormMode::Exact, 0).unwrap().value;
        prop_assert!(c <= w.l1_norm() + 1e-12);
    }

    #[test]
    fn nonnegative_cut_norm_is_l1((masses, values) in step_graphon(6, 0.0, 1.0)) {
        let w = StepGraphon::from_flat(masses, values, false).unwrap();
        let c = cut_norm(&w, CutNormMode::Exact, 0).unwrap().value;
        prop_assert!((c - w.l1_norm()).abs() <= 1e-12);
    }

    #[test]
    fn equal_mass_distance_matches_permutation_oracle((n, a, b) in equal_mass_pair(4)) {
        let expected = oracle_permutation_distance(n, &a, &b);
        let r = cut_distance(&equal(n, a), &equal(n, b), &DistanceOptions::exact()).unwrap();
        prop_assert_eq!(r.mode, ReportMode::Exact);
        prop_assert!((r.value - expected).abs() <= 1e-12, "{} vs {}", r.value, expected);
    }

    #[test]
    fn distance_is_symmetric((n, a, b) in equal_mass_pair(6)) {
        let (w1, w2) = (equal(n, a), equal(n, b));
        let opts = DistanceOptions::exact();
        let d12 = cut_distance(&w1, &w2, &opts).unwrap().value;
        let d21 = cut_distance(&w2, &w1, &opts).unwrap().value;
        prop_assert!((d12 - d21).abs() <= 1e-12);
    }

    #[test]
    fn triangle_inequality((n, a, b) in equal_mass_pair(5), c in prop::collection::vec(0.0f64..1.0, 25)) {
        let w3 = equal(n, symmetric(n, &c[..n * n]));
        let (w1, w2) = (equal(n, a), equal(n, b));
        let opts = DistanceOptions::exact();
        let d = |x: &StepGraphon, y: &StepGraphon| cut_distance(x, y, &opts).unwrap().value;
        prop_assert!(d(&w1, &w3) <= d(&w1, &w2) + d(&w2, &w3) + 1e-9);
    }

    #[test]
    fn cut_distance_at_most_l1_distance((n, a, b) in equal_mass_pair(5)) {
        let (w1, w2) = (equal(n, a), equal(n, b));
        let opts = DistanceOptions::exact();
        let cut = cut_distance(&w1, &w2, &opts).unwrap().value;
        let l1 = invariant_l1_distance(&w1, &w2, &opts).unwrap().value;
        prop_assert!(cut <= l1 + 1e-12);
    }

    #[test]
    fn zero_extension_leaves_distance_unchanged((n, a, b) in equal_mass_pair(4), extra in 0.05f64..2.0) {
        let (w1, w2) = (equal(n, a), equal(n, b));
        let padded = w1.extended_with_zero_blocks(&[extra]).unwrap();
        let opts = DistanceOptions::exact();
        let d = cut_distance(&w1, &w2, &opts).unwrap().value;
        let e = cut_distance(&padded, &w2, &opts).unwrap().value;
        prop_assert!((d - e).abs() <= 1e-12);
    }

    #[test]
    fn shuffles_are_at_distance_zero((n, a, _b) in equal_mass_pair(8), seed in any::<u64>()) {
        let w = equal(n, a);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let r = cut_distance(&w, &w.permuted(&perm).unwrap(), &DistanceOptions::exact()).unwrap();
        prop_assert!(r.value <= 1e-12);
    }

    #[test]
    fn product_coupling_has_exact_marginals(
        a in prop::collection::vec(0.1f64..2.0, 1..6),
        b in prop::collection::vec(0.1f64..2.0, 1..6),
    ) {
        let total_a: f64 = a.iter().sum();
        let total_b: f64 = b.iter().sum();
        let b: Vec<f64> = b.iter().map(|x| x * total_a / total_b).collect();
        let c = build_coupling(&a, &b).unwrap();
        prop_assert!(c.marginal_error() <= 1e-10);
        let m = c.matrix();
        prop_assert!(m.iter().flatten().all(|&x| x >= 0.0));
    }
}

#[test]
fn perturbation_bound_holds_for_inflated_masses() {
    let w = StepGraphon::new(
        vec![0.4, 1.1, 0.7],
        vec![vec![0.9, 0.1, 0.3], vec![0.1, 0.5, 0.2], vec![0.3, 0.2, 0.8]],
        false,
    )
    .unwrap();
    for eps in [0.01, 0.05, 0.2] {
        let v = w.scale_masses(1.0 + eps).unwrap();
        let d = cut_distance(&w, &v, &DistanceOptions::exact()).unwrap().value;
        assert!(d <= 3.0 * eps * w.l1_norm() + 1e-12, "eps {eps}: {d}");
    }
}

#[test]
fn anneal_matches_exact_on_small_inputs() {
    let a = symmetric(5, &(0..25).map(|k| ((k * 37) % 11) as f64 / 11.0).collect::<Vec<_>>());
    let w = equal(5, a);
    let v = w.permuted(&[3, 0, 4, 1, 2]).unwrap();
    let r = cut_distance(&w, &v, &DistanceOptions::anneal(20_000, 9)).unwrap();
    assert!(r.value <= 1e-9);
    assert_eq!(r.mode, ReportMode::UpperBound);
}

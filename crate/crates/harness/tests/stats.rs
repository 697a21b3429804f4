use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stressgate_harness::stats::{
    average_ranks, normal_p, wilcoxon_differences, wilcoxon_signed_rank, Method, StatsError, EXACT_MAX_N,
};

/// Exhaustive sign enumeration over the observed ranks.
fn enumerate(d: &[f64]) -> (f64, f64, f64) {
    let nz: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
    let n = nz.len();
    // ranks by counting, independent of the sort-based implementation
    let abs: Vec<f64> = nz.iter().map(|v| v.abs()).collect();
    let ranks: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let equal = abs.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w_obs: f64 = nz.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if w <= w_obs + 1e-9 {
            le += 1;
        }
        if w >= w_obs - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    let lower = le as f64 / total;
    let upper = ge as f64 / total;
    (w_obs, (2.0 * lower.min(upper)).min(1.0), lower)
}

#[test]
fn exact_matches_sign_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..200 {
        let n = rng.gen_range(1..=10);
        // integer-valued differences produce ties and zeros
        let d: Vec<f64> =
            (0..n).map(|_| rng.gen_range(-6i32..=6) as f64 * if trial % 2 == 0 { 1.0 } else { 0.37 }).collect();
        let (w_plus, two, less) = enumerate(&d);
        match wilcoxon_differences(&d) {
            Ok(w) => {
                assert_eq!(w.method, Method::Exact);
                assert!((w.w_plus - w_plus).abs() < 1e-12, "{d:?}");
                assert!((w.p_two_sided - two).abs() < 1e-12, "{d:?}: {} vs {two}", w.p_two_sided);
                assert!((w.p_less - less).abs() < 1e-12, "{d:?}");
            }
            Err(StatsError::Undefined) => assert!(d.iter().all(|v| *v == 0.0)),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn all_positive_five() {
    let w = wilcoxon_differences(&[0.5, 1.0, 2.0, 3.5, 4.0]).unwrap();
    assert_eq!(w.n, 5);
    assert_eq!(w.w_plus, 15.0);
    assert_eq!(w.w_minus, 0.0);
    assert_eq!(w.w, 0.0);
    // only the all-positive assignment reaches W+ = 15: 1/32 per tail
    assert_eq!(w.p_two_sided, 2.0 / 32.0);
    assert_eq!(w.p_less, 1.0);
    let flipped = wilcoxon_differences(&[-0.5, -1.0, -2.0, -3.5, -4.0]).unwrap();
    assert_eq!(flipped.p_less, 1.0 / 32.0);
}

#[test]
fn antisymmetric_differences_give_p_one() {
    let w = wilcoxon_differences(&[1.0, -1.0, 2.0, -2.0, 3.0, -3.0]).unwrap();
    assert_eq!(w.w_plus, w.w_minus);
    assert_eq!(w.p_two_sided, 1.0);
}

#[test]
fn n_eight_matches_enumeration() {
    let d = [0.8, -1.3, 2.2, 0.4, -0.1, 3.0, 1.7, -2.6];
    let w = wilcoxon_signed_rank(&d, &[0.0; 8]).unwrap();
    let (w_plus, two, _) = enumerate(&d);
    assert_eq!(w.w_plus, w_plus);
    assert!((w.p_two_sided - two).abs() < 1e-15);
}

#[test]
fn errors() {
    assert_eq!(wilcoxon_differences(&[0.0, 0.0]), Err(StatsError::Undefined));
    assert_eq!(wilcoxon_differences(&[]), Err(StatsError::Undefined));
    assert_eq!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]), Err(StatsError::LengthMismatch(1, 2)));
}

#[test]
fn zero_differences_are_dropped() {
    let a = wilcoxon_differences(&[1.0, 0.0, -2.0, 3.0, 0.0]).unwrap();
    let b = wilcoxon_differences(&[1.0, -2.0, 3.0]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n, 3);
}

#[test]
fn average_ranks_share_ties() {
    assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
}

#[test]
fn normal_approximation_above_exact_range() {
    let d: Vec<f64> = (1..=20).map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 }).collect();
    let w = wilcoxon_differences(&d).unwrap();
    assert_eq!(w.method, Method::Normal);
    assert!(d.len() > EXACT_MAX_N);
    // hand oracle: no ties, mean 105, var 20·21·41/24 = 717.5
    let neg: f64 = (1..=20).filter(|i| i % 3 == 0).map(|i| i as f64).sum();
    assert_eq!(w.w_minus, neg);
    let z = ((w.w_plus - 105.0).abs() - 0.5) / 717.5f64.sqrt();
    let phi = statrs_free_phi(z);
    assert!((w.p_two_sided - 2.0 * (1.0 - phi)).abs() < 1e-7, "{} vs {}", w.p_two_sided, 2.0 * (1.0 - phi));
}

/// Standard normal CDF by Simpson integration of the density.
fn statrs_free_phi(z: f64) -> f64 {
    let n = 200_000;
    let lo = -10.0;
    let h = (z - lo) / n as f64;
    let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = f(lo) + f(z);
    for i in 1..n {
        s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn reference_thirteen_pair_statistic() {
    // n = 13, W = 33: two-sided 0.382 and one-sided 0.191 without continuity correction
    let (two, less) = normal_p(13, 33.0, &[1; 13], false);
    assert!((two - 0.382).abs() < 5e-4, "{two}");
    assert!((less - 0.191).abs() < 5e-4, "{less}");
    let (two_cc, _) = normal_p(13, 33.0, &[1; 13], true);
    assert!(two_cc > two);
}

proptest! {
    #[test]
    fn p_values_are_probabilities(d in proptest::collection::vec(-50i32..50, 1..30)) {
        let d: Vec<f64> = d.into_iter().map(f64::from).collect();
        if let Ok(w) = wilcoxon_differences(&d) {
            prop_assert!((0.0..=1.0).contains(&w.p_two_sided));
            prop_assert!((0.0..=1.0).contains(&w.p_less));
            prop_assert!((w.w_plus + w.w_minus - (w.n * (w.n + 1)) as f64 / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_flip_mirrors_tails(d in proptest::collection::vec(-9i32..9, 1..12)) {
        let d: Vec<f64> = d.into_iter().map(f64::from).collect();
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        if let (Ok(a), Ok(b)) = (wilcoxon_differences(&d), wilcoxon_differences(&neg)) {
            prop_assert_eq!(a.w_plus, b.w_minus);
            prop_assert!((a.p_two_sided - b.p_two_sided).abs() < 1e-12);
        }
    }
}

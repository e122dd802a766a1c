//! Property-based invariants over random inputs.

use proptest::prelude::*;

use kappa_sq::bounds::{
    chernoff_delta, evaluate, kappa_from_epsilon, BoundId, BoundPoint, BoundQuery,
};
use kappa_sq::givens::generate_from_leverage;
use kappa_sq::linalg::{condition_number, leverage_scores, orthonormality_defect, ConditionNumber};
use kappa_sq::matrix::RealMatrix;
use kappa_sq::profile::validate_profile;

/// A random valid leverage profile: raw weights scaled to sum to n, rejecting
/// draws whose maximum would exceed 1.
fn profile_strategy() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (4usize..40, 1usize..4)
        .prop_flat_map(|(m, n)| {
            (
                Just(m),
                Just(n),
                proptest::collection::vec(0.05f64..1.0, m),
            )
        })
        .prop_filter_map("max scaled score must stay <= 1", |(m, n, raw)| {
            let sum: f64 = raw.iter().sum();
            let scores: Vec<f64> = raw.iter().map(|w| w * n as f64 / sum).collect();
            if scores.iter().all(|&s| s <= 1.0) {
                Some((m, n, scores))
            } else {
                None
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_round_trips_random_profiles((m, n, scores) in profile_strategy()) {
        let profile = validate_profile(&scores, m, n).unwrap();
        let (q, trace) = generate_from_leverage(&profile).unwrap();
        prop_assert_eq!(trace.rotation_count, m - 1);
        prop_assert!(orthonormality_defect(&q) <= 1e-12 * (m as f64).sqrt());
        let realized = leverage_scores(&q).unwrap();
        for (a, b) in realized.scores().iter().zip(profile.scores()) {
            prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn kappa_invariant_under_scaling_and_permutation(
        entries in proptest::collection::vec(-1.0f64..1.0, 12),
        scale in 0.1f64..100.0,
        swap in (0usize..4, 0usize..4),
    ) {
        let a = RealMatrix::from_rows(4, 3, &entries).unwrap();
        let kappa = condition_number(&a, None);
        // positive scaling
        let scaled: Vec<f64> = entries.iter().map(|v| v * scale).collect();
        let b = RealMatrix::from_rows(4, 3, &scaled).unwrap();
        match (kappa, condition_number(&b, None)) {
            (ConditionNumber::Value(k1), ConditionNumber::Value(k2)) => {
                prop_assert!((k1 - k2).abs() <= 1e-9 * k1.max(1.0), "{} vs {}", k1, k2);
            }
            (ConditionNumber::RankDeficient { .. }, ConditionNumber::RankDeficient { .. }) => {}
            (x, y) => prop_assert!(false, "rank class changed under scaling: {:?} vs {:?}", x, y),
        }
        // row permutation
        let mut permuted = entries.clone();
        let (r1, r2) = swap;
        for k in 0..3 {
            permuted.swap(r1 * 3 + k, r2 * 3 + k);
        }
        let c = RealMatrix::from_rows(4, 3, &permuted).unwrap();
        match (condition_number(&a, None), condition_number(&c, None)) {
            (ConditionNumber::Value(k1), ConditionNumber::Value(k2)) => {
                prop_assert!((k1 - k2).abs() <= 1e-9 * k1.max(1.0));
            }
            (ConditionNumber::RankDeficient { .. }, ConditionNumber::RankDeficient { .. }) => {}
            (x, y) => prop_assert!(false, "rank class changed under permutation: {:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn kappa_from_epsilon_is_increasing(e1 in 0.0f64..0.99, e2 in 0.0f64..0.99) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(kappa_from_epsilon(lo).unwrap() <= kappa_from_epsilon(hi).unwrap());
    }

    #[test]
    fn chernoff_delta_is_decreasing(
        e1 in 0.01f64..0.99,
        e2 in 0.01f64..0.99,
        c in 50usize..500,
    ) {
        let q = BoundQuery {
            bound: BoundId::B1Chernoff,
            m: 500,
            n: 4,
            mu: 0.016,
            lambda: None,
            c,
            delta: 0.01,
            gamma: None,
        };
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(chernoff_delta(lo, &q).unwrap() >= chernoff_delta(hi, &q).unwrap() - 1e-15);
    }

    #[test]
    fn applicable_points_are_consistent(
        m in 50usize..5000,
        n in 1usize..8,
        c_frac in 0.0f64..1.0,
        mu_frac in 0.0f64..1.0,
        delta in 0.001f64..0.5,
    ) {
        let n = n.min(m);
        let c = n + ((m - n) as f64 * c_frac) as usize;
        let lo = n as f64 / m as f64;
        let mu = lo + (1.0 - lo) * mu_frac;
        for bound in [
            BoundId::B1Chernoff,
            BoundId::B2Bernstein,
            BoundId::B3WeakCoherence,
            BoundId::B4WeakBernstein,
            BoundId::B5WeakFrobenius,
            BoundId::B6WeakBernoulli,
        ] {
            let gamma = c as f64 / m as f64;
            if bound == BoundId::B6WeakBernoulli && gamma >= 1.0 {
                continue;
            }
            let q = BoundQuery {
                bound,
                m,
                n,
                mu,
                lambda: Some(mu),
                c,
                delta,
                gamma: Some(gamma),
            };
            if let BoundPoint::Applicable { epsilon, kappa_bound } = evaluate(&q).unwrap() {
                prop_assert!(epsilon > 0.0 && epsilon < 1.0);
                prop_assert!(kappa_bound >= 1.0);
                prop_assert_eq!(kappa_bound, kappa_from_epsilon(epsilon).unwrap());
            }
        }
    }

    #[test]
    fn matrix_csv_round_trip(entries in proptest::collection::vec(-1e6f64..1e6, 15)) {
        let m = RealMatrix::from_rows(5, 3, &entries).unwrap();
        let dir = std::env::temp_dir().join("kappa_sq_prop_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("m_{}.csv", std::process::id()));
        kappa_sq::csvio::write_matrix_csv(&m, &path).unwrap();
        let back = kappa_sq::csvio::read_matrix_csv(&path).unwrap();
        prop_assert_eq!(m.as_dmatrix(), back.as_dmatrix());
    }

    #[test]
    fn log_points_sorted_with_exact_endpoints(lo in 1u64..50, span in 1u64..2000, k in 2usize..40) {
        let hi = lo + span;
        let pts = kappa_sq::experiment::log_points(lo, hi, k).unwrap();
        prop_assert_eq!(*pts.first().unwrap(), lo);
        prop_assert_eq!(*pts.last().unwrap(), hi);
        prop_assert!(pts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(pts.len() <= k);
    }
}

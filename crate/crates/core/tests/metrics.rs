mod common;

use common::tau_b_quadratic;
use gedforge_core::metrics::{
    evaluate, ged_to_sim, kendall_tau, mse, nged, precision_at_k, spearman_rho, MetricError,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn normalization_examples() {
    assert_eq!(nged(0, 4, 9), 0.0);
    assert_eq!(nged(3, 6, 6), 0.5);
    assert_eq!(nged(3, 5, 7), 0.5);
    assert_eq!(ged_to_sim(0.0).unwrap(), 1.0);
    assert!((ged_to_sim(0.5).unwrap() - 0.6065306597).abs() < 1e-9);
    assert!(matches!(ged_to_sim(-0.1), Err(MetricError::NegativeDistance(_))));
}

#[test]
fn correlation_examples() {
    let truth = [1.0, 2.0, 3.0, 4.0, 5.0];
    let reversed = [5.0, 4.0, 3.0, 2.0, 1.0];
    assert_eq!(spearman_rho(&truth, &truth).unwrap(), 1.0);
    assert_eq!(spearman_rho(&reversed, &truth).unwrap(), -1.0);
    assert!((spearman_rho(&[1.0, 2.0, 3.0, 5.0, 4.0], &truth).unwrap() - 0.9).abs() < 1e-12);
    assert_eq!(kendall_tau(&truth, &truth).unwrap(), 1.0);
    assert_eq!(kendall_tau(&reversed, &truth).unwrap(), -1.0);
    assert_eq!(spearman_rho(&[1.0, 1.0, 1.0], &truth[..3]), Err(MetricError::ZeroVariance));
    assert_eq!(kendall_tau(&[1.0], &[1.0]), Err(MetricError::TooShort(1)));
}

#[test]
fn precision_examples() {
    let truth: Vec<f64> = (0..20).map(|v| 20.0 - v as f64).collect();
    assert_eq!(precision_at_k(&truth, &truth, 10).unwrap(), 1.0);
    let disjoint: Vec<f64> = truth.iter().map(|v| -v).collect();
    assert_eq!(precision_at_k(&disjoint, &truth, 10).unwrap(), 0.0);
    let mut half = truth.clone();
    for k in 5..10 {
        half.swap(k, k + 10);
    }
    assert_eq!(precision_at_k(&half, &truth, 10).unwrap(), 0.5);
    assert!(matches!(precision_at_k(&truth, &truth, 0), Err(MetricError::InvalidK { .. })));
}

#[test]
fn fast_tau_matches_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..100 {
        let n = rng.gen_range(2..200);
        let levels = if trial % 3 == 0 { 4 } else { 1000 };
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let oracle = tau_b_quadratic(&x, &y);
        match kendall_tau(&x, &y) {
            Ok(fast) => assert!((fast - oracle).abs() < 1e-12, "trial {trial}: {fast} vs {oracle}"),
            Err(MetricError::ZeroVariance) => assert!(oracle.is_nan()),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn constant_predictor_mse_is_target_variance() {
    let targets = [0.2, 0.5, 0.9, 0.4];
    let mean = targets.iter().sum::<f64>() / 4.0;
    let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / 4.0;
    let report = evaluate("const", &[0], &[0, 1, 2, 3], |_, _| mean, |_, c| Some(targets[c])).unwrap();
    assert!((report.aggregate.mse - var).abs() < 1e-15);
    assert_eq!(report.aggregate.rho_excluded, 1);
    assert_eq!(mse(&[mean; 4], &targets).unwrap(), report.aggregate.mse);
}

proptest! {
    #[test]
    fn rank_metrics_ignore_monotone_transforms(
        pairs in prop::collection::vec((-100i32..100, -100i32..100), 2..40),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let fx: Vec<f64> = x.iter().map(|v| (v / 30.0).exp() * 3.0 + 1.0).collect();
        let rho = spearman_rho(&x, &y);
        let tau = kendall_tau(&x, &y);
        prop_assert_eq!(rho.is_ok(), spearman_rho(&fx, &y).is_ok());
        if let (Ok(a), Ok(b)) = (rho, spearman_rho(&fx, &y)) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a));
        }
        if let (Ok(a), Ok(b)) = (tau, kendall_tau(&fx, &y)) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn similarity_is_strictly_decreasing(a in 0.0f64..20.0, b in 0.0f64..20.0) {
        prop_assume!(a < b);
        prop_assert!(ged_to_sim(a).unwrap() > ged_to_sim(b).unwrap());
    }
}

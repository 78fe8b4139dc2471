mod common;

use abcforge::metrics::{
    fit_gaussian, fmd, frechet_distance, perplexity, read_loglik_jsonl, EmbeddingSet, LogLikRecord,
    MetricsError, COVARIANCE_EPSILON,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn correlated_set(rng: &mut ChaCha8Rng, n: usize, d: usize, shift: f64) -> Vec<Vec<f64>> {
    let mix: Vec<Vec<f64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal) / (d as f64).sqrt())
                .collect()
        })
        .collect();
    (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            (0..d)
                .map(|j| (0..d).map(|k| z[k] * mix[k][j]).sum::<f64>() + shift)
                .collect()
        })
        .collect()
}

fn lp(id: &str, v: &[f64]) -> LogLikRecord {
    LogLikRecord {
        id: id.into(),
        token_logprobs: v.to_vec(),
    }
}

#[test]
fn unit_mean_shift_with_equal_variance_is_one() {
    let a = EmbeddingSet::scalars(&[-1.0, 1.0]);
    let b = EmbeddingSet::scalars(&[0.0, 2.0]);
    assert!((fmd(&a, &b).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn scalar_closed_form() {
    // d² = (μ₁ − μ₂)² + (σ₁ − σ₂)² in one dimension
    let a = [0.5, 1.5, 2.0, 4.0, -1.0];
    let b = [10.0, 12.0, 9.0, 13.5];
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0) + COVARIANCE_EPSILON;
        (m, v.sqrt())
    };
    let ((m1, s1), (m2, s2)) = (stats(&a), stats(&b));
    let want = (m1 - m2).powi(2) + (s1 - s2).powi(2);
    let got = fmd(&EmbeddingSet::scalars(&a), &EmbeddingSet::scalars(&b)).unwrap();
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn fixture_embeddings_match_scipy_reference() {
    let r = EmbeddingSet::read(&common::fixture("ref.emb")).unwrap();
    let c = EmbeddingSet::read(&common::fixture("cand.emb")).unwrap();
    // scipy.linalg.sqrtm on the product form, see tests/oracles/fmd_oracle.py
    let want = 1.7372475115842985;
    assert!((fmd(&r, &c).unwrap() - want).abs() < 1e-9);
}

#[test]
fn eight_dimensional_pairs_match_jacobi_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..20 {
        let a = correlated_set(&mut rng, 60, 8, 0.0);
        let b = correlated_set(&mut rng, 50, 8, 0.1 * trial as f64);
        let got = fmd(
            &EmbeddingSet::new(8, a.clone()).unwrap(),
            &EmbeddingSet::new(8, b.clone()).unwrap(),
        )
        .unwrap();
        let (m1, s1) = common::linalg::gaussian(&a, COVARIANCE_EPSILON);
        let (m2, s2) = common::linalg::gaussian(&b, COVARIANCE_EPSILON);
        let want = common::linalg::frechet(&m1, &s1, &m2, &s2);
        assert!(
            (got - want).abs() <= 1e-6 * want.abs().max(1e-12),
            "trial {trial}: {got} vs {want}"
        );
    }
}

#[test]
fn rank_deficient_covariance_is_handled() {
    // all points on a line in 3-D: the covariance is singular before regularization
    let pts: Vec<Vec<f64>> = (0..10)
        .map(|i| vec![i as f64, 2.0 * i as f64, -(i as f64)])
        .collect();
    let set = EmbeddingSet::new(3, pts).unwrap();
    let d = fmd(&set, &set).unwrap();
    assert!(d.abs() <= 1e-8);
}

#[test]
fn input_errors() {
    let one = EmbeddingSet::scalars(&[1.0]);
    assert!(matches!(
        fmd(&one, &one),
        Err(MetricsError::TooFewVectors(1))
    ));
    let a = EmbeddingSet::new(2, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let b = EmbeddingSet::scalars(&[0.0, 1.0]);
    assert!(matches!(
        fmd(&a, &b),
        Err(MetricsError::DimensionMismatch { .. })
    ));
    let g = fit_gaussian(&a).unwrap();
    let bad = abcforge::metrics::GaussianStats {
        mean: DVector::zeros(2),
        cov: DMatrix::from_element(2, 2, f64::NAN),
    };
    assert!(frechet_distance(&g, &bad).is_err());
}

#[test]
fn perplexity_reference_values() {
    assert_eq!(perplexity(&[lp("a", &[0.0, 0.0, 0.0])]).unwrap(), 1.0);
    let half = -std::f64::consts::LN_2;
    let p = perplexity(&[lp("a", &[half; 5]), lp("b", &[half; 3])]).unwrap();
    assert!((p - 2.0).abs() < 1e-12);
    let records = read_loglik_jsonl(&common::fixture("loglik.jsonl")).unwrap();
    // math.fsum reference, see tests/oracles/ppl_oracle.py
    assert!((perplexity(&records).unwrap() - 1.7573962998035932).abs() < 1e-12);
}

#[test]
fn perplexity_rejects_bad_input() {
    assert!(perplexity(&[]).is_err());
    assert!(perplexity(&[lp("a", &[])]).is_err());
    assert!(perplexity(&[lp("a", &[0.5])]).is_err());
    assert!(perplexity(&[lp("a", &[f64::NAN])]).is_err());
    assert!(perplexity(&[lp("a", &[f64::NEG_INFINITY])]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fmd_is_symmetric_and_zero_on_self(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = EmbeddingSet::new(d, correlated_set(&mut rng, 30, d, 0.0)).unwrap();
        let b = EmbeddingSet::new(d, correlated_set(&mut rng, 25, d, 0.5)).unwrap();
        prop_assert!((fmd(&a, &b).unwrap() - fmd(&b, &a).unwrap()).abs() <= 1e-8);
        prop_assert!(fmd(&a, &a).unwrap() <= 1e-8);
        prop_assert!(fmd(&a, &b).unwrap() >= 0.0);
    }

    #[test]
    fn fmd_translation(seed in any::<u64>(), shift in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = correlated_set(&mut rng, 30, 4, 0.0);
        let b = correlated_set(&mut rng, 30, 4, 1.0);
        let moved = |x: &[Vec<f64>], c: f64| x.iter().map(|r| r.iter().map(|v| v + c).collect()).collect::<Vec<Vec<f64>>>();
        let set = |x: Vec<Vec<f64>>| EmbeddingSet::new(4, x).unwrap();
        let base = fmd(&set(a.clone()), &set(b.clone())).unwrap();
        // moving both sets together changes nothing
        let both = fmd(&set(moved(&a, shift)), &set(moved(&b, shift))).unwrap();
        prop_assert!((both - base).abs() <= 1e-8 * base.max(1.0));
        // moving one set only changes the mean term
        let ga = fit_gaussian(&set(a.clone())).unwrap();
        let gb = fit_gaussian(&set(b.clone())).unwrap();
        let delta = &ga.mean - &gb.mean;
        let shifted = delta.add_scalar(-shift);
        let want = base - delta.norm_squared() + shifted.norm_squared();
        let got = fmd(&set(a), &set(moved(&b, shift))).unwrap();
        prop_assert!((got - want).abs() <= 1e-8 * want.max(1.0));
    }

    #[test]
    fn perplexity_pooling_and_bounds(groups in proptest::collection::vec(
        proptest::collection::vec(-8.0f64..=0.0, 1..20), 1..6)) {
        let records: Vec<LogLikRecord> = groups.iter().enumerate().map(|(i, g)| lp(&i.to_string(), g)).collect();
        let flat: Vec<f64> = groups.concat();
        let pooled = perplexity(&records).unwrap();
        let single = perplexity(&[lp("all", &flat)]).unwrap();
        prop_assert!((pooled - single).abs() <= 1e-12 * single);
        let lo = (-flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).exp();
        let hi = (-flat.iter().cloned().fold(f64::INFINITY, f64::min)).exp();
        prop_assert!(pooled >= 1.0);
        prop_assert!(pooled >= lo * (1.0 - 1e-12) && pooled <= hi * (1.0 + 1e-12));
    }
}

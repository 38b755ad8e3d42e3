use adaptive_ct::features::{CenterPair, TemplateCenters};
use adaptive_ct::model::{classify, update_params, update_templates, ClassStats, ClassifierParams};
use proptest::prelude::*;

fn stats(mu: Vec<f64>, sigma: Vec<f64>) -> ClassStats {
    ClassStats { mu, sigma }
}

proptest! {
    #[test]
    fn score_is_sum_of_per_feature_scores(
        rows in prop::collection::vec((-50.0..50.0f64, 0.01..20.0f64, -50.0..50.0f64, 0.01..20.0f64, -80.0..80.0f64), 1..20)
    ) {
        let p = ClassifierParams {
            positive: stats(rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect()),
            negative: stats(rows.iter().map(|r| r.2).collect(), rows.iter().map(|r| r.3).collect()),
        };
        let v: Vec<f64> = rows.iter().map(|r| r.4).collect();
        let whole = classify(&v, &p);
        let parts: f64 = rows
            .iter()
            .map(|r| {
                let single = ClassifierParams {
                    positive: stats(vec![r.0], vec![r.1]),
                    negative: stats(vec![r.2], vec![r.3]),
                };
                classify(&[r.4], &single)
            })
            .sum();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1.0));
    }

    #[test]
    fn score_is_shift_invariant(
        mp in -50.0..50.0f64, sp in 0.01..20.0f64, mn in -50.0..50.0f64, sn in 0.01..20.0f64,
        v in -80.0..80.0f64, c in -100.0..100.0f64,
    ) {
        let p = ClassifierParams { positive: stats(vec![mp], vec![sp]), negative: stats(vec![mn], vec![sn]) };
        let q = ClassifierParams { positive: stats(vec![mp + c], vec![sp]), negative: stats(vec![mn + c], vec![sn]) };
        let (a, b) = (classify(&[v], &p), classify(&[v + c], &q));
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
    }
}

#[test]
fn score_sign_follows_nearer_class() {
    let p = ClassifierParams {
        positive: stats(vec![10.0], vec![1.0]),
        negative: stats(vec![0.0], vec![1.0]),
    };
    assert!(classify(&[9.0], &p) > 0.0);
    assert!(classify(&[1.0], &p) < 0.0);
    assert!(classify(&[5.0], &p).abs() < 1e-12);
}

#[test]
fn update_with_matching_batch_keeps_mean() {
    let pos = vec![vec![1.0, 4.0], vec![3.0, 4.0]];
    let neg = vec![vec![-1.0, 0.0], vec![-3.0, 2.0]];
    let params = ClassifierParams::from_batches(&pos, &neg).unwrap();
    let out = update_params(&params, &pos, &neg, 0.85).unwrap();
    for (a, b) in out.positive.mu.iter().zip(&params.positive.mu) {
        assert!((a - b).abs() < 1e-12);
    }
    for (a, b) in out.negative.sigma.iter().zip(&params.negative.sigma) {
        assert!((a - b).abs() < 1e-12);
    }
    // Constant feature hits the floor.
    assert_eq!(params.positive.sigma[1], 1e-3);
    assert!(update_params(&params, &pos, &neg, 1.0).is_err());
    assert!(update_params(&params, &[], &neg, 0.5).is_err());
}

#[test]
fn small_template_changes_are_ignored() {
    let old = TemplateCenters {
        bags: vec![vec![CenterPair::from_raw(vec![10.0; 9], vec![50.0; 9])]],
    };
    let near = TemplateCenters {
        bags: vec![vec![CenterPair::from_raw(vec![11.0; 9], vec![50.5; 9])]],
    };
    let kept = update_templates(&old, &near, 100.0, 0.05).unwrap();
    assert_eq!(kept, old);
    let far = TemplateCenters {
        bags: vec![vec![CenterPair::from_raw(vec![210.0; 9], vec![50.5; 9])]],
    };
    let moved = update_templates(&old, &far, 100.0, 0.05).unwrap();
    assert!(moved.bags[0][0].positive.iter().all(|&x| (x - 20.0).abs() < 1e-12));
    assert_eq!(moved.bags[0][0].negative, vec![50.0; 9]);
}

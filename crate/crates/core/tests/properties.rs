mod support;

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use pupguard::classify::{
    average_path_length, decision_and, iforest_fit, lof_fit, ocsvm_fit, score_from_path_length,
    IsoForestParams, LofParams, OcSvmParams, Prediction, Verdict,
};
use pupguard::dataset::{
    shuffled_order, split_dataset, CaptureInstant, Dataset, GrayImage, Label,
};
use pupguard::eval::{confusion, metrics, ConfusionMatrix};
use pupguard::features::{
    cell_histograms, hog_descriptor, lbp_grid_histogram, lbp_histogram, pca_fit, sobel_gradients,
    FeatureVector, HogParams, Provenance,
};
use pupguard::fusion::{fuse_concat, fuse_cross};
use pupguard::preprocess::{otsu_from_histogram, prepro2, Prepro2Params, TimingStandardizer};
use pupguard::synthgen::{gen_pairs, GenSpec};
use support::*;

fn image_strategy(max_side: usize) -> impl Strategy<Value = GrayImage> {
    (3..=max_side, 3..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h).prop_map(move |px| GrayImage::new(w, h, px).unwrap())
    })
}

fn matrix_strategy(rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (rows, cols).prop_flat_map(|(n, d)| prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), n))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn otsu_stable_form_matches_two_class_form(img in image_strategy(24)) {
        let mut hist = vec![0u64; 256];
        for &p in img.pixels() {
            hist[p as usize] += 1;
        }
        let stats = otsu_from_histogram(hist.clone());
        let curve = stats.variance_curve();
        for (k, &v) in curve.iter().enumerate().take(255) {
            let direct = between_class_direct(&hist, k);
            prop_assert!(rel_close(v, direct, 1e-9) || (v.abs() < 1e-9 && direct.abs() < 1e-9),
                "k = {}: {} vs {}", k, v, direct);
        }
        if !stats.degenerate {
            prop_assert!(curve[..255].iter().all(|&v| v <= stats.best_variance));
            prop_assert!(curve[..stats.best_k as usize].iter().all(|&v| v < stats.best_variance));
        }
    }

    #[test]
    fn lbp_matches_naive_oracle(img in image_strategy(20)) {
        let h = lbp_histogram(&img).unwrap();
        let oracle = naive_lbp_histogram(&img);
        prop_assert_eq!(h.values(), oracle.as_slice());
    }

    #[test]
    fn lbp_regions_each_sum_to_one(img in image_strategy(20), grid in 1usize..=3) {
        prop_assume!(grid + 2 <= img.width().min(img.height()));
        let h = lbp_grid_histogram(&img, grid).unwrap();
        prop_assert_eq!(h.len(), grid * grid * 256);
        for region in h.values().chunks(256) {
            prop_assert!((region.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hog_blocks_bounded_and_energy_conserved(seed in any::<u64>()) {
        let mut r = rng(seed);
        let img = random_image(&mut r, 32, 24);
        let params = HogParams::default();
        let field = sobel_gradients(&img);
        let hist = cell_histograms(&field, &params).unwrap();
        let mass: f64 = hist.iter().sum();
        let energy: f64 = field.magnitude.iter().sum();
        prop_assert!(rel_close(mass, energy, 1e-6));
        let d = hog_descriptor(&img, &params).unwrap();
        prop_assert_eq!(d.len(), 3 * 2 * 36);
        for block in d.values().chunks(36) {
            prop_assert!(block.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1.0 + 1e-6);
        }
        let again = hog_descriptor(&img, &params).unwrap();
        prop_assert_eq!(d.values(), again.values());
    }

    #[test]
    fn pca_agrees_with_dense_eigensolver(x in matrix_strategy(4..=14, 2..=9)) {
        let (n, d) = (x.len(), x[0].len());
        let k = (n - 1).min(d);
        let model = pca_fit(&x, k).unwrap();
        let oracle = covariance_eigenvalues(&x);
        let scale = oracle[0].max(1e-12);
        for (c, v) in model.explained_variance.iter().enumerate() {
            prop_assert!((v - oracle[c]).abs() <= 1e-8 * scale, "{} vs {}", v, oracle[c]);
            if c > 0 {
                prop_assert!(model.explained_variance[c - 1] >= *v);
            }
        }
        for (i, a) in model.components.iter().enumerate() {
            for (j, b) in model.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn pca_wide_data_matches_dense_eigensolver(x in matrix_strategy(3..=7, 10..=24)) {
        let k = x.len() - 1;
        let model = pca_fit(&x, k).unwrap();
        let oracle = covariance_eigenvalues(&x);
        let scale = oracle[0].max(1e-12);
        for (c, v) in model.explained_variance.iter().enumerate() {
            prop_assert!((v - oracle[c]).abs() <= 1e-8 * scale, "{} vs {}", v, oracle[c]);
        }
    }

    #[test]
    fn pca_ignores_constant_offsets(x in matrix_strategy(6..=12, 2..=5), shift in -50.0f64..50.0) {
        let k = 2;
        let a = pca_fit(&x, k).unwrap();
        let shifted: Vec<Vec<f64>> = x.iter().map(|r| r.iter().map(|v| v + shift).collect()).collect();
        let b = pca_fit(&shifted, k).unwrap();
        // only compare well-separated components
        let ev = &a.explained_variance;
        for c in 0..k {
            let gap_before = if c == 0 { f64::INFINITY } else { ev[c - 1] - ev[c] };
            let gap_after = if c + 1 < ev.len() { ev[c] - ev[c + 1] } else { ev[c] };
            if gap_before.min(gap_after) > 1e-3 * ev[0].max(1e-12) {
                for (u, v) in a.components[c].iter().zip(&b.components[c]) {
                    prop_assert!((u - v).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn cross_fusion_is_linear_in_the_image(
        img in prop::collection::vec(-100.0f64..100.0, 0..16),
        t in -5.0f64..5.0,
        alpha in -10.0f64..10.0,
    ) {
        let fv = FeatureVector::new(img.clone(), Provenance::Pca).unwrap();
        let scaled = FeatureVector::new(img.iter().map(|v| alpha * v).collect(), Provenance::Pca).unwrap();
        let a = fuse_cross(&scaled, t, 0.0, "p").unwrap();
        let b = fuse_cross(&fv, t, 0.0, "p").unwrap();
        for (u, v) in a.values.values().iter().zip(b.values.values()) {
            prop_assert!((u - alpha * v).abs() <= 1e-12 * u.abs().max((alpha * v).abs()).max(1e-300));
        }
        let unit = fuse_cross(&fv, 1.0, 0.0, "p").unwrap();
        prop_assert_eq!(unit.values.values(), img.as_slice());
        let c = fuse_concat(&fv, t, "p").unwrap();
        prop_assert_eq!(&c.values.values()[..img.len()], img.as_slice());
        prop_assert_eq!(c.values.values()[img.len()], t);
    }

    #[test]
    fn timestamps_round_trip(micros in 0i64..=CaptureInstant::MAX.micros_since_epoch()) {
        let t = CaptureInstant::from_micros(micros).unwrap();
        let text = t.to_string();
        let back: CaptureInstant = text.parse().unwrap();
        prop_assert_eq!(back, t);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn standardized_training_intervals(ts in prop::collection::vec(0.01f64..10.0, 2..50)) {
        prop_assume!(ts.iter().any(|&t| t != ts[0]));
        let s = TimingStandardizer::fit(&ts).unwrap();
        let z: Vec<f64> = ts.iter().map(|&t| s.standardize(t)).collect();
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let std = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        prop_assert!(mean.abs() < 1e-9);
        prop_assert!((std - 1.0).abs() < 1e-9);
    }

    #[test]
    fn prepro2_identity_geometry_is_affine(
        img in (3usize..=12).prop_flat_map(|s| prop::collection::vec(any::<u8>(), s * s)
            .prop_map(move |px| GrayImage::new(s, s, px).unwrap()))
    ) {
        let params = Prepro2Params { resize_to: img.width(), crop_to: img.width(), mean: 0.0, std: 1.0 };
        let out = prepro2(&img, &params).unwrap();
        for (v, &p) in out.values.iter().zip(img.pixels()) {
            prop_assert_eq!(*v, f64::from(p) / 255.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_identities(tp in 0u64..200, fp in 0u64..200, tn in 0u64..200, fn_ in 0u64..200) {
        let cm = ConfusionMatrix::new(tp, fp, tn, fn_);
        let r = metrics(&cm);
        let total = tp + fp + tn + fn_;
        if total > 0 {
            prop_assert!((r.accuracy.unwrap() - (tp + tn) as f64 / total as f64).abs() < 1e-15);
        }
        if fp + tn > 0 {
            let specificity = tn as f64 / (fp + tn) as f64;
            prop_assert!((r.fpr.unwrap() + specificity - 1.0).abs() < 1e-12);
        } else {
            prop_assert!(r.fpr.is_none());
        }
        if let Some(f1) = r.f1 {
            let alt = tp as f64 / (tp as f64 + (fp + fn_) as f64 / 2.0);
            prop_assert!((f1 - alt).abs() < 1e-12);
        }
        for (_, v) in r.named() {
            if let Some(v) = v {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ocsvm_nu_property_and_kkt(seed in any::<u64>(), nu in 0.05f64..0.6, n in 20usize..120) {
        let mut r = rng(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| vec![gaussian(&mut r), 2.0 * gaussian(&mut r)]).collect();
        let m = ocsvm_fit(&x, &OcSvmParams { nu, ..Default::default() }).unwrap();
        let c = m.upper_bound();
        let at_bound = m.alphas.iter().filter(|&&a| a >= c * (1.0 - 1e-9)).count() as f64;
        let support = m.alphas.len() as f64;
        prop_assert!(at_bound <= nu * n as f64 + 1e-9);
        prop_assert!(support >= nu * n as f64 - 1e-9);
        let kkt = kkt_report(&m, &x);
        prop_assert!(kkt.sum_residual <= 1e-5 && kkt.box_residual <= 1e-5 && kkt.stationarity <= 1e-5,
            "sum {} box {} stationarity {}", kkt.sum_residual, kkt.box_residual, kkt.stationarity);
    }

    #[test]
    fn lof_is_scale_invariant(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let mut r = rng(seed);
        let x: Vec<Vec<f64>> = (0..40).map(|_| vec![gaussian(&mut r), gaussian(&mut r), gaussian(&mut r)]).collect();
        let q = vec![gaussian(&mut r) * 3.0, gaussian(&mut r), 0.5];
        let params = LofParams { k: Some(7), ..Default::default() };
        let a = lof_fit(&x, &params).unwrap().score(&q).unwrap();
        let xs: Vec<Vec<f64>> = x.iter().map(|p| p.iter().map(|v| v * scale).collect()).collect();
        let qs: Vec<f64> = q.iter().map(|v| v * scale).collect();
        let b = lof_fit(&xs, &params).unwrap().score(&qs).unwrap();
        prop_assert!(rel_close(a, b, 1e-9), "{} vs {}", a, b);
    }
}

#[test]
fn isolation_score_grows_with_distance() {
    for seed in 0..20 {
        let mut r = rng(900 + seed);
        let cluster: Vec<Vec<f64>> = (0..150).map(|_| vec![gaussian(&mut r), gaussian(&mut r)]).collect();
        let params = IsoForestParams { seed, ..Default::default() };
        let mut last = 0.0;
        for dist in [3.0, 6.0, 12.0, 24.0, 48.0, 96.0] {
            let point = vec![dist, 0.5 * dist];
            let mut x = cluster.clone();
            x.push(point.clone());
            let m = iforest_fit(&x, &params).unwrap();
            let s = m.score(&point).unwrap();
            assert!(s > 0.0 && s < 1.0);
            assert!(s >= last - 1e-12, "seed {seed}: score fell from {last} to {s} at distance {dist}");
            last = s;
        }
    }
}

#[test]
fn isolation_normalizer_properties() {
    assert_eq!(average_path_length(1), 0.0);
    for n in 2..500 {
        assert!(average_path_length(n + 1) > average_path_length(n));
    }
    let c = average_path_length(256);
    assert!((score_from_path_length(c, 256) - 0.5).abs() < 1e-15);
    assert!(score_from_path_length(1.0, 256) > score_from_path_length(5.0, 256));
}

#[test]
fn detectors_are_deterministic() {
    let mut r = rng(3);
    let x: Vec<Vec<f64>> = (0..60).map(|_| vec![gaussian(&mut r), gaussian(&mut r)]).collect();
    let a = iforest_fit(&x, &IsoForestParams { seed: 4, ..Default::default() }).unwrap();
    let b = iforest_fit(&x, &IsoForestParams { seed: 4, ..Default::default() }).unwrap();
    assert_eq!(a, b);
    assert_eq!(ocsvm_fit(&x, &OcSvmParams::default()).unwrap(), ocsvm_fit(&x, &OcSvmParams::default()).unwrap());
    assert_eq!(lof_fit(&x, &LofParams::default()).unwrap(), lof_fit(&x, &LofParams::default()).unwrap());
}

#[test]
fn and_fusion_false_positives_are_shared() {
    let mut r = rng(8);
    let labels: HashMap<String, Label> = (0..200)
        .map(|i| (format!("p{i}"), if i % 3 == 0 { Label::Attack } else { Label::Legitimate }))
        .collect();
    let verdict = |id: &str, normal: bool, margin: f64| Verdict {
        pair_id: id.to_string(),
        score: margin,
        margin: if normal { margin.abs() } else { -margin.abs() - 1e-3 },
        prediction: if normal { Prediction::Normal } else { Prediction::Anomalous },
    };
    let mut image = Vec::new();
    let mut timing = Vec::new();
    let mut fused = Vec::new();
    for i in 0..200 {
        let id = format!("p{i}");
        let a = verdict(&id, rand::Rng::random_bool(&mut r, 0.7), gaussian(&mut r));
        let b = verdict(&id, rand::Rng::random_bool(&mut r, 0.7), gaussian(&mut r));
        fused.push(decision_and(&a, &b).unwrap());
        image.push(a);
        timing.push(b);
    }
    let fp = |vs: &[Verdict]| -> HashSet<String> {
        vs.iter()
            .filter(|v| v.is_normal() && labels[&v.pair_id] == Label::Attack)
            .map(|v| v.pair_id.clone())
            .collect()
    };
    let (fi, ft, ff) = (fp(&image), fp(&timing), fp(&fused));
    assert!(ff.iter().all(|id| fi.contains(id) && ft.contains(id)));
    let rate = |vs: &[Verdict]| metrics(&confusion(vs, &labels).unwrap()).fpr.unwrap();
    assert!(rate(&fused) <= rate(&image).min(rate(&timing)));
}

#[test]
fn splits_partition_over_many_seeds() {
    let ds = Dataset::new(gen_pairs(&GenSpec::new(30, 10, 4, 1)).unwrap(), "mem").unwrap();
    for seed in 0..100u64 {
        let (a, b) = split_dataset(&ds, 0.6, seed).unwrap();
        let (a2, _) = split_dataset(&ds, 0.6, seed).unwrap();
        assert_eq!(a.pair_ids(), a2.pair_ids());
        assert_eq!(a.len(), 24);
        let ia: HashSet<&str> = a.pair_ids().into_iter().collect();
        let ib: HashSet<&str> = b.pair_ids().into_iter().collect();
        assert!(ia.is_disjoint(&ib));
        assert_eq!(ia.len() + ib.len(), ds.len());
        let mut order = shuffled_order(40, seed);
        order.sort_unstable();
        assert_eq!(order, (0..40).collect::<Vec<_>>());
    }
}

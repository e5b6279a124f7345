mod support;

use pupguard::dataset::{load_dataset, Label};
use pupguard::synthgen::{
    darkness_centroid, gen_dataset, gen_fingerprint_image, gen_pairs, gen_press_pair, AttackParams,
    GenSpec, Press, SubjectProfile,
};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[test]
fn same_spec_same_pairs() {
    let spec = GenSpec::new(6, 4, 3, 11);
    assert_eq!(gen_pairs(&spec).unwrap(), gen_pairs(&spec).unwrap());
    let other = GenSpec { seed: 12, ..spec.clone() };
    assert_ne!(gen_pairs(&spec).unwrap()[0].first, gen_pairs(&other).unwrap()[0].first);
}

#[test]
fn harder_presses_are_darker() {
    for seed in 0..50u64 {
        let profile = SubjectProfile::from_population(seed as usize % 7, 0);
        let mut last = f64::INFINITY;
        for pressure in [0.6, 1.0, 1.4, 1.8] {
            let press = Press { pressure, ..Default::default() };
            let m = gen_fingerprint_image(&profile, &press, seed).mean_intensity();
            assert!(m < last, "seed {seed}: pressure {pressure} gave mean {m} after {last}");
            last = m;
        }
    }
}

#[test]
fn centre_offset_moves_the_contact_region() {
    for seed in 0..10u64 {
        let profile = SubjectProfile::from_population(seed as usize, 0);
        let base = darkness_centroid(&gen_fingerprint_image(&profile, &Press::default(), seed));
        let shifted_press = Press { center_offset: (40.0, 0.0), ..Default::default() };
        let moved = darkness_centroid(&gen_fingerprint_image(&profile, &shifted_press, seed));
        assert!((moved.0 - base.0 - 40.0).abs() <= 2.0, "dx = {}", moved.0 - base.0);
        assert!((moved.1 - base.1).abs() <= 2.0, "dy = {}", moved.1 - base.1);
    }
}

#[test]
fn timing_attacks_shift_the_interval_mean() {
    let profile = SubjectProfile::from_population(2, 0);
    let timing_only = AttackParams { channel_mix: 1.0, ..Default::default() };
    let normal: Vec<f64> = (0..1000u64)
        .map(|s| gen_press_pair(&profile, None, s).unwrap().interval().unwrap())
        .collect();
    let attack: Vec<f64> = (1000..2000u64)
        .map(|s| gen_press_pair(&profile, Some(&timing_only), s).unwrap().interval().unwrap())
        .collect();
    let sigma = profile.base_interval_std;
    let shift = (mean(&attack) - mean(&normal)) / sigma;
    assert!((shift - 4.0).abs() <= 0.5, "shift {shift} sigma");
}

#[test]
fn attacks_leave_the_other_channel_alone() {
    let profile = SubjectProfile::from_population(5, 0);
    let timing_only = AttackParams { channel_mix: 1.0, ..Default::default() };
    let image_only = AttackParams { channel_mix: 0.0, ..Default::default() };
    let normal: Vec<_> = (0..1000u64).map(|s| gen_press_pair(&profile, None, s).unwrap()).collect();
    let timed: Vec<_> = (1000..2000u64)
        .map(|s| gen_press_pair(&profile, Some(&timing_only), s).unwrap())
        .collect();
    let imaged: Vec<_> = (2000..3000u64)
        .map(|s| gen_press_pair(&profile, Some(&image_only), s).unwrap())
        .collect();

    let intervals = |ps: &[pupguard::dataset::PressPair]| ps.iter().map(|p| p.interval().unwrap()).collect::<Vec<_>>();
    let sigma = std(&intervals(&normal));
    assert!((mean(&intervals(&imaged)) - mean(&intervals(&normal))).abs() < 0.1 * sigma);

    let brightness = |ps: &[pupguard::dataset::PressPair]| ps.iter().map(|p| p.second.mean_intensity()).collect::<Vec<_>>();
    let sigma = std(&brightness(&normal));
    assert!((mean(&brightness(&timed)) - mean(&brightness(&normal))).abs() < 0.1 * sigma);
    // and the image attacks really do press harder
    assert!(mean(&brightness(&imaged)) < mean(&brightness(&normal)) - sigma);
}

#[test]
fn written_datasets_are_byte_identical() {
    let spec = GenSpec::new(5, 3, 2, 4);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen_dataset(&spec, a.path()).unwrap();
    gen_dataset(&spec, b.path()).unwrap();
    let read = |dir: &std::path::Path, rel: &str| std::fs::read(dir.join(rel)).unwrap();
    assert_eq!(read(a.path(), "manifest.csv"), read(b.path(), "manifest.csv"));
    let mut names: Vec<_> = std::fs::read_dir(a.path().join("images"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 16);
    for name in names {
        let rel = format!("images/{name}");
        assert_eq!(read(a.path(), &rel), read(b.path(), &rel));
    }
}

#[test]
fn counts_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let ds = gen_dataset(&GenSpec::new(41, 53, 10, 2), dir.path()).unwrap();
    assert_eq!(ds.len(), 94);
    assert_eq!(ds.count_label(Label::Legitimate), 41);
    assert_eq!(ds.count_label(Label::Attack), 53);
    // legitimate pairs come first
    assert!(ds.iter().take(41).all(|p| p.label == Label::Legitimate));
    let reloaded = load_dataset(dir.path()).unwrap();
    assert_eq!(reloaded.pairs, ds.pairs);
}

#[test]
fn empty_dataset_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let ds = gen_dataset(&GenSpec::new(0, 0, 3, 1), dir.path()).unwrap();
    assert!(ds.is_empty());
    let text = std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn image_attacks_darken_the_second_press() {
    let spec = GenSpec {
        attack: AttackParams { channel_mix: 0.0, ..Default::default() },
        ..GenSpec::new(0, 40, 4, 9)
    };
    let darker = gen_pairs(&spec)
        .unwrap()
        .iter()
        .filter(|p| p.second.mean_intensity() < p.first.mean_intensity())
        .count();
    assert!(darker >= 36, "{darker}/40 second presses darker");
}

//! Concatenation and cross fusion of an image vector with the standardized
//! interval.

use pupguard::features::{FeatureVector, Provenance};
use pupguard::fusion::{fuse_concat, fuse_cross, FeatureScaler};
use pupguard::preprocess::TimingStandardizer;

fn main() -> pupguard::Result<()> {
    let intervals = [1.42, 1.55, 1.38, 1.61, 1.47, 1.50];
    let timing = TimingStandardizer::fit(&intervals)?;
    println!("interval mean {:.4}s, std {:.4}s", timing.mu, timing.sigma);

    let img = FeatureVector::new(vec![0.8, -0.2, 0.5], Provenance::Pca)?;
    for t in [1.47, 2.30] {
        let t_star = timing.standardize(t);
        let concat = fuse_concat(&img, t_star, "demo")?;
        let cross = fuse_cross(&img, t_star, 0.0, "demo")?;
        let shifted = fuse_cross(&img, t_star, 1.0, "demo")?;
        println!("t = {t:.2}s, t* = {t_star:+.3}");
        println!("  concat          {:?}", concat.values.values());
        println!("  cross           {:?}", cross.values.values());
        println!("  cross offset 1  {:?}", shifted.values.values());
    }

    let train: Vec<Vec<f64>> = intervals
        .iter()
        .map(|&t| fuse_concat(&img, timing.standardize(t), "").map(|s| s.values.into_values()))
        .collect::<Result<_, _>>()?;
    let scaler = FeatureScaler::fit(&train)?;
    println!("scaled first sample {:?}", scaler.transform(&train[0])?);
    Ok(())
}

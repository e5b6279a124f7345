//! Reduces pair-level LBP features with PCA and reports retained variance.

use pupguard::features::{effective_k, pair_features, pca_fit, Extractor};
use pupguard::synthgen::{gen_pairs, GenSpec};

fn main() -> pupguard::Result<()> {
    let pairs = gen_pairs(&GenSpec::new(120, 0, 6, 5))?;
    let extractor = Extractor::lbp();
    let x: Vec<Vec<f64>> = pairs
        .iter()
        .map(|p| pair_features(p, &extractor, None).map(|f| f.into_values()))
        .collect::<Result<_, _>>()?;
    let (n, d) = (x.len(), x[0].len());
    let k = effective_k(32, n, d);
    println!("{n} samples of dimension {d}; keeping k = {k}");

    let model = pca_fit(&x, k)?;
    let total: f64 = {
        let full = pca_fit(&x, effective_k(d, n, d))?;
        full.explained_variance.iter().sum()
    };
    let mut acc = 0.0;
    for (i, v) in model.explained_variance.iter().enumerate().take(10) {
        acc += v;
        println!("component {i:>2}: variance {v:.3e}, cumulative {:.1}%", 100.0 * acc / total);
    }
    let kept: f64 = model.explained_variance.iter().sum();
    println!("{k} components keep {:.1}% of the variance", 100.0 * kept / total);

    let z = model.transform_slice(&x[0])?;
    let back = model.inverse_transform(&z)?;
    let err: f64 = x[0].iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    println!("reconstruction error of the first sample: {err:.3e}");
    Ok(())
}

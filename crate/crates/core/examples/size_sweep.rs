//! Accuracy as the training set grows from 20% to 100%.

use pupguard::config::PipelineConfig;
use pupguard::dataset::Dataset;
use pupguard::eval::{sweep, sweep_csv, SplitUnit};
use pupguard::synthgen::{gen_pairs, GenSpec};

fn main() -> pupguard::Result<()> {
    let train = Dataset::new(gen_pairs(&GenSpec::new(300, 0, 10, 1))?, "train")?;
    let test = Dataset::new(gen_pairs(&GenSpec::new(41, 53, 10, 2))?, "test")?;
    let cfg = PipelineConfig {
        cross_offset: 1.0,
        pca_k: 64,
        nu: 0.05,
        gamma: Some(5e-4),
        ..PipelineConfig::default()
    };
    let fractions = [0.2, 0.4, 0.6, 0.8, 1.0];
    let rows = sweep(&train, &test, &fractions, &cfg, 0, SplitUnit::Pair)?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}

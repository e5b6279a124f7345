//! Train on 300 synthetic legitimate attempts, test on 41 legitimate and 53
//! coerced attempts, and compare fused, image-only and timing-only runs.

use std::time::Instant;

use pupguard::config::{FusionMode, PipelineConfig};
use pupguard::dataset::Dataset;
use pupguard::eval::run_pipeline;
use pupguard::synthgen::{gen_pairs, GenSpec};

fn main() -> pupguard::Result<()> {
    let start = Instant::now();
    let train = Dataset::new(gen_pairs(&GenSpec::new(300, 0, 10, 1))?, "train")?;
    let test = Dataset::new(gen_pairs(&GenSpec::new(41, 53, 10, 2))?, "test")?;
    println!("generated {} + {} pairs in {:.1?}", train.len(), test.len(), start.elapsed());

    // a wide kernel and a larger PCA basis suit 300 training pairs
    let fused = PipelineConfig {
        cross_offset: 1.0,
        pca_k: 64,
        nu: 0.05,
        gamma: Some(5e-4),
        ..PipelineConfig::default()
    };
    for (name, fusion) in [
        ("cross", FusionMode::Cross),
        ("concat", FusionMode::Concat),
        ("image only", FusionMode::None),
        ("timing only", FusionMode::TimingOnly),
    ] {
        let t = Instant::now();
        let cfg = PipelineConfig { fusion, ..fused.clone() };
        let report = run_pipeline(&train, &test, &cfg)?;
        let [acc, fpr, rec, prec, f1] = report.display_values();
        println!("{name:<12} acc {acc:>8} fpr {fpr:>8} recall {rec:>8} precision {prec:>8} f1 {f1}  ({:.1?})", t.elapsed());
    }
    Ok(())
}

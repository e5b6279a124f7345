//! Separate image and timing detectors joined by a logical AND.

use pupguard::config::PipelineConfig;
use pupguard::dataset::Dataset;
use pupguard::eval::{confusion, metrics, TrainedPipeline};
use pupguard::synthgen::{gen_pairs, GenSpec};

fn main() -> pupguard::Result<()> {
    let train = Dataset::new(gen_pairs(&GenSpec::new(200, 0, 10, 1))?, "train")?;
    let test = Dataset::new(gen_pairs(&GenSpec::new(41, 53, 10, 2))?, "test")?;
    let cfg = PipelineConfig {
        decision_fusion: true,
        pca_k: 64,
        nu: 0.05,
        gamma: Some(5e-4),
        ..PipelineConfig::default()
    };
    let pipeline = TrainedPipeline::fit(&train, &cfg)?;
    let eval = pipeline.evaluate(&test)?;
    let labels = test.iter().map(|p| (p.pair_id.clone(), p.label)).collect();

    for (c, name) in ["image", "timing"].iter().enumerate() {
        let verdicts: Vec<_> = eval.channel_verdicts.iter().map(|v| v[c].clone()).collect();
        let r = metrics(&confusion(&verdicts, &labels)?);
        let [acc, fpr, rec, _, _] = r.display_values();
        println!("{name:<7} accuracy {acc:>8} FPR {fpr:>7} recall {rec:>8}");
    }
    let [acc, fpr, rec, _, _] = eval.report.display_values();
    println!("{:<7} accuracy {acc:>8} FPR {fpr:>7} recall {rec:>8}", "AND");

    let first = &eval.verdicts[0];
    println!("{}: {:?}, min margin {:.4}", first.pair_id, first.prediction, first.margin);
    Ok(())
}

//! Exports normalized images for an external network and runs the pipeline
//! on a precomputed embedding file.
//!
//! The embeddings here are a fixed random projection of the normalized
//! pixels, standing in for the output of a pretrained model.

use pupguard::config::{ExtractorKind, PipelineConfig};
use pupguard::dataset::Dataset;
use pupguard::eval::run_pipeline;
use pupguard::features::EmbeddingTable;
use pupguard::preprocess::{prepro2, Prepro2Params};
use pupguard::synthgen::{gen_pairs, GenSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 48;

fn main() -> pupguard::Result<()> {
    let train = Dataset::new(gen_pairs(&GenSpec::new(120, 0, 6, 1))?, "train")?;
    let test = Dataset::new(gen_pairs(&GenSpec::new(30, 30, 6, 2))?, "test")?;

    // downsample hard so the projection stays small
    let params = Prepro2Params {
        resize_to: 40,
        crop_to: 32,
        ..Prepro2Params::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let projection: Vec<Vec<f64>> = (0..DIM)
        .map(|_| (0..32 * 32).map(|_| rng.random_range(-1.0..1.0) / 32.0).collect())
        .collect();

    let mut table = EmbeddingTable::new(DIM);
    for pair in train.iter().chain(test.iter()) {
        for (id, img) in [(&pair.first_id, &pair.first), (&pair.second_id, &pair.second)] {
            let norm = prepro2(img, &params)?;
            let e = projection
                .iter()
                .map(|row| row.iter().zip(&norm.values).map(|(w, v)| w * v).sum())
                .collect();
            table.insert(id.clone(), e)?;
        }
    }
    let path = std::env::temp_dir().join("pupguard-embeddings.txt");
    table.write(&path)?;
    println!("{} embeddings of dimension {DIM} written to {}", table.len(), path.display());

    let cfg = PipelineConfig {
        extractor: ExtractorKind::Embedding,
        embedding_file: Some(path),
        cross_offset: 1.0,
        ..PipelineConfig::default()
    };
    println!("{}", run_pipeline(&train, &test, &cfg)?);
    Ok(())
}

//! Image descriptors (LBP, HOG, external embeddings), PCA and pair vectors.

pub mod eigen;
mod embedding;
mod hog;
mod lbp;
mod pca;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use self::embedding::{load_embeddings, parse_embeddings, EmbeddingTable};
pub use self::hog::{
    cell_histograms, hog_descriptor, magnitude_orientation, sobel_gradients, GradientField,
    HogParams, BLOCK_EPSILON,
};
pub use self::lbp::{lbp_code, lbp_grid_histogram, lbp_histogram, LBP_BINS, NEIGHBOR_OFFSETS};
pub use self::pca::{effective_k, pca_fit, PcaModel};
use crate::dataset::{GrayImage, PressPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Lbp,
    Hog,
    Embedding,
    Pca,
    Fused,
}

/// Fixed-length real vector with every entry finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    provenance: Provenance,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "feature entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(FeatureVector { values, provenance })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which per-image descriptor to compute.
#[derive(Debug, Clone)]
pub enum Extractor {
    /// `grid x grid` regional LBP histograms (1 = one global histogram).
    Lbp { grid: usize },
    Hog(HogParams),
    Embedding(Arc<EmbeddingTable>),
}

impl Extractor {
    pub fn lbp() -> Self {
        Extractor::Lbp { grid: 1 }
    }

    pub fn image_features(&self, img: &GrayImage, image_id: &str) -> Result<FeatureVector> {
        match self {
            Extractor::Lbp { grid } => lbp_grid_histogram(img, *grid),
            Extractor::Hog(params) => hog_descriptor(img, params),
            Extractor::Embedding(table) => table.lookup(image_id),
        }
    }
}

/// Concatenates the first-press and second-press descriptors, in press
/// order, then projects with `pca` when given.
pub fn pair_features(
    pair: &PressPair,
    extractor: &Extractor,
    pca: Option<&PcaModel>,
) -> Result<FeatureVector> {
    pair_features_from(&pair.first, &pair.first_id, &pair.second, &pair.second_id, extractor, pca)
}

pub fn pair_features_from(
    first: &GrayImage,
    first_id: &str,
    second: &GrayImage,
    second_id: &str,
    extractor: &Extractor,
    pca: Option<&PcaModel>,
) -> Result<FeatureVector> {
    let a = extractor.image_features(first, first_id)?;
    let b = extractor.image_features(second, second_id)?;
    let provenance = a.provenance();
    let mut values = a.into_values();
    values.extend(b.into_values());
    let joined = FeatureVector::new(values, provenance)?;
    match pca {
        Some(model) => model.transform(&joined),
        None => Ok(joined),
    }
}

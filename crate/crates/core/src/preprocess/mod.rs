//! Image segmentation, geometric normalization and timing standardization.

mod otsu;
mod resize;
mod timing;

use serde::{Deserialize, Serialize};

pub use self::otsu::{
    binarize, histogram, otsu_from_histogram, otsu_threshold, segment, OtsuStats, Polarity,
    Segmented, GRAY_LEVELS,
};
pub use self::resize::{prepro2, NormalizedImage, Prepro2Params};
pub use self::timing::TimingStandardizer;

use crate::dataset::GrayImage;

/// How images are cleaned up before texture extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prepro1 {
    pub segment: bool,
    pub polarity: Polarity,
    pub binarize: bool,
}

impl Default for Prepro1 {
    fn default() -> Self {
        Prepro1 {
            segment: true,
            polarity: Polarity::DarkForeground,
            binarize: false,
        }
    }
}

impl Prepro1 {
    pub fn apply(&self, img: &GrayImage) -> GrayImage {
        if !self.segment || img.pixels().is_empty() {
            return img.clone();
        }
        let stats = otsu_from_histogram(histogram(img));
        let out = if self.binarize {
            binarize(img, &stats, self.polarity)
        } else {
            segment(img, &stats, self.polarity)
        };
        if out.unchanged {
            log::warn!("degenerate Otsu statistics; image left unsegmented");
        }
        out.image
    }
}

use serde::{Deserialize, Serialize};

use crate::dataset::GrayImage;
use crate::error::{Error, Result};

pub const GRAY_LEVELS: usize = 256;

/// Histogram statistics and the optimal threshold for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtsuStats {
    pub histogram: Vec<u64>,
    pub total: u64,
    pub global_mean: f64,
    /// Pixels `<= best_k` form the first class.
    pub best_k: u8,
    pub best_variance: f64,
    /// Only one gray level present; no threshold separates anything.
    pub degenerate: bool,
}

impl OtsuStats {
    /// Between-class variance for every threshold `k` in `0..=255`.
    pub fn variance_curve(&self) -> Vec<f64> {
        between_class_curve(&self.histogram, self.total)
    }
}

pub fn histogram(img: &GrayImage) -> Vec<u64> {
    let mut hist = vec![0u64; GRAY_LEVELS];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    hist
}

// sigma_B^2(k) = (m * P1 - mu(k))^2 / (P1 * (1 - P1)), zero when a class is empty.
fn between_class_curve(hist: &[u64], total: u64) -> Vec<f64> {
    let n = total as f64;
    let mean: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum::<f64>()
        / n;
    let mut cum_count = 0u64;
    let mut cum_moment = 0u64;
    hist.iter()
        .enumerate()
        .map(|(i, &c)| {
            cum_count += c;
            cum_moment += i as u64 * c;
            if cum_count == 0 || cum_count == total {
                return 0.0;
            }
            let p1 = cum_count as f64 / n;
            let mu = cum_moment as f64 / n;
            let num = mean * p1 - mu;
            num * num / (p1 * (1.0 - p1))
        })
        .collect()
}

/// Otsu's threshold: the smallest `k` maximizing the between-class variance.
pub fn otsu_threshold(img: &GrayImage) -> Result<OtsuStats> {
    if img.pixels().is_empty() {
        return Err(Error::domain("Otsu threshold of an empty image"));
    }
    let hist = histogram(img);
    Ok(otsu_from_histogram(hist))
}

pub fn otsu_from_histogram(hist: Vec<u64>) -> OtsuStats {
    assert_eq!(hist.len(), GRAY_LEVELS, "histogram must have 256 bins");
    let total: u64 = hist.iter().sum();
    let global_mean = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum::<f64>()
        / total as f64;

    let occupied: Vec<usize> = (0..GRAY_LEVELS).filter(|&i| hist[i] > 0).collect();
    if occupied.len() == 1 {
        return OtsuStats {
            histogram: hist,
            total,
            global_mean,
            best_k: occupied[0] as u8,
            best_variance: 0.0,
            degenerate: true,
        };
    }

    let curve = between_class_curve(&hist, total);
    let mut best_k = 0usize;
    let mut best = curve[0];
    for (k, &v) in curve.iter().enumerate().take(GRAY_LEVELS - 1).skip(1) {
        if v > best {
            best = v;
            best_k = k;
        }
    }
    OtsuStats {
        histogram: hist,
        total,
        global_mean,
        best_k: best_k as u8,
        best_variance: best,
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Ridges are dark: foreground is `intensity <= k`.
    #[default]
    DarkForeground,
    LightForeground,
}

impl Polarity {
    fn is_foreground(self, value: u8, k: u8) -> bool {
        match self {
            Polarity::DarkForeground => value <= k,
            Polarity::LightForeground => value > k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmented {
    pub image: GrayImage,
    /// Set when the statistics were degenerate and the image passed through untouched.
    pub unchanged: bool,
}

/// Masks the background to white; foreground pixels keep their intensity.
pub fn segment(img: &GrayImage, stats: &OtsuStats, polarity: Polarity) -> Segmented {
    if stats.degenerate {
        return Segmented {
            image: img.clone(),
            unchanged: true,
        };
    }
    let k = stats.best_k;
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| if polarity.is_foreground(p, k) { p } else { 255 })
        .collect();
    Segmented {
        image: GrayImage::new(img.width(), img.height(), pixels).expect("same shape"),
        unchanged: false,
    }
}

/// Hard two-level output: foreground 0, background 255.
pub fn binarize(img: &GrayImage, stats: &OtsuStats, polarity: Polarity) -> Segmented {
    if stats.degenerate {
        return Segmented {
            image: img.clone(),
            unchanged: true,
        };
    }
    let k = stats.best_k;
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| if polarity.is_foreground(p, k) { 0 } else { 255 })
        .collect();
    Segmented {
        image: GrayImage::new(img.width(), img.height(), pixels).expect("same shape"),
        unchanged: false,
    }
}

//! Feature-level fusion of the image vector with the standardized interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionScheme {
    Concat,
    Cross,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusedSample {
    pub values: FeatureVector,
    pub scheme: FusionScheme,
    pub source_pair_id: String,
}

fn check_timing(t_star: f64) -> Result<()> {
    if !t_star.is_finite() {
        return Err(Error::domain(format!("timing value {t_star} is not finite")));
    }
    Ok(())
}

/// Appends `t_star` as the last coordinate.
pub fn fuse_concat(img: &FeatureVector, t_star: f64, pair_id: &str) -> Result<FusedSample> {
    check_timing(t_star)?;
    let mut values = Vec::with_capacity(img.len() + 1);
    values.extend_from_slice(img.values());
    values.push(t_star);
    Ok(FusedSample {
        values: FeatureVector::new(values, Provenance::Fused)?,
        scheme: FusionScheme::Concat,
        source_pair_id: pair_id.to_string(),
    })
}

/// Multiplies every image coordinate by `t_star + offset`.
pub fn fuse_cross(
    img: &FeatureVector,
    t_star: f64,
    offset: f64,
    pair_id: &str,
) -> Result<FusedSample> {
    check_timing(t_star)?;
    check_timing(offset)?;
    let factor = t_star + offset;
    Ok(FusedSample {
        values: FeatureVector::new(
            img.values().iter().map(|v| v * factor).collect(),
            Provenance::Fused,
        )?,
        scheme: FusionScheme::Cross,
        source_pair_id: pair_id.to_string(),
    })
}

/// Per-dimension z-scoring fitted on training vectors. Dimensions with zero
/// training spread are only centred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Fit("scaler needs at least one sample".into()))?;
        let d = first.len();
        let n = samples.len() as f64;
        let mut mean = vec![0.0; d];
        for s in samples {
            if s.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: s.len(),
                });
            }
            mean.iter_mut().zip(s).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for s in samples {
            for ((acc, v), m) in var.iter_mut().zip(s).zip(&mean) {
                *acc += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let sd = (v / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(FeatureScaler { mean, scale })
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::Dimension {
                expected: self.mean.len(),
                got: x.len(),
            });
        }
        Ok(x
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

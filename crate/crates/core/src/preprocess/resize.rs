use serde::{Deserialize, Serialize};

use crate::dataset::GrayImage;
use crate::error::{Error, Result};

/// Row-major real-valued image produced by [`prepro2`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedImage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

/// Geometry and normalization constants for the resize/crop/normalize stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prepro2Params {
    pub resize_to: usize,
    pub crop_to: usize,
    pub mean: f64,
    pub std: f64,
}

impl Default for Prepro2Params {
    fn default() -> Self {
        Prepro2Params {
            resize_to: 224,
            crop_to: 224,
            mean: 0.485,
            std: 0.229,
        }
    }
}

// Half-pixel-centre bilinear sampling with edge clamping.
fn bilinear_resize(img: &GrayImage, out_w: usize, out_h: usize) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let sx = w as f64 / out_w as f64;
    let sy = h as f64 / out_h as f64;
    let mut out = Vec::with_capacity(out_w * out_h);
    for oy in 0..out_h {
        let fy = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, (h - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(h - 1);
        let wy = fy - y0 as f64;
        for ox in 0..out_w {
            let fx = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, (w - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let wx = fx - x0 as f64;
            let p = |x, y| f64::from(img.get(x, y));
            let top = p(x0, y0) * (1.0 - wx) + p(x1, y0) * wx;
            let bottom = p(x0, y1) * (1.0 - wx) + p(x1, y1) * wx;
            out.push(top * (1.0 - wy) + bottom * wy);
        }
    }
    out
}

/// Bilinear resize to `resize_to` squared, centre crop to `crop_to` squared,
/// scale to `[0, 1]`, then `(v - mean) / std`.
pub fn prepro2(img: &GrayImage, params: &Prepro2Params) -> Result<NormalizedImage> {
    let Prepro2Params {
        resize_to,
        crop_to,
        mean,
        std,
    } = *params;
    if crop_to > resize_to {
        return Err(Error::domain(format!(
            "crop {crop_to} larger than resize {resize_to}"
        )));
    }
    if crop_to == 0 {
        return Err(Error::domain("crop size must be positive"));
    }
    if !(std > 0.0) {
        return Err(Error::domain(format!("normalization std {std} must be > 0")));
    }
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::domain("cannot resize an empty image"));
    }
    let resized = bilinear_resize(img, resize_to, resize_to);
    let off = (resize_to - crop_to) / 2;
    let mut values = Vec::with_capacity(crop_to * crop_to);
    for y in off..off + crop_to {
        for x in off..off + crop_to {
            values.push((resized[y * resize_to + x] / 255.0 - mean) / std);
        }
    }
    Ok(NormalizedImage {
        width: crop_to,
        height: crop_to,
        values,
    })
}

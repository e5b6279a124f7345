use serde::{Deserialize, Serialize};

use crate::dataset::GrayImage;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, Provenance};

pub const BLOCK_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HogParams {
    /// Cell side in pixels.
    pub cell: usize,
    /// Block side in cells.
    pub block: usize,
    /// Block stride in cells.
    pub stride: usize,
    /// Orientation bins over `[0, 180)` degrees.
    pub bins: usize,
}

impl Default for HogParams {
    fn default() -> Self {
        HogParams {
            cell: 8,
            block: 2,
            stride: 1,
            bins: 9,
        }
    }
}

impl HogParams {
    fn validate(&self) -> Result<()> {
        if self.cell == 0 || self.block == 0 || self.stride == 0 || self.bins == 0 {
            return Err(Error::domain("HOG cell, block, stride and bins must be positive"));
        }
        Ok(())
    }

    /// `(cells_x, cells_y, blocks_x, blocks_y)` for an image of the given size.
    pub fn layout(&self, width: usize, height: usize) -> Result<(usize, usize, usize, usize)> {
        self.validate()?;
        if !width.is_multiple_of(self.cell) || !height.is_multiple_of(self.cell) {
            return Err(Error::domain(format!(
                "{width}x{height} image is not divisible into {}-pixel cells",
                self.cell
            )));
        }
        let (cx, cy) = (width / self.cell, height / self.cell);
        if cx < self.block || cy < self.block {
            return Err(Error::domain(format!(
                "{cx}x{cy} cells cannot hold a {}-cell block",
                self.block
            )));
        }
        let bx = (cx - self.block) / self.stride + 1;
        let by = (cy - self.block) / self.stride + 1;
        Ok((cx, cy, bx, by))
    }

    pub fn descriptor_len(&self, width: usize, height: usize) -> Result<usize> {
        let (_, _, bx, by) = self.layout(width, height)?;
        Ok(bx * by * self.block * self.block * self.bins)
    }
}

/// Per-pixel Sobel gradients with replicated borders.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// Unsigned orientation in degrees, folded into `[0, 180)`.
    pub orientation: Vec<f64>,
}

/// Magnitude and unsigned orientation (degrees in `[0, 180)`) of one gradient.
pub fn magnitude_orientation(gx: f64, gy: f64) -> (f64, f64) {
    let mag = (gx * gx + gy * gy).sqrt();
    let mut deg = gy.atan2(gx).to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    (mag, deg)
}

pub fn sobel_gradients(img: &GrayImage) -> GradientField {
    let (w, h) = (img.width(), img.height());
    let px = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        f64::from(img.get(cx, cy))
    };
    let n = w * h;
    let mut field = GradientField {
        width: w,
        height: h,
        gx: Vec::with_capacity(n),
        gy: Vec::with_capacity(n),
        magnitude: Vec::with_capacity(n),
        orientation: Vec::with_capacity(n),
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            let gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            let (mag, deg) = magnitude_orientation(gx, gy);
            field.gx.push(gx);
            field.gy.push(gy);
            field.magnitude.push(mag);
            field.orientation.push(deg);
        }
    }
    field
}

/// Raw per-cell orientation histograms (`cells_y x cells_x x bins`, row-major).
/// Each pixel's magnitude is split linearly between the two nearest bin
/// centres, wrapping around at 180 degrees.
pub fn cell_histograms(field: &GradientField, params: &HogParams) -> Result<Vec<f64>> {
    let (cx, _cy, _, _) = params.layout(field.width, field.height)?;
    let cy = field.height / params.cell;
    let bins = params.bins;
    let bin_width = 180.0 / bins as f64;
    let mut hist = vec![0.0; cx * cy * bins];
    for y in 0..field.height {
        for x in 0..field.width {
            let i = y * field.width + x;
            let mag = field.magnitude[i];
            if mag == 0.0 {
                continue;
            }
            let pos = field.orientation[i] / bin_width - 0.5;
            let lower = pos.floor();
            let frac = pos - lower;
            let b0 = (lower as isize).rem_euclid(bins as isize) as usize;
            let b1 = (b0 + 1) % bins;
            let cell = (y / params.cell) * cx + x / params.cell;
            hist[cell * bins + b0] += mag * (1.0 - frac);
            hist[cell * bins + b1] += mag * frac;
        }
    }
    Ok(hist)
}

/// HOG descriptor: Sobel gradients, per-cell interpolated histograms, blocks
/// L2-normalized with `v / sqrt(|v|^2 + eps^2)`, concatenated in row-major
/// block order.
pub fn hog_descriptor(img: &GrayImage, params: &HogParams) -> Result<FeatureVector> {
    let (cx, _, bx, by) = params.layout(img.width(), img.height())?;
    let field = sobel_gradients(img);
    let hist = cell_histograms(&field, params)?;
    let bins = params.bins;
    let block_len = params.block * params.block * bins;
    let mut out = Vec::with_capacity(bx * by * block_len);
    let mut block = Vec::with_capacity(block_len);
    for byi in 0..by {
        for bxi in 0..bx {
            block.clear();
            for dy in 0..params.block {
                for dx in 0..params.block {
                    let cell = (byi * params.stride + dy) * cx + bxi * params.stride + dx;
                    block.extend_from_slice(&hist[cell * bins..(cell + 1) * bins]);
                }
            }
            let norm = (block.iter().map(|v| v * v).sum::<f64>() + BLOCK_EPSILON * BLOCK_EPSILON).sqrt();
            out.extend(block.iter().map(|v| v / norm));
        }
    }
    FeatureVector::new(out, Provenance::Hog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let (mag, deg) = magnitude_orientation(3.0, 4.0);
        assert_eq!(mag, 5.0);
        assert!((deg - 53.130_102_354_155_98).abs() < 1e-9);
        assert_eq!(magnitude_orientation(-1.0, 0.0).1, 0.0);
        assert_eq!(magnitude_orientation(0.0, -1.0).1, 90.0);
    }

    #[test]
    fn canonical_length() {
        let p = HogParams::default();
        assert_eq!(p.descriptor_len(160, 160).unwrap(), 12_996);
        let img = GrayImage::from_fn(160, 160, |x, y| ((x * x + y) % 256) as u8);
        assert_eq!(hog_descriptor(&img, &p).unwrap().len(), 12_996);
    }

    #[test]
    fn constant_image_is_zero() {
        let d = hog_descriptor(&GrayImage::filled(32, 32, 77), &HogParams::default()).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn indivisible_rejected() {
        assert!(hog_descriptor(&GrayImage::filled(30, 32, 0), &HogParams::default()).is_err());
    }

    #[test]
    fn vertical_edge_orientation() {
        // intensity increases left to right: gradient points along +x, orientation 0
        let img = GrayImage::from_fn(16, 16, |x, _| if x < 8 { 0 } else { 100 });
        let field = sobel_gradients(&img);
        let i = 5 * 16 + 8;
        assert_eq!(field.gy[i], 0.0);
        assert_eq!(field.gx[i], 400.0);
        assert_eq!(field.orientation[i], 0.0);
        let hist = cell_histograms(&field, &HogParams::default()).unwrap();
        // orientation 0 splits evenly between the first and last bins
        let cell = &hist[9..18];
        assert!((cell[0] - cell[8]).abs() < 1e-9);
        assert!(cell[1..8].iter().all(|&v| v == 0.0));
    }
}

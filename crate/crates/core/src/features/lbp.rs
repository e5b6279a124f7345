use crate::dataset::GrayImage;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, Provenance};

pub const LBP_BINS: usize = 256;

/// Neighbour offsets `(dx, dy)` starting right of the centre and moving clockwise
/// (y grows downwards). Neighbour `i` sets bit `7 - i`.
pub const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// LBP code of the centre of a 3x3 patch indexed `patch[row][col]`.
/// A neighbour equal to the centre contributes a 1 bit.
pub fn lbp_code(patch: &[[u8; 3]; 3]) -> u8 {
    let center = patch[1][1];
    NEIGHBOR_OFFSETS
        .iter()
        .enumerate()
        .fold(0u8, |code, (i, &(dx, dy))| {
            let q = patch[(1 + dy) as usize][(1 + dx) as usize];
            code | (u8::from(q >= center) << (7 - i))
        })
}

#[inline]
fn code_at(img: &GrayImage, x: usize, y: usize) -> u8 {
    let center = img.get(x, y);
    let mut code = 0u8;
    for (i, &(dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        let q = img.get((x as isize + dx) as usize, (y as isize + dy) as usize);
        code |= u8::from(q >= center) << (7 - i);
    }
    code
}

fn check_size(img: &GrayImage) -> Result<()> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::domain(format!(
            "LBP needs at least 3x3 pixels, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    Ok(())
}

/// Global 256-bin histogram of interior-pixel codes, L1-normalized.
pub fn lbp_histogram(img: &GrayImage) -> Result<FeatureVector> {
    lbp_grid_histogram(img, 1)
}

/// Splits the interior into `grid x grid` regions and concatenates one
/// L1-normalized histogram per region (row-major region order).
pub fn lbp_grid_histogram(img: &GrayImage, grid: usize) -> Result<FeatureVector> {
    check_size(img)?;
    let iw = img.width() - 2;
    let ih = img.height() - 2;
    if grid == 0 || grid > iw || grid > ih {
        return Err(Error::domain(format!(
            "LBP grid {grid} does not fit a {iw}x{ih} interior"
        )));
    }
    let mut counts = vec![0u64; grid * grid * LBP_BINS];
    for y in 1..=ih {
        let gy = (y - 1) * grid / ih;
        for x in 1..=iw {
            let gx = (x - 1) * grid / iw;
            let code = code_at(img, x, y) as usize;
            counts[(gy * grid + gx) * LBP_BINS + code] += 1;
        }
    }
    let mut values = vec![0.0; counts.len()];
    for (region, out) in counts.chunks(LBP_BINS).zip(values.chunks_mut(LBP_BINS)) {
        let total: u64 = region.iter().sum();
        for (o, &c) in out.iter_mut().zip(region) {
            *o = c as f64 / total as f64;
        }
    }
    FeatureVector::new(values, Provenance::Lbp)
}

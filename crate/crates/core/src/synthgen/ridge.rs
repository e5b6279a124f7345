//! Oriented-sinusoid ridge images under a soft elliptical press mask.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{GrayImage, CANONICAL_SIDE};
use crate::synthgen::SubjectProfile;

/// Horizontal and vertical semi-axes of the contact region at unit pressure.
const MASK_SEMI_AXES: (f64, f64) = (36.0, 46.0);
/// Darkness added by a valley and by a full ridge at unit pressure.
const VALLEY_DARKNESS: f64 = 40.0;
const RIDGE_DARKNESS: f64 = 160.0;
/// Sensor noise inside the contact region, as a fraction of full scale.
const NOISE_FRACTION: f64 = 0.05;

/// Physical parameters of one press.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Press {
    /// Relative force in `(0, 2]`; 1 is the subject's habit.
    pub pressure: f64,
    /// Contact centre offset from the image centre, pixels.
    pub center_offset: (f64, f64),
    pub rotation_deg: f64,
    /// Motion-smear length in pixels (0 disables).
    pub smear_px: u32,
    pub smear_angle_deg: f64,
    /// Which of the subject's fingers (0 or 1).
    pub finger: usize,
}

impl Default for Press {
    fn default() -> Self {
        Press {
            pressure: 1.0,
            center_offset: (0.0, 0.0),
            rotation_deg: 0.0,
            smear_px: 0,
            smear_angle_deg: 0.0,
            finger: 0,
        }
    }
}

/// Smooth orientation field and frequency of one finger.
#[derive(Debug, Clone, Copy)]
struct FingerPattern {
    base_angle: f64,
    coeffs: [f64; 4],
    frequency: f64,
    phase: f64,
}

impl FingerPattern {
    fn new(profile: &SubjectProfile, finger: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(profile.ridge_orientation_field_seed);
        rng.set_stream(finger as u64 + 1);
        let base_angle = rng.random_range(0.0..std::f64::consts::PI);
        let mut coeffs = [0.0; 4];
        for c in coeffs.iter_mut() {
            *c = rng.random_range(-0.6..0.6);
        }
        FingerPattern {
            base_angle,
            coeffs,
            frequency: profile.ridge_frequency * rng.random_range(0.92..1.08),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }

    /// Ridge signal in `[-1, 1]` at finger-frame coordinates.
    fn signal(&self, u: f64, v: f64) -> f64 {
        let (a, b) = (u / 80.0, v / 80.0);
        let [c0, c1, c2, c3] = self.coeffs;
        let theta = self.base_angle + c0 * a + c1 * b + c2 * a * b + c3 * (a * a - b * b);
        let along = u * theta.cos() + v * theta.sin();
        (std::f64::consts::TAU * self.frequency * along + self.phase).sin()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Renders one 160x160 press. Higher pressure widens the contact area,
/// thickens ridges and darkens the image; the result depends only on the
/// arguments.
pub fn gen_fingerprint_image(profile: &SubjectProfile, press: &Press, rng_seed: u64) -> GrayImage {
    let side = CANONICAL_SIDE;
    let pattern = FingerPattern::new(profile, press.finger);
    let pressure = press.pressure;
    let (ax, ay) = (
        MASK_SEMI_AXES.0 * pressure.sqrt(),
        MASK_SEMI_AXES.1 * pressure.sqrt(),
    );
    let centre = (
        side as f64 / 2.0 + press.center_offset.0,
        side as f64 / 2.0 + press.center_offset.1,
    );
    let (sin_r, cos_r) = press.rotation_deg.to_radians().sin_cos();
    let ridge_cut = 0.3 - 0.6 * (pressure - 1.0);
    let contrast = profile.base_pressure * pressure;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let noise = Normal::new(0.0, NOISE_FRACTION * 255.0).expect("valid noise sigma");

    let mut values = Vec::with_capacity(side * side);
    for py in 0..side {
        for px in 0..side {
            let n = noise.sample(&mut rng);
            let rx = px as f64 + 0.5 - centre.0;
            let ry = py as f64 + 0.5 - centre.1;
            // rotate the pixel into the finger frame
            let u = cos_r * rx + sin_r * ry;
            let v = -sin_r * rx + cos_r * ry;
            let rho = ((u / ax).powi(2) + (v / ay).powi(2)).sqrt();
            let mask = sigmoid((1.0 - rho) * ax / 2.0);
            let ridge = sigmoid(5.0 * (pattern.signal(u, v) - ridge_cut));
            let darkness = contrast * (VALLEY_DARKNESS + RIDGE_DARKNESS * ridge);
            values.push(255.0 - mask * (darkness + n));
        }
    }
    if press.smear_px > 0 {
        values = smear(&values, side, press.smear_px, press.smear_angle_deg);
    }
    GrayImage::from_fn(side, side, |x, y| values[y * side + x].round().clamp(0.0, 255.0) as u8)
}

/// Box blur along a direction over `length + 1` taps, clamped at the border.
fn smear(values: &[f64], side: usize, length: u32, angle_deg: f64) -> Vec<f64> {
    let (dy, dx) = angle_deg.to_radians().sin_cos();
    let taps = length as usize + 1;
    let mut out = vec![0.0; values.len()];
    for y in 0..side {
        for x in 0..side {
            let mut acc = 0.0;
            for t in 0..taps {
                let sx = (x as f64 - t as f64 * dx).round().clamp(0.0, (side - 1) as f64) as usize;
                let sy = (y as f64 - t as f64 * dy).round().clamp(0.0, (side - 1) as f64) as usize;
                acc += values[sy * side + sx];
            }
            out[y * side + x] = acc / taps as f64;
        }
    }
    out
}

/// Centroid `(x, y)` of the darkness `255 - pixel`.
pub fn darkness_centroid(img: &GrayImage) -> (f64, f64) {
    let (mut sx, mut sy, mut total) = (0.0, 0.0, 0.0);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let w = f64::from(255 - img.get(x, y));
            sx += w * (x as f64 + 0.5);
            sy += w * (y as f64 + 0.5);
            total += w;
        }
    }
    if total == 0.0 {
        return (img.width() as f64 / 2.0, img.height() as f64 / 2.0);
    }
    (sx / total, sy / total)
}

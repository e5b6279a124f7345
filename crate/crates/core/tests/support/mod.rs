//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use pupguard::classify::{rbf, OcSvmModel};
use pupguard::dataset::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let pixels = (0..w * h).map(|_| rng.random::<u8>()).collect();
    GrayImage::new(w, h, pixels).unwrap()
}

/// Between-class variance of threshold `k` in the direct two-class form
/// `P1 P2 (m1 - m2)^2`.
pub fn between_class_direct(hist: &[u64], k: usize) -> f64 {
    let total: u64 = hist.iter().sum();
    let (mut n1, mut s1, mut n2, mut s2) = (0u64, 0f64, 0u64, 0f64);
    for (i, &c) in hist.iter().enumerate() {
        if i <= k {
            n1 += c;
            s1 += i as f64 * c as f64;
        } else {
            n2 += c;
            s2 += i as f64 * c as f64;
        }
    }
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let (p1, p2) = (n1 as f64 / total as f64, n2 as f64 / total as f64);
    let (m1, m2) = (s1 / n1 as f64, s2 / n2 as f64);
    p1 * p2 * (m1 - m2) * (m1 - m2)
}

/// Exhaustive argmax over all 255 thresholds, smallest `k` among values
/// equal up to a relative `1e-12`.
pub fn otsu_brute_force(img: &GrayImage) -> (usize, f64) {
    let mut hist = vec![0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let curve: Vec<f64> = (0..255).map(|k| between_class_direct(&hist, k)).collect();
    let max = curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let k = curve
        .iter()
        .position(|&v| v >= max - 1e-12 * max.abs())
        .unwrap();
    (k, curve[k])
}

/// Per-pixel LBP with neighbours listed by position in the 3x3 window:
/// weights 128 at east, then clockwise.
pub fn naive_lbp_histogram(img: &GrayImage) -> Vec<f64> {
    let weights = [
        // (row offset, col offset, weight)
        (0i32, 1i32, 128u32),
        (1, 1, 64),
        (1, 0, 32),
        (1, -1, 16),
        (0, -1, 8),
        (-1, -1, 4),
        (-1, 0, 2),
        (-1, 1, 1),
    ];
    let mut hist = vec![0.0; 256];
    let mut count = 0.0;
    for y in 1..img.height() - 1 {
        for x in 1..img.width() - 1 {
            let c = img.get(x, y);
            let mut code = 0;
            for &(dr, dc, w) in &weights {
                let q = img.get((x as i32 + dc) as usize, (y as i32 + dr) as usize);
                if q >= c {
                    code += w;
                }
            }
            hist[code as usize] += 1.0;
            count += 1.0;
        }
    }
    hist.iter().map(|h| h / count).collect()
}

/// Dense covariance (n - 1 divisor) eigenvalues, descending.
pub fn covariance_eigenvalues(x: &[Vec<f64>]) -> Vec<f64> {
    let n = x.len();
    let d = x[0].len();
    let m = DMatrix::from_fn(n, d, |i, j| x[i][j]);
    let mean = m.row_mean();
    let mut centred = m.clone();
    for mut row in centred.row_iter_mut() {
        row -= &mean;
    }
    let cov = centred.transpose() * &centred / (n as f64 - 1.0);
    let mut values: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().cloned().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values
}

/// Worst violation of the dual constraints and optimality conditions of a
/// fitted one-class SVM, measured on the full training set.
pub struct KktReport {
    pub sum_residual: f64,
    pub box_residual: f64,
    pub stationarity: f64,
}

pub fn kkt_report(model: &OcSvmModel, x: &[Vec<f64>]) -> KktReport {
    let n = x.len();
    let c = 1.0 / (model.nu * n as f64);
    let mut alpha = vec![0.0; n];
    for (&i, &a) in model.support_indices.iter().zip(&model.alphas) {
        alpha[i] = a;
    }
    let sum_residual = (alpha.iter().sum::<f64>() - 1.0).abs();
    let box_residual = alpha
        .iter()
        .map(|&a| (-a).max(a - c).max(0.0))
        .fold(0.0, f64::max);
    let scale = c * 1e-9;
    let mut stationarity: f64 = 0.0;
    for i in 0..n {
        let g: f64 = (0..n)
            .filter(|&j| alpha[j] > 0.0)
            .map(|j| alpha[j] * rbf(&x[j], &x[i], model.gamma))
            .sum();
        let r = g - model.rho;
        let v = if alpha[i] <= scale {
            (-r).max(0.0)
        } else if alpha[i] >= c - scale {
            r.max(0.0)
        } else {
            r.abs()
        };
        stationarity = stationarity.max(v);
    }
    KktReport {
        sum_residual,
        box_residual,
        stationarity,
    }
}

/// Standard-normal draws by Box-Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

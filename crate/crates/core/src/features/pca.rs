use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::eigen::symmetric_eigen;
use crate::features::{FeatureVector, Provenance};

/// Relative eigenvalue floor below which a direction counts as absent.
const RANK_TOL: f64 = 1e-12;

/// Principal axes of a training matrix.
///
/// Variances use the unbiased `n - 1` divisor, so projecting the training
/// samples onto `components[i]` gives a sample variance of
/// `explained_variance[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    /// The data had fewer than `k` non-trivial directions; trailing
    /// components complete the basis and carry zero variance.
    pub rank_deficient: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orient(component: &mut [f64]) {
    let mut best = 0usize;
    for (i, v) in component.iter().enumerate() {
        if v.abs() > component[best].abs() {
            best = i;
        }
    }
    if component[best] < 0.0 {
        component.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Extends `basis` with unit vectors orthogonal to it until it holds `k` vectors.
fn complete_basis(basis: &mut Vec<Vec<f64>>, d: usize, k: usize) {
    let mut axis = 0;
    while basis.len() < k && axis < d {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        axis += 1;
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
}

/// Fits the top-`k` principal components of `samples` (`n x d`).
///
/// Eigendecomposes the `d x d` covariance when `d <= n` and the `n x n`
/// Gram matrix of the centred data otherwise.
pub fn pca_fit(samples: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain(format!("PCA needs at least 2 samples, got {n}")));
    }
    let d = samples[0].len();
    if let Some(bad) = samples.iter().find(|s| s.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            got: bad.len(),
        });
    }
    if k == 0 || k > (n - 1).min(d) {
        return Err(Error::domain(format!(
            "PCA k = {k} outside 1..={} for {n} samples of dimension {d}",
            (n - 1).min(d)
        )));
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("PCA input contains non-finite values"));
    }

    let mut mean = vec![0.0; d];
    for s in samples {
        mean.iter_mut().zip(s).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centred: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();
    let denom = (n - 1) as f64;

    let (mut values, mut components) = if d <= n {
        let mut cov = vec![0.0; d * d];
        for row in &centred {
            for i in 0..d {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..d {
                    cov[i * d + j] += ri * row[j];
                }
            }
        }
        for i in 0..d {
            for j in i..d {
                let v = cov[i * d + j] / denom;
                cov[i * d + j] = v;
                cov[j * d + i] = v;
            }
        }
        let eig = symmetric_eigen(&cov, d);
        (
            eig.values[..k].to_vec(),
            eig.vectors.into_iter().take(k).collect::<Vec<_>>(),
        )
    } else {
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let g = dot(&centred[i], &centred[j]);
                gram[i * n + j] = g;
                gram[j * n + i] = g;
            }
        }
        let eig = symmetric_eigen(&gram, n);
        let mut values = Vec::with_capacity(k);
        let mut comps = Vec::with_capacity(k);
        for (lambda, u) in eig.values.iter().zip(&eig.vectors).take(k) {
            let mut v = vec![0.0; d];
            for (ui, row) in u.iter().zip(&centred) {
                v.iter_mut().zip(row).for_each(|(x, r)| *x += ui * r);
            }
            let norm = dot(&v, &v).sqrt();
            if !(*lambda > 0.0) || norm == 0.0 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            values.push(lambda / denom);
            comps.push(v);
        }
        (values, comps)
    };

    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let keep = values
        .iter()
        .take_while(|&&v| v > RANK_TOL * top.max(f64::MIN_POSITIVE))
        .count();
    let rank_deficient = keep < k;
    values.truncate(keep);
    components.truncate(keep);
    complete_basis(&mut components, d, k);
    values.resize(k, 0.0);
    for c in components.iter_mut() {
        orient(c);
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance: values,
        rank_deficient,
    })
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn transform_slice(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::Dimension {
                expected: self.mean.len(),
                got: x.len(),
            });
        }
        let centred: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok(self.components.iter().map(|c| dot(c, &centred)).collect())
    }

    /// `components^T (x - mean)`.
    pub fn transform(&self, x: &FeatureVector) -> Result<FeatureVector> {
        FeatureVector::new(self.transform_slice(x.values())?, Provenance::Pca)
    }

    pub fn inverse_transform(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.components.len() {
            return Err(Error::Dimension {
                expected: self.components.len(),
                got: z.len(),
            });
        }
        let mut out = self.mean.clone();
        for (zi, c) in z.iter().zip(&self.components) {
            out.iter_mut().zip(c).for_each(|(o, v)| *o += zi * v);
        }
        Ok(out)
    }
}

/// `min(requested, n - 1, d)`.
pub fn effective_k(requested: usize, n: usize, d: usize) -> usize {
    requested.min(n.saturating_sub(1)).min(d)
}

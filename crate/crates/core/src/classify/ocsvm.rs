//! One-class SVM with an RBF kernel, solved in the dual by pairwise
//! coordinate updates on the maximal KKT-violating pair.
//!
//! The dual is
//!
//! ```text
//! min  1/2 a^T Q a     s.t.  0 <= a_i <= 1/(nu n),  sum a_i = 1,
//! Q_ij = exp(-gamma |x_i - x_j|^2)
//! ```
//!
//! and the decision function is `f(x) = sum a_i K(x_i, x) - rho`, with
//! `f(x) >= 0` meaning normal.

use serde::{Deserialize, Serialize};

use crate::classify::check_matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    /// `1 / (d * mean per-dimension variance)`.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcSvmParams {
    pub nu: f64,
    pub gamma: Gamma,
    pub tol: f64,
    /// Defaults to `10_000 * n`.
    pub max_iter: Option<usize>,
}

impl Default for OcSvmParams {
    fn default() -> Self {
        OcSvmParams {
            nu: 0.1,
            gamma: Gamma::Auto,
            tol: 1e-6,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcSvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// Row index of each support vector in the training matrix.
    pub support_indices: Vec<usize>,
    pub alphas: Vec<f64>,
    pub rho: f64,
    pub gamma: f64,
    pub nu: f64,
    pub n_train: usize,
    pub iterations: usize,
    /// Maximal KKT violation at termination.
    pub kkt_violation: f64,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    (-gamma * sq_dist(a, b)).exp()
}

pub fn auto_gamma(x: &[Vec<f64>]) -> f64 {
    let n = x.len() as f64;
    let d = x[0].len();
    let mut total_var = 0.0;
    for j in 0..d {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
        total_var += x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
    }
    let mean_var = total_var / d as f64;
    if mean_var > 0.0 && mean_var.is_finite() {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0
    }
}

pub fn ocsvm_fit(x: &[Vec<f64>], params: &OcSvmParams) -> Result<OcSvmModel> {
    check_matrix(x, 2)?;
    let n = x.len();
    let OcSvmParams { nu, tol, .. } = *params;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain(format!("nu = {nu} not in (0, 1]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    let gamma = match params.gamma {
        Gamma::Auto => auto_gamma(x),
        Gamma::Value(g) if g > 0.0 && g.is_finite() => g,
        Gamma::Value(g) => return Err(Error::domain(format!("gamma = {g} must be positive"))),
    };
    let max_iter = params.max_iter.unwrap_or(10_000 * n);

    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
        for j in i + 1..n {
            let k = rbf(&x[i], &x[j], gamma);
            q[i * n + j] = k;
            q[j * n + i] = k;
        }
    }

    // Fill from the front at the upper bound so that the mass sums to one.
    let c = 1.0 / (nu * n as f64);
    let mut alpha = vec![0.0; n];
    let mut remaining = 1.0f64;
    for a in alpha.iter_mut() {
        if remaining <= 0.0 {
            break;
        }
        let take = c.min(remaining);
        *a = take;
        remaining -= take;
    }

    let mut grad = vec![0.0; n];
    for (i, a) in alpha.iter().enumerate() {
        if *a != 0.0 {
            let row = &q[i * n..(i + 1) * n];
            grad.iter_mut().zip(row).for_each(|(g, k)| *g += a * k);
        }
    }

    let mut iterations = 0;
    let violation = loop {
        let mut up = None;
        let mut up_g = f64::INFINITY;
        let mut down = None;
        let mut down_g = f64::NEG_INFINITY;
        for k in 0..n {
            if alpha[k] < c && grad[k] < up_g {
                up_g = grad[k];
                up = Some(k);
            }
            if alpha[k] > 0.0 && grad[k] > down_g {
                down_g = grad[k];
                down = Some(k);
            }
        }
        let (Some(i), Some(j)) = (up, down) else {
            break 0.0;
        };
        let gap = down_g - up_g;
        if gap <= tol || i == j {
            break gap.max(0.0);
        }
        if iterations >= max_iter {
            return Err(Error::Convergence {
                iterations,
                residual: gap,
            });
        }
        iterations += 1;

        let eta = (q[i * n + i] + q[j * n + j] - 2.0 * q[i * n + j]).max(1e-12);
        let room_i = c - alpha[i];
        let room_j = alpha[j];
        let step = gap / eta;
        let delta = if step >= room_i && room_i <= room_j {
            alpha[i] = c;
            alpha[j] -= room_i;
            room_i
        } else if step >= room_j {
            alpha[j] = 0.0;
            alpha[i] += room_j;
            room_j
        } else {
            alpha[i] += step;
            alpha[j] -= step;
            step
        };
        let (row_i, row_j) = (&q[i * n..(i + 1) * n], &q[j * n..(j + 1) * n]);
        for ((g, ki), kj) in grad.iter_mut().zip(row_i).zip(row_j) {
            *g += delta * (ki - kj);
        }
    };

    // Free vectors sit exactly on the boundary; otherwise take the middle of
    // the feasible interval for rho.
    let free: Vec<usize> = (0..n).filter(|&k| alpha[k] > 0.0 && alpha[k] < c).collect();
    let rho = if !free.is_empty() {
        free.iter().map(|&k| grad[k]).sum::<f64>() / free.len() as f64
    } else {
        let lower = (0..n)
            .filter(|&k| alpha[k] >= c)
            .map(|k| grad[k])
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..n)
            .filter(|&k| alpha[k] <= 0.0)
            .map(|k| grad[k])
            .fold(f64::INFINITY, f64::min);
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    };

    let support_indices: Vec<usize> = (0..n).filter(|&k| alpha[k] > 0.0).collect();
    Ok(OcSvmModel {
        support_vectors: support_indices.iter().map(|&k| x[k].clone()).collect(),
        alphas: support_indices.iter().map(|&k| alpha[k]).collect(),
        support_indices,
        rho,
        gamma,
        nu,
        n_train: n,
        iterations,
        kkt_violation: violation,
    })
}

impl OcSvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// Upper bound `1 / (nu n)` on each dual coefficient.
    pub fn upper_bound(&self) -> f64 {
        1.0 / (self.nu * self.n_train as f64)
    }

    /// `f(x) = sum a_i K(s_i, x) - rho`; normal iff `f(x) >= 0`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let s: f64 = self
            .support_vectors
            .iter()
            .zip(&self.alphas)
            .map(|(sv, a)| a * rbf(sv, x, self.gamma))
            .sum();
        Ok(s - self.rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pair() {
        let x = vec![vec![1.0, -2.0], vec![1.0, -2.0]];
        let params = OcSvmParams {
            nu: 0.5,
            ..Default::default()
        };
        let m = ocsvm_fit(&x, &params).unwrap();
        for p in &x {
            assert!(m.decision(p).unwrap() >= 0.0);
        }
        assert!((m.alphas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        let x = vec![vec![0.0], vec![1.0]];
        for nu in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(ocsvm_fit(&x, &OcSvmParams { nu, ..Default::default() }).is_err());
        }
        let bad_gamma = OcSvmParams {
            gamma: Gamma::Value(-1.0),
            ..Default::default()
        };
        assert!(ocsvm_fit(&x, &bad_gamma).is_err());
        assert!(ocsvm_fit(&x[..1], &OcSvmParams::default()).is_err());
        let nan = vec![vec![0.0], vec![f64::NAN]];
        assert!(ocsvm_fit(&nan, &OcSvmParams::default()).is_err());
    }

    #[test]
    fn far_point_tends_to_minus_rho() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i % 7) as f64 * 0.3, (i % 5) as f64 * 0.2]).collect();
        let m = ocsvm_fit(&x, &OcSvmParams::default()).unwrap();
        assert!(m.rho > 0.0);
        let f = m.decision(&[1e3, -1e3]).unwrap();
        assert_eq!(f, -m.rho);
        assert!(m.decision(&[0.0]).is_err());
    }

    #[test]
    fn scoring_ignores_support_vector_order() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos()]).collect();
        let m = ocsvm_fit(&x, &OcSvmParams::default()).unwrap();
        let mut rev = m.clone();
        rev.support_vectors.reverse();
        rev.alphas.reverse();
        for p in &x {
            let a = m.decision(p).unwrap();
            let b = rev.decision(p).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let x: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 1.3).sin(), (i as f64).cos()]).collect();
        let params = OcSvmParams {
            max_iter: Some(1),
            tol: 1e-12,
            ..Default::default()
        };
        assert!(matches!(ocsvm_fit(&x, &params), Err(Error::Convergence { .. })));
    }
}

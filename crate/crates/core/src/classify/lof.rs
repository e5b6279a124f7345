//! Local outlier factor in novelty mode: the reference set is the training
//! data and query points are never inserted into it.

use serde::{Deserialize, Serialize};

use crate::classify::check_matrix;
use crate::error::{Error, Result};

/// Local reachability density used when every reachability distance is zero.
pub const LRD_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LofParams {
    /// Defaults to `min(20, n - 1)`.
    pub k: Option<usize>,
    /// LOF above this is anomalous.
    pub threshold: f64,
}

impl Default for LofParams {
    fn default() -> Self {
        LofParams {
            k: None,
            threshold: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LofModel {
    pub train_points: Vec<Vec<f64>>,
    pub k: usize,
    pub k_distances: Vec<f64>,
    pub neighbors: Vec<Vec<usize>>,
    pub lrd: Vec<f64>,
    pub threshold: f64,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The `k` nearest points of `points` to `x`, ordered by (distance, index).
fn nearest(points: &[Vec<f64>], x: &[f64], k: usize, skip: Option<usize>) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(i, p)| (i, dist(p, x)))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

fn lrd_from(neigh: &[(usize, f64)], k_distances: &[f64]) -> f64 {
    let mean_reach = neigh
        .iter()
        .map(|&(b, d)| k_distances[b].max(d))
        .sum::<f64>()
        / neigh.len() as f64;
    if mean_reach > 0.0 {
        (1.0 / mean_reach).min(LRD_CAP)
    } else {
        LRD_CAP
    }
}

pub fn lof_fit(x: &[Vec<f64>], params: &LofParams) -> Result<LofModel> {
    check_matrix(x, 2)?;
    let n = x.len();
    let k = params.k.unwrap_or(20.min(n - 1));
    if k == 0 || k > n - 1 {
        return Err(Error::domain(format!("LOF k = {k} not in 1..={}", n - 1)));
    }
    if !(params.threshold > 0.0) {
        return Err(Error::domain("LOF threshold must be positive"));
    }
    let neigh: Vec<Vec<(usize, f64)>> = (0..n).map(|i| nearest(x, &x[i], k, Some(i))).collect();
    let k_distances: Vec<f64> = neigh.iter().map(|nb| nb[k - 1].1).collect();
    let lrd = neigh.iter().map(|nb| lrd_from(nb, &k_distances)).collect();
    Ok(LofModel {
        train_points: x.to_vec(),
        k,
        k_distances,
        neighbors: neigh
            .into_iter()
            .map(|nb| nb.into_iter().map(|(i, _)| i).collect())
            .collect(),
        lrd,
        threshold: params.threshold,
    })
}

impl LofModel {
    pub fn dim(&self) -> usize {
        self.train_points.first().map_or(0, Vec::len)
    }

    /// `max(k_dist(b), d(a, b))` for a training point `b`.
    pub fn reach_dist(&self, a: &[f64], b: usize) -> f64 {
        self.k_distances[b].max(dist(a, &self.train_points[b]))
    }

    /// LOF of each training point against the other training points.
    pub fn training_scores(&self) -> Vec<f64> {
        self.neighbors
            .iter()
            .zip(&self.lrd)
            .map(|(nb, &own)| nb.iter().map(|&b| self.lrd[b]).sum::<f64>() / nb.len() as f64 / own)
            .collect()
    }

    /// Mean neighbour density over the query's density; about 1 inside a
    /// uniform region, larger for outliers.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let neigh = nearest(&self.train_points, x, self.k, None);
        let lrd_x = lrd_from(&neigh, &self.k_distances);
        let mean_lrd = neigh.iter().map(|&(b, _)| self.lrd[b]).sum::<f64>() / neigh.len() as f64;
        Ok(mean_lrd / lrd_x)
    }
}

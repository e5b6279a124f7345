use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::check_matrix;
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoForestParams {
    pub trees: usize,
    /// Subsample size; defaults to `min(256, n)`.
    pub psi: Option<usize>,
    pub seed: u64,
    /// Scores above this are anomalous.
    pub threshold: f64,
}

impl Default for IsoForestParams {
    fn default() -> Self {
        IsoForestParams {
            trees: 100,
            psi: None,
            seed: 0,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        size: usize,
    },
}

/// Nodes in depth-first order; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoTree {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoForestModel {
    pub trees: Vec<IsoTree>,
    pub psi: usize,
    pub n_train: usize,
    pub dim: usize,
    pub seed: u64,
    pub threshold: f64,
}

/// Harmonic number `H(i)`; exact summation below 4096 terms.
fn harmonic(i: usize) -> f64 {
    if i < 4096 {
        (1..=i).map(|k| 1.0 / k as f64).sum()
    } else {
        let x = i as f64;
        x.ln() + EULER_GAMMA + 0.5 / x - 1.0 / (12.0 * x * x)
    }
}

/// Average unsuccessful-search path length in a binary search tree of `n` keys.
pub fn average_path_length(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    2.0 * harmonic(n - 1) - 2.0 * (n - 1) as f64 / n as f64
}

pub fn depth_limit(psi: usize) -> usize {
    (psi.max(1) as f64).log2().ceil() as usize
}

struct Builder<'a> {
    data: &'a [Vec<f64>],
    rng: ChaCha8Rng,
    max_depth: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn build(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: rows.len() });
        if depth >= self.max_depth || rows.len() <= 1 {
            return id;
        }
        let d = self.data[0].len();
        // Resample constant dimensions up to d times before giving up.
        let mut chosen = None;
        for _ in 0..d.max(1) {
            let dim = self.rng.random_range(0..d);
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                let v = self.data[r][dim];
                (lo.min(v), hi.max(v))
            });
            if hi > lo {
                chosen = Some((dim, lo, hi));
                break;
            }
        }
        let Some((dim, lo, hi)) = chosen else {
            return id;
        };
        let value = self.rng.random_range(lo..hi);
        let mut mid = 0;
        for k in 0..rows.len() {
            if self.data[rows[k]][dim] < value {
                rows.swap(k, mid);
                mid += 1;
            }
        }
        let (left_rows, right_rows) = rows.split_at_mut(mid);
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }
}

/// Each tree draws its subsample and splits from its own ChaCha stream
/// (master seed, stream = tree index), so trees are independent of build order.
pub fn iforest_fit(x: &[Vec<f64>], params: &IsoForestParams) -> Result<IsoForestModel> {
    check_matrix(x, 2)?;
    let n = x.len();
    if params.trees == 0 {
        return Err(Error::domain("isolation forest needs at least one tree"));
    }
    let psi = params.psi.unwrap_or(256.min(n));
    if psi < 2 || psi > n {
        return Err(Error::domain(format!("subsample size {psi} not in 2..={n}")));
    }
    let max_depth = depth_limit(psi);
    let trees = (0..params.trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(t as u64);
            let mut rows = index::sample(&mut rng, n, psi).into_vec();
            rows.sort_unstable();
            let mut b = Builder {
                data: x,
                rng,
                max_depth,
                nodes: Vec::new(),
            };
            b.build(&mut rows, 0);
            IsoTree { nodes: b.nodes }
        })
        .collect();
    Ok(IsoForestModel {
        trees,
        psi,
        n_train: n,
        dim: x[0].len(),
        seed: params.seed,
        threshold: params.threshold,
    })
}

impl IsoTree {
    /// Depth of the leaf reached plus `c(leaf size)`.
    pub fn path_length(&self, x: &[f64]) -> f64 {
        let mut node = 0;
        let mut depth = 0usize;
        loop {
            match self.nodes[node] {
                Node::Split {
                    dim,
                    value,
                    left,
                    right,
                } => {
                    node = if x[dim] < value { left } else { right };
                    depth += 1;
                }
                Node::Leaf { size } => return depth as f64 + average_path_length(size),
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match nodes[id] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

impl IsoForestModel {
    pub fn mean_path_length(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64)
    }

    /// `2^(-E[h(x)] / c(psi))`, in `(0, 1)`; larger means more anomalous.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(score_from_path_length(self.mean_path_length(x)?, self.psi))
    }
}

pub fn score_from_path_length(mean_path: f64, psi: usize) -> f64 {
    2f64.powf(-mean_path / average_path_length(psi))
}

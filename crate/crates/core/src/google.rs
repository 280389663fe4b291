//! Google matrix, PageRank and CheiRank.
//!
//! For a graph with `N` nodes the column-stochastic matrix `S` has entries
//! `S_ij = A_ij / outdeg(j)`; columns of dangling nodes are replaced by the
//! uniform column `1/N`. The Google matrix is `G = α S + (1 − α)/N`.
//! PageRank is the stationary vector of `G`; CheiRank is the PageRank of the
//! graph with every link reversed.
//!
//! `G` is never materialized. [`StochasticOperator`] keeps the transpose of
//! the adjacency and applies the dangling and teleportation terms as a single
//! scalar shift per iteration.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::graph::DirectedGraph;
use crate::par;

pub const DEFAULT_ALPHA: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Largest graph the dense oracle accepts.
pub const DENSE_ORACLE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankParams {
    pub alpha: f64,
    /// Stop once the L1 change between iterates falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RankParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl RankParams {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(domain(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.tol > 0.0) {
            return Err(domain(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Sparse action of the Google matrix of one graph.
pub struct StochasticOperator<'g> {
    graph: &'g DirectedGraph,
    alpha: f64,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    /// Per in-link `S_ij` for weighted graphs. Unweighted graphs scale the
    /// input by `1/outdeg` once per application instead.
    in_coeffs: Option<Vec<f64>>,
    /// `1/outdeg(j)` for unweighted graphs, `1/Σ w` for weighted ones; zero
    /// for dangling nodes.
    inv_column_sum: Vec<f64>,
    dangling: Vec<u32>,
}

impl<'g> StochasticOperator<'g> {
    pub fn new(graph: &'g DirectedGraph, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let n = graph.node_count();
        let offsets = graph.out_offsets();
        let targets = graph.targets();
        let weights = graph.weights();

        let inv_column_sum: Vec<f64> = (0..n)
            .map(|j| {
                let (lo, hi) = (offsets[j], offsets[j + 1]);
                if lo == hi {
                    0.0
                } else {
                    let total = match weights {
                        Some(w) => w[lo..hi].iter().sum(),
                        None => (hi - lo) as f64,
                    };
                    1.0 / total
                }
            })
            .collect();
        let dangling = (0..n as u32)
            .filter(|&j| offsets[j as usize] == offsets[j as usize + 1])
            .collect();

        // Counting sort of links by destination; sources stay ascending
        // within each destination.
        let mut in_offsets = vec![0usize; n + 1];
        for &d in targets {
            in_offsets[d as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; targets.len()];
        let mut in_coeffs = weights.map(|_| vec![0.0f64; targets.len()]);
        for j in 0..n {
            for e in offsets[j]..offsets[j + 1] {
                let d = targets[e] as usize;
                let slot = cursor[d];
                cursor[d] += 1;
                in_sources[slot] = j as u32;
                if let (Some(c), Some(w)) = (in_coeffs.as_mut(), weights) {
                    c[slot] = w[e] * inv_column_sum[j];
                }
            }
        }

        Ok(Self {
            graph,
            alpha,
            in_offsets,
            in_sources,
            in_coeffs,
            inv_column_sum,
            dangling,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn graph(&self) -> &DirectedGraph {
        self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Dangling node ids (zero out-links), ascending.
    pub fn dangling(&self) -> &[u32] {
        &self.dangling
    }

    /// `1/Σ_i A_ij` for every column `j`; zero for dangling columns.
    pub fn inverse_column_sums(&self) -> &[f64] {
        &self.inv_column_sum
    }

    /// Returns `G v`. `v` must be a probability vector of length `N`.
    pub fn apply_google(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.node_count();
        if v.len() != n {
            return Err(domain(format!(
                "vector length {} does not match N = {n}",
                v.len()
            )));
        }
        let mut out = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        self.apply_into(v, &mut out, &mut scratch);
        Ok(out)
    }

    /// `out ← αSv + [α·(dangling mass) + (1−α)]/N`. `scratch` is reused
    /// between calls to avoid reallocating.
    pub(crate) fn apply_into(&self, v: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        let n = self.node_count();
        let dangling_mass: f64 = self.dangling.iter().map(|&j| v[j as usize]).sum();
        let shift = (self.alpha * dangling_mass + (1.0 - self.alpha)) / n as f64;
        let alpha = self.alpha;
        let offsets = &self.in_offsets;
        let sources = &self.in_sources;

        match &self.in_coeffs {
            Some(coeffs) => {
                out.par_chunks_mut(par::CHUNK)
                    .enumerate()
                    .for_each(|(c, chunk)| {
                        let base = c * par::CHUNK;
                        for (k, o) in chunk.iter_mut().enumerate() {
                            let i = base + k;
                            let mut acc = 0.0;
                            for e in offsets[i]..offsets[i + 1] {
                                acc += coeffs[e] * v[sources[e] as usize];
                            }
                            *o = alpha * acc + shift;
                        }
                    });
            }
            None => {
                scratch.resize(n, 0.0);
                scratch
                    .par_chunks_mut(par::CHUNK)
                    .zip(v.par_chunks(par::CHUNK))
                    .zip(self.inv_column_sum.par_chunks(par::CHUNK))
                    .for_each(|((s, x), inv)| {
                        for ((s, x), inv) in s.iter_mut().zip(x).zip(inv) {
                            *s = x * inv;
                        }
                    });
                let scaled: &[f64] = scratch;
                out.par_chunks_mut(par::CHUNK)
                    .enumerate()
                    .for_each(|(c, chunk)| {
                        let base = c * par::CHUNK;
                        for (k, o) in chunk.iter_mut().enumerate() {
                            let i = base + k;
                            let mut acc = 0.0;
                            for e in offsets[i]..offsets[i + 1] {
                                acc += scaled[sources[e] as usize];
                            }
                            *o = alpha * acc + shift;
                        }
                    });
            }
        }
    }
}

/// Stationary vector of a Google matrix together with its rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub probabilities: Vec<f64>,
    /// `order[r]` is the node at rank position `r + 1`.
    pub order: Vec<u32>,
    /// `index[i]` is the 1-based rank `K(i)` of node `i`.
    pub index: Vec<u32>,
    pub iterations: usize,
    /// Last L1 change between successive iterates.
    pub residual: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
}

impl RankVector {
    /// Wraps externally supplied probabilities (for example a loaded rank
    /// table) and derives the rank order.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        let order = rank_order(&probabilities);
        let index = inverse_permutation(&order);
        Self {
            probabilities,
            order,
            index,
            iterations: 0,
            residual: 0.0,
            converged: true,
            residual_history: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// 1-based rank of `node`.
    pub fn rank_of(&self, node: u32) -> u32 {
        self.index[node as usize]
    }

    /// Probability of the node at 1-based rank `k`.
    pub fn probability_at_rank(&self, k: u32) -> f64 {
        self.probabilities[self.order[k as usize - 1] as usize]
    }

    /// Probabilities sorted by rank position.
    pub fn sorted_probabilities(&self) -> Vec<f64> {
        self.order
            .iter()
            .map(|&i| self.probabilities[i as usize])
            .collect()
    }
}

/// Nodes sorted by decreasing probability, ties broken by ascending node id.
pub fn rank_order(p: &[f64]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..p.len() as u32).collect();
    order.sort_by(|&a, &b| p[b as usize].total_cmp(&p[a as usize]).then(a.cmp(&b)));
    order
}

/// Maps a rank order (position → node) to 1-based ranks (node → K).
pub fn inverse_permutation(order: &[u32]) -> Vec<u32> {
    let mut index = vec![0u32; order.len()];
    for (pos, &node) in order.iter().enumerate() {
        index[node as usize] = pos as u32 + 1;
    }
    index
}

/// Power iteration from the uniform vector.
///
/// Non-convergence within `max_iter` is not an error: the result carries
/// `converged = false` and the last residual.
pub fn pagerank(g: &DirectedGraph, params: &RankParams) -> Result<RankVector> {
    params.validate()?;
    let op = StochasticOperator::new(g, params.alpha)?;
    let n = g.node_count();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut scratch = Vec::new();
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < params.max_iter {
        op.apply_into(&v, &mut next, &mut scratch);
        residual = par::l1_distance(&v, &next);
        std::mem::swap(&mut v, &mut next);
        iterations += 1;
        history.push(residual);
        if residual < params.tol {
            break;
        }
    }
    let order = rank_order(&v);
    let index = inverse_permutation(&order);
    Ok(RankVector {
        probabilities: v,
        order,
        index,
        iterations,
        residual,
        converged: residual < params.tol,
        residual_history: history,
    })
}

/// PageRank of the reversed graph.
pub fn cheirank(g: &DirectedGraph, params: &RankParams) -> Result<RankVector> {
    pagerank(&g.reverse(), params)
}

/// PageRank and CheiRank of the same graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDRanking {
    pub pagerank: RankVector,
    pub cheirank: RankVector,
}

impl TwoDRanking {
    pub fn new(pagerank: RankVector, cheirank: RankVector) -> Result<Self> {
        if pagerank.len() != cheirank.len() {
            return Err(domain(format!(
                "PageRank has {} nodes but CheiRank has {}",
                pagerank.len(),
                cheirank.len()
            )));
        }
        Ok(Self { pagerank, cheirank })
    }

    pub fn node_count(&self) -> usize {
        self.pagerank.len()
    }

    /// `(K(i), K*(i))`, both 1-based.
    pub fn ranks(&self, node: u32) -> (u32, u32) {
        (self.pagerank.rank_of(node), self.cheirank.rank_of(node))
    }

    pub fn converged(&self) -> bool {
        self.pagerank.converged && self.cheirank.converged
    }
}

pub fn two_d_ranking(g: &DirectedGraph, params: &RankParams) -> Result<TwoDRanking> {
    TwoDRanking::new(pagerank(g, params)?, cheirank(g, params)?)
}

/// Dense reference solution of `(I − αS)P = (1−α)/N · 1`, normalized to
/// unit mass. Gaussian elimination with partial pivoting; `N ≤ 2000`.
pub fn dense_solve_oracle(g: &DirectedGraph, alpha: f64) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::TooLarge(n, DENSE_ORACLE_LIMIT));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    // Row-major m[i][j] = δ_ij − α S_ij.
    let mut m = vec![0.0f64; n * n];
    for j in 0..n as u32 {
        let succ = g.successors(j);
        if succ.is_empty() {
            for i in 0..n {
                m[i * n + j as usize] -= alpha / n as f64;
            }
            continue;
        }
        let total: f64 = match g.successor_weights(j) {
            Some(w) => w.iter().sum(),
            None => succ.len() as f64,
        };
        for (k, &i) in succ.iter().enumerate() {
            let w = g.successor_weights(j).map_or(1.0, |w| w[k]);
            m[i as usize * n + j as usize] -= alpha * w / total;
        }
    }
    for i in 0..n {
        m[i * n + i] += 1.0;
    }
    let mut b = vec![(1.0 - alpha) / n as f64; n];

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &c| m[a * n + col].abs().total_cmp(&m[c * n + col].abs()))
            .unwrap();
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / m[row * n + row];
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|p| *p /= total);
    Ok(x)
}

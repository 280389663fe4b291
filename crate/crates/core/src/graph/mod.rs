//! Directed-graph data model.
//!
//! Links are stored sorted by `(source, destination)` in a compressed
//! out-adjacency layout. Node ids are 0-based `u32` in memory; the edge-list
//! text format uses 1-based ids.

mod io;
mod synth;

pub use io::{parse_edge_list, write_edge_list, ParseOptions};
pub use synth::{synth_random, synth_scale_free, synth_scale_free_with, ScaleFreeConfig};

use crate::error::{domain, Result};

/// A directed network with `N` nodes and a sorted list of links.
///
/// Unweighted graphs built through [`parse_edge_list`] or
/// [`DirectedGraph::from_links`] have binary adjacency: duplicate links are
/// collapsed. Graphs produced by link filtering may hold parallel links, which
/// then count with multiplicity in the out-degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    node_count: usize,
    out_offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Option<Vec<f64>>,
    in_degree: Vec<u32>,
    collapsed_duplicates: u64,
}

#[inline]
pub(crate) fn pack(src: u32, dst: u32) -> u64 {
    (u64::from(src) << 32) | u64::from(dst)
}

#[inline]
pub(crate) fn unpack(key: u64) -> (u32, u32) {
    ((key >> 32) as u32, key as u32)
}

impl DirectedGraph {
    /// Builds an unweighted graph from 0-based `(source, destination)` pairs,
    /// collapsing duplicates.
    pub fn from_links<I>(node_count: usize, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let keys = links.into_iter().map(|(s, d)| pack(s, d)).collect();
        Self::from_keys(node_count, keys, true)
    }

    /// Builds a weighted graph from 0-based `(source, destination, weight)`
    /// triples. Duplicate pairs are merged and their weights summed.
    pub fn from_weighted_links<I>(node_count: usize, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        let pairs = links.into_iter().map(|(s, d, w)| (pack(s, d), w)).collect();
        Self::from_weighted_keys(node_count, pairs, true)
    }

    pub(crate) fn from_keys(node_count: usize, mut keys: Vec<u64>, collapse: bool) -> Result<Self> {
        check_node_count(node_count)?;
        keys.sort_unstable();
        let raw = keys.len();
        if collapse {
            keys.dedup();
        }
        let collapsed = (raw - keys.len()) as u64;
        let mut g = Self::assemble(node_count, keys.iter().copied(), keys.len(), None)?;
        g.collapsed_duplicates = collapsed;
        Ok(g)
    }

    pub(crate) fn from_weighted_keys(
        node_count: usize,
        mut pairs: Vec<(u64, f64)>,
        collapse: bool,
    ) -> Result<Self> {
        check_node_count(node_count)?;
        if let Some(&(_, w)) = pairs.iter().find(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(domain(format!(
                "link weight must be positive and finite, got {w}"
            )));
        }
        // Stable sort keeps weight summation order equal to input order.
        pairs.sort_by_key(|&(k, _)| k);
        let raw = pairs.len();
        if collapse {
            let mut merged: Vec<(u64, f64)> = Vec::with_capacity(pairs.len());
            for (k, w) in pairs {
                match merged.last_mut() {
                    Some(last) if last.0 == k => last.1 += w,
                    _ => merged.push((k, w)),
                }
            }
            pairs = merged;
        }
        let collapsed = (raw - pairs.len()) as u64;
        let weights = pairs.iter().map(|&(_, w)| w).collect();
        let mut g = Self::assemble(
            node_count,
            pairs.iter().map(|&(k, _)| k),
            pairs.len(),
            Some(weights),
        )?;
        g.collapsed_duplicates = collapsed;
        Ok(g)
    }

    /// `keys` must already be sorted.
    fn assemble<I>(
        node_count: usize,
        keys: I,
        len: usize,
        weights: Option<Vec<f64>>,
    ) -> Result<Self>
    where
        I: Iterator<Item = u64>,
    {
        let mut out_offsets = vec![0usize; node_count + 1];
        let mut targets = Vec::with_capacity(len);
        let mut in_degree = vec![0u32; node_count];
        for key in keys {
            let (s, d) = unpack(key);
            if s as usize >= node_count || d as usize >= node_count {
                return Err(domain(format!(
                    "link {} -> {} outside node range [1, {node_count}]",
                    u64::from(s) + 1,
                    u64::from(d) + 1
                )));
            }
            out_offsets[s as usize + 1] += 1;
            in_degree[d as usize] += 1;
            targets.push(d);
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
        }
        Ok(Self {
            node_count,
            out_offsets,
            targets,
            weights,
            in_degree,
            collapsed_duplicates: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn link_count(&self) -> usize {
        self.targets.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Number of duplicate input links merged into existing ones at
    /// construction time.
    pub fn collapsed_duplicates(&self) -> u64 {
        self.collapsed_duplicates
    }

    pub fn out_degree(&self, node: u32) -> usize {
        let n = node as usize;
        self.out_offsets[n + 1] - self.out_offsets[n]
    }

    pub fn in_degree(&self, node: u32) -> usize {
        self.in_degree[node as usize] as usize
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.in_degree.iter().map(|&d| d as usize).collect()
    }

    pub fn is_dangling(&self, node: u32) -> bool {
        self.out_degree(node) == 0
    }

    /// Destinations of links leaving `node`, sorted ascending.
    pub fn successors(&self, node: u32) -> &[u32] {
        let n = node as usize;
        &self.targets[self.out_offsets[n]..self.out_offsets[n + 1]]
    }

    /// Weights of links leaving `node`, parallel to [`Self::successors`].
    pub fn successor_weights(&self, node: u32) -> Option<&[f64]> {
        let n = node as usize;
        self.weights
            .as_ref()
            .map(|w| &w[self.out_offsets[n]..self.out_offsets[n + 1]])
    }

    /// All links as `(source, destination, weight)` in `(source, destination)`
    /// order. Weight is 1 for unweighted graphs.
    pub fn links(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.node_count as u32).flat_map(move |s| {
            let lo = self.out_offsets[s as usize];
            let hi = self.out_offsets[s as usize + 1];
            (lo..hi).map(move |e| {
                let w = self.weights.as_ref().map_or(1.0, |w| w[e]);
                (s, self.targets[e], w)
            })
        })
    }

    /// Graph with every link direction inverted.
    pub fn reverse(&self) -> Self {
        let keys = || self.links().map(|(s, d, _)| pack(d, s));
        let mut g = match &self.weights {
            None => Self::from_keys(self.node_count, keys().collect(), false),
            Some(_) => Self::from_weighted_keys(
                self.node_count,
                keys().zip(self.links().map(|l| l.2)).collect(),
                false,
            ),
        }
        .expect("reversal preserves node range");
        g.collapsed_duplicates = self.collapsed_duplicates;
        g
    }

    /// Rebuilds the graph from a modified link list without collapsing
    /// parallel links. Used by link filtering.
    pub(crate) fn with_links(&self, keys: Vec<u64>, weights: Option<Vec<f64>>) -> Self {
        match weights {
            None => Self::from_keys(self.node_count, keys, false),
            Some(w) => {
                Self::from_weighted_keys(self.node_count, keys.into_iter().zip(w).collect(), false)
            }
        }
        .expect("filtered links stay in node range")
    }

    pub(crate) fn out_offsets(&self) -> &[usize] {
        &self.out_offsets
    }

    pub(crate) fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub(crate) fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }
}

fn check_node_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("graph must have at least one node"));
    }
    if n > u32::MAX as usize {
        return Err(domain(format!("node count {n} exceeds u32 id space")));
    }
    Ok(())
}

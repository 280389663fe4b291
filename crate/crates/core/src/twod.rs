//! 2DRank and subset-local ranks.

use std::io::BufRead;

use crate::error::{domain, Error, Result};
use crate::google::{inverse_permutation, TwoDRanking};

/// Nodes ordered by their first appearance on the border of a growing
/// square `[1, s] × [1, s]` in the `(K, K*)` plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoDRankOrder {
    /// `order[r]` is the node with 2DRank `r + 1`.
    pub order: Vec<u32>,
    /// 1-based 2DRank of each node.
    pub index: Vec<u32>,
}

/// Sorts nodes by `max(K, K*)`, then `min(K, K*)`, then `K`. Since `K` is a
/// permutation the order is total.
pub fn two_d_rank(r: &TwoDRanking) -> TwoDRankOrder {
    let key = |v: u32| {
        let (k, ks) = r.ranks(v);
        (k.max(ks), k.min(ks), k)
    };
    let mut order: Vec<u32> = (0..r.node_count() as u32).collect();
    order.sort_by_key(|&v| key(v));
    let index = inverse_permutation(&order);
    TwoDRankOrder { order, index }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalRank {
    pub node: u32,
    pub k_local: u32,
    pub k_star_local: u32,
}

/// Ranks of `subset` members relative to each other, preserving the global
/// `K` and `K*` orders. Output is sorted by node id; duplicates in `subset`
/// are ignored.
pub fn local_rank(r: &TwoDRanking, subset: &[u32]) -> Result<Vec<LocalRank>> {
    let n = r.node_count();
    if subset.is_empty() {
        return Err(domain("subset is empty"));
    }
    if let Some(&bad) = subset.iter().find(|&&v| v as usize >= n) {
        return Err(domain(format!(
            "subset node {} outside [1, {n}]",
            bad as u64 + 1
        )));
    }
    let mut members = subset.to_vec();
    members.sort_unstable();
    members.dedup();

    let local = |global: &dyn Fn(u32) -> u32| {
        let mut by_rank = members.clone();
        by_rank.sort_by_key(|&v| global(v));
        let mut out = vec![0u32; members.len()];
        for (pos, v) in by_rank.iter().enumerate() {
            let slot = members.binary_search(v).unwrap();
            out[slot] = pos as u32 + 1;
        }
        out
    };
    let k = local(&|v| r.pagerank.rank_of(v));
    let ks = local(&|v| r.cheirank.rank_of(v));
    Ok(members
        .iter()
        .zip(k.into_iter().zip(ks))
        .map(|(&node, (k_local, k_star_local))| LocalRank {
            node,
            k_local,
            k_star_local,
        })
        .collect())
}

/// Reads a subset file: one 1-based node id per line, `#` comments allowed.
/// Returns 0-based ids.
pub fn read_subset<R: BufRead>(reader: R) -> Result<Vec<u32>> {
    let mut ids = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let id: u64 = text.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("invalid node id `{text}`"),
        })?;
        if id == 0 || id > u64::from(u32::MAX) {
            return Err(domain(format!(
                "line {}: node id {id} out of range",
                idx + 1
            )));
        }
        ids.push((id - 1) as u32);
    }
    Ok(ids)
}

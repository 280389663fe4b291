//! Selective link inversion for spam-resistant CheiRank.
//!
//! Ordinary CheiRank reverses every link. The filters here reverse a link
//! `j → i` only when its destination is much more popular than its source:
//!
//! - by probability: `η · P(j) > P(i)`,
//! - by rank: `K(j) < η_K · K(i)`.
//!
//! The PageRank of the filtered graph is the filtered CheiRank. At `η = 0`
//! nothing is inverted and it equals PageRank; at `η = ∞` every link is
//! inverted and it equals CheiRank.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::google::{pagerank, RankParams, RankVector};
use crate::graph::{pack, DirectedGraph};

/// Filter threshold. `Infinite` inverts every link regardless of the
/// probabilities involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eta {
    Finite(f64),
    Infinite,
}

impl Eta {
    fn validate(self) -> Result<Self> {
        match self {
            Eta::Finite(e) if !(e >= 0.0 && e.is_finite()) => Err(domain(format!(
                "eta must be finite and non-negative, got {e}"
            ))),
            other => Ok(other),
        }
    }

    fn rank_key(self) -> f64 {
        match self {
            Eta::Finite(e) => e,
            Eta::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Eta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Eta::Finite(e) => write!(f, "{e}"),
            Eta::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Eta {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Eta::Infinite),
            _ => s
                .parse::<f64>()
                .map_err(|_| domain(format!("invalid eta `{s}`")))
                .and_then(|e| Eta::Finite(e).validate()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    /// Invert `j → i` iff `η P(j) > P(i)`.
    Probability,
    /// Invert `j → i` iff `K(j) < η_K K(i)`.
    Rank,
}

impl std::fmt::Display for FilterMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FilterMode::Probability => "probability",
            FilterMode::Rank => "rank",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub mode: FilterMode,
    pub eta: Eta,
    pub params: RankParams,
}

#[derive(Debug, Clone)]
pub struct FilterResult {
    /// Same node count and link count as the input; inverted links replaced
    /// by their reverse. Parallel links created by inversion are kept.
    pub graph: DirectedGraph,
    pub inverted: usize,
    pub fraction: f64,
    /// PageRank of [`Self::graph`]; only set by [`filtered_cheirank`].
    pub cheirank: Option<RankVector>,
}

fn invert_by_prob(p: &[f64], eta: Eta) -> impl Fn(u32, u32) -> bool + '_ {
    move |j, i| {
        let pj = p[j as usize];
        match eta {
            Eta::Infinite => pj > 0.0,
            Eta::Finite(e) => e * pj > p[i as usize],
        }
    }
}

fn invert_by_rank(k: &[u32], eta: Eta) -> impl Fn(u32, u32) -> bool + '_ {
    move |j, i| match eta {
        Eta::Infinite => true,
        Eta::Finite(e) => (k[j as usize] as f64) < e * k[i as usize] as f64,
    }
}

fn apply_filter<F: Fn(u32, u32) -> bool>(g: &DirectedGraph, invert: F) -> FilterResult {
    let mut inverted = 0;
    let keys = g
        .links()
        .map(|(s, d, _)| {
            if invert(s, d) {
                inverted += 1;
                pack(d, s)
            } else {
                pack(s, d)
            }
        })
        .collect();
    let weights = g.is_weighted().then(|| g.links().map(|l| l.2).collect());
    let total = g.link_count();
    FilterResult {
        graph: g.with_links(keys, weights),
        inverted,
        fraction: fraction(inverted, total),
        cheirank: None,
    }
}

fn count_filter<F: Fn(u32, u32) -> bool>(g: &DirectedGraph, invert: F) -> usize {
    g.links().filter(|&(s, d, _)| invert(s, d)).count()
}

fn fraction(inverted: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        inverted as f64 / total as f64
    }
}

fn check_len(g: &DirectedGraph, len: usize) -> Result<()> {
    if len != g.node_count() {
        return Err(domain(format!(
            "rank data covers {len} nodes, graph has {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Reverses each link `j → i` with `η P(j) > P(i)`, strictly.
pub fn filter_links_by_prob(g: &DirectedGraph, p: &RankVector, eta: Eta) -> Result<FilterResult> {
    check_len(g, p.len())?;
    let eta = eta.validate()?;
    Ok(apply_filter(g, invert_by_prob(&p.probabilities, eta)))
}

/// Reverses each link `j → i` with `K(j) < η_K K(i)`, strictly. `rank_index`
/// maps nodes to 1-based ranks.
pub fn filter_links_by_rank(
    g: &DirectedGraph,
    rank_index: &[u32],
    eta_k: Eta,
) -> Result<FilterResult> {
    check_len(g, rank_index.len())?;
    let eta_k = eta_k.validate()?;
    Ok(apply_filter(g, invert_by_rank(rank_index, eta_k)))
}

/// PageRank of `g`, then the configured filter, then the PageRank of the
/// filtered graph.
pub fn filtered_cheirank(g: &DirectedGraph, cfg: &FilterConfig) -> Result<FilterResult> {
    let p = pagerank(g, &cfg.params)?;
    filtered_cheirank_with(g, &p, cfg)
}

/// [`filtered_cheirank`] with a PageRank of `g` that is already known.
pub fn filtered_cheirank_with(
    g: &DirectedGraph,
    p: &RankVector,
    cfg: &FilterConfig,
) -> Result<FilterResult> {
    let mut result = match cfg.mode {
        FilterMode::Probability => filter_links_by_prob(g, p, cfg.eta)?,
        FilterMode::Rank => filter_links_by_rank(g, &p.index, cfg.eta)?,
    };
    result.cheirank = Some(pagerank(&result.graph, &cfg.params)?);
    Ok(result)
}

/// Measured inverted-link fraction `f(η)` for each threshold. Thresholds
/// must be sorted ascending (`Infinite` last).
pub fn measure_fraction_curve(
    g: &DirectedGraph,
    p: &RankVector,
    mode: FilterMode,
    etas: &[Eta],
) -> Result<Vec<(Eta, f64)>> {
    check_len(g, p.len())?;
    for e in etas {
        e.validate()?;
    }
    if etas.windows(2).any(|w| w[0].rank_key() > w[1].rank_key()) {
        return Err(domain("eta values must be sorted ascending"));
    }
    let total = g.link_count();
    Ok(etas
        .iter()
        .map(|&eta| {
            let inverted = match mode {
                FilterMode::Probability => count_filter(g, invert_by_prob(&p.probabilities, eta)),
                FilterMode::Rank => count_filter(g, invert_by_rank(&p.index, eta)),
            };
            (eta, fraction(inverted, total))
        })
        .collect())
}

/// Closed-form inverted fraction for the rank filter, assuming link sources
/// uniform in `K ∈ [0, N]` and destinations restricted to `K' ≤ aN` with
/// density `∝ 1/K'^ν`:
///
/// ```text
/// f = c · aη_K                          for η_K ≤ 1/a
/// f = 1 + (c − 1) · (aη_K)^(ν−1)        for η_K > 1/a,   c = (1−ν)/(2−ν)
/// ```
pub fn analytic_fraction(eta_k: f64, a: f64, nu: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(domain(format!("a must lie in (0, 1], got {a}")));
    }
    if !(0.0..1.0).contains(&nu) {
        return Err(domain(format!("nu must lie in [0, 1), got {nu}")));
    }
    if !(eta_k >= 0.0) {
        return Err(domain(format!("eta_k must be non-negative, got {eta_k}")));
    }
    let c = (1.0 - nu) / (2.0 - nu);
    let x = a * eta_k;
    Ok(if eta_k <= 1.0 / a {
        c * x
    } else {
        1.0 + (c - 1.0) * x.powf(nu - 1.0)
    })
}

/// Random links in a graph whose node ids are already in PageRank order
/// (node `K − 1` has rank `K`). Sources are uniform over `[1, N]`;
/// destinations follow `∝ 1/K'^ν` on `[1, ⌊aN⌋]`. Parallel links are kept,
/// so every sampled link counts once.
pub fn synth_transition_ensemble(
    nodes: usize,
    links: usize,
    a: f64,
    nu: f64,
    seed: u64,
) -> Result<DirectedGraph> {
    analytic_fraction(0.0, a, nu)?;
    let top = ((a * nodes as f64).floor() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exponent = 1.0 / (1.0 - nu);
    let keys = (0..links)
        .map(|_| {
            let src = rng.gen_range(0..nodes as u32);
            let u: f64 = rng.gen();
            let x = top as f64 * u.powf(exponent);
            let dst = (x.ceil() as usize).clamp(1, top) - 1;
            pack(src, dst as u32)
        })
        .collect();
    DirectedGraph::from_keys(nodes, keys, false)
}

/// Rank index for graphs from [`synth_transition_ensemble`].
pub fn identity_ranks(nodes: usize) -> Vec<u32> {
    (1..=nodes as u32).collect()
}

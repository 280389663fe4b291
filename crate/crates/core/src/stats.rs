//! Statistics of a two-dimensional ranking.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::google::{RankVector, TwoDRanking};
use crate::graph::DirectedGraph;

/// Axis scale for binning rank indexes into cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Equal cells in `K/N`.
    Linear,
    /// Equal cells in `log_N K ∈ [0, 1]`.
    Log,
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        })
    }
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(domain(format!("unknown scale `{other}`"))),
        }
    }
}

/// Cell of 1-based rank `k` among `cells` cells over `[1, n]`.
///
/// Linear cells split `(k − 1)/n ∈ [0, 1)` evenly, so `cells = n` puts each
/// rank in its own cell. Log cells split `log_n k ∈ [0, 1]`; `k = n` is
/// clamped into the last cell.
pub fn cell_index(k: u32, n: usize, cells: usize, scale: Scale) -> usize {
    let raw = match scale {
        Scale::Linear => ((k as u64 - 1) * cells as u64 / n as u64) as usize,
        Scale::Log => {
            if n < 2 {
                0
            } else {
                (cells as f64 * (k as f64).ln() / (n as f64).ln()).floor() as usize
            }
        }
    };
    raw.min(cells - 1)
}

// ---------------------------------------------------------------------------
// Correlator

/// `κ(τ) = N Σ_i P(K(i) + τ) P*(K*(i)) − 1`.
///
/// Terms whose shifted rank `K(i) + τ` leaves `[1, N]` are dropped.
pub fn correlator(r: &TwoDRanking, tau: i64) -> f64 {
    correlator_sorted(r, &r.pagerank.sorted_probabilities(), tau)
}

fn correlator_sorted(r: &TwoDRanking, p_sorted: &[f64], tau: i64) -> f64 {
    let n = r.node_count() as i64;
    let mut acc = 0.0;
    for (i, &p_star) in r.cheirank.probabilities.iter().enumerate() {
        let shifted = r.pagerank.index[i] as i64 + tau;
        if (1..=n).contains(&shifted) {
            acc += p_sorted[(shifted - 1) as usize] * p_star;
        }
    }
    n as f64 * acc - 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorSeries {
    pub tau: Vec<i64>,
    pub kappa: Vec<f64>,
}

/// `κ(τ)` for every `τ` in `[tau_min, tau_max]`, clipped to `|τ| < N`.
pub fn correlator_series(r: &TwoDRanking, tau_min: i64, tau_max: i64) -> CorrelatorSeries {
    let n = r.node_count() as i64;
    let lo = tau_min.max(-(n - 1));
    let hi = tau_max.min(n - 1);
    let p_sorted = r.pagerank.sorted_probabilities();
    let tau: Vec<i64> = (lo..=hi).collect();
    let kappa = tau
        .iter()
        .map(|&t| correlator_sorted(r, &p_sorted, t))
        .collect();
    CorrelatorSeries { tau, kappa }
}

/// Per-node components `κ_i = N P(K(i)) P*(K*(i))`; they sum to `κ(0) + 1`.
pub fn correlator_components(r: &TwoDRanking) -> Vec<f64> {
    let n = r.node_count() as f64;
    r.pagerank
        .probabilities
        .iter()
        .zip(&r.cheirank.probabilities)
        .map(|(p, q)| n * p * q)
        .collect()
}

// ---------------------------------------------------------------------------
// Histogram

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples outside `[lo, hi]`, including non-positive ones.
    pub out_of_range: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.out_of_range
    }

    /// Counts divided by the total number of samples.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total();
        self.counts
            .iter()
            .map(|&c| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / total as f64
                }
            })
            .collect()
    }
}

pub const HISTOGRAM_BINS: usize = 200;
pub const HISTOGRAM_LO: f64 = 1e-8;
pub const HISTOGRAM_HI: f64 = 1e2;

/// Histogram with `bins` cells of equal width in `log10` over `[lo, hi]`.
/// Bins are right-open except the last, which includes `hi`.
pub fn component_histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if bins == 0 || !(lo > 0.0 && lo < hi) {
        return Err(domain(format!(
            "invalid histogram range: bins={bins}, lo={lo}, hi={hi}"
        )));
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    let width = (lhi - llo) / bins as f64;
    let edges = (0..=bins)
        .map(|k| {
            if k == bins {
                hi
            } else if k == 0 {
                lo
            } else {
                10f64.powf(llo + k as f64 * width)
            }
        })
        .collect();
    let mut counts = vec![0u64; bins];
    let mut out_of_range = 0;
    for &v in values {
        if !(v >= lo && v <= hi) {
            out_of_range += 1;
            continue;
        }
        let idx = ((v.log10() - llo) / width).floor() as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        out_of_range,
    })
}

// ---------------------------------------------------------------------------
// Point count

/// `Δ(n)`: number of nodes with both `K ≤ n` and `K* ≤ n`.
pub fn point_count(r: &TwoDRanking, n: usize) -> usize {
    (0..r.node_count() as u32)
        .filter(|&i| {
            let (k, ks) = r.ranks(i);
            k as usize <= n && ks as usize <= n
        })
        .count()
}

/// `Δ(n)` for every `n ∈ [0, N]`; entry `n` holds `Δ(n)`.
pub fn point_count_curve(r: &TwoDRanking) -> Vec<usize> {
    let n = r.node_count();
    let mut curve = vec![0usize; n + 1];
    for i in 0..n as u32 {
        let (k, ks) = r.ranks(i);
        curve[k.max(ks) as usize] += 1;
    }
    for m in 1..=n {
        curve[m] += curve[m - 1];
    }
    curve
}

/// About `samples` log-spaced distinct values of `n` in `[1, N]`, always
/// including both ends.
pub fn log_spaced(n: usize, samples: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (0..samples.max(2))
        .map(|s| {
            let t = s as f64 / (samples.max(2) - 1) as f64;
            ((n as f64).powf(t).round() as usize).clamp(1, n)
        })
        .collect();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Density grids

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Cell value is the fraction of nodes; the grid sums to 1.
    Unit,
    /// Fraction of nodes divided by the number of integer `(K, K*)` points
    /// in the cell, for display.
    PerLatticePoint,
    /// Raw sums of matrix elements.
    None,
}

/// Square grid of cell values, row-major. Columns follow the x axis (`K`,
/// or the source rank `K` for matrix renders); rows follow the y axis
/// (`K*`, or the destination rank `K'`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub cells: usize,
    pub scale: Scale,
    pub normalization: Normalization,
    pub values: Vec<f64>,
    /// Color-saturation convention for plotting: `W_s^{1/4} = f · W_max^{1/4}`.
    pub saturation_quarter_power_fraction: f64,
}

impl DensityGrid {
    fn zeros(cells: usize, scale: Scale, normalization: Normalization) -> Self {
        Self {
            cells,
            scale,
            normalization,
            values: vec![0.0; cells * cells],
            saturation_quarter_power_fraction: 0.5,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cells + col]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of cells with `|row − col| ≤ width`.
    pub fn diagonal_mass(&self, width: usize) -> f64 {
        let c = self.cells;
        (0..c)
            .flat_map(|r| (0..c).map(move |col| (r, col)))
            .filter(|&(r, col)| r.abs_diff(col) <= width)
            .map(|(r, col)| self.get(r, col))
            .sum()
    }
}

pub const DENSITY_CELLS: usize = 100;

/// Node density `W(K, K*)` on a `cells × cells` grid; every cell holds the
/// fraction of nodes that fall into it.
pub fn density_grid(r: &TwoDRanking, cells: usize, scale: Scale) -> Result<DensityGrid> {
    let n = r.node_count();
    if cells == 0 {
        return Err(domain("cells must be at least 1"));
    }
    if n < 2 && scale == Scale::Log {
        return Err(domain("log-scale density grid needs N ≥ 2"));
    }
    let mut counts = vec![0u64; cells * cells];
    for i in 0..n as u32 {
        let (k, ks) = r.ranks(i);
        let col = cell_index(k, n, cells, scale);
        let row = cell_index(ks, n, cells, scale);
        counts[row * cells + col] += 1;
    }
    let mut grid = DensityGrid::zeros(cells, scale, Normalization::Unit);
    for (v, c) in grid.values.iter_mut().zip(counts) {
        *v = c as f64 / n as f64;
    }
    Ok(grid)
}

/// [`density_grid`] divided by the number of integer rank pairs covered by
/// each cell. Cells that cover no integer pair stay zero.
pub fn density_grid_per_lattice_point(
    r: &TwoDRanking,
    cells: usize,
    scale: Scale,
) -> Result<DensityGrid> {
    let mut grid = density_grid(r, cells, scale)?;
    let span = lattice_span(r.node_count(), cells, scale);
    for row in 0..cells {
        for col in 0..cells {
            let area = span[row] * span[col];
            let v = &mut grid.values[row * cells + col];
            *v = if area == 0 { 0.0 } else { *v / area as f64 };
        }
    }
    grid.normalization = Normalization::PerLatticePoint;
    Ok(grid)
}

/// Number of ranks `k ∈ [1, n]` per cell.
fn lattice_span(n: usize, cells: usize, scale: Scale) -> Vec<u64> {
    let mut span = vec![0u64; cells];
    for k in 1..=n as u32 {
        span[cell_index(k, n, cells, scale)] += 1;
    }
    span
}

pub const MATRIX_CELLS: usize = 500;
pub const MATRIX_RAW_WINDOW: usize = 200;

/// Coarse-grained Google matrix in PageRank order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRender {
    /// Sums of `G_{K'K}` per cell, linear scale; the total is `N`.
    pub grid: DensityGrid,
    pub raw_window: usize,
    /// The top-left `raw_window × raw_window` block of `G_{K'K}`, row-major.
    pub raw: Vec<f64>,
}

/// Reorders `G` by the rank permutation `rank_index` (node → 1-based `K`)
/// and sums its elements into `cells × cells` linear cells. Teleportation and
/// dangling columns are included analytically, so the cost is
/// `O(links + N + cells²)`.
pub fn matrix_density_render(
    g: &DirectedGraph,
    rank_index: &[u32],
    cells: usize,
    alpha: f64,
    raw_window: usize,
) -> Result<MatrixRender> {
    let n = g.node_count();
    if cells == 0 {
        return Err(domain("cells must be at least 1"));
    }
    if rank_index.len() != n {
        return Err(domain(format!(
            "rank permutation has {} entries, graph has {n} nodes",
            rank_index.len()
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let w = raw_window.min(n);
    let cell = |k: u32| cell_index(k, n, cells, Scale::Linear);
    let span = lattice_span(n, cells, Scale::Linear);

    // Uniform part of each column: (1−α)/N, plus α/N for dangling columns.
    let base = (1.0 - alpha) / n as f64;
    let dangling_extra = alpha / n as f64;
    let mut column_floor = vec![0.0f64; cells];
    let mut raw = vec![0.0f64; w * w];
    for j in 0..n as u32 {
        let k = rank_index[j as usize];
        let floor = if g.is_dangling(j) {
            base + dangling_extra
        } else {
            base
        };
        column_floor[cell(k)] += floor;
        if (k as usize) <= w {
            for row in 0..w {
                raw[row * w + k as usize - 1] = floor;
            }
        }
    }
    let mut grid = DensityGrid::zeros(cells, Scale::Linear, Normalization::None);
    for row in 0..cells {
        for col in 0..cells {
            grid.values[row * cells + col] = column_floor[col] * span[row] as f64;
        }
    }
    for j in 0..n as u32 {
        let succ = g.successors(j);
        if succ.is_empty() {
            continue;
        }
        let k = rank_index[j as usize];
        let total: f64 = match g.successor_weights(j) {
            Some(ws) => ws.iter().sum(),
            None => succ.len() as f64,
        };
        for (e, &i) in succ.iter().enumerate() {
            let weight = g.successor_weights(j).map_or(1.0, |ws| ws[e]);
            let value = alpha * weight / total;
            let kp = rank_index[i as usize];
            grid.values[cell(kp) * cells + cell(k)] += value;
            if (k as usize) <= w && (kp as usize) <= w {
                raw[(kp as usize - 1) * w + k as usize - 1] += value;
            }
        }
    }
    Ok(MatrixRender {
        grid,
        raw_window: w,
        raw,
    })
}

// ---------------------------------------------------------------------------
// Exponent fit

/// Least-squares slope of `ln P` against `ln K` over ranks
/// `[k_min, k_max]`, returned as the decay exponent `β` (positive for a
/// decaying `P`). Ranks with zero probability are skipped.
pub fn fit_exponent(p: &RankVector, k_min: usize, k_max: usize) -> Result<f64> {
    fit_exponent_sorted(&p.sorted_probabilities(), k_min, k_max)
}

/// [`fit_exponent`] over the default window `[10, N/10]`.
pub fn fit_exponent_default(p: &RankVector) -> Result<f64> {
    fit_exponent(p, 10, p.len() / 10)
}

/// `sorted[k − 1]` is the probability at rank `k`.
pub fn fit_exponent_sorted(sorted: &[f64], k_min: usize, k_max: usize) -> Result<f64> {
    let n = sorted.len();
    if !(1 <= k_min && k_min < k_max && k_max <= n) {
        return Err(Error::Fit(format!(
            "rank window [{k_min}, {k_max}] invalid for N = {n}"
        )));
    }
    let points: Vec<(f64, f64)> = (k_min..=k_max)
        .filter(|&k| sorted[k - 1] > 0.0)
        .map(|k| ((k as f64).ln(), sorted[k - 1].ln()))
        .collect();
    if points.len() < 10 {
        return Err(Error::Fit(format!(
            "only {} positive points in rank window, need 10",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranking(p: Vec<f64>, q: Vec<f64>) -> TwoDRanking {
        TwoDRanking::new(
            RankVector::from_probabilities(p),
            RankVector::from_probabilities(q),
        )
        .unwrap()
    }

    fn uniform(n: usize) -> TwoDRanking {
        ranking(vec![1.0 / n as f64; n], vec![1.0 / n as f64; n])
    }

    #[test]
    fn kappa_uniform_is_zero() {
        assert_eq!(correlator(&uniform(7), 0), 0.0);
        assert_eq!(correlator(&uniform(8), 0), 0.0);
    }

    #[test]
    fn kappa_two_nodes() {
        let r = ranking(vec![0.7, 0.3], vec![0.6, 0.4]);
        assert!((correlator(&r, 0) - 0.08).abs() < 1e-12);
        let comps = correlator_components(&r);
        assert!((comps[0] - 0.84).abs() < 1e-12);
        assert!((comps[1] - 0.24).abs() < 1e-12);
        assert!((comps.iter().sum::<f64>() - 1.08).abs() < 1e-12);
        // τ = 1: only node 1 has K + τ = 2 in range: 2 · 0.3 · 0.6 − 1.
        assert!((correlator(&r, 1) - (2.0 * 0.18 - 1.0)).abs() < 1e-12);
        // τ = −1: only node 2: 2 · 0.7 · 0.4 − 1.
        assert!((correlator(&r, -1) - (2.0 * 0.28 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn correlator_series_clips_tau() {
        let s = correlator_series(&uniform(4), -100, 100);
        assert_eq!(s.tau, vec![-3, -2, -1, 0, 1, 2, 3]);
        assert_eq!(s.kappa[3], 0.0);
        assert!(s.kappa.iter().all(|&k| k >= -1.0));
    }

    #[test]
    fn uniform_components() {
        let c = correlator_components(&uniform(4));
        assert!(c.iter().all(|&k| (k - 0.25).abs() < 1e-15));
    }

    #[test]
    fn histogram_boundaries() {
        let h = component_histogram(&[1e-8, 1e2], 200, 1e-8, 1e2).unwrap();
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[199], 1);
        assert_eq!(h.total(), 2);
        let empty = component_histogram(&[], 200, 1e-8, 1e2).unwrap();
        assert!(empty.counts.iter().all(|&c| c == 0));
        let mid = component_histogram(&[1.0, 1.0, 1.0], 10, 0.1, 10.0).unwrap();
        assert_eq!(mid.counts[5], 3);
        let out = component_histogram(&[0.0, -1.0, 1e3, 5e-9], 10, 1e-8, 1e2).unwrap();
        assert_eq!(out.out_of_range, 4);
        assert!(component_histogram(&[], 0, 1.0, 2.0).is_err());
        assert!(component_histogram(&[], 2, 2.0, 1.0).is_err());
    }

    #[test]
    fn point_count_limits() {
        // Fully correlated: identical rankings.
        let p: Vec<f64> = (1..=20).map(|k| 1.0 / k as f64).collect();
        let r = ranking(p.clone(), p);
        let curve = point_count_curve(&r);
        for n in 0..=20 {
            assert_eq!(curve[n], n);
            if n > 0 {
                assert_eq!(point_count(&r, n), n);
            }
        }
    }

    #[test]
    fn log_spaced_ends() {
        let s = log_spaced(1000, 100);
        assert_eq!(*s.first().unwrap(), 1);
        assert_eq!(*s.last().unwrap(), 1000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cell_boundaries() {
        assert_eq!(cell_index(1, 1000, 100, Scale::Log), 0);
        assert_eq!(cell_index(1000, 1000, 100, Scale::Log), 99);
        assert_eq!(cell_index(1, 10, 10, Scale::Linear), 0);
        assert_eq!(cell_index(10, 10, 10, Scale::Linear), 9);
        assert_eq!(cell_index(10, 10, 3, Scale::Linear), 2);
    }

    #[test]
    fn density_corners_and_mass() {
        let p: Vec<f64> = (1..=50).map(|k| 1.0 / k as f64).collect();
        let r = ranking(p.clone(), p);
        let grid = density_grid(&r, 100, Scale::Log).unwrap();
        assert_eq!(grid.get(0, 0), 1.0 / 50.0);
        // K = 49 and K = 50 both land in the last log cell.
        assert_eq!(grid.get(99, 99), 2.0 / 50.0);
        assert!((grid.total() - 1.0).abs() < 1e-9);
        let lin = density_grid(&r, 7, Scale::Linear).unwrap();
        assert!((lin.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn per_lattice_point_variant() {
        let r = uniform(4);
        let grid = density_grid_per_lattice_point(&r, 2, Scale::Linear).unwrap();
        // Each linear cell spans two ranks: 2×2 points per cell.
        assert!((grid.get(0, 0) - 0.5 / 4.0).abs() < 1e-15);
        assert_eq!(grid.get(0, 1), 0.0);
    }

    #[test]
    fn matrix_render_cycle() {
        let g = DirectedGraph::from_links(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let m = matrix_density_render(&g, &[1, 2, 3], 3, 0.85, 200).unwrap();
        let floor = 0.15 / 3.0;
        for row in 0..3 {
            for col in 0..3 {
                let on_cycle = row == (col + 1) % 3;
                let expected = if on_cycle { 0.85 + floor } else { floor };
                assert!((m.grid.get(row, col) - expected).abs() < 1e-15);
                assert!((m.raw[row * 3 + col] - expected).abs() < 1e-15);
            }
        }
        assert_eq!(m.raw_window, 3);
        assert!((m.grid.total() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_render_without_links_is_constant() {
        let g = DirectedGraph::from_links(6, []).unwrap();
        let m = matrix_density_render(&g, &[1, 2, 3, 4, 5, 6], 3, 0.85, 2).unwrap();
        // Each cell covers 2×2 elements of value 1/6.
        for v in &m.grid.values {
            assert!((v - 4.0 / 6.0).abs() < 1e-15);
        }
        assert!((m.grid.total() - 6.0).abs() < 1e-12);
        assert_eq!(m.raw.len(), 4);
    }

    #[test]
    fn exact_power_laws() {
        for beta in [0.9, 0.59] {
            let sorted: Vec<f64> = (1..=1000).map(|k| 0.3 / (k as f64).powf(beta)).collect();
            let fitted = fit_exponent_sorted(&sorted, 10, 100).unwrap();
            assert!((fitted - beta).abs() < 1e-9, "{fitted}");
        }
    }

    #[test]
    fn fit_needs_ten_points() {
        let mut sorted: Vec<f64> = (1..=100).map(|k| 1.0 / k as f64).collect();
        assert!(fit_exponent_sorted(&sorted, 1, 9).is_err());
        sorted[20..].iter_mut().for_each(|p| *p = 0.0);
        assert!(matches!(
            fit_exponent_sorted(&sorted, 15, 90),
            Err(Error::Fit(_))
        ));
        assert!(fit_exponent_sorted(&sorted, 5, 101).is_err());
    }
}

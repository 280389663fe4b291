//! Information flow on the `(K, K*)` plane.
//!
//! Nodes are binned into `cells × cells` cells by their rank pair. Every link
//! from a node in cell `(i, i*)` to a node in cell `(i', i*')` contributes
//! the displacement `(i' − i, i*' − i*)` to its source cell. The sum is then
//! divided by the number of nodes in the source cell (or, optionally, by the
//! number of links leaving it). Link weights are ignored.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::google::TwoDRanking;
use crate::graph::DirectedGraph;
use crate::stats::{cell_index, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowAverage {
    /// Divide by the number of nodes in the cell.
    PerNode,
    /// Divide by the number of links leaving the cell.
    PerLink,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowCell {
    /// Cell along `K`.
    pub i: usize,
    /// Cell along `K*`.
    pub i_star: usize,
    pub nodes: u64,
    pub links: u64,
    pub sum_dx: i64,
    pub sum_dy: i64,
    pub dx: f64,
    pub dy: f64,
    pub amplitude: f64,
    /// No nodes, or no member node has an outgoing link.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowField {
    pub cells: usize,
    pub scale: Scale,
    pub average: FlowAverage,
    /// Indexed by `i * cells + i_star`.
    pub grid: Vec<FlowCell>,
}

impl FlowField {
    pub fn cell(&self, i: usize, i_star: usize) -> &FlowCell {
        &self.grid[i * self.cells + i_star]
    }

    /// Occupied non-empty cell with the smallest amplitude; ties go to the
    /// lowest `(i, i*)`. This locates the attractor of the flow.
    pub fn fixed_point(&self) -> Option<&FlowCell> {
        self.grid
            .iter()
            .filter(|c| !c.empty)
            .min_by(|a, b| a.amplitude.total_cmp(&b.amplitude))
    }
}

pub fn compute_flow(
    g: &DirectedGraph,
    r: &TwoDRanking,
    cells: usize,
    scale: Scale,
    average: FlowAverage,
) -> Result<FlowField> {
    let n = g.node_count();
    if cells == 0 {
        return Err(domain("cells must be at least 1"));
    }
    if r.node_count() != n {
        return Err(domain(format!(
            "ranking covers {} nodes, graph has {n}",
            r.node_count()
        )));
    }
    if n < 2 && scale == Scale::Log {
        return Err(domain("log-scale flow needs N ≥ 2"));
    }
    let node_cell: Vec<(usize, usize)> = (0..n as u32)
        .map(|v| {
            let (k, ks) = r.ranks(v);
            (
                cell_index(k, n, cells, scale),
                cell_index(ks, n, cells, scale),
            )
        })
        .collect();

    let mut grid: Vec<FlowCell> = (0..cells * cells)
        .map(|idx| FlowCell {
            i: idx / cells,
            i_star: idx % cells,
            nodes: 0,
            links: 0,
            sum_dx: 0,
            sum_dy: 0,
            dx: 0.0,
            dy: 0.0,
            amplitude: 0.0,
            empty: true,
        })
        .collect();

    for src in 0..n as u32 {
        let (i, is) = node_cell[src as usize];
        let cell = &mut grid[i * cells + is];
        cell.nodes += 1;
        for &dst in g.successors(src) {
            let (j, js) = node_cell[dst as usize];
            cell.links += 1;
            cell.sum_dx += j as i64 - i as i64;
            cell.sum_dy += js as i64 - is as i64;
        }
    }

    for cell in &mut grid {
        cell.empty = cell.nodes == 0 || cell.links == 0;
        if cell.empty {
            continue;
        }
        let denom = match average {
            FlowAverage::PerNode => cell.nodes,
            FlowAverage::PerLink => cell.links,
        } as f64;
        cell.dx = cell.sum_dx as f64 / denom;
        cell.dy = cell.sum_dy as f64 / denom;
        cell.amplitude = cell.dx.hypot(cell.dy);
    }

    Ok(FlowField {
        cells,
        scale,
        average,
        grid,
    })
}

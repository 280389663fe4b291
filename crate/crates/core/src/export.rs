//! Plain-text writers for statistics, grids and fields.
//!
//! Every writer emits `#`-prefixed header lines followed by data rows.
//! Floating-point values use the shortest exponent form that round-trips,
//! so identical inputs always give byte-identical files.

use std::io::{self, Write};

use crate::flow::FlowField;
use crate::google::TwoDRanking;
use crate::spam::Eta;
use crate::stats::{CorrelatorSeries, DensityGrid, Histogram};
use crate::twod::{LocalRank, TwoDRankOrder};

/// `tau kappa` rows.
pub fn write_correlator_tsv<W: Write>(mut w: W, s: &CorrelatorSeries) -> io::Result<()> {
    writeln!(w, "# tau\tkappa")?;
    for (t, k) in s.tau.iter().zip(&s.kappa) {
        writeln!(w, "{t}\t{k:e}")?;
    }
    Ok(())
}

/// `lo_edge hi_edge count frequency` rows; `frequency` is the count over
/// all samples, including out-of-range ones.
pub fn write_histogram_tsv<W: Write>(mut w: W, h: &Histogram) -> io::Result<()> {
    writeln!(w, "# samples {}", h.total())?;
    writeln!(w, "# out_of_range {}", h.out_of_range)?;
    writeln!(w, "# lo_edge\thi_edge\tcount\tfrequency")?;
    for ((e, c), f) in h.edges.windows(2).zip(&h.counts).zip(h.frequencies()) {
        writeln!(w, "{:e}\t{:e}\t{c}\t{f:e}", e[0], e[1])?;
    }
    Ok(())
}

/// `n delta` rows.
pub fn write_point_count_tsv<W: Write>(
    mut w: W,
    nodes: usize,
    rows: &[(usize, usize)],
) -> io::Result<()> {
    writeln!(w, "# nodes {nodes}")?;
    writeln!(w, "# n\tdelta")?;
    for (n, d) in rows {
        writeln!(w, "{n}\t{d}")?;
    }
    Ok(())
}

/// Row-major CSV with a header describing the grid.
pub fn write_grid_csv<W: Write>(mut w: W, grid: &DensityGrid) -> io::Result<()> {
    writeln!(w, "# scale {}", grid.scale)?;
    writeln!(w, "# cells {}", grid.cells)?;
    let norm = match grid.normalization {
        crate::stats::Normalization::Unit => "unit",
        crate::stats::Normalization::PerLatticePoint => "per-lattice-point",
        crate::stats::Normalization::None => "none",
    };
    writeln!(w, "# normalization {norm}")?;
    writeln!(
        w,
        "# saturation W_s^(1/4) = {} W_max^(1/4)",
        grid.saturation_quarter_power_fraction
    )?;
    write_square_csv(w, grid.cells, &grid.values)
}

pub fn write_square_csv<W: Write>(mut w: W, side: usize, values: &[f64]) -> io::Result<()> {
    for row in values.chunks(side.max(1)) {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            write!(w, "{v:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `i i* n dx dy amplitude empty_flag` rows, one per cell.
pub fn write_flow_tsv<W: Write>(mut w: W, f: &FlowField) -> io::Result<()> {
    writeln!(w, "# scale {}", f.scale)?;
    writeln!(w, "# cells {}", f.cells)?;
    let avg = match f.average {
        crate::flow::FlowAverage::PerNode => "per-node",
        crate::flow::FlowAverage::PerLink => "per-link",
    };
    writeln!(w, "# average {avg}")?;
    match f.fixed_point() {
        Some(c) => writeln!(w, "# fixed_point {} {}", c.i, c.i_star)?,
        None => writeln!(w, "# fixed_point none")?,
    }
    writeln!(w, "# i\ti*\tn\tdx\tdy\tamplitude\tempty")?;
    for c in &f.grid {
        writeln!(
            w,
            "{}\t{}\t{}\t{:e}\t{:e}\t{:e}\t{}",
            c.i,
            c.i_star,
            c.nodes,
            c.dx,
            c.dy,
            c.amplitude,
            u8::from(c.empty)
        )?;
    }
    Ok(())
}

/// `eta f` rows.
pub fn write_fraction_tsv<W: Write>(mut w: W, mode: &str, curve: &[(Eta, f64)]) -> io::Result<()> {
    writeln!(w, "# mode {mode}")?;
    writeln!(w, "# eta\tf")?;
    for (eta, f) in curve {
        writeln!(w, "{eta}\t{f:e}")?;
    }
    Ok(())
}

/// `node_id 2drank K K*` rows.
pub fn write_twod_tsv<W: Write>(mut w: W, r: &TwoDRanking, t: &TwoDRankOrder) -> io::Result<()> {
    writeln!(w, "# node_id\t2drank\tK\tK*")?;
    for v in 0..r.node_count() as u32 {
        let (k, ks) = r.ranks(v);
        writeln!(w, "{}\t{}\t{k}\t{ks}", v + 1, t.index[v as usize])?;
    }
    Ok(())
}

/// `node_id k_local k*_local` rows.
pub fn write_local_tsv<W: Write>(mut w: W, ranks: &[LocalRank]) -> io::Result<()> {
    writeln!(w, "# node_id\tk_local\tk*_local")?;
    for l in ranks {
        writeln!(w, "{}\t{}\t{}", l.node + 1, l.k_local, l.k_star_local)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::google::RankVector;
    use crate::stats::{component_histogram, correlator_series, density_grid, Scale};

    fn text<F: FnOnce(&mut Vec<u8>) -> io::Result<()>>(f: F) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    fn uniform(n: usize) -> TwoDRanking {
        TwoDRanking::new(
            RankVector::from_probabilities(vec![1.0 / n as f64; n]),
            RankVector::from_probabilities(vec![1.0 / n as f64; n]),
        )
        .unwrap()
    }

    #[test]
    fn correlator_rows() {
        let s = correlator_series(&uniform(2), -1, 1);
        let out = text(|w| write_correlator_tsv(w, &s));
        assert_eq!(out.lines().nth(2).unwrap(), "0\t0e0");
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn histogram_rows() {
        let h = component_histogram(&[1.0, 1.0, 5.0], 2, 0.1, 10.0).unwrap();
        let out = text(|w| write_histogram_tsv(w, &h));
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].starts_with("1e0\t1e1\t3\t"));
    }

    #[test]
    fn grid_csv_shape() {
        let grid = density_grid(&uniform(4), 3, Scale::Linear).unwrap();
        let out = text(|w| write_grid_csv(w, &grid));
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.split(',').count() == 3));
        assert!(out.contains("# normalization unit"));
    }
}

//! Text tables for rank vectors.
//!
//! ```text
//! # alpha 0.85
//! # iterations 73
//! # node_id P K P* K*
//! 1 3.3333333333333331e-1 1 3.3333333333333331e-1 1
//! ```
//!
//! Header lines are `# key value` pairs written in the order given; the last
//! header line names the columns. Probabilities use the shortest exponent
//! form that round-trips exactly.

use std::io::{BufRead, Write};

use crate::error::{domain, Error, Result};
use crate::google::{RankVector, TwoDRanking};

pub const COLUMNS: &str = "node_id P K P* K*";

pub fn write_rank_table<W: Write>(
    mut w: W,
    r: &TwoDRanking,
    metadata: &[(String, String)],
) -> std::io::Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k} {v}")?;
    }
    writeln!(w, "# {COLUMNS}")?;
    for i in 0..r.node_count() {
        let (k, ks) = r.ranks(i as u32);
        writeln!(
            w,
            "{} {:e} {} {:e} {}",
            i + 1,
            r.pagerank.probabilities[i],
            k,
            r.cheirank.probabilities[i],
            ks
        )?;
    }
    Ok(())
}

/// Standard header for a ranking computed by power iteration.
pub fn rank_metadata(
    r: &TwoDRanking,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Vec<(String, String)> {
    vec![
        ("alpha".into(), alpha.to_string()),
        ("tol".into(), format!("{tol:e}")),
        ("max_iter".into(), max_iter.to_string()),
        ("nodes".into(), r.node_count().to_string()),
        ("iterations".into(), r.pagerank.iterations.to_string()),
        ("residual".into(), format!("{:e}", r.pagerank.residual)),
        ("iterations_star".into(), r.cheirank.iterations.to_string()),
        ("residual_star".into(), format!("{:e}", r.cheirank.residual)),
    ]
}

#[derive(Debug, Clone)]
pub struct RankTable {
    pub ranking: TwoDRanking,
    pub metadata: Vec<(String, String)>,
}

impl RankTable {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Parses a table written by [`write_rank_table`]. Rows may appear in any
/// order but must cover node ids `1..=N` exactly once, and each rank column
/// must be a permutation of `1..=N`.
pub fn read_rank_table<R: BufRead>(reader: R) -> Result<RankTable> {
    let mut metadata = Vec::new();
    let mut rows: Vec<(usize, f64, u32, f64, u32)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('#') {
            let rest = rest.trim();
            if rest == COLUMNS {
                continue;
            }
            if let Some((k, v)) = rest.split_once(char::is_whitespace) {
                metadata.push((k.to_string(), v.trim().to_string()));
            }
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(
                lineno,
                format!("expected 5 columns, found {}", fields.len()),
            ));
        }
        let node: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, "bad node id"))?;
        let p: f64 = fields[1].parse().map_err(|_| parse_err(lineno, "bad P"))?;
        let k: u32 = fields[2].parse().map_err(|_| parse_err(lineno, "bad K"))?;
        let ps: f64 = fields[3].parse().map_err(|_| parse_err(lineno, "bad P*"))?;
        let ks: u32 = fields[4].parse().map_err(|_| parse_err(lineno, "bad K*"))?;
        if !(p.is_finite() && p >= 0.0 && ps.is_finite() && ps >= 0.0) {
            return Err(parse_err(
                lineno,
                "probabilities must be finite and non-negative",
            ));
        }
        rows.push((node, p, k, ps, ks));
    }
    let n = rows.len();
    if n == 0 {
        return Err(domain("rank table has no rows"));
    }
    let mut p = vec![f64::NAN; n];
    let mut ps = vec![0.0; n];
    let mut k = vec![0u32; n];
    let mut ks = vec![0u32; n];
    for &(node, a, b, c, d) in &rows {
        if node == 0 || node > n || !p[node - 1].is_nan() {
            return Err(domain(format!(
                "node id {node} missing, repeated or out of range"
            )));
        }
        p[node - 1] = a;
        k[node - 1] = b;
        ps[node - 1] = c;
        ks[node - 1] = d;
    }
    let meta_usize = |key: &str| {
        metadata
            .iter()
            .find(|(mk, _)| mk == key)
            .and_then(|(_, v): &(String, String)| v.parse::<usize>().ok())
            .unwrap_or(0)
    };
    let meta_f64 = |key: &str| {
        metadata
            .iter()
            .find(|(mk, _)| mk == key)
            .and_then(|(_, v): &(String, String)| v.parse::<f64>().ok())
            .unwrap_or(0.0)
    };
    let mut pagerank = rank_vector(p, k)?;
    pagerank.iterations = meta_usize("iterations");
    pagerank.residual = meta_f64("residual");
    let mut cheirank = rank_vector(ps, ks)?;
    cheirank.iterations = meta_usize("iterations_star");
    cheirank.residual = meta_f64("residual_star");
    Ok(RankTable {
        ranking: TwoDRanking::new(pagerank, cheirank)?,
        metadata,
    })
}

fn rank_vector(probabilities: Vec<f64>, index: Vec<u32>) -> Result<RankVector> {
    let n = index.len();
    let mut order = vec![u32::MAX; n];
    for (node, &k) in index.iter().enumerate() {
        if k == 0 || k as usize > n || order[k as usize - 1] != u32::MAX {
            return Err(domain(format!(
                "rank column is not a permutation (K = {k})"
            )));
        }
        order[k as usize - 1] = node as u32;
    }
    Ok(RankVector {
        probabilities,
        order,
        index,
        iterations: 0,
        residual: 0.0,
        converged: true,
        residual_history: Vec::new(),
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

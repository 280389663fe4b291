//! Edge-list text format.
//!
//! One link per line as `src dst` or `src dst weight` with 1-based node ids.
//! Lines starting with `#` are comments. An optional `N <count>` line
//! declares the node count, which makes isolated trailing nodes explicit.

use std::io::{BufRead, Write};

use super::{pack, DirectedGraph};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Keep link weights (third column) and sum them over duplicates.
    pub weighted: bool,
    /// Discard `i -> i` links.
    pub drop_self_loops: bool,
}

pub fn parse_edge_list<R: BufRead>(reader: R, opts: ParseOptions) -> Result<DirectedGraph> {
    let mut declared: Option<usize> = None;
    let mut max_id: u64 = 0;
    let mut keys: Vec<u64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut tokens = text.split_whitespace();
        let first = tokens.next().unwrap();
        if first == "N" {
            let count = tokens
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .filter(|_| tokens.next().is_none())
                .ok_or_else(|| parse_err(lineno, "header must be `N <count>`"))?;
            if count == 0 {
                return Err(domain(format!(
                    "line {lineno}: declared node count must be positive"
                )));
            }
            declared = Some(count);
            continue;
        }
        let second = tokens
            .next()
            .ok_or_else(|| parse_err(lineno, "expected `source destination [weight]`"))?;
        let weight = match tokens.next() {
            None => 1.0,
            Some(t) => t
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w > 0.0)
                .ok_or_else(|| parse_err(lineno, format!("invalid weight `{t}`")))?,
        };
        if tokens.next().is_some() {
            return Err(parse_err(lineno, "too many columns"));
        }
        let src = parse_id(first, lineno)?;
        let dst = parse_id(second, lineno)?;
        if opts.drop_self_loops && src == dst {
            continue;
        }
        max_id = max_id.max(src).max(dst);
        if max_id > u64::from(u32::MAX) {
            return Err(domain(format!("line {lineno}: node id exceeds u32 range")));
        }
        keys.push(pack((src - 1) as u32, (dst - 1) as u32));
        if opts.weighted {
            weights.push(weight);
        }
    }

    let n = match declared {
        Some(n) if (n as u64) < max_id => {
            return Err(domain(format!(
                "node id {max_id} exceeds declared count {n}"
            )))
        }
        Some(n) => n,
        None => max_id as usize,
    };
    if opts.weighted {
        DirectedGraph::from_weighted_keys(n, keys.into_iter().zip(weights).collect(), true)
    } else {
        DirectedGraph::from_keys(n, keys, true)
    }
}

fn parse_id(token: &str, lineno: usize) -> Result<u64> {
    let id: i64 = token
        .parse()
        .map_err(|_| parse_err(lineno, format!("invalid node id `{token}`")))?;
    if id <= 0 {
        return Err(domain(format!(
            "line {lineno}: node id must be positive, got {id}"
        )));
    }
    Ok(id as u64)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Writes `g` with an `N` header and links sorted by source then destination.
pub fn write_edge_list<W: Write>(g: &DirectedGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "N {}", g.node_count())?;
    let weighted = g.is_weighted();
    for (s, d, wt) in g.links() {
        if weighted {
            writeln!(w, "{} {} {}", s + 1, d + 1, wt)?;
        } else {
            writeln!(w, "{} {}", s + 1, d + 1)?;
        }
    }
    Ok(())
}

impl DirectedGraph {
    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        write_edge_list(self, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

//! Plain-text edge lists and membership files.
//!
//! Edge list: one edge per line as two whitespace-separated 0-based node
//! ids. Membership: one `node-id community-id` line per node. In both,
//! blank lines and lines starting with `#` are skipped.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "expected two integers".into(),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("`{tok}` is not a non-negative integer"),
        })
    };
    let a = next()?;
    let b = next()?;
    Ok((a, b))
}

/// Reads an edge list. The node count is the larger of `min_nodes` and one
/// past the highest id seen, so trailing isolated nodes can be declared by
/// the caller.
pub fn read_edge_list<R: BufRead>(reader: R, min_nodes: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for item in data_lines(reader) {
        let (line_no, line) = item?;
        let (u, v) = parse_pair(line_no, &line)?;
        max_id = max_id.max(Some(u.max(v)));
        edges.push((u, v));
    }
    let n = max_id.map_or(0, |m| m + 1).max(min_nodes);
    Graph::new(n, edges)
}

pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes {} edges {}", graph.node_count(), graph.edge_count())?;
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Reads a membership file; every node in `0..n` must appear exactly once.
/// Community labels are compacted in order of node id.
pub fn read_membership<R: BufRead>(reader: R) -> Result<Partition> {
    let mut pairs = Vec::new();
    for item in data_lines(reader) {
        let (line_no, line) = item?;
        pairs.push(parse_pair(line_no, &line)?);
    }
    let n = pairs.len();
    let mut labels = vec![None; n];
    for &(node, community) in &pairs {
        if node >= n {
            return Err(Error::InvalidPartition(format!("node id {node} out of range for {n} entries")));
        }
        if labels[node].replace(community).is_some() {
            return Err(Error::InvalidPartition(format!("node {node} listed twice")));
        }
    }
    let labels: Vec<usize> = labels.into_iter().map(|l| l.expect("all nodes present")).collect();
    if labels.is_empty() {
        return Err(Error::InvalidPartition("no nodes".into()));
    }
    Ok(Partition::from_labels(&labels))
}

pub fn write_membership<W: Write>(partition: &Partition, mut out: W) -> Result<()> {
    for (v, &c) in partition.membership().iter().enumerate() {
        writeln!(out, "{v} {c}")?;
    }
    Ok(())
}

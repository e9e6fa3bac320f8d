//! Plain-text edge-list ingestion and canonical serialization.
//!
//! Input lines are `u v` with nonnegative integer ids; `#` starts a comment.
//! Node ids are remapped to dense integers `0..N-1` preserving ascending
//! order of the original ids. Canonical output is `u v` with `u < v`,
//! ascending, newline-terminated ASCII decimal.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};

use super::{Graph, GraphError};

/// What happened during ingestion: dropped entries and the id remap table.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
    /// `id_map[dense_id]` is the original id from the input stream. Empty
    /// when the input already used dense ids.
    pub id_map: Vec<u64>,
}

/// Parses an edge list from a byte stream into a simple undirected graph.
/// Duplicate edges and self-loops are dropped and counted in the report.
pub fn load_edge_list<R: Read>(source: R) -> Result<(Graph, LoadReport), GraphError> {
    let reader = BufReader::new(source);
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut ids: BTreeSet<u64> = BTreeSet::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(a) = tokens.next() else {
            continue; // blank or comment-only line
        };
        let Some(b) = tokens.next() else {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: "expected two node ids".into(),
            });
        };
        if tokens.next().is_some() {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: "trailing tokens after edge".into(),
            });
        }
        let parse = |tok: &str| -> Result<u64, GraphError> {
            tok.parse().map_err(|_| GraphError::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let u = parse(a)?;
        let v = parse(b)?;
        ids.insert(u);
        ids.insert(v);
        raw_edges.push((u, v));
    }

    let id_map: Vec<u64> = ids.iter().copied().collect();
    let dense = |id: u64| id_map.binary_search(&id).unwrap() as u32;
    let edges: Vec<(u32, u32)> = raw_edges
        .iter()
        .map(|&(u, v)| (dense(u), dense(v)))
        .collect();
    let (g, mut report) = Graph::from_edges_dedup(id_map.len(), &edges)?;
    report.id_map = id_map;
    Ok((g, report))
}

/// Writes the graph in canonical form: edges `u v` with `u < v`, sorted
/// ascending, one per line. Isolated nodes are not representable in an
/// edge list, so ids are compacted over the serialized nodes; this makes
/// re-serialization after a round trip byte-identical.
pub fn write_edge_list<W: Write>(g: &Graph, mut sink: W) -> Result<(), GraphError> {
    let mut dense = vec![u32::MAX; g.node_count()];
    let mut next = 0u32;
    for v in 0..g.node_count() as u32 {
        if g.degree(v) > 0 {
            dense[v as usize] = next;
            next += 1;
        }
    }
    for (u, v) in g.edges() {
        writeln!(sink, "{} {}", dense[u as usize], dense[v as usize])?;
    }
    Ok(())
}

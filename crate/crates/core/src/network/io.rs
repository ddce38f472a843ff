//! Edge-list and label file ingestion.
//!
//! Edge files hold whitespace-separated integer pairs, one edge per line;
//! `#` starts a comment. Label files hold `node_id L` or `node_id R` per
//! line. Node identity comes from the labels file (isolated nodes are kept);
//! every edge endpoint must be labeled. Graphs are undirected and simple:
//! duplicate edges collapse, self loops are rejected.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{BlockLabel, InfluenceGraph, Normalization};

/// A graph read from files, with the original node ids preserved in internal
/// index order.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: InfluenceGraph,
    pub node_ids: Vec<u64>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

pub fn load_labeled_graph<E: BufRead, L: BufRead>(
    edges: E,
    labels: L,
    normalization: Normalization,
    a: f64,
) -> Result<LoadedGraph> {
    let mut node_ids = Vec::new();
    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut label_vec = Vec::new();
    for (lineno, line) in labels.lines().enumerate() {
        let line = line?;
        let text = strip_comment(&line).trim();
        if text.is_empty() {
            continue;
        }
        let mut parts = text.split_whitespace();
        let parse_err = |msg: &str| Error::Parse { line: lineno + 1, msg: msg.to_string() };
        let id: u64 = parts
            .next()
            .ok_or_else(|| parse_err("missing node id"))?
            .parse()
            .map_err(|_| parse_err("node id is not an integer"))?;
        let label = match parts.next() {
            Some("L") => BlockLabel::L,
            Some("R") => BlockLabel::R,
            Some(other) => return Err(parse_err(&format!("unknown label token '{other}'"))),
            None => return Err(parse_err("missing label token")),
        };
        if parts.next().is_some() {
            return Err(parse_err("trailing tokens after label"));
        }
        if index.insert(id, node_ids.len() as u32).is_some() {
            return Err(parse_err(&format!("duplicate label for node {id}")));
        }
        node_ids.push(id);
        label_vec.push(label);
    }

    let mut edge_list = Vec::new();
    for (lineno, line) in edges.lines().enumerate() {
        let line = line?;
        let text = strip_comment(&line).trim();
        if text.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let mut parts = text.split_whitespace();
        let endpoint = |parts: &mut std::str::SplitWhitespace| -> Result<u32> {
            let tok = parts
                .next()
                .ok_or_else(|| parse_err("expected two node ids".into()))?;
            let id: u64 =
                tok.parse().map_err(|_| parse_err(format!("'{tok}' is not an integer")))?;
            index
                .get(&id)
                .copied()
                .ok_or_else(|| parse_err(format!("node {id} does not appear in the labels file")))
        };
        let u = endpoint(&mut parts)?;
        let v = endpoint(&mut parts)?;
        if parts.next().is_some() {
            return Err(parse_err("trailing tokens after edge".into()));
        }
        if u == v {
            return Err(parse_err(format!("self loop at node {}", node_ids[u as usize])));
        }
        edge_list.push((u, v));
    }

    let graph =
        InfluenceGraph::from_undirected_edges(node_ids.len(), &edge_list, label_vec, normalization, a)?;
    Ok(LoadedGraph { graph, node_ids })
}

/// Writes the undirected edge list (one `u v` pair per line, u < v in
/// internal order). `ids` maps internal indices to external ids; pass them
/// back from a [`LoadedGraph`] for a faithful round trip.
pub fn write_edge_list<W: Write>(mut w: W, graph: &InfluenceGraph, ids: Option<&[u64]>) -> Result<()> {
    for (u, v) in graph.undirected_edge_list() {
        match ids {
            Some(ids) => writeln!(w, "{} {}", ids[u as usize], ids[v as usize])?,
            None => writeln!(w, "{u} {v}")?,
        }
    }
    Ok(())
}

pub fn write_labels<W: Write>(mut w: W, graph: &InfluenceGraph, ids: Option<&[u64]>) -> Result<()> {
    for (i, label) in graph.labels().iter().enumerate() {
        let name = match label {
            BlockLabel::L => "L",
            BlockLabel::R => "R",
            BlockLabel::Unlabeled => {
                return Err(Error::invalid(format!("node {i} has no block label")))
            }
        };
        match ids {
            Some(ids) => writeln!(w, "{} {name}", ids[i])?,
            None => writeln!(w, "{i} {name}")?,
        }
    }
    Ok(())
}

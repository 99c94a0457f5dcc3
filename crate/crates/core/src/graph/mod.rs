//! Directed graphs and the depth-first machinery the order constructions
//! consume: deterministic depth-first forests with edge classification,
//! strongly connected components, and offline lowest common ancestors.

mod dff;
mod lca;
pub(crate) mod scc;

pub use dff::{depth_first_forest, DepthFirstForest, EdgeKind};
pub use lca::{lowest_common_ancestors, LcaError};
pub use scc::strongly_connected_components;

use crate::error::ParseError;
use std::collections::BTreeSet;
use std::fmt;

/// A directed graph over vertices `0..vertex_count` with an optional entry.
///
/// Parallel edges are collapsed; the edge set is kept sorted so successor and
/// predecessor lists iterate in ascending order, which makes everything built
/// on top of the graph reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertex_count: u32,
    edges: Vec<(u32, u32)>,
    entry: Option<u32>,
    succs: Vec<Vec<u32>>,
    preds: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    EdgeOutOfRange { edge: (u32, u32), vertex_count: u32 },
    EntryOutOfRange { entry: u32, vertex_count: u32 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EdgeOutOfRange { edge, vertex_count } => {
                write!(
                    f,
                    "edge ({}, {}) references a vertex >= {}",
                    edge.0, edge.1, vertex_count
                )
            }
            GraphError::EntryOutOfRange {
                entry,
                vertex_count,
            } => {
                write!(f, "entry {} >= vertex count {}", entry, vertex_count)
            }
        }
    }
}

impl std::error::Error for GraphError {}

impl DirectedGraph {
    pub fn new(
        vertex_count: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
        entry: Option<u32>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::EdgeOutOfRange {
                    edge: (u, v),
                    vertex_count,
                });
            }
            set.insert((u, v));
        }
        if let Some(e) = entry {
            if e >= vertex_count {
                return Err(GraphError::EntryOutOfRange {
                    entry: e,
                    vertex_count,
                });
            }
        }
        let edges: Vec<(u32, u32)> = set.into_iter().collect();
        let mut succs = vec![Vec::new(); vertex_count as usize];
        let mut preds = vec![Vec::new(); vertex_count as usize];
        for &(u, v) in &edges {
            succs[u as usize].push(v);
            preds[v as usize].push(u);
        }
        for p in &mut preds {
            p.sort_unstable();
        }
        Ok(DirectedGraph {
            vertex_count,
            edges,
            entry,
            succs,
            preds,
        })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.vertex_count
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn entry(&self) -> Option<u32> {
        self.entry
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        &self.succs[v as usize]
    }

    pub fn predecessors(&self, v: u32) -> &[u32] {
        &self.preds[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    /// Index of `(u, v)` in the sorted edge list.
    pub fn edge_index(&self, u: u32, v: u32) -> Option<usize> {
        self.edges.binary_search(&(u, v)).ok()
    }

    /// True iff the graph has no cycle (self-loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm.
        let n = self.vertex_count as usize;
        let mut indeg = vec![0u32; n];
        for &(_, v) in &self.edges {
            indeg[v as usize] += 1;
        }
        let mut queue: Vec<u32> = (0..self.vertex_count)
            .filter(|&v| indeg[v as usize] == 0)
            .collect();
        let mut seen = 0usize;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &w in self.successors(v) {
                indeg[w as usize] -= 1;
                if indeg[w as usize] == 0 {
                    queue.push(w);
                }
            }
        }
        seen == n
    }

    /// The same graph with every edge in `remove` dropped.
    pub fn without_edges(&self, remove: &BTreeSet<(u32, u32)>) -> DirectedGraph {
        DirectedGraph::new(
            self.vertex_count,
            self.edges.iter().copied().filter(|e| !remove.contains(e)),
            self.entry,
        )
        .expect("subset of a valid edge set")
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// # comment
    /// vertices N
    /// entry K        (optional)
    /// edge U V
    /// ```
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut vertex_count: Option<u32> = None;
        let mut entry: Option<u32> = None;
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = tokens_with_columns(raw);
            let (kw_col, kw) = tokens.next().expect("non-empty line has a token");
            match kw {
                "vertices" => {
                    if vertex_count.is_some() {
                        return Err(ParseError::new(lineno, kw_col, "duplicate `vertices` line"));
                    }
                    vertex_count = Some(parse_number(lineno, tokens.next(), "vertex count")?);
                    expect_end(lineno, tokens.next())?;
                }
                "entry" => {
                    if entry.is_some() {
                        return Err(ParseError::new(lineno, kw_col, "duplicate `entry` line"));
                    }
                    entry = Some(parse_number(lineno, tokens.next(), "entry vertex")?);
                    expect_end(lineno, tokens.next())?;
                }
                "edge" => {
                    let u = parse_number(lineno, tokens.next(), "edge source")?;
                    let v = parse_number(lineno, tokens.next(), "edge target")?;
                    expect_end(lineno, tokens.next())?;
                    edges.push((u, v));
                }
                other => {
                    return Err(ParseError::new(
                        lineno,
                        kw_col,
                        format!("unknown directive `{other}` (expected vertices/entry/edge)"),
                    ));
                }
            }
        }
        let vertex_count = vertex_count.ok_or_else(|| {
            ParseError::new(text.lines().count() + 1, 1, "missing `vertices N` line")
        })?;
        DirectedGraph::new(vertex_count, edges, entry)
            .map_err(|e| ParseError::new(text.lines().count(), 1, e.to_string()))
    }

    /// DOT rendering of the graph; back edges of the canonical depth-first
    /// forest are drawn dashed.
    pub fn to_dot(&self) -> String {
        let forest = depth_first_forest(self);
        let mut out = String::from("digraph g {\n");
        for v in self.vertices() {
            let shape = if self.entry == Some(v) {
                " [shape=box]"
            } else {
                ""
            };
            out.push_str(&format!("  {v}{shape};\n"));
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let style = if forest.kind_of_index(i) == EdgeKind::Back {
                " [style=dashed]"
            } else {
                ""
            };
            out.push_str(&format!("  {u} -> {v}{style};\n"));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        // Byte offset is good enough for 1-based column reporting here.
        let col = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
        (col, tok)
    })
}

pub(crate) fn parse_number<T: std::str::FromStr>(
    lineno: usize,
    token: Option<(usize, &str)>,
    what: &str,
) -> Result<T, ParseError> {
    match token {
        Some((col, tok)) => tok
            .parse::<T>()
            .map_err(|_| ParseError::new(lineno, col, format!("invalid {what} `{tok}`"))),
        None => Err(ParseError::new(lineno, 1, format!("missing {what}"))),
    }
}

pub(crate) fn expect_end(lineno: usize, token: Option<(usize, &str)>) -> Result<(), ParseError> {
    match token {
        Some((col, tok)) => Err(ParseError::new(
            lineno,
            col,
            format!("unexpected trailing token `{tok}`"),
        )),
        None => Ok(()),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::DirectedGraph;

    /// Nine-vertex loop program graph: two separate loops, the second with
    /// two latches, plus one cross edge.
    pub fn program_graph() -> DirectedGraph {
        DirectedGraph::new(
            9,
            [
                (0, 1),
                (0, 8),
                (1, 2),
                (2, 3),
                (2, 4),
                (8, 4),
                (4, 5),
                (4, 6),
                (4, 7),
                (3, 2),
                (5, 4),
                (6, 4),
            ],
            Some(0),
        )
        .unwrap()
    }

    /// Ten-vertex graph with a nested loop inside a big outer loop.
    pub fn nested_graph() -> DirectedGraph {
        DirectedGraph::new(
            11,
            [
                (1, 2),
                (2, 3),
                (3, 4),
                (3, 5),
                (6, 5),
                (4, 3),
                (5, 2),
                (2, 6),
                (6, 7),
                (6, 9),
                (7, 8),
                (9, 8),
                (2, 10),
                (8, 6),
            ],
            Some(1),
        )
        .unwrap()
        // Vertex 0 is deliberately isolated so ids align with depth-first
        // numbers when the walk starts at 1.
    }

    /// Eight-vertex irreducible graph: cross edges enter the middle of both
    /// loops, and vertex 4 has a self-loop.
    pub fn irreducible_graph() -> DirectedGraph {
        DirectedGraph::new(
            9,
            [
                (1, 2),
                (2, 3),
                (3, 2),
                (3, 4),
                (1, 5),
                (5, 6),
                (6, 7),
                (7, 3),
                (7, 8),
                (8, 4),
                (7, 6),
                (8, 5),
                (4, 4),
            ],
            Some(1),
        )
        .unwrap()
    }
}

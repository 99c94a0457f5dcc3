//! Shared fixtures and brute-force oracles for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use parafix::graph::DirectedGraph;
use parafix::wpo::WpoNodeId;
use std::collections::{BTreeMap, BTreeSet};

/// Nine-vertex two-loop program graph (entry 0, labels equal depth-first
/// numbers).
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

/// Ten-vertex graph with a doubly nested loop region (entry 1; vertex 0 is
/// intentionally outside the entry's reach so labels equal depth-first
/// numbers).
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
}

/// Eight-vertex irreducible graph: cross edges into the middle of both loops
/// and a self-loop (entry 1).
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

pub fn node(s: &str) -> WpoNodeId {
    match s.strip_prefix('x') {
        Some(rest) => WpoNodeId::Exit(rest.parse().unwrap()),
        None => WpoNodeId::Plain(s.parse().unwrap()),
    }
}

/// Reflexive-transitive closure of a relation over an arbitrary node set.
pub struct Closure {
    index: BTreeMap<WpoNodeId, usize>,
    reach: Vec<Vec<bool>>,
}

impl Closure {
    pub fn new(nodes: &BTreeSet<WpoNodeId>, edges: &BTreeSet<(WpoNodeId, WpoNodeId)>) -> Closure {
        let index: BTreeMap<WpoNodeId, usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let n = index.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            reach[index[&a]][index[&b]] = true;
        }
        for k in 0..n {
            let row_k = reach[k].clone();
            for row in reach.iter_mut() {
                if row[k] {
                    for (j, &via) in row_k.iter().enumerate() {
                        if via {
                            row[j] = true;
                        }
                    }
                }
            }
        }
        Closure { index, reach }
    }

    /// `a ->* b` (reflexive).
    pub fn reaches(&self, a: WpoNodeId, b: WpoNodeId) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.reach[i][j],
            _ => false,
        }
    }

    /// `a ->+ b` (irreflexive unless on a cycle).
    pub fn strictly_reaches(&self, a: WpoNodeId, b: WpoNodeId) -> bool {
        a != b && self.reaches(a, b)
    }
}

/// All simple cycles of a small graph, as vertex sets (the self-loop cycle is
/// a singleton). Exponential; callers keep the graphs tiny.
pub fn simple_cycles(g: &DirectedGraph) -> Vec<Vec<u32>> {
    let mut cycles: BTreeSet<Vec<u32>> = BTreeSet::new();
    let n = g.vertex_count();
    for start in 0..n {
        // Paths only through vertices >= start, so each cycle is found at its
        // minimum vertex.
        let mut path = vec![start];
        let mut on_path = vec![false; n as usize];
        on_path[start as usize] = true;
        dfs_cycles(g, start, start, &mut path, &mut on_path, &mut cycles);
    }
    cycles.into_iter().collect()
}

fn dfs_cycles(
    g: &DirectedGraph,
    start: u32,
    v: u32,
    path: &mut Vec<u32>,
    on_path: &mut [bool],
    out: &mut BTreeSet<Vec<u32>>,
) {
    for &w in g.successors(v) {
        if w == start {
            let mut cycle = path.clone();
            cycle.sort_unstable();
            out.insert(cycle);
        } else if w > start && !on_path[w as usize] {
            path.push(w);
            on_path[w as usize] = true;
            dfs_cycles(g, start, w, path, on_path, out);
            on_path[w as usize] = false;
            path.pop();
        }
    }
}

/// Edge list of graph edges whose endpoints both lie in the order's universe.
pub fn covered_edges(g: &DirectedGraph, nodes: &BTreeSet<WpoNodeId>) -> Vec<(u32, u32)> {
    g.edges()
        .iter()
        .copied()
        .filter(|&(u, v)| {
            nodes.contains(&WpoNodeId::Plain(u)) && nodes.contains(&WpoNodeId::Plain(v))
        })
        .collect()
}

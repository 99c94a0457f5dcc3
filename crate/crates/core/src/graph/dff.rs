use super::DirectedGraph;
use std::collections::BTreeMap;

/// Classification of a graph edge with respect to a depth-first forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Tree,
    Back,
    Forward,
    Cross,
}

/// A depth-first forest of a graph, with discovery (DFN) and finish
/// (post-DFN) numbers and a classification for every edge.
///
/// The walk is canonical: if the graph has an entry it is the first root,
/// remaining roots are taken in ascending vertex id, and successors are
/// explored in ascending target id. Every vertex is covered, so the result is
/// a forest even for disconnected graphs.
#[derive(Debug, Clone)]
pub struct DepthFirstForest {
    dfn: Vec<u32>,
    post_dfn: Vec<u32>,
    parent: Vec<Option<u32>>,
    root_of: Vec<u32>,
    enter: Vec<u32>,
    exit: Vec<u32>,
    classification: Vec<EdgeKind>,
    dfn_order: Vec<u32>,
    post_order: Vec<u32>,
}

impl DepthFirstForest {
    /// Discovery index of `v`.
    pub fn dfn(&self, v: u32) -> u32 {
        self.dfn[v as usize]
    }

    /// Finish index of `v`.
    pub fn post_dfn(&self, v: u32) -> u32 {
        self.post_dfn[v as usize]
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent[v as usize]
    }

    /// Root of the tree containing `v`.
    pub fn root_of(&self, v: u32) -> u32 {
        self.root_of[v as usize]
    }

    /// Vertices in discovery order.
    pub fn dfn_order(&self) -> &[u32] {
        &self.dfn_order
    }

    /// Vertices in finish order.
    pub fn post_order(&self) -> &[u32] {
        &self.post_order
    }

    /// True iff `a` is an ancestor of `d` in the forest (reflexively).
    pub fn is_ancestor(&self, a: u32, d: u32) -> bool {
        self.enter[a as usize] <= self.enter[d as usize]
            && self.exit[d as usize] <= self.exit[a as usize]
    }

    /// Classification of the `i`-th edge of the graph's sorted edge list.
    pub fn kind_of_index(&self, i: usize) -> EdgeKind {
        self.classification[i]
    }

    pub fn kind(&self, g: &DirectedGraph, u: u32, v: u32) -> Option<EdgeKind> {
        g.edge_index(u, v).map(|i| self.classification[i])
    }

    /// The full classification as an edge-keyed map.
    pub fn classification(&self, g: &DirectedGraph) -> BTreeMap<(u32, u32), EdgeKind> {
        g.edges()
            .iter()
            .copied()
            .zip(self.classification.iter().copied())
            .collect()
    }

    /// Back edges in sorted edge order.
    pub fn back_edges(&self, g: &DirectedGraph) -> Vec<(u32, u32)> {
        self.edges_of_kind(g, EdgeKind::Back)
    }

    /// Cross and forward edges in sorted edge order.
    pub fn cross_forward_edges(&self, g: &DirectedGraph) -> Vec<(u32, u32)> {
        g.edges()
            .iter()
            .copied()
            .zip(self.classification.iter())
            .filter(|(_, k)| matches!(k, EdgeKind::Cross | EdgeKind::Forward))
            .map(|(e, _)| e)
            .collect()
    }

    fn edges_of_kind(&self, g: &DirectedGraph, kind: EdgeKind) -> Vec<(u32, u32)> {
        g.edges()
            .iter()
            .copied()
            .zip(self.classification.iter())
            .filter(|(_, k)| **k == kind)
            .map(|(e, _)| e)
            .collect()
    }
}

/// Runs the canonical depth-first search over `g`.
pub fn depth_first_forest(g: &DirectedGraph) -> DepthFirstForest {
    let n = g.vertex_count() as usize;
    let mut dfn = vec![u32::MAX; n];
    let mut post_dfn = vec![u32::MAX; n];
    let mut parent = vec![None; n];
    let mut root_of = vec![u32::MAX; n];
    let mut enter = vec![0u32; n];
    let mut exit = vec![0u32; n];
    let mut dfn_order = Vec::with_capacity(n);
    let mut post_order = Vec::with_capacity(n);

    let mut clock = 0u32;
    let mut next_dfn = 0u32;
    let mut next_post = 0u32;
    // Frame: (vertex, index into its successor list).
    let mut stack: Vec<(u32, usize)> = Vec::new();

    let mut roots: Vec<u32> = Vec::with_capacity(n);
    if let Some(e) = g.entry() {
        roots.push(e);
    }
    roots.extend(0..g.vertex_count());

    for root in roots {
        if dfn[root as usize] != u32::MAX {
            continue;
        }
        dfn[root as usize] = next_dfn;
        next_dfn += 1;
        dfn_order.push(root);
        root_of[root as usize] = root;
        enter[root as usize] = clock;
        clock += 1;
        stack.push((root, 0));
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let succs = g.successors(v);
            if *i < succs.len() {
                let w = succs[*i];
                *i += 1;
                if dfn[w as usize] == u32::MAX {
                    dfn[w as usize] = next_dfn;
                    next_dfn += 1;
                    dfn_order.push(w);
                    parent[w as usize] = Some(v);
                    root_of[w as usize] = root;
                    enter[w as usize] = clock;
                    clock += 1;
                    stack.push((w, 0));
                }
            } else {
                post_dfn[v as usize] = next_post;
                next_post += 1;
                post_order.push(v);
                exit[v as usize] = clock;
                clock += 1;
                stack.pop();
            }
        }
    }

    let classification = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            if parent[v as usize] == Some(u) {
                EdgeKind::Tree
            } else if enter[v as usize] <= enter[u as usize] && exit[u as usize] <= exit[v as usize]
            {
                // v is a (reflexive) ancestor of u, so self-loops land here.
                EdgeKind::Back
            } else if enter[u as usize] <= enter[v as usize] && exit[v as usize] <= exit[u as usize]
            {
                EdgeKind::Forward
            } else {
                EdgeKind::Cross
            }
        })
        .collect();

    DepthFirstForest {
        dfn,
        post_dfn,
        parent,
        root_of,
        enter,
        exit,
        classification,
        dfn_order,
        post_order,
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;
    use crate::graph::DirectedGraph;

    #[test]
    fn program_graph_numbering_matches_labels() {
        let g = fixtures::program_graph();
        let f = depth_first_forest(&g);
        for v in g.vertices() {
            assert_eq!(f.dfn(v), v, "discovery numbers equal labels");
        }
        let post: Vec<u32> = f.post_order().to_vec();
        assert_eq!(post, vec![3, 5, 6, 7, 4, 2, 1, 8, 0]);
    }

    #[test]
    fn program_graph_edge_classification() {
        let g = fixtures::program_graph();
        let f = depth_first_forest(&g);
        assert_eq!(f.kind(&g, 3, 2), Some(EdgeKind::Back));
        assert_eq!(f.kind(&g, 5, 4), Some(EdgeKind::Back));
        assert_eq!(f.kind(&g, 6, 4), Some(EdgeKind::Back));
        assert_eq!(f.kind(&g, 8, 4), Some(EdgeKind::Cross));
        for &(u, v) in g.edges() {
            if [(3, 2), (5, 4), (6, 4), (8, 4)].contains(&(u, v)) {
                continue;
            }
            assert_eq!(f.kind(&g, u, v), Some(EdgeKind::Tree), "({u},{v})");
        }
    }

    #[test]
    fn singleton() {
        let g = DirectedGraph::new(1, [], None).unwrap();
        let f = depth_first_forest(&g);
        assert_eq!(f.dfn(0), 0);
        assert_eq!(f.post_dfn(0), 0);
        assert!(f.classification(&g).is_empty());
    }

    #[test]
    fn self_loop_is_back() {
        let g = DirectedGraph::new(2, [(0, 1), (1, 1)], None).unwrap();
        let f = depth_first_forest(&g);
        assert_eq!(f.kind(&g, 1, 1), Some(EdgeKind::Back));
    }

    #[test]
    fn cross_edges_point_at_smaller_dfn() {
        let g = fixtures::irreducible_graph();
        let f = depth_first_forest(&g);
        for (&(u, v), kind) in g.edges().iter().zip(0..) {
            if f.kind_of_index(kind) == EdgeKind::Cross {
                assert!(f.dfn(v) < f.dfn(u), "cross edge ({u},{v})");
            }
        }
    }

    #[test]
    fn irreducible_graph_removals() {
        let g = fixtures::irreducible_graph();
        let f = depth_first_forest(&g);
        let cf = f.cross_forward_edges(&g);
        assert_eq!(cf, vec![(7, 3), (8, 4)]);
        assert_eq!(f.back_edges(&g), vec![(3, 2), (4, 4), (7, 6), (8, 5)]);
    }

    #[test]
    fn removing_back_edges_leaves_dag() {
        for g in [
            fixtures::program_graph(),
            fixtures::nested_graph(),
            fixtures::irreducible_graph(),
        ] {
            let f = depth_first_forest(&g);
            let back: std::collections::BTreeSet<_> = f.back_edges(&g).into_iter().collect();
            assert!(g.without_edges(&back).is_acyclic());
        }
    }

    #[test]
    fn unreachable_vertices_become_roots() {
        let g = DirectedGraph::new(4, [(2, 3)], Some(2)).unwrap();
        let f = depth_first_forest(&g);
        // Entry tree first, then remaining ascending.
        assert_eq!(f.dfn_order(), &[2, 3, 0, 1]);
        assert_eq!(f.root_of(3), 2);
        assert_eq!(f.root_of(1), 1);
    }

    #[test]
    fn deterministic_across_calls() {
        let g = fixtures::irreducible_graph();
        let a = depth_first_forest(&g);
        let b = depth_first_forest(&g);
        assert_eq!(a.dfn_order(), b.dfn_order());
        assert_eq!(a.post_order(), b.post_order());
        assert_eq!(a.classification(&g), b.classification(&g));
    }
}

use super::DepthFirstForest;
use crate::union_find::UnionFind;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcaError {
    pub query_index: usize,
    pub query: (u32, u32),
}

impl fmt::Display for LcaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no common ancestor: query #{} ({}, {}) spans two trees",
            self.query_index, self.query.0, self.query.1
        )
    }
}

impl std::error::Error for LcaError {}

/// Answers all `queries` for lowest common ancestors in the forest at once.
///
/// This is the offline disjoint-set method: one sweep over the forest in
/// finish order, with each finished subtree merged into its parent, so the
/// total cost is almost-linear in the number of vertices plus queries. A
/// query whose endpoints lie in different trees is an error.
pub fn lowest_common_ancestors(
    forest: &DepthFirstForest,
    queries: &[(u32, u32)],
) -> Result<Vec<u32>, LcaError> {
    let n = forest.dfn_order().len();
    let mut answers = vec![u32::MAX; queries.len()];
    // Queries indexed by both endpoints; answered at whichever finishes last.
    let mut pending: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v)) in queries.iter().enumerate() {
        if forest.root_of(u) != forest.root_of(v) {
            return Err(LcaError {
                query_index: i,
                query: (u, v),
            });
        }
        if u == v {
            answers[i] = u;
        } else {
            pending[u as usize].push((v, i));
            pending[v as usize].push((u, i));
        }
    }

    let mut uf = UnionFind::new(n);
    let mut done = vec![false; n];
    for &v in forest.post_order() {
        for &(other, idx) in &pending[v as usize] {
            if done[other as usize] && answers[idx] == u32::MAX {
                answers[idx] = uf.rep(other);
            }
        }
        done[v as usize] = true;
        if let Some(p) = forest.parent(v) {
            // The merged set's label is the parent: the deepest ancestor
            // whose subtree is still being explored.
            uf.merge(v, p);
        }
    }
    Ok(answers)
}

#[cfg(test)]
mod tests {
    use super::super::{depth_first_forest, fixtures};
    use super::*;
    use crate::graph::DirectedGraph;

    #[test]
    fn program_graph_example() {
        let g = fixtures::program_graph();
        let f = depth_first_forest(&g);
        let ans = lowest_common_ancestors(&f, &[(3, 7)]).unwrap();
        assert_eq!(ans, vec![2]);
    }

    #[test]
    fn reflexive_query() {
        let g = fixtures::program_graph();
        let f = depth_first_forest(&g);
        assert_eq!(lowest_common_ancestors(&f, &[(5, 5)]).unwrap(), vec![5]);
    }

    #[test]
    fn two_trees_is_an_error() {
        let g = DirectedGraph::new(4, [(0, 1), (2, 3)], None).unwrap();
        let f = depth_first_forest(&g);
        let err = lowest_common_ancestors(&f, &[(1, 3)]).unwrap_err();
        assert_eq!(err.query, (1, 3));
    }

    #[test]
    fn mixed_batch() {
        let g = fixtures::irreducible_graph();
        let f = depth_first_forest(&g);
        // Tree shape: 1 -> 2 -> 3 -> 4 and 1 -> 5 -> 6 -> 7 -> 8.
        let ans = lowest_common_ancestors(&f, &[(4, 3), (4, 8), (6, 8), (2, 2)]).unwrap();
        assert_eq!(ans, vec![3, 1, 6, 2]);
    }
}

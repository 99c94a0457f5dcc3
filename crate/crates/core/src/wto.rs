//! Weak topological orders: a WPO whose scheduling closure is total.
//!
//! Both constructors first build the lifted WPO (every outside scheduler of a
//! component ordered before its head) and then linearize it hierarchically:
//! within each component level the super-nodes — plain members and whole
//! nested components — are emitted in a topological order, and consecutive
//! elements are chained with scheduling edges so the result is a total order.
//! Components stay contiguous, so the order prints as Bourdoncle's
//! parenthesized string and drives the classic sequential recursive solver.
//!
//! Among simultaneously ready super-nodes the linearization prefers the one
//! with the shorter longest-path-to-sink, breaking ties by smaller vertex id.
//! Any deterministic choice yields a valid WTO; this one is pinned so the two
//! constructors agree byte for byte and reruns are reproducible.

use crate::graph::{DepthFirstForest, DirectedGraph};
use crate::wpo::{construct_wpo_bu, top_down_construct, NodeIdx, Wpo, WpoNodeId};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

/// A totally ordered WPO plus the induced linear order.
#[derive(Debug, Clone)]
pub struct Wto {
    base: Wpo,
    order: Vec<WpoNodeId>,
    order_pos: HashMap<WpoNodeId, usize>,
}

impl Wto {
    /// The underlying WPO, chain edges included.
    pub fn base(&self) -> &Wpo {
        &self.base
    }

    pub fn order(&self) -> &[WpoNodeId] {
        &self.order
    }

    pub fn position(&self, id: WpoNodeId) -> Option<usize> {
        self.order_pos.get(&id).copied()
    }

    /// ω: heads of the components containing `v`, outermost first.
    pub fn heads_of(&self, v: u32) -> Vec<u32> {
        self.base.enclosing_heads(WpoNodeId::Plain(v))
    }

    /// Bourdoncle's parenthesized rendering; exits close components.
    pub fn bourdoncle_string(&self) -> String {
        let mut tokens: Vec<String> = Vec::new();
        for &id in &self.order {
            match id {
                WpoNodeId::Plain(v) if self.base.is_head(v) => tokens.push(format!("({v}")),
                WpoNodeId::Plain(v) => tokens.push(v.to_string()),
                WpoNodeId::Exit(_) => match tokens.last_mut() {
                    Some(last) => last.push(')'),
                    None => tokens.push(")".into()),
                },
            }
        }
        tokens.join(" ")
    }

    pub fn to_dot(&self) -> String {
        self.base.to_dot()
    }
}

impl PartialEq for Wto {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.base == other.base
    }
}

impl Eq for Wto {}

/// WTO via the top-down reference WPO construction.
pub fn construct_wto_td(g: &DirectedGraph, forest: &DepthFirstForest) -> Wto {
    finish(Wpo::from_raw(top_down_construct(g, forest, true), g))
}

/// WTO via the almost-linear bottom-up WPO construction.
pub fn construct_wto_bu(g: &DirectedGraph, forest: &DepthFirstForest) -> Wto {
    finish(construct_wpo_bu(g, forest, true))
}

/// The feedback edge set the WTO defines: edges that jump backwards into an
/// enclosing component head.
pub fn feedback_edges_of_wto(w: &Wto, g: &DirectedGraph) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    for &(u, v) in g.edges() {
        let (pu, pv) = (WpoNodeId::Plain(u), WpoNodeId::Plain(v));
        let (Some(up), Some(vp)) = (w.position(pu), w.position(pv)) else {
            continue;
        };
        if vp <= up && w.base.is_head(v) && w.base.is_member(pu, v) {
            out.insert((u, v));
        }
    }
    out
}

fn finish(lifted: Wpo) -> Wto {
    let order_idx = linearize(&lifted);
    let chains: Vec<(NodeIdx, NodeIdx)> = order_idx.windows(2).map(|w| (w[0], w[1])).collect();
    let base = lifted.with_extra_sched_edges(&chains);
    let order: Vec<WpoNodeId> = order_idx.iter().map(|&i| base.id(i)).collect();
    let order_pos = order.iter().enumerate().map(|(p, &id)| (id, p)).collect();
    Wto {
        base,
        order,
        order_pos,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Super {
    Node(NodeIdx),
    Comp(u32),
}

/// Linearizes a lifted WPO level by level. Returns node indices in emission
/// order; every component occupies one contiguous run.
fn linearize(w: &Wpo) -> Vec<NodeIdx> {
    let top = Wpo::top_level_tag();
    // Edge buckets per level.
    let mut level_edges: HashMap<u32, Vec<(NodeIdx, NodeIdx)>> = HashMap::new();
    for &(a, b, tag) in w.tagged_edges() {
        level_edges.entry(tag).or_default().push((a, b));
    }
    // Direct members and child components per level.
    let mut level_nodes: HashMap<u32, Vec<NodeIdx>> = HashMap::new();
    for i in 0..w.node_count() as NodeIdx {
        let tag = w.node_comp_of(i).unwrap_or(top);
        level_nodes.entry(tag).or_default().push(i);
    }
    let mut level_children: HashMap<u32, Vec<u32>> = HashMap::new();
    for c in 0..w.comp_count() as u32 {
        let tag = w.comp(c).parent.unwrap_or(top);
        level_children.entry(tag).or_default().push(c);
    }
    // A component level is keyed by the component index; remap so the head's
    // own members land in the right bucket.
    let frame_for =
        |level: u32| -> Frame { Frame::new(w, level, &level_nodes, &level_children, &level_edges) };

    let mut order: Vec<NodeIdx> = Vec::with_capacity(w.node_count());
    let mut frames: Vec<Frame> = vec![frame_for(top)];
    while let Some(frame) = frames.last_mut() {
        match frame.pop() {
            None => {
                frames.pop();
            }
            Some(Super::Node(i)) => order.push(i),
            Some(Super::Comp(c)) => {
                let sub = frame_for(c);
                frames.push(sub);
            }
        }
    }
    debug_assert_eq!(order.len(), w.node_count());
    order
}

/// Ready-queue state for one component level.
struct Frame {
    supers: Vec<Super>,
    succs: Vec<Vec<usize>>,
    indeg: Vec<u32>,
    /// (longest path to sink, vertex id, exit flag) per super.
    key: Vec<(u32, u32, bool)>,
    heap: BinaryHeap<Reverse<(u32, u32, bool, usize)>>,
}

impl Frame {
    fn new(
        w: &Wpo,
        level: u32,
        level_nodes: &HashMap<u32, Vec<NodeIdx>>,
        level_children: &HashMap<u32, Vec<u32>>,
        level_edges: &HashMap<u32, Vec<(NodeIdx, NodeIdx)>>,
    ) -> Frame {
        let empty_n: &[NodeIdx] = &[];
        let empty_c: &[u32] = &[];
        let empty_e: &[(NodeIdx, NodeIdx)] = &[];
        let nodes = level_nodes.get(&level).map_or(empty_n, |v| v.as_slice());
        let children = level_children.get(&level).map_or(empty_c, |v| v.as_slice());
        let edges = level_edges.get(&level).map_or(empty_e, |v| v.as_slice());

        let mut supers: Vec<Super> = Vec::with_capacity(nodes.len() + children.len());
        let mut local: HashMap<Super, usize> = HashMap::new();
        for &i in nodes {
            local.insert(Super::Node(i), supers.len());
            supers.push(Super::Node(i));
        }
        // Child ranges sorted by layout start, for endpoint resolution.
        let mut ranges: Vec<(u32, u32, u32)> = children
            .iter()
            .map(|&c| (w.comp(c).lo, w.comp(c).hi, c))
            .collect();
        ranges.sort_unstable();
        for &(_, _, c) in &ranges {
            local.insert(Super::Comp(c), supers.len());
            supers.push(Super::Comp(c));
        }

        let resolve = |i: NodeIdx| -> usize {
            if let Some(&s) = local.get(&Super::Node(i)) {
                return s;
            }
            let p = w.position(i);
            let at = ranges.partition_point(|&(lo, _, _)| lo <= p) - 1;
            debug_assert!(ranges[at].0 <= p && p <= ranges[at].1);
            local[&Super::Comp(ranges[at].2)]
        };

        let n = supers.len();
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0u32; n];
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(a, b) in edges {
            let (sa, sb) = (resolve(a), resolve(b));
            if sa != sb && seen.insert((sa, sb)) {
                succs[sa].push(sb);
                indeg[sb] += 1;
            }
        }

        // Longest path to a sink, by reverse topological sweep.
        let mut kahn = indeg.clone();
        let mut topo: Vec<usize> = (0..n).filter(|&s| kahn[s] == 0).collect();
        let mut i = 0;
        while i < topo.len() {
            let s = topo[i];
            i += 1;
            for &t in &succs[s] {
                kahn[t] -= 1;
                if kahn[t] == 0 {
                    topo.push(t);
                }
            }
        }
        debug_assert_eq!(topo.len(), n, "level relation must be acyclic");
        let mut height = vec![0u32; n];
        for &s in topo.iter().rev() {
            for &t in &succs[s] {
                height[s] = height[s].max(height[t] + 1);
            }
        }

        let key: Vec<(u32, u32, bool)> = supers
            .iter()
            .enumerate()
            .map(|(s, sup)| match *sup {
                Super::Node(i) => {
                    let id = w.id(i);
                    (height[s], id.vertex(), id.is_exit())
                }
                Super::Comp(c) => (height[s], w.id(w.comp(c).head).vertex(), false),
            })
            .collect();

        let mut heap = BinaryHeap::new();
        for s in 0..n {
            if indeg[s] == 0 {
                let (h, v, x) = key[s];
                heap.push(Reverse((h, v, x, s)));
            }
        }
        Frame {
            supers,
            succs,
            indeg,
            key,
            heap,
        }
    }

    fn pop(&mut self) -> Option<Super> {
        let Reverse((_, _, _, s)) = self.heap.pop()?;
        for i in 0..self.succs[s].len() {
            let t = self.succs[s][i];
            self.indeg[t] -= 1;
            if self.indeg[t] == 0 {
                let (h, v, x) = self.key[t];
                self.heap.push(Reverse((h, v, x, t)));
            }
        }
        Some(self.supers[s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{depth_first_forest, fixtures};
    use crate::wpo::testutil::node;

    fn both(g: &DirectedGraph) -> (Wto, Wto) {
        let f = depth_first_forest(g);
        (construct_wto_td(g, &f), construct_wto_bu(g, &f))
    }

    #[test]
    fn program_graph_golden_string() {
        let g = fixtures::program_graph();
        let (td, bu) = both(&g);
        assert_eq!(td.bourdoncle_string(), "0 8 1 (2 3) (4 5 6) 7");
        assert_eq!(bu.bourdoncle_string(), "0 8 1 (2 3) (4 5 6) 7");
        assert_eq!(td, bu);
    }

    #[test]
    fn nested_graph_golden_string() {
        let g = fixtures::nested_graph();
        let (td, bu) = both(&g);
        assert_eq!(td.bourdoncle_string(), "1 (2 (3 4) (6 7 9 8) 5) 10");
        assert_eq!(bu, td);
    }

    #[test]
    fn nested_graph_chain_edges() {
        let g = fixtures::nested_graph();
        let f = depth_first_forest(&g);
        let lifted = construct_wpo_bu(&g, &f, true);
        let wto = construct_wto_bu(&g, &f);
        let mut added: Vec<(WpoNodeId, WpoNodeId)> = wto
            .base()
            .scheduling_edges()
            .difference(&lifted.scheduling_edges())
            .copied()
            .collect();
        added.sort();
        assert_eq!(added, vec![(node("7"), node("9")), (node("x3"), node("6"))]);
    }

    #[test]
    fn acyclic_chain_has_no_parens() {
        let g = DirectedGraph::new(3, [(0, 1), (1, 2)], Some(0)).unwrap();
        let (td, bu) = both(&g);
        assert_eq!(td.bourdoncle_string(), "0 1 2");
        assert_eq!(td, bu);
    }

    #[test]
    fn singleton() {
        let g = DirectedGraph::new(1, [], None).unwrap();
        let (td, bu) = both(&g);
        assert_eq!(td.order(), &[node("0")]);
        assert_eq!(td, bu);
    }

    #[test]
    fn feedback_edges_match_the_wpo() {
        let g = fixtures::nested_graph();
        let f = depth_first_forest(&g);
        let wto = construct_wto_bu(&g, &f);
        let fb = feedback_edges_of_wto(&wto, &g);
        let want: BTreeSet<(u32, u32)> = [(4, 3), (8, 6), (5, 2)].into_iter().collect();
        assert_eq!(fb, want);
        assert_eq!(&fb, construct_wpo_bu(&g, &f, false).back_edges());

        let dag = DirectedGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)], Some(0)).unwrap();
        let f = depth_first_forest(&dag);
        assert!(feedback_edges_of_wto(&construct_wto_bu(&dag, &f), &dag).is_empty());
    }

    #[test]
    fn order_is_a_linear_extension_with_adjacent_links() {
        let g = fixtures::irreducible_graph();
        let f = depth_first_forest(&g);
        let wto = construct_wto_bu(&g, &f);
        for pair in wto.order().windows(2) {
            assert!(
                wto.base().has_sched_edge(pair[0], pair[1]),
                "{} -> {}",
                pair[0],
                pair[1]
            );
        }
        for (a, b) in wto.base().scheduling_edges() {
            assert!(wto.position(a).unwrap() < wto.position(b).unwrap());
        }
    }

    #[test]
    fn omega_and_string_well_formedness() {
        let g = fixtures::nested_graph();
        let f = depth_first_forest(&g);
        let wto = construct_wto_bu(&g, &f);
        assert_eq!(wto.heads_of(4), vec![2, 3]);
        assert_eq!(wto.heads_of(8), vec![2, 6]);
        assert_eq!(wto.heads_of(1), Vec::<u32>::new());
        let s = wto.bourdoncle_string();
        assert!(
            !s.contains("((") && !s.contains("( ("),
            "no two consecutive opens: {s}"
        );
        let mut depth = 0i32;
        for ch in s.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            assert!(depth >= 0);
        }
        assert_eq!(depth, 0, "balanced: {s}");
    }

    /// Every graph dependency is either forward in the order or a jump back
    /// into an enclosing head.
    #[test]
    fn order_covers_all_dependencies() {
        for g in [
            fixtures::program_graph(),
            fixtures::nested_graph(),
            fixtures::irreducible_graph(),
        ] {
            let f = depth_first_forest(&g);
            let wto = construct_wto_bu(&g, &f);
            for &(u, v) in g.edges() {
                let (Some(up), Some(vp)) = (
                    wto.position(WpoNodeId::Plain(u)),
                    wto.position(WpoNodeId::Plain(v)),
                ) else {
                    continue;
                };
                let forward = up < vp;
                let back_into_head = vp <= up && wto.heads_of(u).contains(&v);
                assert!(forward || back_into_head, "({u},{v})");
            }
        }
    }
}

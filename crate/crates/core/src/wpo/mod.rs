//! Weak partial orders: a partial order of scheduling constraints over the
//! graph vertices plus exit nodes, and a one-to-one stabilization relation
//! from each exit back to its component head.
//!
//! Two constructions are provided. [`construct_wpo_td`] is the recursive
//! reference algorithm: split into strongly connected components, detach each
//! component's minimum-DFN head, recurse, then stitch the head and a fresh
//! exit back on. [`construct_wpo_bu`] is the almost-linear bottom-up
//! algorithm in the style of the Tarjan-Havlak-Ramalingam loop-forest
//! construction; it merges nested components with a disjoint-set forest and
//! handles irreducible graphs by removing cross and forward edges up front
//! and restoring them, retargeted, at the lowest common ancestor of their
//! endpoints. Both produce structurally identical results, which the test
//! suite exercises as a differential oracle.

mod bottom_up;
mod top_down;
mod validate;

pub use bottom_up::construct_wpo_bu;
pub(crate) use top_down::construct as top_down_construct;
pub use top_down::construct_wpo_td;
pub use validate::{validate_axioms, validate_relations, Violation};

use crate::graph::DirectedGraph;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// A node of a WPO: either a graph vertex or the exit of the component headed
/// by the given vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WpoNodeId {
    Plain(u32),
    Exit(u32),
}

impl WpoNodeId {
    pub fn is_exit(&self) -> bool {
        matches!(self, WpoNodeId::Exit(_))
    }

    /// The underlying vertex: itself for a plain node, the head for an exit.
    pub fn vertex(&self) -> u32 {
        match *self {
            WpoNodeId::Plain(v) | WpoNodeId::Exit(v) => v,
        }
    }
}

impl fmt::Display for WpoNodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WpoNodeId::Plain(v) => write!(f, "{v}"),
            WpoNodeId::Exit(h) => write!(f, "x{h}"),
        }
    }
}

pub(crate) type NodeIdx = u32;

const TOP_LEVEL: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct ComponentInfo {
    pub head: NodeIdx,
    pub exit: NodeIdx,
    pub parent: Option<u32>,
    /// Layout positions covered by this component, inclusive.
    pub lo: u32,
    pub hi: u32,
}

/// The weak partial order itself.
///
/// Nodes are indexed densely; components occupy contiguous ranges of an
/// internal layout so that membership queries, member iteration and the
/// outer-predecessor counts used by the concurrent solver stay cheap even for
/// deeply nested components.
#[derive(Debug, Clone)]
pub struct Wpo {
    vertex_count: u32,
    node_ids: Vec<WpoNodeId>,
    /// vertex -> node index of its plain node / its exit (sentinel if none).
    plain_idx: Vec<NodeIdx>,
    exit_idx: Vec<NodeIdx>,
    /// Successor adjacency in compressed form, sorted within each node.
    succ_off: Vec<u32>,
    succ_dat: Vec<NodeIdx>,
    /// Scheduling edges tagged with the component (by index) whose level they
    /// connect; `TOP_LEVEL` for edges between maximal components.
    edges: Vec<(NodeIdx, NodeIdx, u32)>,
    /// `(exit, head)` pairs, in component order.
    stab: Vec<(NodeIdx, NodeIdx)>,
    comps: Vec<ComponentInfo>,
    comp_of_head: HashMap<u32, u32>,
    /// Direct enclosing component of each node, if any.
    node_comp: Vec<Option<u32>>,
    pos: Vec<u32>,
    pos_node: Vec<NodeIdx>,
    /// Layout positions of each node's scheduling predecessors, compressed
    /// and sorted within each node.
    predpos_off: Vec<u32>,
    predpos_dat: Vec<u32>,
    back_edges: BTreeSet<(u32, u32)>,
}

/// Builds the compressed adjacency views from a deduplicated edge list that
/// is sorted by (source, target).
fn build_adjacency(
    edges: &[(NodeIdx, NodeIdx, u32)],
    pos: &[u32],
    n_nodes: usize,
) -> (Vec<u32>, Vec<NodeIdx>, Vec<u32>, Vec<u32>) {
    let mut succ_off = vec![0u32; n_nodes + 1];
    let mut predpos_off = vec![0u32; n_nodes + 1];
    for &(a, b, _) in edges {
        succ_off[a as usize + 1] += 1;
        predpos_off[b as usize + 1] += 1;
    }
    for i in 0..n_nodes {
        succ_off[i + 1] += succ_off[i];
        predpos_off[i + 1] += predpos_off[i];
    }
    let mut succ_dat = vec![0 as NodeIdx; edges.len()];
    let mut predpos_dat = vec![0u32; edges.len()];
    let mut succ_cur = succ_off.clone();
    let mut pred_cur = predpos_off.clone();
    for &(a, b, _) in edges {
        // Edge order is (a, b)-sorted, so each successor run comes out
        // sorted already.
        succ_dat[succ_cur[a as usize] as usize] = b;
        succ_cur[a as usize] += 1;
        predpos_dat[pred_cur[b as usize] as usize] = pos[a as usize];
        pred_cur[b as usize] += 1;
    }
    for i in 0..n_nodes {
        predpos_dat[predpos_off[i] as usize..predpos_off[i + 1] as usize].sort_unstable();
    }
    (succ_off, succ_dat, predpos_off, predpos_dat)
}

/// Intermediate result shared by both construction algorithms.
pub(crate) struct RawWpo {
    pub vertex_count: u32,
    /// Covered vertices, ascending.
    pub vertices: Vec<u32>,
    /// Component heads (unordered).
    pub heads: Vec<u32>,
    /// Scheduling edges tagged with the head vertex of the component level
    /// they were created at (`None` for the outermost level).
    pub sched: Vec<(WpoNodeId, WpoNodeId, Option<u32>)>,
    /// vertex -> head of its directly enclosing component (for a head: the
    /// enclosing component of its own); `u32::MAX` when at the top level.
    pub parent: Vec<u32>,
}

/// Vertices the constructions cover: everything reachable from the entry
/// when one is declared, the whole vertex set otherwise.
pub(crate) fn covered_vertices(g: &DirectedGraph) -> Vec<u32> {
    match g.entry() {
        None => (0..g.vertex_count()).collect(),
        Some(e) => {
            let mut seen = vec![false; g.vertex_count() as usize];
            let mut stack = vec![e];
            seen[e as usize] = true;
            while let Some(v) = stack.pop() {
                for &w in g.successors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            (0..g.vertex_count())
                .filter(|&v| seen[v as usize])
                .collect()
        }
    }
}

impl Wpo {
    pub(crate) fn from_raw(raw: RawWpo, g: &DirectedGraph) -> Wpo {
        let mut heads = raw.heads;
        heads.sort_unstable();
        heads.dedup();

        let mut node_ids: Vec<WpoNodeId> =
            raw.vertices.iter().map(|&v| WpoNodeId::Plain(v)).collect();
        node_ids.extend(heads.iter().map(|&h| WpoNodeId::Exit(h)));
        let n_nodes = node_ids.len();

        // Dense translation tables; this path is hot enough on big graphs
        // that hashing every edge endpoint shows up.
        let mut plain_idx = vec![u32::MAX; raw.vertex_count as usize];
        for (i, &v) in raw.vertices.iter().enumerate() {
            plain_idx[v as usize] = i as u32;
        }
        let mut exit_idx = vec![u32::MAX; raw.vertex_count as usize];
        let mut comp_of = vec![u32::MAX; raw.vertex_count as usize];
        for (i, &h) in heads.iter().enumerate() {
            exit_idx[h as usize] = (raw.vertices.len() + i) as u32;
            comp_of[h as usize] = i as u32;
        }
        let to_idx = |id: WpoNodeId| -> NodeIdx {
            match id {
                WpoNodeId::Plain(v) => plain_idx[v as usize],
                WpoNodeId::Exit(h) => exit_idx[h as usize],
            }
        };

        let comp_of_head: HashMap<u32, u32> = heads
            .iter()
            .enumerate()
            .map(|(i, &h)| (h, i as u32))
            .collect();

        let parent_comp = |v: u32| -> Option<u32> {
            match raw.parent[v as usize] {
                u32::MAX => None,
                p => Some(comp_of[p as usize]),
            }
        };
        let mut comps: Vec<ComponentInfo> = heads
            .iter()
            .map(|&h| ComponentInfo {
                head: plain_idx[h as usize],
                exit: exit_idx[h as usize],
                parent: parent_comp(h),
                lo: 0,
                hi: 0,
            })
            .collect();

        // Direct enclosing component of every node.
        let mut node_comp: Vec<Option<u32>> = vec![None; n_nodes];
        for (i, &id) in node_ids.iter().enumerate() {
            node_comp[i] = match id {
                WpoNodeId::Plain(v) if comp_of[v as usize] != u32::MAX => {
                    Some(comp_of[v as usize])
                }
                WpoNodeId::Plain(v) => parent_comp(v),
                WpoNodeId::Exit(h) => Some(comp_of[h as usize]),
            };
        }

        // Children per component, and direct plain members other than the
        // head and exit (those are placed explicitly).
        let n_comps = comps.len();
        let mut comp_children: Vec<Vec<u32>> = vec![Vec::new(); n_comps];
        let mut top_comps: Vec<u32> = Vec::new();
        for (c, info) in comps.iter().enumerate() {
            match info.parent {
                Some(p) => comp_children[p as usize].push(c as u32),
                None => top_comps.push(c as u32),
            }
        }
        let mut comp_plains: Vec<Vec<NodeIdx>> = vec![Vec::new(); n_comps];
        let mut top_plains: Vec<NodeIdx> = Vec::new();
        for (i, &id) in node_ids.iter().enumerate() {
            if let WpoNodeId::Plain(v) = id {
                if comp_of_head.contains_key(&v) {
                    continue; // heads are placed by their component
                }
                match node_comp[i] {
                    Some(c) => comp_plains[c as usize].push(i as NodeIdx),
                    None => top_plains.push(i as NodeIdx),
                }
            }
        }

        // Layout: iterative traversal of the component forest so each
        // component covers one contiguous position range.
        let mut pos = vec![0u32; n_nodes];
        let mut pos_node = vec![0 as NodeIdx; n_nodes];
        let mut next_pos = 0u32;
        fn place(idx: NodeIdx, next: &mut u32, pos: &mut [u32], pos_node: &mut [NodeIdx]) {
            pos[idx as usize] = *next;
            pos_node[*next as usize] = idx;
            *next += 1;
        }
        for &p in &top_plains {
            place(p, &mut next_pos, &mut pos, &mut pos_node);
        }
        // Frames: (component, phase); phase 0 opens and places the head and
        // plain members, phase 1 closes with the exit.
        let mut frames: Vec<(u32, u8)> = Vec::new();
        for &c in top_comps.iter().rev() {
            frames.push((c, 0));
        }
        while let Some((c, phase)) = frames.pop() {
            if phase == 0 {
                comps[c as usize].lo = next_pos;
                place(
                    comps[c as usize].head,
                    &mut next_pos,
                    &mut pos,
                    &mut pos_node,
                );
                for &m in &comp_plains[c as usize] {
                    place(m, &mut next_pos, &mut pos, &mut pos_node);
                }
                frames.push((c, 1));
                for &child in comp_children[c as usize].iter().rev() {
                    frames.push((child, 0));
                }
            } else {
                place(
                    comps[c as usize].exit,
                    &mut next_pos,
                    &mut pos,
                    &mut pos_node,
                );
                comps[c as usize].hi = next_pos - 1;
            }
        }
        debug_assert_eq!(next_pos as usize, n_nodes);

        // Scheduling edges: dedup on (src, dst). Duplicates only arise within
        // one level (lift targets coinciding with base targets), so keeping
        // the smallest tag is sound and deterministic.
        let mut edges: Vec<(NodeIdx, NodeIdx, u32)> = raw
            .sched
            .iter()
            .map(|&(a, b, level)| {
                let tag = match level {
                    Some(h) => comp_of[h as usize],
                    None => TOP_LEVEL,
                };
                (to_idx(a), to_idx(b), tag)
            })
            .collect();
        edges.sort_unstable();
        edges.dedup_by_key(|&mut (a, b, _)| (a, b));

        let (succ_off, succ_dat, predpos_off, predpos_dat) =
            build_adjacency(&edges, &pos, n_nodes);

        let stab: Vec<(NodeIdx, NodeIdx)> = comps.iter().map(|c| (c.exit, c.head)).collect();

        let mut wpo = Wpo {
            vertex_count: raw.vertex_count,
            node_ids,
            plain_idx,
            exit_idx,
            succ_off,
            succ_dat,
            edges,
            stab,
            comps,
            comp_of_head,
            node_comp,
            pos,
            pos_node,
            predpos_off,
            predpos_dat,
            back_edges: BTreeSet::new(),
        };
        wpo.back_edges = wpo.compute_back_edges(g);
        wpo
    }

    /// Back edges per the defining property: graph edges `(u, v)` where `v`
    /// heads a component containing `u`.
    pub(crate) fn compute_back_edges(&self, g: &DirectedGraph) -> BTreeSet<(u32, u32)> {
        let mut out = BTreeSet::new();
        for &(u, v) in g.edges() {
            if let Some(&c) = self.comp_of_head.get(&v) {
                if let Some(ui) = self.try_idx(WpoNodeId::Plain(u)) {
                    let p = self.pos[ui as usize];
                    let info = &self.comps[c as usize];
                    if info.lo <= p && p <= info.hi {
                        out.insert((u, v));
                    }
                }
            }
        }
        out
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    /// Graph vertices covered by this order.
    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.node_ids.iter().filter_map(|id| match id {
            WpoNodeId::Plain(v) => Some(*v),
            WpoNodeId::Exit(_) => None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = WpoNodeId> + '_ {
        self.node_ids.iter().copied()
    }

    pub fn node_set(&self) -> BTreeSet<WpoNodeId> {
        self.node_ids.iter().copied().collect()
    }

    pub fn contains(&self, id: WpoNodeId) -> bool {
        self.try_idx(id).is_some()
    }

    pub(crate) fn idx(&self, id: WpoNodeId) -> NodeIdx {
        self.try_idx(id).expect("node belongs to this order")
    }

    pub(crate) fn try_idx(&self, id: WpoNodeId) -> Option<NodeIdx> {
        let table = match id {
            WpoNodeId::Plain(_) => &self.plain_idx,
            WpoNodeId::Exit(_) => &self.exit_idx,
        };
        match table.get(id.vertex() as usize) {
            Some(&i) if i != NodeIdx::MAX => Some(i),
            _ => None,
        }
    }

    pub(crate) fn id(&self, idx: NodeIdx) -> WpoNodeId {
        self.node_ids[idx as usize]
    }

    pub fn scheduling_edges(&self) -> BTreeSet<(WpoNodeId, WpoNodeId)> {
        self.edges
            .iter()
            .map(|&(a, b, _)| (self.id(a), self.id(b)))
            .collect()
    }

    pub fn stabilization_edges(&self) -> BTreeSet<(WpoNodeId, WpoNodeId)> {
        self.stab
            .iter()
            .map(|&(x, h)| (self.id(x), self.id(h)))
            .collect()
    }

    pub fn has_sched_edge(&self, a: WpoNodeId, b: WpoNodeId) -> bool {
        match (self.try_idx(a), self.try_idx(b)) {
            (Some(ai), Some(bi)) => self.succ_slice(ai).binary_search(&bi).is_ok(),
            _ => false,
        }
    }

    pub fn sched_successors(&self, id: WpoNodeId) -> Vec<WpoNodeId> {
        self.succ_slice(self.idx(id)).iter().map(|&i| self.id(i)).collect()
    }

    pub fn num_sched_preds(&self, id: WpoNodeId) -> u32 {
        self.pred_count_of(self.idx(id))
    }

    pub fn component_heads(&self) -> Vec<u32> {
        let mut hs: Vec<u32> = self.comp_of_head.keys().copied().collect();
        hs.sort_unstable();
        hs
    }

    pub fn is_head(&self, v: u32) -> bool {
        self.comp_of_head.contains_key(&v)
    }

    pub fn exit_of(&self, head: u32) -> Option<WpoNodeId> {
        self.comp_of_head.get(&head).map(|_| WpoNodeId::Exit(head))
    }

    /// Members of the component headed by `head`, in layout order.
    pub fn component_members(&self, head: u32) -> Option<Vec<WpoNodeId>> {
        let &c = self.comp_of_head.get(&head)?;
        let info = &self.comps[c as usize];
        Some(
            (info.lo..=info.hi)
                .map(|p| self.id(self.pos_node[p as usize]))
                .collect(),
        )
    }

    /// All components as head -> member set.
    ///
    /// Materializes every member list, so the output can be quadratic in the
    /// node count for deeply nested graphs; meant for tests, not the solver
    /// hot path.
    pub fn components(&self) -> BTreeMap<u32, BTreeSet<WpoNodeId>> {
        self.component_heads()
            .into_iter()
            .map(|h| (h, self.component_members(h).unwrap().into_iter().collect()))
            .collect()
    }

    pub fn is_member(&self, id: WpoNodeId, head: u32) -> bool {
        let (Some(idx), Some(&c)) = (self.try_idx(id), self.comp_of_head.get(&head)) else {
            return false;
        };
        let info = &self.comps[c as usize];
        let p = self.pos[idx as usize];
        info.lo <= p && p <= info.hi
    }

    /// Number of scheduling predecessors of `id` outside the component headed
    /// by `head`.
    pub fn num_outer_sched_preds(&self, id: WpoNodeId, head: u32) -> u32 {
        self.num_outer_sched_preds_idx(self.idx(id), self.comp_of_head[&head])
    }

    pub(crate) fn num_outer_sched_preds_idx(&self, idx: NodeIdx, c: u32) -> u32 {
        let info = &self.comps[c as usize];
        let preds = self.predpos_slice(idx);
        let inside =
            preds.partition_point(|&p| p <= info.hi) - preds.partition_point(|&p| p < info.lo);
        (preds.len() - inside) as u32
    }

    /// The feedback edge set induced by this order.
    pub fn back_edges(&self) -> &BTreeSet<(u32, u32)> {
        &self.back_edges
    }

    /// Chain of heads of components containing `id`, outermost first.
    pub fn enclosing_heads(&self, id: WpoNodeId) -> Vec<u32> {
        let Some(idx) = self.try_idx(id) else {
            return Vec::new();
        };
        let mut chain = Vec::new();
        let mut c = self.node_comp[idx as usize];
        while let Some(ci) = c {
            chain.push(self.id(self.comps[ci as usize].head).vertex());
            c = self.comps[ci as usize].parent;
        }
        chain.reverse();
        chain
    }

    pub(crate) fn comp_count(&self) -> usize {
        self.comps.len()
    }

    pub(crate) fn comp(&self, c: u32) -> &ComponentInfo {
        &self.comps[c as usize]
    }

    pub(crate) fn comp_index_of_head(&self, head: u32) -> Option<u32> {
        self.comp_of_head.get(&head).copied()
    }

    pub(crate) fn node_comp_of(&self, idx: NodeIdx) -> Option<u32> {
        self.node_comp[idx as usize]
    }

    pub(crate) fn position(&self, idx: NodeIdx) -> u32 {
        self.pos[idx as usize]
    }

    pub(crate) fn node_at_position(&self, p: u32) -> NodeIdx {
        self.pos_node[p as usize]
    }

    pub(crate) fn succ_indices(&self, idx: NodeIdx) -> &[NodeIdx] {
        self.succ_slice(idx)
    }

    pub(crate) fn pred_count_of(&self, idx: NodeIdx) -> u32 {
        self.predpos_off[idx as usize + 1] - self.predpos_off[idx as usize]
    }

    pub(crate) fn tagged_edges(&self) -> &[(NodeIdx, NodeIdx, u32)] {
        &self.edges
    }

    pub(crate) fn top_level_tag() -> u32 {
        TOP_LEVEL
    }

    /// Extends the scheduling relation with `extra` edges (used to chain a
    /// linearized order into a total one). The new edges carry no meaningful
    /// level tag.
    pub(crate) fn with_extra_sched_edges(mut self, extra: &[(NodeIdx, NodeIdx)]) -> Wpo {
        let mut grew = false;
        for &(a, b) in extra {
            if self.succ_slice(a).binary_search(&b).is_err() {
                self.edges.push((a, b, TOP_LEVEL));
                grew = true;
            }
        }
        if grew {
            self.edges.sort_unstable();
            self.edges.dedup_by_key(|&mut (a, b, _)| (a, b));
            let (succ_off, succ_dat, predpos_off, predpos_dat) =
                build_adjacency(&self.edges, &self.pos, self.node_ids.len());
            self.succ_off = succ_off;
            self.succ_dat = succ_dat;
            self.predpos_off = predpos_off;
            self.predpos_dat = predpos_dat;
        }
        self
    }

    fn succ_slice(&self, idx: NodeIdx) -> &[NodeIdx] {
        &self.succ_dat[self.succ_off[idx as usize] as usize..self.succ_off[idx as usize + 1] as usize]
    }

    fn predpos_slice(&self, idx: NodeIdx) -> &[u32] {
        &self.predpos_dat
            [self.predpos_off[idx as usize] as usize..self.predpos_off[idx as usize + 1] as usize]
    }

    /// Builds a WPO directly from its relations.
    ///
    /// Every derived structure is recomputed from scratch, with component
    /// membership taken from reachability between each head and its exit, so
    /// this runs in quadratic time; it backs [`Wpo::restrict`], golden
    /// fixtures and tests. The relations must describe a structurally valid
    /// WPO — to check arbitrary relation sets use [`validate_relations`].
    pub fn from_parts(
        vertex_count: u32,
        nodes: &BTreeSet<WpoNodeId>,
        sched: &BTreeSet<(WpoNodeId, WpoNodeId)>,
        stab: &BTreeSet<(WpoNodeId, WpoNodeId)>,
        g: &DirectedGraph,
    ) -> Wpo {
        let ids: Vec<WpoNodeId> = nodes.iter().copied().collect();
        let index: HashMap<WpoNodeId, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let n = ids.len();
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in sched {
            succs[index[&a]].push(index[&b]);
            preds[index[&b]].push(index[&a]);
        }

        let reach = |from: usize, forward: bool| -> Vec<bool> {
            let adj = if forward { &succs } else { &preds };
            let mut seen = vec![false; n];
            seen[from] = true;
            let mut stack = vec![from];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };

        // Components from the stabilization pairs: everything between a head
        // and its exit.
        let mut members: HashMap<u32, BTreeSet<WpoNodeId>> = HashMap::new();
        for &(x, h) in stab {
            let fw = reach(index[&h], true);
            let bw = reach(index[&x], false);
            let set: BTreeSet<WpoNodeId> =
                (0..n).filter(|&i| fw[i] && bw[i]).map(|i| ids[i]).collect();
            members.insert(h.vertex(), set);
        }

        let heads: Vec<u32> = members.keys().copied().collect();
        let mut parent = vec![u32::MAX; vertex_count as usize];
        let mut vertices: Vec<u32> = Vec::new();
        for &id in &ids {
            let WpoNodeId::Plain(v) = id else { continue };
            vertices.push(v);
            // The smallest strictly containing component is the direct one.
            let mut best: Option<u32> = None;
            for &h in &heads {
                if h != v
                    && members[&h].contains(&id)
                    && members[&h].len() > members.get(&v).map_or(0, |m| m.len())
                    && best.is_none_or(|b| members[&h].len() < members[&b].len())
                {
                    best = Some(h);
                }
            }
            if let Some(h) = best {
                parent[v as usize] = h;
            }
        }

        // Tag each edge with the innermost component containing both ends.
        let sched_tagged = sched
            .iter()
            .map(|&(a, b)| {
                let mut best: Option<u32> = None;
                for &h in &heads {
                    let m = &members[&h];
                    if m.contains(&a)
                        && m.contains(&b)
                        && best.is_none_or(|x| members[&h].len() < members[&x].len())
                    {
                        best = Some(h);
                    }
                }
                (a, b, best)
            })
            .collect();

        Wpo::from_raw(
            RawWpo { vertex_count, vertices, heads, sched: sched_tagged, parent },
            g,
        )
    }

    /// Restriction of the order to `nodes`, which must be either a component
    /// (head and exit included) or a component minus its head and exit.
    pub fn restrict(
        &self,
        nodes: &BTreeSet<WpoNodeId>,
        g: &DirectedGraph,
    ) -> Result<Wpo, RestrictError> {
        let sanctioned = self.component_heads().iter().any(|&h| {
            let full: BTreeSet<WpoNodeId> =
                self.component_members(h).unwrap().into_iter().collect();
            if &full == nodes {
                return true;
            }
            let mut trimmed = full;
            trimmed.remove(&WpoNodeId::Plain(h));
            trimmed.remove(&WpoNodeId::Exit(h));
            &trimmed == nodes
        });
        if !sanctioned {
            return Err(RestrictError);
        }
        let sched: BTreeSet<(WpoNodeId, WpoNodeId)> = self
            .scheduling_edges()
            .into_iter()
            .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
            .collect();
        let stab: BTreeSet<(WpoNodeId, WpoNodeId)> = self
            .stabilization_edges()
            .into_iter()
            .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
            .collect();
        Ok(Wpo::from_parts(self.vertex_count, nodes, &sched, &stab, g))
    }

    /// Stable text dump: `node`, `sched`, `stab` lines in sorted order.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for id in self.node_set() {
            out.push_str(&format!("node {id}\n"));
        }
        for (a, b) in self.scheduling_edges() {
            out.push_str(&format!("sched {a} {b}\n"));
        }
        for (x, h) in self.stabilization_edges() {
            out.push_str(&format!("stab {x} {h}\n"));
        }
        out
    }

    /// DOT rendering: plain nodes as circles, exits as double circles, solid
    /// scheduling edges, dashed curved stabilization edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph wpo {\n");
        for id in self.node_set() {
            let shape = if id.is_exit() {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!("  \"{id}\" [shape={shape}];\n"));
        }
        for (a, b) in self.scheduling_edges() {
            out.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
        }
        for (x, h) in self.stabilization_edges() {
            out.push_str(&format!(
                "  \"{x}\" -> \"{h}\" [style=dashed, constraint=false];\n"
            ));
        }
        out.push_str("}\n");
        out
    }
}

impl PartialEq for Wpo {
    fn eq(&self, other: &Self) -> bool {
        self.node_set() == other.node_set()
            && self.scheduling_edges() == other.scheduling_edges()
            && self.stabilization_edges() == other.stabilization_edges()
    }
}

impl Eq for Wpo {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestrictError;

impl fmt::Display for RestrictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "restriction set is neither a component nor a component minus its head and exit"
        )
    }
}

impl std::error::Error for RestrictError {}

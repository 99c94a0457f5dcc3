//! Bottom-up iterative WPO construction in almost-linear time.
//!
//! The driver walks the vertices in descending DFN, so the component of a
//! nested SCC is finished before the component that encloses it. A
//! disjoint-set forest tracks which vertices are already known to be strongly
//! connected; `rep` always names the minimum-DFN member of its set, which is
//! the unique entry of the merged region once the graph is reducible.
//!
//! Irreducible graphs are made reducible up front by removing every cross and
//! forward edge. A removed edge `(u, v)` is restored as `(u, rep(v))` when
//! the walk reaches the lowest common ancestor of `u` and `v` in the
//! depth-first forest; by that point `rep(v)` is the entry of the largest
//! already-built region around `v`, so the restored edge cannot re-introduce
//! a secondary loop entry. The original target is remembered on the side so
//! scheduling constraints still point at the real dependency.

use super::{covered_vertices, RawWpo, Wpo, WpoNodeId};
use crate::graph::{lowest_common_ancestors, DepthFirstForest, DirectedGraph, EdgeKind};
use crate::union_find::UnionFind;


/// Builds the WPO of `g` for the given depth-first forest.
///
/// With `lift` set, extra scheduling edges force every outside scheduler of a
/// component to run before the component's head; the lifted order is what the
/// WTO linearization starts from and is otherwise not needed.
pub fn construct_wpo_bu(g: &DirectedGraph, forest: &DepthFirstForest, lift: bool) -> Wpo {
    let t = std::time::Instant::now();
    let raw = construct(g, forest, lift);
    let t_construct = t.elapsed();
    let t = std::time::Instant::now();
    let w = Wpo::from_raw(raw, g);
    if std::env::var_os("PARAFIX_PHASE_TIMING").is_some() {
        eprintln!("construct {:?} from_raw {:?}", t_construct, t.elapsed());
    }
    w
}

pub(crate) fn construct(g: &DirectedGraph, forest: &DepthFirstForest, lift: bool) -> RawWpo {
    let n = g.vertex_count() as usize;
    let vertices = covered_vertices(g);
    let mut covered = vec![false; n];
    for &v in &vertices {
        covered[v as usize] = true;
    }

    // Split the covered edges by classification; cross/forward edges leave
    // the graph for now.
    let mut back_preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut preds_current: Vec<Vec<u32>> = vec![Vec::new(); n];
    // Original non-back edges, keyed by their current (possibly retargeted)
    // endpoint.
    let mut original: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut removed: Vec<(u32, u32)> = Vec::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if !covered[u as usize] {
            continue;
        }
        match forest.kind_of_index(i) {
            EdgeKind::Back => back_preds[v as usize].push(u),
            EdgeKind::Cross | EdgeKind::Forward => removed.push((u, v)),
            EdgeKind::Tree => {
                preds_current[v as usize].push(u);
                original[v as usize].push((u, v));
            }
        }
    }

    // Restoration site per removed edge: the LCA of its endpoints. An edge
    // spanning two trees can never sit on a cycle (the target's tree finished
    // before the source's started), so it must stay out of the backward SCC
    // searches entirely and is only handed to the final connection pass.
    let mut restore_at: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut cross_tree: Vec<(u32, u32)> = Vec::new();
    let same_tree: Vec<(u32, u32)> = removed
        .iter()
        .copied()
        .filter(|&(u, v)| forest.root_of(u) == forest.root_of(v))
        .collect();
    let lcas = lowest_common_ancestors(forest, &same_tree)
        .expect("same-tree queries always have an ancestor");
    let mut li = 0;
    for &(u, v) in &removed {
        if forest.root_of(u) == forest.root_of(v) {
            restore_at[lcas[li] as usize].push((u, v));
            li += 1;
        } else {
            cross_tree.push((u, v));
        }
    }

    let mut uf = UnionFind::new(n);
    // Exit node of the component currently represented by each vertex;
    // starts out as the vertex itself.
    let mut exit_node: Vec<WpoNodeId> = (0..n as u32).map(WpoNodeId::Plain).collect();

    let mut heads: Vec<u32> = Vec::new();
    let mut sched: Vec<(WpoNodeId, WpoNodeId, Option<u32>)> = Vec::new();
    let mut parent = vec![u32::MAX; n];

    let mut order: Vec<u32> = vertices.clone();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(forest.dfn(v)));

    // Reused scratch for the backward searches: a vertex is in the current
    // search iff its stamp matches the iteration.
    let mut stamp = vec![u32::MAX; n];
    let mut worklist: Vec<u32> = Vec::new();
    let mut latch_reps: Vec<u32> = Vec::new();
    let mut nested: Vec<u32> = Vec::new();

    for (round, &h) in order.iter().enumerate() {
        for &(u, v) in &restore_at[h as usize] {
            let rv = uf.rep(v);
            preds_current[rv as usize].push(u);
            original[rv as usize].push((u, v));
        }

        // Representatives of the nested SCCs of the largest SCC headed by h,
        // found by walking the non-back edges backwards from h's back-edge
        // predecessors.
        latch_reps.clear();
        for &p in &back_preds[h as usize] {
            let r = uf.rep(p);
            latch_reps.push(r);
        }
        latch_reps.sort_unstable();
        latch_reps.dedup();
        if latch_reps.is_empty() {
            continue;
        }
        let round = round as u32;
        worklist.clear();
        for &p in &latch_reps {
            if p != h && stamp[p as usize] != round {
                stamp[p as usize] = round;
                worklist.push(p);
            }
        }
        nested.clear();
        while let Some(v) = worklist.pop() {
            nested.push(v);
            for &p in &preds_current[v as usize] {
                let rp = uf.rep(p);
                if rp != h && stamp[rp as usize] != round {
                    stamp[rp as usize] = round;
                    worklist.push(rp);
                }
            }
        }
        nested.sort_unstable();

        heads.push(h);
        let exit = WpoNodeId::Exit(h);
        for &v in &nested {
            for &(u, v_orig) in &original[v as usize] {
                sched.push((
                    exit_node[uf.rep(u) as usize],
                    WpoNodeId::Plain(v_orig),
                    Some(h),
                ));
            }
            if lift {
                for &u in &preds_current[v as usize] {
                    sched.push((exit_node[uf.rep(u) as usize], WpoNodeId::Plain(v), Some(h)));
                }
            }
            parent[v as usize] = h;
        }
        for &p in &latch_reps {
            sched.push((exit_node[p as usize], exit, Some(h)));
        }
        exit_node[h as usize] = exit;
        for &v in &nested {
            uf.merge(v, h);
        }
    }

    // Acyclic tree-to-tree dependencies re-enter here, against the final
    // partition.
    for &(u, v) in &cross_tree {
        let rv = uf.rep(v);
        preds_current[rv as usize].push(u);
        original[rv as usize].push((u, v));
    }

    // Connect maximal regions: every surviving representative consumes the
    // dependencies that now target it.
    for &v in &vertices {
        if uf.rep(v) != v {
            continue;
        }
        for &(u, v_orig) in &original[v as usize] {
            sched.push((
                exit_node[uf.rep(u) as usize],
                WpoNodeId::Plain(v_orig),
                None,
            ));
        }
        if lift {
            for &u in &preds_current[v as usize] {
                sched.push((exit_node[uf.rep(u) as usize], WpoNodeId::Plain(v), None));
            }
        }
    }

    RawWpo { vertex_count: g.vertex_count(), vertices, heads, sched, parent }
}

//! Top-down recursive WPO construction.
//!
//! Worst-case cubic (repeated SCC decomposition), but short and close to the
//! defining recursion, so it stays in the crate permanently as the
//! differential-testing oracle for the bottom-up construction.

use super::{covered_vertices, RawWpo, Wpo, WpoNodeId};
use crate::graph::scc::tarjan;
use crate::graph::{DepthFirstForest, DirectedGraph};
use std::collections::HashMap;

/// Builds the WPO of `g` by recursive SCC decomposition.
pub fn construct_wpo_td(g: &DirectedGraph, forest: &DepthFirstForest) -> Wpo {
    Wpo::from_raw(construct(g, forest, false), g)
}

/// Shared with the WTO construction, which needs the lifted variant.
pub(crate) fn construct(g: &DirectedGraph, forest: &DepthFirstForest, lift: bool) -> RawWpo {
    let vertices = covered_vertices(g);
    let nodes: Vec<WpoNodeId> = vertices.iter().map(|&v| WpoNodeId::Plain(v)).collect();
    let local: HashMap<u32, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut succs: Vec<Vec<u32>> = vec![Vec::new(); nodes.len()];
    for &(u, v) in g.edges() {
        if let (Some(&a), Some(&b)) = (local.get(&u), local.get(&v)) {
            succs[a].push(b as u32);
        }
    }
    let dfn: Vec<u64> = vertices.iter().map(|&v| forest.dfn(v) as u64).collect();

    let mut out = Out {
        heads: Vec::new(),
        sched: Vec::new(),
        parent: vec![u32::MAX; g.vertex_count() as usize],
        lift,
    };
    process_level(&nodes, &succs, &dfn, None, &mut out);

    RawWpo {
        vertex_count: g.vertex_count(),
        vertices,
        heads: out.heads,
        sched: out.sched,
        parent: out.parent,
    }
}

struct Out {
    heads: Vec<u32>,
    sched: Vec<(WpoNodeId, WpoNodeId, Option<u32>)>,
    /// vertex -> directly enclosing head, or the sentinel at top level.
    parent: Vec<u32>,
    lift: bool,
}

/// Decomposes one scratch graph into maximal SCCs, builds a sub-WPO per SCC,
/// and connects them: a dependency that crosses SCCs is scheduled from the
/// exit of the source's SCC. Returns each scratch node's SCC representative
/// (the nested head, or the node itself), which the caller needs to lift the
/// detached head's own dependencies.
fn process_level(
    nodes: &[WpoNodeId],
    succs: &[Vec<u32>],
    dfn: &[u64],
    level: Option<u32>,
    out: &mut Out,
) -> Vec<WpoNodeId> {
    let n = nodes.len();
    let sccs = tarjan(n, |v| &succs[v]);
    let mut scc_of = vec![0u32; n];
    for (i, comp) in sccs.iter().enumerate() {
        for &m in comp {
            scc_of[m as usize] = i as u32;
        }
    }

    let mut exit_of_scc: Vec<WpoNodeId> = Vec::with_capacity(sccs.len());
    let mut repr_of_scc: Vec<WpoNodeId> = Vec::with_capacity(sccs.len());
    for comp in &sccs {
        let (exit, repr) = scc_wpo(comp, nodes, succs, dfn, level, out);
        exit_of_scc.push(exit);
        repr_of_scc.push(repr);
    }

    for (a, targets) in succs.iter().enumerate() {
        for &b in targets {
            let (sa, sb) = (scc_of[a], scc_of[b as usize]);
            if sa != sb {
                out.sched
                    .push((exit_of_scc[sa as usize], nodes[b as usize], level));
                if out.lift {
                    out.sched
                        .push((exit_of_scc[sa as usize], repr_of_scc[sb as usize], level));
                }
            }
        }
    }

    (0..n).map(|v| repr_of_scc[scc_of[v] as usize]).collect()
}

/// WPO of one strongly connected scratch subgraph. Returns the node that
/// represents the SCC's exit for cross-SCC scheduling (the SCC's own node if
/// trivial) and the node outside schedulers are lifted to (its head).
fn scc_wpo(
    members: &[u32],
    nodes: &[WpoNodeId],
    succs: &[Vec<u32>],
    dfn: &[u64],
    level: Option<u32>,
    out: &mut Out,
) -> (WpoNodeId, WpoNodeId) {
    let has_self_loop = members.len() == 1 && succs[members[0] as usize].contains(&members[0]);
    if members.len() == 1 && !has_self_loop {
        let id = nodes[members[0] as usize];
        if let (WpoNodeId::Plain(v), Some(h)) = (id, level) {
            out.parent[v as usize] = h;
        }
        return (id, id);
    }

    let &h_local = members
        .iter()
        .min_by_key(|&&m| dfn[m as usize])
        .expect("non-empty SCC");
    let h = match nodes[h_local as usize] {
        WpoNodeId::Plain(v) => v,
        WpoNodeId::Exit(_) => unreachable!("exits are sinks and cannot join a cycle"),
    };
    out.heads.push(h);
    if let Some(up) = level {
        out.parent[h as usize] = up;
    }
    let head_id = WpoNodeId::Plain(h);
    let exit_id = WpoNodeId::Exit(h);

    if has_self_loop {
        out.sched.push((head_id, exit_id, Some(h)));
        return (exit_id, head_id);
    }

    // Detach the head, add the exit as the unique sink, redirect the back
    // edges (v, h) to it, and recurse on the modified subgraph.
    let in_members = {
        let mut mask = vec![false; nodes.len()];
        for &m in members {
            mask[m as usize] = true;
        }
        mask
    };
    let mut sub_nodes: Vec<WpoNodeId> = Vec::with_capacity(members.len());
    let mut sub_local: HashMap<u32, u32> = HashMap::new();
    for &m in members {
        if m != h_local {
            sub_local.insert(m, sub_nodes.len() as u32);
            sub_nodes.push(nodes[m as usize]);
        }
    }
    let exit_local = sub_nodes.len() as u32;
    sub_nodes.push(exit_id);

    let mut sub_succs: Vec<Vec<u32>> = vec![Vec::new(); sub_nodes.len()];
    let mut self_loop_at_head = false;
    for &m in members {
        if m == h_local {
            self_loop_at_head = succs[m as usize].contains(&h_local);
            continue;
        }
        let a = sub_local[&m];
        for &b in &succs[m as usize] {
            if !in_members[b as usize] {
                continue;
            }
            if b == h_local {
                sub_succs[a as usize].push(exit_local);
            } else {
                sub_succs[a as usize].push(sub_local[&b]);
            }
        }
    }
    for s in &mut sub_succs {
        s.sort_unstable();
        s.dedup();
    }
    // Exits keep the sentinel so they are never picked as heads.
    let mut sub_dfn: Vec<u64> = vec![u64::MAX; sub_nodes.len()];
    for &m in members {
        if m != h_local {
            sub_dfn[sub_local[&m] as usize] = dfn[m as usize];
        }
    }

    let sub_repr = process_level(&sub_nodes, &sub_succs, &sub_dfn, Some(h), out);

    // Re-attach the head: its in-SCC dependencies become scheduling edges
    // (lifted to the nested head where applicable), and a self-loop on the
    // head is covered by the head-to-exit edge.
    for &b in &succs[h_local as usize] {
        if in_members[b as usize] && b != h_local {
            out.sched.push((head_id, nodes[b as usize], Some(h)));
            if out.lift {
                out.sched
                    .push((head_id, sub_repr[sub_local[&b] as usize], Some(h)));
            }
        }
    }
    if self_loop_at_head {
        out.sched.push((head_id, exit_id, Some(h)));
    }

    (exit_id, head_id)
}

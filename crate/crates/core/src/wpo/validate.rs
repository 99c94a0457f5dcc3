//! Axiom validator for weak partial orders.
//!
//! Checks the defining conditions directly over an explicit
//! reflexive-transitive closure of the scheduling relation, in cubic time.
//! This is deliberately the slow, obviously-correct formulation: it serves as
//! the oracle that the construction algorithms are tested against, not as a
//! fast path.

use super::{Wpo, WpoNodeId};
use crate::graph::DirectedGraph;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A violated axiom together with a witness.
///
/// `H1`-`H5` are the hierarchical-order conditions (partial order, one-to-one
/// stabilization, exit after head, well-nested components, no leak past the
/// exit); `W2`/`W3` are shape conditions on the relations and `W5` requires
/// every graph dependency to be covered. The condition that exits are fresh
/// nodes (`W1`) cannot be violated here because plain and exit nodes are
/// distinct by type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// W2: a stabilization pair is not exit-to-vertex or mentions a node
    /// outside the order.
    StabMalformed { pair: (WpoNodeId, WpoNodeId) },
    /// W2: an exit node with no outgoing stabilization edge.
    ExitWithoutStab { exit: WpoNodeId },
    /// W3: a scheduling edge mentions a node outside the order.
    SchedMalformed { edge: (WpoNodeId, WpoNodeId) },
    /// H1: the scheduling closure is not antisymmetric.
    NotAntisymmetric { a: WpoNodeId, b: WpoNodeId },
    /// H2: two stabilization pairs share an endpoint.
    StabNotOneToOne {
        first: (WpoNodeId, WpoNodeId),
        second: (WpoNodeId, WpoNodeId),
    },
    /// H3: a head does not strictly precede its exit.
    HeadNotBeforeExit { exit: WpoNodeId, head: WpoNodeId },
    /// H4: two components neither nest nor are disjoint.
    ComponentsOverlap {
        head_a: WpoNodeId,
        head_b: WpoNodeId,
    },
    /// H5: a component member reaches `escapee` although the exit does not.
    ExitLeak {
        member: WpoNodeId,
        escapee: WpoNodeId,
        exit: WpoNodeId,
    },
    /// W5: a graph edge neither scheduled nor absorbed by a stabilization.
    EdgeNotCovered { edge: (u32, u32) },
}

impl Violation {
    pub fn axiom(&self) -> &'static str {
        match self {
            Violation::StabMalformed { .. } | Violation::ExitWithoutStab { .. } => "W2",
            Violation::SchedMalformed { .. } => "W3",
            Violation::NotAntisymmetric { .. } => "H1",
            Violation::StabNotOneToOne { .. } => "H2",
            Violation::HeadNotBeforeExit { .. } => "H3",
            Violation::ComponentsOverlap { .. } => "H4",
            Violation::ExitLeak { .. } => "H5",
            Violation::EdgeNotCovered { .. } => "W5",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StabMalformed { pair } => {
                write!(
                    f,
                    "W2: stabilization pair ({}, {}) is malformed",
                    pair.0, pair.1
                )
            }
            Violation::ExitWithoutStab { exit } => {
                write!(f, "W2: exit {exit} has no stabilization edge")
            }
            Violation::SchedMalformed { edge } => {
                write!(
                    f,
                    "W3: scheduling edge ({}, {}) leaves the node set",
                    edge.0, edge.1
                )
            }
            Violation::NotAntisymmetric { a, b } => {
                write!(f, "H1: {a} and {b} are mutually reachable")
            }
            Violation::StabNotOneToOne { first, second } => write!(
                f,
                "H2: stabilization pairs ({}, {}) and ({}, {}) share an endpoint",
                first.0, first.1, second.0, second.1
            ),
            Violation::HeadNotBeforeExit { exit, head } => {
                write!(f, "H3: head {head} does not strictly precede exit {exit}")
            }
            Violation::ComponentsOverlap { head_a, head_b } => {
                write!(
                    f,
                    "H4: components of {head_a} and {head_b} overlap without nesting"
                )
            }
            Violation::ExitLeak {
                member,
                escapee,
                exit,
            } => write!(f, "H5: {member} leaks to {escapee} bypassing exit {exit}"),
            Violation::EdgeNotCovered { edge } => {
                write!(f, "W5: graph edge ({}, {}) is not covered", edge.0, edge.1)
            }
        }
    }
}

/// Validates a WPO against its graph. Empty result means all axioms hold.
pub fn validate_axioms(w: &Wpo, g: &DirectedGraph) -> Vec<Violation> {
    validate_relations(
        &w.node_set(),
        &w.scheduling_edges(),
        &w.stabilization_edges(),
        g,
    )
}

/// Validates arbitrary relation sets, so broken or hand-mutated structures
/// can be checked without first building a [`Wpo`].
///
/// The graph is implicitly restricted to the vertices present in `nodes`:
/// edges with an endpoint outside the node set are not required to be
/// covered. This makes the validator directly usable on restrictions.
pub fn validate_relations(
    nodes: &BTreeSet<WpoNodeId>,
    sched: &BTreeSet<(WpoNodeId, WpoNodeId)>,
    stab: &BTreeSet<(WpoNodeId, WpoNodeId)>,
    g: &DirectedGraph,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let ids: Vec<WpoNodeId> = nodes.iter().copied().collect();
    let index: BTreeMap<WpoNodeId, usize> =
        ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();

    // Shape checks first; malformed pairs are excluded from the closure.
    for &(x, h) in stab {
        let shape_ok = x.is_exit() && !h.is_exit();
        if !shape_ok || !nodes.contains(&x) || !nodes.contains(&h) {
            violations.push(Violation::StabMalformed { pair: (x, h) });
        }
    }
    for &id in nodes {
        if id.is_exit() && !stab.iter().any(|&(x, _)| x == id) {
            violations.push(Violation::ExitWithoutStab { exit: id });
        }
    }
    for &(a, b) in sched {
        if !nodes.contains(&a) || !nodes.contains(&b) {
            violations.push(Violation::SchedMalformed { edge: (a, b) });
        }
    }

    // Reflexive-transitive closure of the scheduling relation.
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in sched {
        if let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) {
            reach[i][j] = true;
        }
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

    // H1: antisymmetry.
    for i in 0..n {
        for j in (i + 1)..n {
            if reach[i][j] && reach[j][i] {
                violations.push(Violation::NotAntisymmetric {
                    a: ids[i],
                    b: ids[j],
                });
            }
        }
    }

    // H2: one-to-one.
    let pairs: Vec<(WpoNodeId, WpoNodeId)> = stab.iter().copied().collect();
    for (i, &(x1, h1)) in pairs.iter().enumerate() {
        for &(x2, h2) in &pairs[i + 1..] {
            if x1 == x2 || h1 == h2 {
                violations.push(Violation::StabNotOneToOne {
                    first: (x1, h1),
                    second: (x2, h2),
                });
            }
        }
    }

    // H3: head strictly precedes exit.
    let valid_stab: Vec<(WpoNodeId, WpoNodeId)> = pairs
        .iter()
        .copied()
        .filter(|&(x, h)| x.is_exit() && !h.is_exit() && nodes.contains(&x) && nodes.contains(&h))
        .collect();
    for &(x, h) in &valid_stab {
        let (xi, hi) = (index[&x], index[&h]);
        if xi == hi || !reach[hi][xi] {
            violations.push(Violation::HeadNotBeforeExit { exit: x, head: h });
        }
    }

    // Components: everything between a head and its exit.
    let component = |x: WpoNodeId, h: WpoNodeId| -> Vec<usize> {
        let (xi, hi) = (index[&x], index[&h]);
        (0..n).filter(|&u| reach[hi][u] && reach[u][xi]).collect()
    };

    // H4: the component family is a forest under inclusion.
    for (i, &(x1, h1)) in valid_stab.iter().enumerate() {
        let c1: BTreeSet<usize> = component(x1, h1).into_iter().collect();
        for &(x2, h2) in &valid_stab[i + 1..] {
            let c2: BTreeSet<usize> = component(x2, h2).into_iter().collect();
            let disjoint = c1.is_disjoint(&c2);
            let nested = c1.is_subset(&c2) || c2.is_subset(&c1);
            if !disjoint && !nested {
                violations.push(Violation::ComponentsOverlap {
                    head_a: h1,
                    head_b: h2,
                });
            }
        }
    }

    // H5: a member's successor is either past the exit or inside.
    'h5: for &(x, h) in &valid_stab {
        let xi = index[&x];
        for u in component(x, h) {
            for v in 0..n {
                if reach[u][v] && !(reach[xi][v] && xi != v) && !reach[v][xi] {
                    violations.push(Violation::ExitLeak {
                        member: ids[u],
                        escapee: ids[v],
                        exit: x,
                    });
                    continue 'h5;
                }
            }
        }
    }

    // W5: every graph dependency is scheduled or absorbed.
    let heads_by_vertex: BTreeMap<u32, WpoNodeId> =
        valid_stab.iter().map(|&(x, h)| (h.vertex(), x)).collect();
    for &(u, v) in g.edges() {
        let (pu, pv) = (WpoNodeId::Plain(u), WpoNodeId::Plain(v));
        let (Some(&ui), Some(&vi)) = (index.get(&pu), index.get(&pv)) else {
            continue; // endpoint outside this order's universe
        };
        let scheduled = reach[ui][vi] && ui != vi;
        let absorbed = heads_by_vertex.get(&v).is_some_and(|&x| {
            let xi = index[&x];
            reach[vi][ui] && reach[ui][xi]
        });
        if !scheduled && !absorbed {
            violations.push(Violation::EdgeNotCovered { edge: (u, v) });
        }
    }

    violations
}

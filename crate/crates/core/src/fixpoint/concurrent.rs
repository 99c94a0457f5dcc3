//! The deterministic concurrent fixpoint engine.
//!
//! Four rules drive the computation. A non-exit node whose executed
//! scheduling predecessors all arrived applies its transfer function (with
//! widening if it heads a component) and signals its successors. An exit
//! whose predecessors arrived checks its component's stabilization by
//! recomputing the head: on success it signals its successors, on failure it
//! resets every member's count to the number of schedulers *outside* the
//! component — outer contributions have already happened and will not recur —
//! which re-arms exactly the head and replays the component.
//!
//! Synchronization contract: a node's value is written only by the worker
//! executing it and read only by nodes scheduled after it, so a per-node
//! read-write lock is never contended; the counts are atomic read-modify-
//! writes; the ready queue hands nodes to workers. Any interleaving computes
//! the same map, which the test suite checks byte for byte.

use super::{iteration_cap, ValueMap};
use crate::domain::{AbstractDomain, Env, EquationSystem};
use crate::wpo::{NodeIdx, Wpo, WpoNodeId};
use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Condvar, Mutex, RwLock};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    GraphMismatch {
        system_vertices: u32,
        order_vertices: u32,
    },
    ZeroWorkers,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::GraphMismatch {
                system_vertices,
                order_vertices,
            } => write!(
                f,
                "system has {system_vertices} vertices but the order was built for {order_vertices}"
            ),
            SolveError::ZeroWorkers => write!(f, "worker count must be positive"),
        }
    }
}

impl std::error::Error for SolveError {}

/// Count map: executed-scheduling-predecessor counters, one per node.
struct CountMap {
    counts: Vec<AtomicU32>,
}

impl CountMap {
    fn new(n: usize) -> CountMap {
        CountMap {
            counts: (0..n).map(|_| AtomicU32::new(0)).collect(),
        }
    }

    fn reset(&self, i: NodeIdx, to: u32) {
        self.counts[i as usize].store(to, Ordering::Release);
    }

    /// Returns the new count.
    fn bump(&self, i: NodeIdx) -> u32 {
        self.counts[i as usize].fetch_add(1, Ordering::AcqRel) + 1
    }
}

struct ReadyQueue {
    state: Mutex<QueueState>,
    available: Condvar,
}

struct QueueState {
    queue: VecDeque<NodeIdx>,
    /// Queued plus currently executing nodes; zero means quiescence.
    outstanding: usize,
}

impl ReadyQueue {
    fn new(seeds: Vec<NodeIdx>) -> ReadyQueue {
        let outstanding = seeds.len();
        ReadyQueue {
            state: Mutex::new(QueueState {
                queue: seeds.into(),
                outstanding,
            }),
            available: Condvar::new(),
        }
    }

    fn next(&self) -> Option<NodeIdx> {
        let mut st = self.state.lock().unwrap();
        loop {
            if let Some(i) = st.queue.pop_front() {
                return Some(i);
            }
            if st.outstanding == 0 {
                return None;
            }
            st = self.available.wait(st).unwrap();
        }
    }

    /// Marks one node done and enqueues the nodes it made ready.
    fn finish(&self, ready: &[NodeIdx]) {
        let mut st = self.state.lock().unwrap();
        st.outstanding += ready.len();
        st.outstanding -= 1;
        st.queue.extend(ready.iter().copied());
        if st.outstanding == 0 || !ready.is_empty() {
            self.available.notify_all();
        }
    }
}

/// Solves the system over its WPO with the given number of workers.
///
/// The WPO must be the unlifted one built for the system's graph. The result
/// is identical for every worker count.
pub fn solve_concurrent(
    sys: &EquationSystem,
    wpo: &Wpo,
    workers: usize,
) -> Result<ValueMap, SolveError> {
    if workers == 0 {
        return Err(SolveError::ZeroWorkers);
    }
    if sys.graph().vertex_count() != wpo.vertex_count() {
        return Err(SolveError::GraphMismatch {
            system_vertices: sys.graph().vertex_count(),
            order_vertices: wpo.vertex_count(),
        });
    }

    let n_nodes = wpo.node_count();
    let values: Vec<RwLock<Env>> = (0..sys.graph().vertex_count())
        .map(|_| RwLock::new(Env::Bottom))
        .collect();
    let counts = CountMap::new(n_nodes);
    let rounds: Vec<AtomicU32> = (0..wpo.comp_count()).map(|_| AtomicU32::new(0)).collect();

    let seeds: Vec<NodeIdx> = (0..n_nodes as NodeIdx)
        .filter(|&i| wpo.pred_count_of(i) == 0)
        .collect();
    let queue = ReadyQueue::new(seeds);

    let engine = Engine {
        sys,
        wpo,
        values: &values,
        counts: &counts,
        rounds: &rounds,
    };
    if workers == 1 {
        while let Some(i) = queue.next() {
            let ready = engine.fire(i);
            queue.finish(&ready);
        }
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| {
                    while let Some(i) = queue.next() {
                        let ready = engine.fire(i);
                        queue.finish(&ready);
                    }
                });
            }
        });
    }

    let values = values
        .into_iter()
        .map(|slot| slot.into_inner().unwrap())
        .collect();
    Ok(ValueMap::new(values))
}

struct Engine<'a> {
    sys: &'a EquationSystem,
    wpo: &'a Wpo,
    values: &'a [RwLock<Env>],
    counts: &'a CountMap,
    /// Stabilization attempts per component, to catch runaway iteration.
    rounds: &'a [AtomicU32],
}

impl Engine<'_> {
    /// Joined input of vertex `v` under the current value map.
    fn input(&self, v: u32) -> Env {
        let mut acc = if v == self.sys.entry() {
            Env::top(self.sys.num_vars())
        } else {
            Env::Bottom
        };
        for &p in self.sys.graph().predecessors(v) {
            acc = acc.join(&self.values[p as usize].read().unwrap());
        }
        acc
    }

    /// Applies one rule to a ready node; returns the nodes made ready.
    fn fire(&self, i: NodeIdx) -> Vec<NodeIdx> {
        match self.wpo.id(i) {
            WpoNodeId::Plain(v) => self.non_exit(i, v),
            WpoNodeId::Exit(h) => self.exit(i, h),
        }
    }

    fn non_exit(&self, i: NodeIdx, v: u32) -> Vec<NodeIdx> {
        self.counts.reset(i, 0);
        let recomputed = self.sys.apply_to_input(v, &self.input(v));
        let new = if self.wpo.is_head(v) {
            // Widening point: extrapolate from the stored value.
            let old = self.values[v as usize].read().unwrap().clone();
            old.widen(&recomputed)
        } else {
            recomputed
        };
        *self.values[v as usize].write().unwrap() = new;
        self.signal_successors(i)
    }

    fn exit(&self, i: NodeIdx, h: u32) -> Vec<NodeIdx> {
        self.counts.reset(i, 0);
        let stabilized = {
            let recomputed = self.sys.apply_to_input(h, &self.input(h));
            recomputed.leq(&self.values[h as usize].read().unwrap())
        };
        let c = self
            .wpo
            .comp_index_of_head(h)
            .expect("exit implies component");
        if stabilized {
            self.rounds[c as usize].store(0, Ordering::Relaxed);
            return self.signal_successors(i);
        }
        let r = self.rounds[c as usize].fetch_add(1, Ordering::Relaxed);
        assert!(
            r <= iteration_cap(self.sys.num_vars()),
            "component at head {h} failed to stabilize"
        );
        // Re-arm the component: counts fall back to the schedulers outside
        // it, which have all fired already and will not fire again.
        let info = self.wpo.comp(c);
        let mut ready = Vec::new();
        for p in info.lo..=info.hi {
            let m = self.wpo.node_at_position(p);
            let outer = self.wpo.num_outer_sched_preds_idx(m, c);
            self.counts.reset(m, outer);
            if outer == self.wpo.pred_count_of(m) {
                ready.push(m);
            }
        }
        ready
    }

    fn signal_successors(&self, i: NodeIdx) -> Vec<NodeIdx> {
        let mut ready = Vec::new();
        for &w in self.wpo.succ_indices(i) {
            let arrived = self.counts.bump(w);
            debug_assert!(
                arrived <= self.wpo.pred_count_of(w),
                "count overshoot at {}",
                self.wpo.id(w)
            );
            if arrived == self.wpo.pred_count_of(w) {
                ready.push(w);
            }
        }
        ready
    }
}

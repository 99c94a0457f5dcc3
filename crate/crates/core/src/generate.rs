//! Seeded generators for graphs and equation systems.
//!
//! Everything here is deterministic in the seed and platform-independent, so
//! differential tests, the determinism checks and the benchmark families all
//! reproduce exactly.

use crate::domain::{EquationSystem, TransferFunction};
use crate::graph::DirectedGraph;

/// Splitmix64: tiny, seedable, and stable across platforms and releases,
/// which is all the tests and benchmarks need.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// True with probability `num/den`.
    pub fn ratio(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Erdős–Rényi digraph over ordered pairs, self-loops included, with
/// `permille/1000` edge probability.
pub fn random_digraph(n: u32, permille: u64, seed: u64, entry: Option<u32>) -> DirectedGraph {
    let mut rng = Rng::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.ratio(permille, 1000) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::new(n, edges, entry).expect("generated endpoints in range")
}

/// A straight chain `0 -> 1 -> ... -> n-1`.
pub fn chain(n: u32) -> DirectedGraph {
    DirectedGraph::new(n, (1..n).map(|v| (v - 1, v)), Some(0)).expect("in range")
}

/// A braided ladder: a run of diamonds, so there is parallel width but no
/// cycle.
pub fn ladder(n: u32) -> DirectedGraph {
    let mut edges = Vec::new();
    for v in 0..n {
        match v % 3 {
            0 => {
                if v + 1 < n {
                    edges.push((v, v + 1));
                }
                if v + 2 < n {
                    edges.push((v, v + 2));
                }
            }
            _ => {
                let join = v - v % 3 + 3;
                if join < n {
                    edges.push((v, join));
                }
            }
        }
    }
    DirectedGraph::new(n, edges, Some(0)).expect("in range")
}

/// A forward chain with perfectly nested back edges: loop `k` spans
/// `[k, n-1-k]`, giving a nesting depth of about `n/2`. Worst case for
/// anything that is not careful about deep component nesting.
pub fn nested_loops(n: u32) -> DirectedGraph {
    let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (v - 1, v)).collect();
    let mut k = 1;
    while k + 1 < n - k {
        edges.push((n - 1 - k, k));
        k += 1;
    }
    DirectedGraph::new(n, edges, Some(0)).expect("in range")
}

/// A chain with random extra jumps: plenty of loops with secondary entries,
/// so the cross/forward removal and restoration paths get exercised.
pub fn irreducible(n: u32, seed: u64) -> DirectedGraph {
    let mut rng = Rng::new(seed);
    let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (v - 1, v)).collect();
    let jumps = (n / 3).max(1);
    for _ in 0..jumps {
        // A backward jump forms a loop ...
        let a = rng.below(n as u64) as u32;
        let b = rng.below(n as u64) as u32;
        edges.push((a.max(b), a.min(b)));
        // ... and a forward jump into some later region may enter one.
        let c = rng.below(n as u64) as u32;
        let d = rng.below(n as u64) as u32;
        edges.push((c.min(d), c.max(d)));
    }
    DirectedGraph::new(n, edges, Some(0)).expect("in range")
}

/// A random small system: random digraph, up to `max_vars` variables, random
/// constant/add/copy statements. Vertex 0 is the entry.
pub fn random_system(seed: u64) -> EquationSystem {
    let mut rng = Rng::new(seed);
    let n = 10 + rng.below(31) as u32; // 10..=40
    let nvars = 1 + rng.below(4) as usize; // 1..=4
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.ratio(110, 1000) {
                edges.push((u, v));
            }
        }
    }
    // A couple of spokes from the entry so a decent part is reachable.
    for _ in 0..4 {
        edges.push((0, 1 + rng.below((n - 1) as u64) as u32));
    }
    let graph = DirectedGraph::new(n, edges, Some(0)).expect("in range");

    let vars: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let transfer: Vec<TransferFunction> = (0..n)
        .map(|_| {
            let dst = rng.below(nvars as u64) as usize;
            let src = rng.below(nvars as u64) as usize;
            match rng.below(100) {
                0..=24 => TransferFunction::Skip,
                25..=49 => TransferFunction::AssignConst {
                    dst,
                    value: rng.below(7) as i64 - 3,
                },
                50..=84 => TransferFunction::AssignAdd {
                    dst,
                    src,
                    addend: rng.below(5) as i64 - 2,
                },
                _ => TransferFunction::Copy { dst, src },
            }
        })
        .collect();
    EquationSystem::new(graph, vars, transfer, 0).expect("constructed consistently")
}

/// Entry fanning out into `chains` independent increment chains of length
/// `len` that join at a final vertex: embarrassingly parallel between
/// synchronization points.
pub fn wide_diamond_system(chains: u32, len: u32) -> EquationSystem {
    let n = 2 + chains * len;
    let join = n - 1;
    let mut edges = Vec::new();
    for c in 0..chains {
        let first = 1 + c * len;
        edges.push((0, first));
        for i in 0..len - 1 {
            edges.push((first + i, first + i + 1));
        }
        edges.push((first + len - 1, join));
    }
    let graph = DirectedGraph::new(n, edges, Some(0)).expect("in range");
    let mut transfer = vec![
        TransferFunction::AssignAdd {
            dst: 0,
            src: 0,
            addend: 1
        };
        n as usize
    ];
    transfer[0] = TransferFunction::AssignConst { dst: 0, value: 0 };
    EquationSystem::new(graph, vec!["x".into()], transfer, 0).expect("consistent")
}

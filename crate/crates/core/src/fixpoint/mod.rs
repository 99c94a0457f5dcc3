//! Fixpoint engines.
//!
//! [`solve_sequential`] walks a WTO with Bourdoncle's recursive strategy:
//! components are iterated until their head stabilizes, with widening applied
//! at the head on every recomputation. [`solve_concurrent`] runs the
//! rule-based engine over a WPO with a pool of workers; scheduling edges
//! synchronize all value accesses, stabilization is checked at component
//! exits, and a failed check resets the member counts to the number of their
//! outside schedulers so only the component re-runs. Both compute the same
//! value map, and the concurrent one is bit-identical for every worker count
//! and interleaving.

mod concurrent;
mod sequential;
mod trace;

pub use concurrent::{solve_concurrent, SolveError};
pub use sequential::solve_sequential;
pub use trace::{trace_schedule, RuleKind, TraceRecord};

use crate::domain::{Env, EquationSystem};
use crate::wpo::Wpo;
use std::collections::BTreeSet;

/// The result of a fixpoint computation: one environment per graph vertex.
/// Vertices the order does not cover stay bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueMap {
    values: Vec<Env>,
}

impl ValueMap {
    pub(crate) fn new(values: Vec<Env>) -> ValueMap {
        ValueMap { values }
    }

    pub fn get(&self, v: u32) -> &Env {
        &self.values[v as usize]
    }

    pub fn values(&self) -> &[Env] {
        &self.values
    }

    /// Byte-stable dump: one line per vertex, ascending.
    pub fn dump(&self, sys: &EquationSystem) -> String {
        let mut out = String::new();
        for (v, env) in self.values.iter().enumerate() {
            match env.vals() {
                None => out.push_str(&format!("{v}: bottom\n")),
                Some(vals) => {
                    out.push_str(&format!("{v}:"));
                    for (name, iv) in sys.var_names().iter().zip(vals) {
                        out.push_str(&format!(" {name}={iv}"));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// The admissible widening points a WPO induces: its component heads.
pub fn widening_points(wpo: &Wpo) -> BTreeSet<u32> {
    wpo.component_heads().into_iter().collect()
}

/// Iteration cap per component entry; proportional to the longest strictly
/// ascending chain a widened environment can climb. Exceeding it means a
/// non-monotone transfer function or an engine bug.
pub(crate) fn iteration_cap(nvars: usize) -> u32 {
    2 * nvars as u32 + 8
}

/// Shared example systems for the engine tests.
#[cfg(test)]
pub(crate) mod testsys {
    use crate::domain::EquationSystem;

    /// The two-loop counter program: one loop increments from 0; a second,
    /// also fed by a constant path, increments and re-zeroes.
    pub fn counter_program() -> EquationSystem {
        EquationSystem::parse(
            "\
vars x
entry 0
node 1: x = 0
node 3: x = x + 1
node 5: x = x + 1
node 6: x = 0
node 8: x = 1
edge 0 1
edge 0 8
edge 1 2
edge 2 3
edge 3 2
edge 2 4
edge 8 4
edge 4 5
edge 5 4
edge 4 6
edge 6 4
edge 4 7
",
        )
        .unwrap()
    }

    /// Nested loops whose inner tail has schedulers outside both components.
    pub fn interleaved_loops() -> EquationSystem {
        EquationSystem::parse(
            "\
vars x y
entry 1
node 1: x = 0
node 3: x = x + 1
node 4: y = x
node 5: y = 1
node 6: y = 2
edge 1 2
edge 1 6
edge 2 3
edge 2 5
edge 3 2
edge 3 4
edge 4 3
edge 5 4
edge 6 4
",
        )
        .unwrap()
    }
}

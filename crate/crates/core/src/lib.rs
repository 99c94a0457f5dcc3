//! Construction of weak partial orders (WPO) and weak topological orders
//! (WTO) for directed dependency graphs, and fixpoint engines driven by them.
//!
//! A WPO splits the reachability preorder of a graph into a partial order of
//! *scheduling* constraints plus a one-to-one *stabilization* relation that
//! groups vertices into well-nested components. Components are iterated until
//! their head stabilizes; everything the partial order leaves unordered may
//! run concurrently. A WTO is the degenerate case where the scheduling order
//! is total, which recovers Bourdoncle's classic iteration strategy.
//!
//! The crate provides:
//!
//! * [`graph`] — directed graphs, depth-first forests, SCCs, offline LCA;
//! * [`wpo`] — the WPO data structure, a top-down reference constructor, an
//!   almost-linear bottom-up constructor, and an axiom validator;
//! * [`wto`] — WTO construction by linearizing a WPO, plus the parenthesized
//!   rendering;
//! * [`domain`] — an interval abstract domain and equation systems over it;
//! * [`fixpoint`] — a sequential recursive solver and a deterministic
//!   concurrent solver that computes bit-identical results for any worker
//!   count;
//! * [`generate`] — seeded graph and system generators for tests and
//!   benchmarks.

pub mod domain;
pub mod error;
pub mod fixpoint;
pub mod generate;
pub mod graph;
pub mod union_find;
pub mod wpo;
pub mod wto;

pub use domain::{apply_transfer, AbstractDomain, Env, EquationSystem, Interval, TransferFunction};
pub use error::ParseError;
pub use fixpoint::{solve_concurrent, solve_sequential, trace_schedule, widening_points, ValueMap};
pub use graph::{
    depth_first_forest, lowest_common_ancestors, strongly_connected_components, DepthFirstForest,
    DirectedGraph,
};
pub use wpo::{construct_wpo_bu, construct_wpo_td, validate_axioms, Wpo, WpoNodeId};
pub use wto::{construct_wto_bu, construct_wto_td, feedback_edges_of_wto, Wto};

//! The interval abstract domain and the value contract the fixpoint engines
//! are written against.
//!
//! Bounds are explicit ±∞ sentinels over `i64` with saturating arithmetic;
//! the analysis constants in play are tiny, so saturation never decides a
//! result in practice and keeps the crate free of arbitrary-precision
//! dependencies.

mod system;

pub use system::{apply_transfer, EquationSystem, SystemError, TransferFunction};

use std::fmt;

/// Minimal lattice contract a value must satisfy to be solved over: join,
/// widen, ordering. Environments implement it pointwise, so swapping in a
/// different base domain only requires implementing this trait.
pub trait AbstractDomain: Clone + Eq {
    fn is_bottom(&self) -> bool;
    fn join(&self, other: &Self) -> Self;
    /// Extrapolation applied at component heads; `a.widen(b)` treats `a` as
    /// the previous value and `b` as the recomputed one.
    fn widen(&self, other: &Self) -> Self;
    fn leq(&self, other: &Self) -> bool;
}

/// An interval endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Finite(i64),
    PosInf,
}

impl Bound {
    fn saturating_add(self, c: i64) -> Bound {
        match self {
            Bound::NegInf => Bound::NegInf,
            Bound::PosInf => Bound::PosInf,
            Bound::Finite(x) => match x.checked_add(c) {
                Some(y) => Bound::Finite(y),
                None if c > 0 => Bound::PosInf,
                None => Bound::NegInf,
            },
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::PosInf => write!(f, "+inf"),
            Bound::Finite(x) => write!(f, "{x}"),
        }
    }
}

/// An integer interval: empty, or `[lo, hi]` with `lo <= hi` where the
/// endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interval {
    Bottom,
    Range(Bound, Bound),
}

impl Interval {
    pub const TOP: Interval = Interval::Range(Bound::NegInf, Bound::PosInf);

    pub fn constant(c: i64) -> Interval {
        Interval::Range(Bound::Finite(c), Bound::Finite(c))
    }

    /// `[lo, hi]`, or bottom when the bounds are out of order.
    pub fn range(lo: Bound, hi: Bound) -> Interval {
        if lo <= hi {
            Interval::Range(lo, hi)
        } else {
            Interval::Bottom
        }
    }

    pub fn finite(lo: i64, hi: i64) -> Interval {
        Interval::range(Bound::Finite(lo), Bound::Finite(hi))
    }

    /// Adds a compile-time constant, saturating at the sentinels.
    pub fn add_const(self, c: i64) -> Interval {
        match self {
            Interval::Bottom => Interval::Bottom,
            Interval::Range(lo, hi) => Interval::Range(lo.saturating_add(c), hi.saturating_add(c)),
        }
    }
}

impl AbstractDomain for Interval {
    fn is_bottom(&self) -> bool {
        matches!(self, Interval::Bottom)
    }

    fn join(&self, other: &Self) -> Self {
        match (*self, *other) {
            (Interval::Bottom, x) | (x, Interval::Bottom) => x,
            (Interval::Range(a, b), Interval::Range(c, d)) => Interval::Range(a.min(c), b.max(d)),
        }
    }

    fn widen(&self, other: &Self) -> Self {
        match (*self, *other) {
            (Interval::Bottom, x) | (x, Interval::Bottom) => x,
            (Interval::Range(i, j), Interval::Range(k, l)) => Interval::Range(
                if k < i { Bound::NegInf } else { i },
                if l > j { Bound::PosInf } else { j },
            ),
        }
    }

    fn leq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Interval::Bottom, _) => true,
            (_, Interval::Bottom) => false,
            (Interval::Range(a, b), Interval::Range(c, d)) => c <= a && b <= d,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Bottom => write!(f, "_|_"),
            Interval::Range(lo, hi) => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// An abstract environment: one interval per declared variable, with a
/// canonical bottom. A bottom anywhere collapses the whole environment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Env {
    Bottom,
    Vals(Vec<Interval>),
}

impl Env {
    pub fn top(nvars: usize) -> Env {
        Env::Vals(vec![Interval::TOP; nvars])
    }

    pub fn get(&self, var: usize) -> Interval {
        match self {
            Env::Bottom => Interval::Bottom,
            Env::Vals(v) => v[var],
        }
    }

    pub fn vals(&self) -> Option<&[Interval]> {
        match self {
            Env::Bottom => None,
            Env::Vals(v) => Some(v),
        }
    }
}

impl AbstractDomain for Env {
    fn is_bottom(&self) -> bool {
        matches!(self, Env::Bottom)
    }

    fn join(&self, other: &Self) -> Self {
        match (self, other) {
            (Env::Bottom, x) | (x, Env::Bottom) => x.clone(),
            (Env::Vals(a), Env::Vals(b)) => {
                debug_assert_eq!(a.len(), b.len());
                Env::Vals(a.iter().zip(b).map(|(x, y)| x.join(y)).collect())
            }
        }
    }

    fn widen(&self, other: &Self) -> Self {
        match (self, other) {
            (Env::Bottom, x) | (x, Env::Bottom) => x.clone(),
            (Env::Vals(a), Env::Vals(b)) => {
                debug_assert_eq!(a.len(), b.len());
                Env::Vals(a.iter().zip(b).map(|(x, y)| x.widen(y)).collect())
            }
        }
    }

    fn leq(&self, other: &Self) -> bool {
        match (self, other) {
            (Env::Bottom, _) => true,
            (_, Env::Bottom) => false,
            (Env::Vals(a), Env::Vals(b)) => a.iter().zip(b).all(|(x, y)| x.leq(y)),
        }
    }
}

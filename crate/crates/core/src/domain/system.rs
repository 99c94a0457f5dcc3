//! Equation systems: a dependency graph plus one monotone transfer function
//! per vertex over the interval environment.

use super::{AbstractDomain, Env, Interval};
use crate::error::ParseError;
use crate::graph::{expect_end, parse_number, tokens_with_columns, DirectedGraph};
use std::fmt;
use std::time::Duration;

/// A per-vertex transfer function: the statement the vertex executes on the
/// join of its predecessors' environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferFunction {
    Skip,
    AssignConst { dst: usize, value: i64 },
    AssignAdd { dst: usize, src: usize, addend: i64 },
    Copy { dst: usize, src: usize },
}

impl TransferFunction {
    fn max_var(&self) -> Option<usize> {
        match *self {
            TransferFunction::Skip => None,
            TransferFunction::AssignConst { dst, .. } => Some(dst),
            TransferFunction::AssignAdd { dst, src, .. } | TransferFunction::Copy { dst, src } => {
                Some(dst.max(src))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemError {
    UndeclaredVariable { var: usize, nvars: usize },
    EntryOutOfRange { entry: u32, vertex_count: u32 },
    WrongTransferCount { got: usize, want: usize },
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::UndeclaredVariable { var, nvars } => {
                write!(f, "variable #{var} out of range (declared {nvars})")
            }
            SystemError::EntryOutOfRange {
                entry,
                vertex_count,
            } => {
                write!(f, "entry {entry} >= vertex count {vertex_count}")
            }
            SystemError::WrongTransferCount { got, want } => {
                write!(f, "{got} transfer functions for {want} vertices")
            }
        }
    }
}

impl std::error::Error for SystemError {}

/// Applies a transfer function to an input environment.
///
/// Strict in bottom: an unreachable input stays unreachable. Fails if the
/// statement mentions a variable the environment does not declare.
pub fn apply_transfer(f: &TransferFunction, env: &Env) -> Result<Env, SystemError> {
    let Env::Vals(vals) = env else {
        return Ok(Env::Bottom);
    };
    if let Some(v) = f.max_var() {
        if v >= vals.len() {
            return Err(SystemError::UndeclaredVariable {
                var: v,
                nvars: vals.len(),
            });
        }
    }
    let mut out = vals.clone();
    match *f {
        TransferFunction::Skip => {}
        TransferFunction::AssignConst { dst, value } => out[dst] = Interval::constant(value),
        TransferFunction::AssignAdd { dst, src, addend } => out[dst] = vals[src].add_const(addend),
        TransferFunction::Copy { dst, src } => out[dst] = vals[src],
    }
    Ok(Env::Vals(out))
}

/// A fixpoint equation system over the interval domain.
#[derive(Debug, Clone)]
pub struct EquationSystem {
    graph: DirectedGraph,
    env_vars: Vec<String>,
    transfer: Vec<TransferFunction>,
    entry: u32,
    /// Artificial per-vertex cost, for scaling experiments.
    node_cost: Option<Duration>,
}

impl EquationSystem {
    pub fn new(
        graph: DirectedGraph,
        env_vars: Vec<String>,
        transfer: Vec<TransferFunction>,
        entry: u32,
    ) -> Result<Self, SystemError> {
        if entry >= graph.vertex_count() {
            return Err(SystemError::EntryOutOfRange {
                entry,
                vertex_count: graph.vertex_count(),
            });
        }
        if transfer.len() != graph.vertex_count() as usize {
            return Err(SystemError::WrongTransferCount {
                got: transfer.len(),
                want: graph.vertex_count() as usize,
            });
        }
        for f in &transfer {
            if let Some(v) = f.max_var() {
                if v >= env_vars.len() {
                    return Err(SystemError::UndeclaredVariable {
                        var: v,
                        nvars: env_vars.len(),
                    });
                }
            }
        }
        // The graph's entry drives the order constructions; keep it in sync.
        let graph = DirectedGraph::new(
            graph.vertex_count(),
            graph.edges().iter().copied(),
            Some(entry),
        )
        .expect("edges already validated");
        Ok(EquationSystem {
            graph,
            env_vars,
            transfer,
            entry,
            node_cost: None,
        })
    }

    /// Burns roughly `cost` of wall-clock time in every transfer application;
    /// used by benchmarks to model expensive abstract transformers.
    pub fn with_node_cost(mut self, cost: Duration) -> Self {
        self.node_cost = Some(cost);
        self
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn entry(&self) -> u32 {
        self.entry
    }

    pub fn var_names(&self) -> &[String] {
        &self.env_vars
    }

    pub fn num_vars(&self) -> usize {
        self.env_vars.len()
    }

    pub fn transfer(&self, v: u32) -> &TransferFunction {
        &self.transfer[v as usize]
    }

    /// The input environment of vertex `v`: the join of its predecessors'
    /// values, with the entry additionally fed the top environment.
    pub fn input_env(&self, v: u32, values: &[Env]) -> Env {
        let mut acc = if v == self.entry {
            Env::top(self.env_vars.len())
        } else {
            Env::Bottom
        };
        for &p in self.graph.predecessors(v) {
            acc = acc.join(&values[p as usize]);
        }
        acc
    }

    /// One application of `F_v` to the current value map.
    pub fn apply(&self, v: u32, values: &[Env]) -> Env {
        self.apply_to_input(v, &self.input_env(v, values))
    }

    /// Applies `F_v` to an already-joined input environment.
    pub fn apply_to_input(&self, v: u32, input: &Env) -> Env {
        if let Some(cost) = self.node_cost {
            std::thread::sleep(cost);
        }
        apply_transfer(&self.transfer[v as usize], input)
            .expect("variables validated at construction")
    }

    /// Parses the program format:
    ///
    /// ```text
    /// # comment
    /// vars x y
    /// entry 0
    /// node 1: x = 0
    /// node 3: x = x + 1
    /// node 4: y = x
    /// edge 0 1
    /// ```
    ///
    /// Vertices default to `skip`; the vertex count is one past the largest
    /// id mentioned.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut vars: Vec<String> = Vec::new();
        let mut entry: Option<u32> = None;
        let mut stmts: Vec<(u32, TransferFunction)> = Vec::new();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut max_vertex: Option<u32> = None;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = tokens_with_columns(raw);
            let (kw_col, kw) = tokens.next().expect("non-empty line");
            match kw {
                "vars" => {
                    if !vars.is_empty() {
                        return Err(ParseError::new(lineno, kw_col, "duplicate `vars` line"));
                    }
                    for (col, name) in tokens {
                        if vars.iter().any(|v| v == name) {
                            return Err(ParseError::new(
                                lineno,
                                col,
                                format!("duplicate variable `{name}`"),
                            ));
                        }
                        vars.push(name.to_string());
                    }
                    if vars.is_empty() {
                        return Err(ParseError::new(
                            lineno,
                            kw_col,
                            "`vars` declares no variables",
                        ));
                    }
                }
                "entry" => {
                    if entry.is_some() {
                        return Err(ParseError::new(lineno, kw_col, "duplicate `entry` line"));
                    }
                    let e: u32 = parse_number(lineno, tokens.next(), "entry vertex")?;
                    expect_end(lineno, tokens.next())?;
                    entry = Some(e);
                    max_vertex = Some(max_vertex.map_or(e, |m: u32| m.max(e)));
                }
                "edge" => {
                    let u: u32 = parse_number(lineno, tokens.next(), "edge source")?;
                    let v: u32 = parse_number(lineno, tokens.next(), "edge target")?;
                    expect_end(lineno, tokens.next())?;
                    edges.push((u, v));
                    max_vertex = Some(max_vertex.map_or(u.max(v), |m| m.max(u).max(v)));
                }
                "node" => {
                    let Some((col, id_tok)) = tokens.next() else {
                        return Err(ParseError::new(lineno, kw_col, "missing node id"));
                    };
                    let id_str = id_tok
                        .strip_suffix(':')
                        .ok_or_else(|| ParseError::new(lineno, col, "node id must end with `:`"))?;
                    let id: u32 = id_str.parse().map_err(|_| {
                        ParseError::new(lineno, col, format!("invalid node id `{id_str}`"))
                    })?;
                    max_vertex = Some(max_vertex.map_or(id, |m| m.max(id)));
                    let stmt = parse_statement(lineno, &vars, tokens)?;
                    if stmts.iter().any(|&(k, _)| k == id) {
                        return Err(ParseError::new(
                            lineno,
                            col,
                            format!("duplicate statement for node {id}"),
                        ));
                    }
                    stmts.push((id, stmt));
                }
                other => {
                    return Err(ParseError::new(
                        lineno,
                        kw_col,
                        format!("unknown directive `{other}` (expected vars/entry/node/edge)"),
                    ));
                }
            }
        }

        let last_line = text.lines().count().max(1);
        if vars.is_empty() {
            return Err(ParseError::new(last_line, 1, "missing `vars` line"));
        }
        let entry = entry.ok_or_else(|| ParseError::new(last_line, 1, "missing `entry` line"))?;
        let n = max_vertex.map_or(0, |m| m + 1);
        let graph = DirectedGraph::new(n, edges, Some(entry))
            .map_err(|e| ParseError::new(last_line, 1, e.to_string()))?;
        let mut transfer = vec![TransferFunction::Skip; n as usize];
        for (id, stmt) in stmts {
            transfer[id as usize] = stmt;
        }
        EquationSystem::new(graph, vars, transfer, entry)
            .map_err(|e| ParseError::new(last_line, 1, e.to_string()))
    }
}

fn parse_statement<'a>(
    lineno: usize,
    vars: &[String],
    mut tokens: impl Iterator<Item = (usize, &'a str)>,
) -> Result<TransferFunction, ParseError> {
    let var_index = |col: usize, name: &str| -> Result<usize, ParseError> {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| ParseError::new(lineno, col, format!("undeclared variable `{name}`")))
    };
    let Some((col0, first)) = tokens.next() else {
        return Err(ParseError::new(lineno, 1, "missing statement"));
    };
    if first == "skip" {
        expect_end(lineno, tokens.next())?;
        return Ok(TransferFunction::Skip);
    }
    let dst = var_index(col0, first)?;
    match tokens.next() {
        Some((_, "=")) => {}
        other => {
            let col = other.map_or(col0, |(c, _)| c);
            return Err(ParseError::new(lineno, col, "expected `=`"));
        }
    }
    let Some((col1, rhs)) = tokens.next() else {
        return Err(ParseError::new(lineno, col0, "missing right-hand side"));
    };
    if let Ok(value) = rhs.parse::<i64>() {
        expect_end(lineno, tokens.next())?;
        return Ok(TransferFunction::AssignConst { dst, value });
    }
    let src = var_index(col1, rhs)?;
    match tokens.next() {
        None => Ok(TransferFunction::Copy { dst, src }),
        Some((_, "+")) => {
            let addend: i64 = parse_number(lineno, tokens.next(), "addend")?;
            expect_end(lineno, tokens.next())?;
            Ok(TransferFunction::AssignAdd { dst, src, addend })
        }
        Some((col, tok)) => Err(ParseError::new(
            lineno,
            col,
            format!("unexpected token `{tok}`"),
        )),
    }
}

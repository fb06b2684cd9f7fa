//! Exact solvers for linear programs whose constraints are all of the form
//! `y[u] - y[v] <= bound`.
//!
//! Every constraint row has one `+1` and one `-1`, so the constraint matrix is
//! the transposed incidence matrix of a directed graph. Feasibility reduces to
//! shortest paths from a pinned root and linear objectives reduce to an
//! uncapacitated min-cost flow (the LP dual).
//!
//! # Dual orientation
//!
//! A constraint `(u, v, b)` becomes the arc `v -> u` with weight/cost `b`, both
//! in the shortest-path graph and in the dual flow network. For an objective
//! `min sum c[w] * y[w]` with `y[root] = 0`, node `w != root` gets excess
//! `c[w]` (supply when positive) and the root absorbs `-sum c`. The LP optimum
//! is then `-(min flow cost)`. A primal solution is recovered as shortest-path
//! distances from the root in the residual graph: forward arcs `v -> u` with
//! cost `b` are always present, and every arc carrying flow contributes the
//! reverse arc `u -> v` with cost `-b`, which makes it tight.

mod bellman_ford;
mod flow;

use std::fmt;

use thiserror::Error;

use bellman_ford::{shortest_paths, ShortestPaths, WeightedArc};
pub use flow::{solve_min_cost_flow, Flow, FlowArc, FlowError, FlowNetwork};

pub type NodeId = usize;

/// `y[u] - y[v] <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub u: NodeId,
    pub v: NodeId,
    pub bound: i64,
}

/// A system of difference constraints with one node pinned to zero.
///
/// Builders are expected to make every node reachable from the root in the
/// arc graph (`v -> u` per constraint); `solve_max` reports the first node
/// that is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffSystem {
    node_count: usize,
    root: NodeId,
    constraints: Vec<Constraint>,
}

impl DiffSystem {
    pub fn new(node_count: usize, root: NodeId) -> Self {
        assert!(
            node_count > 0,
            "a difference system needs at least one node"
        );
        assert!(root < node_count, "root {root} out of range");
        DiffSystem {
            node_count,
            root,
            constraints: Vec::new(),
        }
    }

    /// Adds `y[u] - y[v] <= bound`.
    ///
    /// Panics on `u == v` or an out-of-range node: every row must have exactly
    /// one `+1` and one `-1` coefficient.
    pub fn add(&mut self, u: NodeId, v: NodeId, bound: i64) {
        assert!(
            u < self.node_count && v < self.node_count,
            "constraint ({u}, {v}) out of range"
        );
        assert_ne!(u, v, "a difference constraint needs two distinct variables");
        self.constraints.push(Constraint { u, v, bound });
    }

    /// Keeps only the tightest bound for every `(u, v)` pair. The result is
    /// ordered by `(u, v)`.
    pub fn dedup(&mut self) {
        self.constraints
            .sort_unstable_by_key(|c| (c.u, c.v, c.bound));
        self.constraints.dedup_by_key(|c| (c.u, c.v));
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// True when every row is a valid two-variable `+1/-1` row.
    pub fn is_network_matrix(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| c.u != c.v && c.u < self.node_count && c.v < self.node_count)
    }

    fn arcs(&self) -> Vec<WeightedArc> {
        self.constraints
            .iter()
            .map(|c| WeightedArc {
                from: c.v,
                to: c.u,
                weight: c.bound,
            })
            .collect()
    }
}

impl fmt::Display for DiffSystem {
    /// Line-oriented dump, one constraint per line as `u - v <= bound`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {} root {}", self.node_count, self.root)?;
        for c in &self.constraints {
            writeln!(f, "{} - {} <= {}", c.u, c.v, c.bound)?;
        }
        Ok(())
    }
}

/// One integer value per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation(pub Vec<i64>);

impl Valuation {
    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, node: NodeId) -> i64 {
        self.0[node]
    }
}

/// Integer objective coefficients, one per node. The root coefficient must be
/// zero; constant terms are folded out by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearObjective(pub Vec<i64>);

impl LinearObjective {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn evaluate(&self, valuation: &Valuation) -> i64 {
        self.0
            .iter()
            .zip(valuation.values())
            .map(|(c, y)| c * y)
            .sum()
    }
}

/// A cycle of constraints whose bounds sum to a negative number.
///
/// `nodes[i] -> nodes[i + 1]` (cyclically) is the arc of constraint
/// `constraints[i]`, i.e. that constraint reads `y[nodes[i+1]] - y[nodes[i]] <= b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCycle {
    pub nodes: Vec<NodeId>,
    pub constraints: Vec<usize>,
    pub weight: i64,
}

impl NegativeCycle {
    /// Independent re-check against the system the cycle claims to come from.
    pub fn verify(&self, system: &DiffSystem) -> bool {
        let len = self.nodes.len();
        if len == 0 || self.constraints.len() != len {
            return false;
        }
        let mut total = 0i64;
        for (i, &ci) in self.constraints.iter().enumerate() {
            let Some(c) = system.constraints.get(ci) else {
                return false;
            };
            if c.v != self.nodes[i] || c.u != self.nodes[(i + 1) % len] {
                return false;
            }
            total += c.bound;
        }
        total == self.weight && total < 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("difference system is infeasible (negative cycle of weight {})", .0.weight)]
    Infeasible(NegativeCycle),
    #[error("node {0} is not reachable from the root")]
    Unreachable(NodeId),
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("objective has {got} coefficients for {expected} nodes")]
    ObjectiveLength { expected: usize, got: usize },
    #[error("root coefficient must be zero, got {0}")]
    RootCoefficient(i64),
    #[error("primal recovery from the optimal flow failed: {0}")]
    Recovery(String),
}

/// The componentwise-maximal valuation with `y[root] = 0`: shortest-path
/// distances from the root.
pub fn solve_max(system: &DiffSystem) -> Result<Valuation, LpError> {
    let arcs = system.arcs();
    match shortest_paths(system.node_count, &arcs, &[system.root]) {
        ShortestPaths::Tree { dist, .. } => {
            let mut values = Vec::with_capacity(dist.len());
            for (v, d) in dist.into_iter().enumerate() {
                values.push(d.ok_or(LpError::Unreachable(v))?);
            }
            Ok(Valuation(values))
        }
        ShortestPaths::NegativeCycle(arc_ids) => {
            let nodes = arc_ids.iter().map(|&i| arcs[i].from).collect();
            let weight = arc_ids.iter().map(|&i| arcs[i].weight).sum();
            Err(LpError::Infeasible(NegativeCycle {
                nodes,
                constraints: arc_ids,
                weight,
            }))
        }
    }
}

/// A constraint broken by a valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub u: NodeId,
    pub v: NodeId,
    pub bound: i64,
    /// `y[u] - y[v]`
    pub actual: i64,
}

/// Lists every constraint the valuation breaks. A nonzero root value is
/// reported as `(root, root, 0, y[root])`.
pub fn check_valuation(system: &DiffSystem, valuation: &Valuation) -> Vec<Violation> {
    let y = valuation.values();
    assert_eq!(y.len(), system.node_count, "valuation length mismatch");
    let mut out = Vec::new();
    let r = system.root;
    if y[r] != 0 {
        out.push(Violation {
            u: r,
            v: r,
            bound: 0,
            actual: y[r],
        });
    }
    for c in &system.constraints {
        let actual = y[c.u] - y[c.v];
        if actual > c.bound {
            out.push(Violation {
                u: c.u,
                v: c.v,
                bound: c.bound,
                actual,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub valuation: Valuation,
    pub objective: i64,
}

/// The componentwise-minimal valuation with `y[root] = 0`, when every node
/// reaches the root in the arc graph. Solved as [`solve_max`] on the system
/// with every row negated.
pub fn solve_min(system: &DiffSystem) -> Result<Valuation, LpError> {
    let mut flipped = DiffSystem::new(system.node_count, system.root);
    for c in &system.constraints {
        flipped.add(c.v, c.u, c.bound);
    }
    match solve_max(&flipped) {
        Ok(Valuation(v)) => Ok(Valuation(v.into_iter().map(|x| -x).collect())),
        Err(LpError::Infeasible(cycle)) => {
            // same cycle walked backwards in the original system
            let mut constraints = cycle.constraints.clone();
            constraints.reverse();
            let nodes = constraints
                .iter()
                .map(|&i| system.constraints[i].v)
                .collect();
            Err(LpError::Infeasible(NegativeCycle {
                nodes,
                constraints,
                weight: cycle.weight,
            }))
        }
        Err(e) => Err(e),
    }
}

/// Which optimal vertex to return when the optimum is not unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extreme {
    #[default]
    Max,
    Min,
}

/// Minimizes `sum coeffs[w] * y[w]` over the system through its min-cost-flow
/// dual (see the module docs for the orientation) and returns the
/// componentwise-maximal optimal valuation.
pub fn solve_difference_lp(
    system: &DiffSystem,
    objective: &LinearObjective,
) -> Result<LpSolution, LpError> {
    solve_difference_lp_at(system, objective, Extreme::Max)
}

/// [`solve_difference_lp`] with a choice of optimal vertex. The optimal face
/// is the residual system, so both extremes exist whenever the optimum does.
pub fn solve_difference_lp_at(
    system: &DiffSystem,
    objective: &LinearObjective,
    extreme: Extreme,
) -> Result<LpSolution, LpError> {
    let (face, optimum) = optimal_face(system, objective)?;
    let valuation = match extreme {
        Extreme::Max => solve_max(&face),
        Extreme::Min => solve_min(&face),
    }
    .map_err(|e| LpError::Recovery(e.to_string()))?;
    let value = objective.evaluate(&valuation);
    if value != optimum {
        return Err(LpError::Recovery(format!(
            "primal value {value} differs from dual value {optimum}"
        )));
    }
    Ok(LpSolution {
        valuation,
        objective: value,
    })
}

/// The set of optimal solutions as a difference system (the original rows
/// plus every row made tight by a positive dual flow) and the optimum.
pub fn optimal_face(
    system: &DiffSystem,
    objective: &LinearObjective,
) -> Result<(DiffSystem, i64), LpError> {
    let n = system.node_count;
    if objective.0.len() != n {
        return Err(LpError::ObjectiveLength {
            expected: n,
            got: objective.0.len(),
        });
    }
    if objective.0[system.root] != 0 {
        return Err(LpError::RootCoefficient(objective.0[system.root]));
    }
    // feasibility and reachability first; the flow side cannot tell an
    // infeasible primal from an unbounded one
    solve_max(system)?;

    let net = dual_network(system, objective);
    let flow = match solve_min_cost_flow(&net) {
        Ok(f) => f,
        Err(FlowError::Infeasible) => return Err(LpError::Unbounded),
        Err(e) => return Err(LpError::Recovery(e.to_string())),
    };

    let mut face = system.clone();
    for (c, &f) in system.constraints.iter().zip(&flow.flows) {
        if f > 0 {
            face.add(c.v, c.u, -c.bound);
        }
    }
    Ok((face, -flow.total_cost))
}

/// The min-cost-flow dual of `min coeffs . y` over `system`; arc `i` is
/// constraint `i`.
pub fn dual_network(system: &DiffSystem, objective: &LinearObjective) -> FlowNetwork {
    let mut net = FlowNetwork::new(system.node_count);
    for c in &system.constraints {
        net.add_arc(c.v, c.u, c.bound, None);
    }
    let mut total = 0;
    for (w, &c) in objective.0.iter().enumerate() {
        if w != system.root {
            net.set_excess(w, c);
            total += c;
        }
    }
    net.set_excess(system.root, -total);
    net
}

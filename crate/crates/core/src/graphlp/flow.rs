//! Integer min-cost flow by successive shortest paths with node potentials.
//!
//! Conventions: `excess[v] > 0` is a supply, `excess[v] < 0` a demand, and a
//! feasible flow satisfies `outflow(v) - inflow(v) = excess[v]` at every node.
//! Unbounded arcs get a capacity far beyond any flow the integer data can
//! produce, so their forward residual arc is always present and the final
//! potentials price them non-negatively.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

use super::bellman_ford::{shortest_paths, ShortestPaths, WeightedArc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub cost: i64,
    /// `None` means uncapacitated.
    pub capacity: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    node_count: usize,
    arcs: Vec<FlowArc>,
    excess: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork {
            node_count,
            arcs: Vec::new(),
            excess: vec![0; node_count],
        }
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, cost: i64, capacity: Option<i64>) -> usize {
        assert!(
            from < self.node_count && to < self.node_count,
            "arc endpoint out of range"
        );
        self.arcs.push(FlowArc {
            from,
            to,
            cost,
            capacity,
        });
        self.arcs.len() - 1
    }

    pub fn set_excess(&mut self, node: usize, excess: i64) {
        self.excess[node] = excess;
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    pub fn excess(&self) -> &[i64] {
        &self.excess
    }
}

impl fmt::Display for FlowNetwork {
    /// One line per node excess, then one line per arc.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.node_count)?;
        for (v, e) in self.excess.iter().enumerate() {
            if *e != 0 {
                writeln!(f, "excess {v} {e}")?;
            }
        }
        for a in &self.arcs {
            match a.capacity {
                Some(c) => writeln!(f, "arc {} {} cost {} cap {}", a.from, a.to, a.cost, c)?,
                None => writeln!(f, "arc {} {} cost {} cap inf", a.from, a.to, a.cost)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    /// Flow per arc, in network arc order.
    pub flows: Vec<i64>,
    pub total_cost: i64,
    /// Node potentials `p` with `cost + p(from) - p(to) >= 0` on every residual arc.
    pub potentials: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("node excesses sum to {0}, expected 0")]
    Unbalanced(i64),
    #[error("arc {0} has non-positive capacity")]
    BadCapacity(usize),
    #[error("supplies cannot reach the demands")]
    Infeasible,
    #[error("negative-cost cycle of unbounded capacity")]
    Unbounded,
}

struct Residual {
    // edge 2i is arc i forward, 2i + 1 its reverse
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    unbounded: Vec<bool>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn from(&self, e: usize) -> usize {
        self.to[e ^ 1]
    }
}

pub fn solve_min_cost_flow(net: &FlowNetwork) -> Result<Flow, FlowError> {
    let n = net.node_count;
    let balance: i64 = net.excess.iter().sum();
    if balance != 0 {
        return Err(FlowError::Unbalanced(balance));
    }
    let unbounded_cap = i64::MAX / 4;

    let m = net.arcs.len();
    let mut res = Residual {
        to: Vec::with_capacity(2 * m),
        cap: Vec::with_capacity(2 * m),
        cost: Vec::with_capacity(2 * m),
        unbounded: Vec::with_capacity(2 * m),
        adj: vec![Vec::new(); n],
    };
    for (i, a) in net.arcs.iter().enumerate() {
        let cap = match a.capacity {
            Some(c) if c <= 0 => return Err(FlowError::BadCapacity(i)),
            Some(c) => c,
            None => unbounded_cap,
        };
        res.to.extend([a.to, a.from]);
        res.cap.extend([cap, 0]);
        res.cost.extend([a.cost, -a.cost]);
        res.unbounded.extend([a.capacity.is_none(), false]);
        res.adj[a.from].push(2 * i);
        res.adj[a.to].push(2 * i + 1);
    }
    for list in res.adj.iter_mut() {
        list.sort_by_key(|&e| (res.to[e], e));
    }

    let mut potential = initial_potentials(&mut res, n)?;
    let mut excess = net.excess.clone();

    let mut dist = vec![i64::MAX; n];
    let mut done = vec![false; n];
    let mut via: Vec<Option<usize>> = vec![None; n];

    while excess.iter().any(|e| *e > 0) {
        dist.fill(i64::MAX);
        done.fill(false);
        via.fill(None);
        let mut heap = BinaryHeap::new();
        for (v, &e) in excess.iter().enumerate() {
            if e > 0 {
                dist[v] = 0;
                heap.push(Reverse((0i64, v)));
            }
        }
        let mut sink = None;
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] || d > dist[v] {
                continue;
            }
            done[v] = true;
            if excess[v] < 0 {
                sink = Some(v);
                break;
            }
            for &e in &res.adj[v] {
                if res.cap[e] == 0 {
                    continue;
                }
                let w = res.to[e];
                let reduced = res.cost[e] + potential[v] - potential[w];
                debug_assert!(reduced >= 0, "negative reduced cost on residual edge");
                let nd = d + reduced;
                if nd < dist[w] {
                    dist[w] = nd;
                    via[w] = Some(e);
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        let sink = sink.ok_or(FlowError::Infeasible)?;
        let reach = dist[sink];
        for v in 0..n {
            potential[v] += if done[v] { dist[v].min(reach) } else { reach };
        }

        let mut delta = -excess[sink];
        let mut v = sink;
        while let Some(e) = via[v] {
            delta = delta.min(res.cap[e]);
            v = res.from(e);
        }
        let source = v;
        delta = delta.min(excess[source]);
        let mut v = sink;
        while let Some(e) = via[v] {
            res.cap[e] -= delta;
            res.cap[e ^ 1] += delta;
            v = res.from(e);
        }
        excess[source] -= delta;
        excess[sink] += delta;
    }

    let flows: Vec<i64> = (0..m).map(|i| res.cap[2 * i + 1]).collect();
    let total_cost = flows.iter().zip(&net.arcs).map(|(f, a)| f * a.cost).sum();
    Ok(Flow {
        flows,
        total_cost,
        potentials: potential,
    })
}

/// Potentials making every residual edge non-negative. Negative cycles that
/// include a capacitated edge are cancelled first; a negative cycle made only
/// of uncapacitated forward edges means the problem is unbounded.
fn initial_potentials(res: &mut Residual, n: usize) -> Result<Vec<i64>, FlowError> {
    let sources: Vec<usize> = (0..n).collect();
    loop {
        let mut edge_of = Vec::new();
        let mut arcs = Vec::new();
        for e in 0..res.to.len() {
            if res.cap[e] > 0 {
                edge_of.push(e);
                arcs.push(WeightedArc {
                    from: res.from(e),
                    to: res.to[e],
                    weight: res.cost[e],
                });
            }
        }
        match shortest_paths(n, &arcs, &sources) {
            ShortestPaths::Tree { dist, .. } => {
                return Ok(dist.into_iter().map(|d| d.unwrap_or(0)).collect());
            }
            ShortestPaths::NegativeCycle(cycle) => {
                let edges: Vec<usize> = cycle.iter().map(|&i| edge_of[i]).collect();
                if edges.iter().all(|&e| res.unbounded[e]) {
                    return Err(FlowError::Unbounded);
                }
                let delta = edges.iter().map(|&e| res.cap[e]).min().unwrap_or(0);
                for &e in &edges {
                    res.cap[e] -= delta;
                    res.cap[e ^ 1] += delta;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 3, None);
        net.set_excess(0, 1);
        net.set_excess(1, -1);
        let f = solve_min_cost_flow(&net).unwrap();
        assert_eq!(f.flows, vec![1]);
        assert_eq!(f.total_cost, 3);
    }

    #[test]
    fn cheaper_path_wins() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 1, None);
        net.add_arc(1, 2, 2, None);
        net.add_arc(0, 2, 5, None);
        net.set_excess(0, 1);
        net.set_excess(2, -1);
        let f = solve_min_cost_flow(&net).unwrap();
        assert_eq!(f.flows, vec![1, 1, 0]);
        assert_eq!(f.total_cost, 3);
    }

    #[test]
    fn capacity_forces_split() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 1, Some(1));
        net.add_arc(1, 2, 1, None);
        net.add_arc(0, 2, 5, None);
        net.set_excess(0, 2);
        net.set_excess(2, -2);
        let f = solve_min_cost_flow(&net).unwrap();
        assert_eq!(f.flows, vec![1, 1, 1]);
        assert_eq!(f.total_cost, 7);
    }

    #[test]
    fn unreachable_demand_is_infeasible() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(1, 0, 1, None);
        net.set_excess(0, 1);
        net.set_excess(1, -1);
        assert_eq!(solve_min_cost_flow(&net), Err(FlowError::Infeasible));
    }

    #[test]
    fn negative_uncapacitated_cycle_is_unbounded() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, -2, None);
        net.add_arc(1, 0, 1, None);
        assert_eq!(solve_min_cost_flow(&net), Err(FlowError::Unbounded));
    }

    #[test]
    fn capacitated_negative_cycle_is_cancelled() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, -2, Some(3));
        net.add_arc(1, 0, 1, None);
        let f = solve_min_cost_flow(&net).unwrap();
        assert_eq!(f.flows, vec![3, 3]);
        assert_eq!(f.total_cost, -3);
    }

    #[test]
    fn unbalanced_rejected() {
        let mut net = FlowNetwork::new(2);
        net.set_excess(0, 1);
        assert_eq!(solve_min_cost_flow(&net), Err(FlowError::Unbalanced(1)));
    }

    #[test]
    fn zero_capacity_rejected() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 1, Some(0));
        assert_eq!(solve_min_cost_flow(&net), Err(FlowError::BadCapacity(0)));
    }
}

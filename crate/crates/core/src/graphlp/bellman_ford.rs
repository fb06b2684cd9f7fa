//! Queue-based Bellman–Ford over integer arc weights.
//!
//! Negative cycles are found by periodically scanning the parent graph: any
//! cycle in it has negative weight, and one appears after finitely many
//! relaxations whenever a negative cycle is reachable from the sources.

use std::collections::VecDeque;

/// A weighted arc `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct WeightedArc {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ShortestPaths {
    /// `dist[v]` is `None` when `v` is unreachable; `parent[v]` is the arc index
    /// that last improved `v`.
    Tree {
        dist: Vec<Option<i64>>,
        #[allow(dead_code)]
        parent: Vec<Option<usize>>,
    },
    /// Arc indices of a negative cycle, in traversal order.
    NegativeCycle(Vec<usize>),
}

/// Outgoing arc lists in compressed form, each list sorted by head node id so
/// that lower ids are relaxed first.
struct Adjacency {
    offsets: Vec<usize>,
    arcs: Vec<usize>,
}

impl Adjacency {
    fn build(node_count: usize, arcs: &[WeightedArc]) -> Self {
        let mut offsets = vec![0usize; node_count + 1];
        for a in arcs {
            offsets[a.from + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut list = vec![0usize; arcs.len()];
        for (idx, a) in arcs.iter().enumerate() {
            list[fill[a.from]] = idx;
            fill[a.from] += 1;
        }
        for v in 0..node_count {
            list[offsets[v]..offsets[v + 1]].sort_by_key(|&i| (arcs[i].to, i));
        }
        Adjacency {
            offsets,
            arcs: list,
        }
    }

    fn out(&self, v: usize) -> &[usize] {
        &self.arcs[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Single- or multi-source shortest paths. Every source starts at distance 0.
pub(crate) fn shortest_paths(
    node_count: usize,
    arcs: &[WeightedArc],
    sources: &[usize],
) -> ShortestPaths {
    let adj = Adjacency::build(node_count, arcs);
    let mut dist: Vec<Option<i64>> = vec![None; node_count];
    let mut parent: Vec<Option<usize>> = vec![None; node_count];
    let mut queued = vec![false; node_count];
    let mut queue = VecDeque::with_capacity(node_count);

    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queued[s] = true;
            queue.push_back(s);
        }
    }

    let check_every = node_count.max(1);
    let mut since_check = 0usize;

    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let dv = match dist[v] {
            Some(d) => d,
            None => continue,
        };
        for &ai in adj.out(v) {
            let a = arcs[ai];
            let cand = dv + a.weight;
            if dist[a.to].is_none_or(|d| cand < d) {
                dist[a.to] = Some(cand);
                parent[a.to] = Some(ai);
                if !queued[a.to] {
                    queued[a.to] = true;
                    queue.push_back(a.to);
                }
                since_check += 1;
                if since_check >= check_every {
                    since_check = 0;
                    if let Some(cycle) = parent_cycle(arcs, &parent) {
                        return ShortestPaths::NegativeCycle(cycle);
                    }
                }
            }
        }
    }

    ShortestPaths::Tree { dist, parent }
}

/// Finds a cycle in the parent graph, if any, returned as arc indices in
/// forward order. Cycles with non-negative weight are ignored.
fn parent_cycle(arcs: &[WeightedArc], parent: &[Option<usize>]) -> Option<Vec<usize>> {
    let n = parent.len();
    // 0 = unvisited, otherwise the walk id that first touched the node
    let mut mark = vec![0usize; n];
    for start in 0..n {
        if mark[start] != 0 {
            continue;
        }
        let walk = start + 1;
        let mut v = start;
        loop {
            if mark[v] != 0 {
                if mark[v] == walk {
                    let cycle = collect_cycle(arcs, parent, v);
                    let weight: i64 = cycle.iter().map(|&i| arcs[i].weight).sum();
                    if weight < 0 {
                        return Some(cycle);
                    }
                }
                break;
            }
            mark[v] = walk;
            match parent[v] {
                Some(ai) => v = arcs[ai].from,
                None => break,
            }
        }
    }
    None
}

fn collect_cycle(arcs: &[WeightedArc], parent: &[Option<usize>], on_cycle: usize) -> Vec<usize> {
    let mut cycle = Vec::new();
    let mut v = on_cycle;
    loop {
        let ai = parent[v].expect("node on a parent cycle has a parent");
        cycle.push(ai);
        v = arcs[ai].from;
        if v == on_cycle {
            break;
        }
    }
    cycle.reverse();
    cycle
}

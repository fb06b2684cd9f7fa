use std::collections::{BTreeMap, VecDeque};

use super::{guard, OracleResult, SizeGuard};
use crate::prefetch::{simulate, Fetch, FetchSchedule, PageId, PrefetchInstance};

const MAX_REQUESTS: usize = 6;
const MAX_CACHE: usize = 3;
const MAX_PAGES: usize = 16;

/// Cache contents as a bitmask, plus the start time of an unfinished fetch.
type State = (u32, Option<usize>);

#[derive(Clone, Copy)]
enum Move {
    Init,
    Evict { time: usize, page: PageId },
    Load { time: usize, page: PageId },
    Wait,
}

struct Step {
    parent: usize,
    mv: Move,
}

/// Explores every sequence of evictions and loads, time by time, keeping the
/// cheapest way to reach each (cache, pending fetch) state. Fetches start at
/// time 2 or later and finish by time `n`.
pub fn brute_prefetch(inst: &PrefetchInstance) -> Result<OracleResult<FetchSchedule>, SizeGuard> {
    guard("request count", inst.len(), MAX_REQUESTS)?;
    guard("cache size", inst.cache_size(), MAX_CACHE)?;
    guard("page count", inst.pages().len(), MAX_PAGES)?;
    let n = inst.len();
    let f = inst.fetch_duration();
    let pages = inst.pages().len();

    let mut arena = vec![Step {
        parent: usize::MAX,
        mv: Move::Init,
    }];
    let init_mask = inst.initial_cache().iter().fold(0u32, |m, &p| m | 1 << p);
    // state -> (cost, arena node)
    let mut layer: BTreeMap<State, (i64, usize)> = BTreeMap::new();
    layer.insert((init_mask, None), (0, 0));

    for t in 1..=n {
        let mut cur: BTreeMap<State, (i64, usize)> = BTreeMap::new();
        for (&(mask, pending), &(cost, node)) in &layer {
            if pending.is_some_and(|s| t > s + f) {
                continue;
            }
            let id = arena.len();
            arena.push(Step {
                parent: node,
                mv: Move::Wait,
            });
            cur.insert((mask, pending), (cost, id));
        }
        let mut queue: VecDeque<State> = cur.keys().copied().collect();
        while let Some(state) = queue.pop_front() {
            let (cost, node) = cur[&state];
            let (mask, pending) = state;
            let mut next = Vec::new();
            match pending {
                None if t >= 2 => {
                    for y in (0..pages).filter(|&y| mask & 1 << y != 0) {
                        next.push((
                            (mask & !(1 << y), Some(t)),
                            cost,
                            Move::Evict { time: t, page: y },
                        ));
                    }
                }
                None => {}
                Some(s) => {
                    let stall = (f - (t - s)) as i64;
                    for z in (0..pages).filter(|&z| mask & 1 << z == 0) {
                        next.push((
                            (mask | 1 << z, None),
                            cost + stall,
                            Move::Load { time: t, page: z },
                        ));
                    }
                }
            }
            for (to, c, mv) in next {
                if cur.get(&to).is_none_or(|&(old, _)| c < old) {
                    let id = arena.len();
                    arena.push(Step { parent: node, mv });
                    cur.insert(to, (c, id));
                    queue.push_back(to);
                }
            }
        }
        let want = inst.requests()[t - 1];
        cur.retain(|&(mask, _), _| mask & 1 << want != 0);
        layer = cur;
    }

    let best = layer
        .iter()
        .filter(|((_, pending), _)| pending.is_none())
        .min_by_key(|(_, &(cost, _))| cost);
    let Some((_, &(objective, mut node))) = best else {
        return Ok(OracleResult::Infeasible);
    };

    let mut moves = Vec::new();
    while node != usize::MAX {
        moves.push(arena[node].mv);
        node = arena[node].parent;
    }
    moves.reverse();
    let mut fetches: Vec<Fetch> = Vec::new();
    for mv in moves {
        match mv {
            Move::Evict { time, page } => fetches.push(Fetch {
                start: time,
                evict: page,
                end: 0,
                fetch: 0,
            }),
            Move::Load { time, page } => {
                let last = fetches.last_mut().expect("a load follows an eviction");
                last.end = time;
                last.fetch = page;
            }
            Move::Init | Move::Wait => {}
        }
    }
    let witness = FetchSchedule { fetches };
    debug_assert_eq!(simulate(inst, &witness), Ok(objective));
    Ok(OracleResult::Optimal { objective, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(reqs: &str, k: usize, f: usize) -> PrefetchInstance {
        PrefetchInstance::new(reqs.chars().map(String::from), k, f, None).unwrap()
    }

    fn check(i: &PrefetchInstance, expected: i64) {
        match brute_prefetch(i).unwrap() {
            OracleResult::Optimal { objective, witness } => {
                assert_eq!(objective, expected);
                assert_eq!(simulate(i, &witness), Ok(objective));
            }
            OracleResult::Infeasible => panic!("prefetch instances are always feasible"),
        }
    }

    #[test]
    fn abac() {
        check(&inst("abac", 2, 2), 1);
    }

    #[test]
    fn aabb() {
        check(&inst("aabb", 1, 2), 2);
    }

    #[test]
    fn all_cached() {
        let i = inst("abba", 2, 3);
        check(&i, 0);
        if let OracleResult::Optimal { witness, .. } = brute_prefetch(&i).unwrap() {
            assert!(witness.fetches.is_empty());
        }
    }

    #[test]
    fn long_fetch_hides_latency() {
        // evict b at 3, load c at 5: stall 0 with F = 2
        check(&inst("abaac", 2, 2), 0);
    }

    #[test]
    fn guard_trips() {
        assert!(brute_prefetch(&inst("abcabca", 2, 2)).is_err());
    }
}

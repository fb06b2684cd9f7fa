use std::collections::BTreeSet;

use super::{guard, OracleResult, SizeGuard};
use crate::equal::{verify_equal, Assignment, EqualInstance, EqualSchedule};

const MAX_JOBS: usize = 6;

/// Tries every integer start in every window, keeping at most `m` jobs
/// running at any time, and returns a schedule of minimal total completion.
pub fn brute_equal(inst: &EqualInstance) -> Result<OracleResult<EqualSchedule>, SizeGuard> {
    guard("job count", inst.len(), MAX_JOBS)?;
    let jobs = inst.jobs();
    let p = inst.length();
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&j| (jobs[j].release, jobs[j].deadline));
    // lower bound of the jobs from position i on
    let mut rest = vec![0i64; order.len() + 1];
    for i in (0..order.len()).rev() {
        rest[i] = rest[i + 1] + jobs[order[i]].release + p;
    }

    struct Search<'a> {
        inst: &'a EqualInstance,
        order: Vec<usize>,
        rest: Vec<i64>,
        starts: Vec<i64>,
        best: Option<(i64, Vec<i64>)>,
    }

    impl Search<'_> {
        fn run(&mut self, depth: usize, cost: i64) {
            if let Some((b, _)) = &self.best {
                if cost + self.rest[depth] >= *b {
                    return;
                }
            }
            if depth == self.order.len() {
                self.best = Some((cost, self.starts.clone()));
                return;
            }
            let p = self.inst.length();
            let w = self.inst.jobs()[self.order[depth]];
            for s in w.release..=w.deadline - p {
                if fits(&self.starts, s, p, self.inst.machines()) {
                    self.starts.push(s);
                    self.run(depth + 1, cost + s + p);
                    self.starts.pop();
                }
            }
        }
    }

    let mut search = Search {
        inst,
        order,
        rest,
        starts: Vec::new(),
        best: None,
    };
    search.run(0, 0);
    let Some((objective, starts)) = search.best else {
        return Ok(OracleResult::Infeasible);
    };
    let mut by_job = vec![0; jobs.len()];
    for (pos, &j) in search.order.iter().enumerate() {
        by_job[j] = starts[pos];
    }
    let witness = partition(&by_job, p);
    debug_assert_eq!(verify_equal(inst, &witness), Ok(objective));
    Ok(OracleResult::Optimal { objective, witness })
}

/// Every distinct multiset of slot starts drawn from `{r_i + a p}` that some
/// feasible schedule uses, each sorted ascending.
pub fn feasible_slot_sets(inst: &EqualInstance) -> Result<Vec<Vec<i64>>, SizeGuard> {
    guard("job count", inst.len(), MAX_JOBS)?;
    let jobs = inst.jobs();
    let p = inst.length();
    let horizon = jobs.iter().map(|w| w.deadline).max().unwrap_or(0) - p;
    let mut points = BTreeSet::new();
    for w in jobs {
        let mut t = w.release;
        while t <= horizon {
            points.insert(t);
            t += p;
        }
    }
    let points: Vec<i64> = points.into_iter().collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    multisets(inst, &points, 0, &mut chosen, &mut out);
    Ok(out)
}

fn multisets(
    inst: &EqualInstance,
    points: &[i64],
    from: usize,
    chosen: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if chosen.len() == inst.len() {
        if perfect_matching(inst, chosen) {
            out.push(chosen.clone());
        }
        return;
    }
    for (i, &t) in points.iter().enumerate().skip(from) {
        if fits(chosen, t, inst.length(), inst.machines()) {
            chosen.push(t);
            multisets(inst, points, i, chosen, out);
            chosen.pop();
        }
    }
}

/// Can every job take a distinct slot inside its window?
fn perfect_matching(inst: &EqualInstance, slots: &[i64]) -> bool {
    let p = inst.length();
    let ok = |j: usize, s: usize| {
        let w = inst.jobs()[j];
        w.release <= slots[s] && slots[s] + p <= w.deadline
    };
    let mut owner: Vec<Option<usize>> = vec![None; slots.len()];
    fn augment(
        j: usize,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
        ok: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        for s in 0..owner.len() {
            if !seen[s] && ok(j, s) {
                seen[s] = true;
                if owner[s].is_none_or(|o| augment(o, seen, owner, ok)) {
                    owner[s] = Some(j);
                    return true;
                }
            }
        }
        false
    }
    (0..inst.len()).all(|j| {
        let mut seen = vec![false; slots.len()];
        augment(j, &mut seen, &mut owner, &ok)
    })
}

/// At most `m` of `starts` plus `[s, s+p)` overlap at any time.
fn fits(starts: &[i64], s: i64, p: i64, m: usize) -> bool {
    let load_at = |x: i64| starts.iter().filter(|&&c| c <= x && x < c + p).count();
    load_at(s) < m
        && starts
            .iter()
            .filter(|&&c| s < c && c < s + p)
            .all(|&c| load_at(c) < m)
}

/// Interval partitioning: each job, by start, takes the lowest-numbered free
/// machine.
fn partition(starts: &[i64], p: i64) -> EqualSchedule {
    let mut order: Vec<usize> = (0..starts.len()).collect();
    order.sort_by_key(|&j| (starts[j], j));
    let mut free_at: Vec<i64> = Vec::new();
    let mut assignments = vec![
        Assignment {
            machine: 0,
            start: 0
        };
        starts.len()
    ];
    for j in order {
        let s = starts[j];
        let machine = match free_at.iter().position(|&f| f <= s) {
            Some(i) => i,
            None => {
                free_at.push(s);
                free_at.len() - 1
            }
        };
        free_at[machine] = s + p;
        assignments[j] = Assignment {
            machine: machine + 1,
            start: s,
        };
    }
    EqualSchedule { assignments }
}

//! `P | r_j; p_j = p; D_j | sum C_j`: `n` jobs of common length `p` on `m`
//! identical machines, each inside its window `[r_j, D_j]`.
//!
//! Starts can be restricted to `T = { r_i + a p : 0 <= a < n }`. With `y_t` the
//! number of slots starting at or before `t` (over `T' = {t0} ∪ T`), the
//! skeleton LP is a difference system:
//!
//! - cap: `y[max T] - y[t0] <= n`
//! - order: `y[prec t] - y[t] <= 0`
//! - load: for every `u` in `T`, `y[prec(u + p)] - y[prec u] <= m`, i.e. at
//!   most `m` starts in `[u, u + p)`. Windows anchored on `T` points are the
//!   only ones that matter, since any start-maximal window can be slid right
//!   onto its first start.
//! - inclusion: `y[round(D_j - p)] - y[prec r_i] >= c_ij`, the number of jobs
//!   whose window lies inside `[r_i, D_j]`.
//!
//! The cap and the full-span inclusion force `y[max T] = n`. Summation by
//! parts turns `sum (t + p)(y_t - y_prec t)` into a constant minus a positive
//! combination of the `y_t`, so the componentwise-maximal valuation (plain
//! shortest-path distances) is optimal and no flow solve is needed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphlp::{self, DiffSystem, LpError};
use crate::{Certificate, Window};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance has no jobs")]
    NoJobs,
    #[error("machine count must be positive")]
    NoMachines,
    #[error("job length must be positive, got {0}")]
    BadLength(i64),
    #[error("job {job}: window [{release}, {deadline}] is shorter than the job length {length}")]
    WindowTooShort {
        job: usize,
        release: i64,
        deadline: i64,
        length: i64,
    },
    #[error("unsupported format version {0}")]
    Format(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEqualInstance", into = "RawEqualInstance")]
pub struct EqualInstance {
    machines: usize,
    length: i64,
    jobs: Vec<Window>,
}

#[derive(Serialize, Deserialize)]
struct RawEqualInstance {
    #[serde(default = "crate::default_format")]
    format: u32,
    machines: usize,
    length: i64,
    jobs: Vec<Window>,
}

impl TryFrom<RawEqualInstance> for EqualInstance {
    type Error = InstanceError;

    fn try_from(raw: RawEqualInstance) -> Result<Self, Self::Error> {
        if raw.format != crate::FORMAT_VERSION {
            return Err(InstanceError::Format(raw.format));
        }
        EqualInstance::new(raw.machines, raw.length, raw.jobs)
    }
}

impl From<EqualInstance> for RawEqualInstance {
    fn from(inst: EqualInstance) -> Self {
        RawEqualInstance {
            format: crate::FORMAT_VERSION,
            machines: inst.machines,
            length: inst.length,
            jobs: inst.jobs,
        }
    }
}

impl EqualInstance {
    pub fn new(machines: usize, length: i64, jobs: Vec<Window>) -> Result<Self, InstanceError> {
        if machines == 0 {
            return Err(InstanceError::NoMachines);
        }
        if length <= 0 {
            return Err(InstanceError::BadLength(length));
        }
        if jobs.is_empty() {
            return Err(InstanceError::NoJobs);
        }
        for (job, w) in jobs.iter().enumerate() {
            if w.deadline - w.release < length {
                return Err(InstanceError::WindowTooShort {
                    job,
                    release: w.release,
                    deadline: w.deadline,
                    length,
                });
            }
        }
        Ok(EqualInstance {
            machines,
            length,
            jobs,
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn length(&self) -> i64 {
        self.length
    }

    pub fn jobs(&self) -> &[Window] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Job indices sorted by `(release, deadline, index)`.
    pub fn release_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.jobs.len()).collect();
        order.sort_by_key(|&j| (self.jobs[j].release, self.jobs[j].deadline, j));
        order
    }
}

/// Candidate start times plus the sentinel `t0 < min T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimePoints {
    pub t0: i64,
    pub points: Vec<i64>,
}

impl TimePoints {
    /// Number of LP nodes, `|T| + 1`.
    pub fn node_count(&self) -> usize {
        self.points.len() + 1
    }

    /// Time of LP node `i`; node 0 is the sentinel.
    pub fn time(&self, node: usize) -> i64 {
        if node == 0 {
            self.t0
        } else {
            self.points[node - 1]
        }
    }

    /// Node of the largest point of `T'` that is `<= x`.
    pub fn round(&self, x: i64) -> usize {
        assert!(x >= self.t0, "round({x}) below the sentinel");
        self.points.partition_point(|&t| t <= x)
    }

    /// Node of the largest point of `T'` strictly below `x`.
    pub fn prec(&self, x: i64) -> usize {
        assert!(x > self.t0, "prec({x}) at or below the sentinel");
        self.points.partition_point(|&t| t < x)
    }
}

pub fn time_points(inst: &EqualInstance) -> TimePoints {
    let n = inst.len() as i64;
    let mut points: Vec<i64> = inst
        .jobs
        .iter()
        .flat_map(|w| (0..n).map(move |a| w.release + a * inst.length))
        .collect();
    points.sort_unstable();
    points.dedup();
    TimePoints {
        t0: points[0] - 1,
        points,
    }
}

/// Inclusion counts over the release order returned alongside.
///
/// `c[i][j] = |{k >= i : D_k <= D_j}|` in that order, built by the
/// recursion `c[i][j] = c[i+1][j] + [D_i <= D_j]`. For the first job of a
/// group with equal releases this is exactly the number of windows inside
/// `[r_i, D_j]`; later members undercount, which only weakens constraints that
/// the first member already states exactly.
pub fn inclusion_counts(inst: &EqualInstance) -> (Vec<usize>, Vec<Vec<i64>>) {
    let order = inst.release_order();
    let n = order.len();
    let deadline = |pos: usize| inst.jobs[order[pos]].deadline;
    let mut c = vec![vec![0i64; n]; n + 1];
    for i in (0..n).rev() {
        for j in 0..n {
            c[i][j] = c[i + 1][j] + i64::from(deadline(i) <= deadline(j));
        }
    }
    c.truncate(n);
    (order, c)
}

/// The skeleton LP as a difference system over `T'` (node 0 = `t0`, the root).
pub fn build_system(inst: &EqualInstance) -> (TimePoints, DiffSystem) {
    let tp = time_points(inst);
    let nodes = tp.node_count();
    let last = nodes - 1;
    let n = inst.len() as i64;
    let m = inst.machines as i64;
    let p = inst.length;
    let mut sys = DiffSystem::new(nodes, 0);

    sys.add(last, 0, n);
    for t in 1..nodes {
        sys.add(t - 1, t, 0);
    }
    for (idx, &u) in tp.points.iter().enumerate() {
        let lo = idx; // prec(u)
        let hi = tp.prec(u + p);
        if hi != lo {
            sys.add(hi, lo, m);
        }
    }
    let (order, c) = inclusion_counts(inst);
    for (i, &ji) in order.iter().enumerate() {
        let s = tp.prec(inst.jobs[ji].release);
        for (j, &jj) in order.iter().enumerate() {
            let t = tp.round(inst.jobs[jj].deadline - p);
            if s < t {
                sys.add(s, t, -c[i][j]);
            } else {
                debug_assert_eq!(c[i][j], 0, "positive inclusion count on an empty span");
            }
        }
    }
    sys.dedup();
    (tp, sys)
}

/// Cumulative slot counts `y` over `T'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotProfile {
    pub length: i64,
    /// `T'` in increasing order, sentinel first.
    pub times: Vec<i64>,
    pub y: Vec<i64>,
}

impl SlotProfile {
    /// Slot start times with multiplicity, in increasing order.
    pub fn slot_starts(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for i in 1..self.y.len() {
            for _ in 0..(self.y[i] - self.y[i - 1]).max(0) {
                out.push(self.times[i]);
            }
        }
        out
    }

    /// `sum (t + p) (y_t - y_prec t)`.
    pub fn objective(&self) -> i64 {
        (1..self.y.len())
            .map(|i| (self.times[i] + self.length) * (self.y[i] - self.y[i - 1]))
            .sum()
    }

    /// Largest number of slot starts inside any `[s, s + p)`.
    pub fn max_window_load(&self) -> usize {
        let starts = self.slot_starts();
        let mut best = 0;
        for (i, &s) in starts.iter().enumerate() {
            let count = starts[i..]
                .iter()
                .take_while(|&&t| t < s + self.length)
                .count();
            best = best.max(count);
        }
        best
    }
}

pub fn solve_skeleton(inst: &EqualInstance) -> Result<SlotProfile, Certificate> {
    let (tp, sys) = build_system(inst);
    match graphlp::solve_max(&sys) {
        Ok(val) => Ok(SlotProfile {
            length: inst.length,
            times: (0..tp.node_count()).map(|i| tp.time(i)).collect(),
            y: val.0,
        }),
        Err(LpError::Infeasible(cycle)) => Err(Certificate {
            labels: cycle.nodes.iter().map(|&v| tp.time(v)).collect(),
            cycle,
        }),
        Err(e) => unreachable!("every node is reachable from t0 via the cap and order arcs: {e}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// 1-based machine number.
    pub machine: usize,
    pub start: i64,
}

/// One assignment per job, in instance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualSchedule {
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentFailure {
    #[error("no released job available for the slot at {start}")]
    EmptySlot { start: i64 },
    #[error("job {job} would miss its deadline in the slot at {start}")]
    DeadlineMissed { job: usize, start: i64 },
    #[error("{count} job(s) left without a slot")]
    Unassigned { count: usize },
}

/// Earliest-due-date filling of the profile's slots; the `i`-th slot in start
/// order runs on machine `(i mod m) + 1`.
pub fn edd_assign(
    inst: &EqualInstance,
    profile: &SlotProfile,
) -> Result<EqualSchedule, AssignmentFailure> {
    let order = inst.release_order();
    let mut next = 0;
    let mut ready = BinaryHeap::new();
    let mut out = vec![None; inst.len()];
    for (i, start) in profile.slot_starts().into_iter().enumerate() {
        while next < order.len() && inst.jobs[order[next]].release <= start {
            let j = order[next];
            ready.push(Reverse((inst.jobs[j].deadline, j)));
            next += 1;
        }
        let Reverse((deadline, job)) = ready.pop().ok_or(AssignmentFailure::EmptySlot { start })?;
        if start + inst.length > deadline {
            return Err(AssignmentFailure::DeadlineMissed { job, start });
        }
        out[job] = Some(Assignment {
            machine: i % inst.machines + 1,
            start,
        });
    }
    let missing = out.iter().filter(|a| a.is_none()).count();
    if missing > 0 {
        return Err(AssignmentFailure::Unassigned { count: missing });
    }
    Ok(EqualSchedule {
        assignments: out.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleViolation {
    #[error("schedule has {got} assignments for {expected} jobs")]
    JobCount { expected: usize, got: usize },
    #[error("job {job} starts at {start}, outside [{earliest}, {latest}]")]
    Window {
        job: usize,
        start: i64,
        earliest: i64,
        latest: i64,
    },
    #[error("job {job} is on machine {machine}, outside 1..={machines}")]
    Machine {
        job: usize,
        machine: usize,
        machines: usize,
    },
    #[error("jobs {first} and {second} overlap on machine {machine}")]
    Overlap {
        first: usize,
        second: usize,
        machine: usize,
    },
}

/// Checks windows, machine numbers and per-machine disjointness; returns the
/// total completion time.
pub fn verify_equal(
    inst: &EqualInstance,
    sched: &EqualSchedule,
) -> Result<i64, Vec<ScheduleViolation>> {
    let p = inst.length;
    if sched.assignments.len() != inst.len() {
        return Err(vec![ScheduleViolation::JobCount {
            expected: inst.len(),
            got: sched.assignments.len(),
        }]);
    }
    let mut bad = Vec::new();
    for (job, (a, w)) in sched.assignments.iter().zip(&inst.jobs).enumerate() {
        if a.start < w.release || a.start + p > w.deadline {
            bad.push(ScheduleViolation::Window {
                job,
                start: a.start,
                earliest: w.release,
                latest: w.deadline - p,
            });
        }
        if a.machine == 0 || a.machine > inst.machines {
            bad.push(ScheduleViolation::Machine {
                job,
                machine: a.machine,
                machines: inst.machines,
            });
        }
    }
    let mut by_machine: Vec<(usize, i64, usize)> = sched
        .assignments
        .iter()
        .enumerate()
        .map(|(j, a)| (a.machine, a.start, j))
        .collect();
    by_machine.sort_unstable();
    for pair in by_machine.windows(2) {
        let (m1, s1, j1) = pair[0];
        let (m2, s2, j2) = pair[1];
        if m1 == m2 && s2 < s1 + p {
            bad.push(ScheduleViolation::Overlap {
                first: j1,
                second: j2,
                machine: m1,
            });
        }
    }
    if bad.is_empty() {
        Ok(sched.assignments.iter().map(|a| a.start + p).sum())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualSolution {
    pub profile: SlotProfile,
    pub schedule: EqualSchedule,
    pub total_completion: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("instance is infeasible")]
    Infeasible(Certificate),
    #[error("greedy assignment failed on an LP skeleton: {0}")]
    Assignment(#[from] AssignmentFailure),
}

/// Skeleton, then earliest-due-date assignment.
pub fn solve(inst: &EqualInstance) -> Result<EqualSolution, SolveError> {
    let profile = solve_skeleton(inst).map_err(SolveError::Infeasible)?;
    let schedule = edd_assign(inst, &profile)?;
    Ok(EqualSolution {
        total_completion: profile.objective(),
        profile,
        schedule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(m: usize, p: i64, jobs: &[(i64, i64)]) -> EqualInstance {
        EqualInstance::new(m, p, jobs.iter().map(|&(r, d)| Window::new(r, d)).collect()).unwrap()
    }

    fn three_jobs() -> EqualInstance {
        inst(1, 2, &[(0, 7), (0, 4), (3, 7)])
    }

    #[test]
    fn single_point() {
        let tp = time_points(&inst(1, 2, &[(5, 9)]));
        assert_eq!(tp.points, vec![5]);
        assert_eq!(tp.t0, 4);
    }

    #[test]
    fn points_enumerate_multiples() {
        let tp = time_points(&inst(1, 2, &[(0, 9), (0, 9), (3, 9)]));
        assert_eq!(tp.points, vec![0, 2, 3, 4, 5, 7]);
    }

    #[test]
    fn duplicate_releases_collapse() {
        let tp = time_points(&inst(1, 1, &[(1, 5), (1, 5)]));
        assert_eq!(tp.points, vec![1, 2]);
    }

    #[test]
    fn round_and_prec() {
        let tp = time_points(&three_jobs());
        // T' = [-1, 0, 2, 3, 4, 5, 7]
        assert_eq!(tp.round(2), 2);
        assert_eq!(tp.round(6), 5);
        assert_eq!(tp.prec(0), 0);
        assert_eq!(tp.prec(3), 2);
        assert_eq!(tp.prec(100), 6);
    }

    #[test]
    fn inclusion_counts_example() {
        let (order, c) = inclusion_counts(&three_jobs());
        // sorted: (0,4), (0,7), (3,7)
        assert_eq!(order, vec![1, 0, 2]);
        assert_eq!(c[0][1], 3);
        assert_eq!(c[2][1], 1);
        assert_eq!(c[0][0], 1);
    }

    #[test]
    fn inclusion_counts_single_job() {
        let (_, c) = inclusion_counts(&inst(1, 1, &[(0, 1)]));
        assert_eq!(c, vec![vec![1]]);
    }

    #[test]
    fn single_job_system() {
        let (_, sys) = build_system(&inst(1, 1, &[(0, 1)]));
        let has = |u, v, b| {
            sys.constraints()
                .iter()
                .any(|c| (c.u, c.v, c.bound) == (u, v, b))
        };
        assert!(has(1, 0, 1));
        assert!(has(0, 1, -1));
        let y = graphlp::solve_max(&sys).unwrap();
        assert_eq!(y.values(), &[0, 1]);
    }

    #[test]
    fn order_arcs_one_per_point() {
        let i = three_jobs();
        let (tp, sys) = build_system(&i);
        let order = sys
            .constraints()
            .iter()
            .filter(|c| c.v == c.u + 1 && c.bound == 0)
            .count();
        assert_eq!(order, tp.points.len());
    }

    #[test]
    fn infeasible_pair() {
        let i = inst(1, 2, &[(0, 2), (0, 2)]);
        let cert = solve_skeleton(&i).unwrap_err();
        let (_, sys) = build_system(&i);
        assert!(cert.cycle.verify(&sys));
        assert!(cert.cycle.weight < 0);
    }

    #[test]
    fn three_job_profile() {
        let prof = solve_skeleton(&three_jobs()).unwrap();
        assert_eq!(prof.times, vec![-1, 0, 2, 3, 4, 5, 7]);
        assert_eq!(prof.y, vec![0, 1, 2, 2, 3, 3, 3]);
        assert_eq!(prof.slot_starts(), vec![0, 2, 4]);
        assert_eq!(prof.objective(), 12);
    }

    #[test]
    fn three_job_edd() {
        let i = three_jobs();
        let sched = edd_assign(&i, &solve_skeleton(&i).unwrap()).unwrap();
        let got: Vec<(usize, i64)> = sched
            .assignments
            .iter()
            .map(|a| (a.machine, a.start))
            .collect();
        assert_eq!(got, vec![(1, 2), (1, 0), (1, 4)]);
        assert_eq!(verify_equal(&i, &sched), Ok(12));
    }

    #[test]
    fn single_job_gets_its_slot() {
        let i = inst(1, 3, &[(4, 9)]);
        let sol = solve(&i).unwrap();
        assert_eq!(
            sol.schedule.assignments,
            vec![Assignment {
                machine: 1,
                start: 4
            }]
        );
        assert_eq!(sol.total_completion, 7);
    }

    #[test]
    fn round_robin_machines() {
        let i = inst(2, 2, &[(0, 2), (0, 2)]);
        let sol = solve(&i).unwrap();
        let mut got: Vec<(usize, i64)> = sol
            .schedule
            .assignments
            .iter()
            .map(|a| (a.machine, a.start))
            .collect();
        got.sort();
        assert_eq!(got, vec![(1, 0), (2, 0)]);
    }

    // Starts {0, 3, 4} pass load checks anchored at (s, s + p] but put two jobs
    // inside [3, 6) on one machine; the instance has no schedule.
    #[test]
    fn overlapping_starts_not_anchored_on_prec_are_caught() {
        let i = inst(1, 3, &[(0, 3), (0, 6), (4, 7)]);
        assert!(matches!(solve(&i), Err(SolveError::Infeasible(_))));
    }

    #[test]
    fn verify_flags_early_start() {
        let i = three_jobs();
        let sched = EqualSchedule {
            assignments: vec![
                Assignment {
                    machine: 1,
                    start: 2,
                },
                Assignment {
                    machine: 1,
                    start: 0,
                },
                Assignment {
                    machine: 1,
                    start: 1,
                },
            ],
        };
        let errs = verify_equal(&i, &sched).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ScheduleViolation::Window { job: 2, .. })));
    }

    #[test]
    fn verify_flags_overlap() {
        let i = three_jobs();
        let sched = EqualSchedule {
            assignments: vec![
                Assignment {
                    machine: 1,
                    start: 3,
                },
                Assignment {
                    machine: 1,
                    start: 0,
                },
                Assignment {
                    machine: 1,
                    start: 4,
                },
            ],
        };
        let errs = verify_equal(&i, &sched).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ScheduleViolation::Overlap { machine: 1, .. })));
    }

    #[test]
    fn short_window_rejected() {
        let err = EqualInstance::new(1, 3, vec![Window::new(0, 2)]).unwrap_err();
        assert!(matches!(err, InstanceError::WindowTooShort { job: 0, .. }));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"machines":1,"length":2,"jobs":[{"release":0,"deadline":7}]}"#;
        let i: EqualInstance = serde_json::from_str(json).unwrap();
        assert_eq!(i.len(), 1);
        let back = serde_json::to_string(&i).unwrap();
        assert_eq!(
            back,
            r#"{"format":1,"machines":1,"length":2,"jobs":[{"release":0,"deadline":7}]}"#
        );
    }

    #[test]
    fn json_rejects_short_window() {
        let json = r#"{"machines":1,"length":3,"jobs":[{"release":0,"deadline":2}]}"#;
        assert!(serde_json::from_str::<EqualInstance>(json).is_err());
    }
}

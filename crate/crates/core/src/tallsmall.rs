//! Unit jobs on `m` machines: small jobs use one machine, tall jobs use all of
//! them. Job `j` may run in slot `[t, t+1)` when `r_j <= t` and `t + 1 <= D_j`.
//!
//! After normalization (split at dead slots, shift so the first release is
//! 1, `H` = last deadline), `x_t` counts tall slots among `1..=t` and the
//! skeleton system over `x_0..x_H` (root `x_0`) is
//!
//! - order: `x_{t-1} - x_t <= 0`
//! - one tall job per slot: `x_t - x_{t-1} <= 1`
//! - tall demand: `x_{t-1} - x_{s-1} >= l[s][t]`
//! - small demand: `x_{t-1} - x_{s-1} <= (t - s) - ceil(k[s][t] / m)`
//! - tall count cap: `x_H - x_0 <= n_tall`
//!
//! A schedule never needs more tall slots than tall jobs, so the cap keeps
//! feasibility intact while ruling out idle tall slots. With `x_H` then fixed
//! at `n_tall`, the tall completion time `sum (t+1)(x_t - x_{t-1})` is a
//! constant minus `sum_{t<H} x_t`, and the componentwise-maximal valuation
//! minimizes it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphlp::{self, DiffSystem, LpError};
use crate::{Certificate, Window};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("machine count must be positive")]
    NoMachines,
    #[error("{kind} job {job}: window [{release}, {deadline}] holds no unit slot")]
    EmptyWindow {
        kind: &'static str,
        job: usize,
        release: i64,
        deadline: i64,
    },
    #[error("unsupported format version {0}")]
    Format(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTallSmallInstance", into = "RawTallSmallInstance")]
pub struct TallSmallInstance {
    machines: usize,
    small: Vec<Window>,
    tall: Vec<Window>,
}

#[derive(Serialize, Deserialize)]
struct RawTallSmallInstance {
    #[serde(default = "crate::default_format")]
    format: u32,
    machines: usize,
    #[serde(default)]
    small: Vec<Window>,
    #[serde(default)]
    tall: Vec<Window>,
}

impl TryFrom<RawTallSmallInstance> for TallSmallInstance {
    type Error = InstanceError;

    fn try_from(raw: RawTallSmallInstance) -> Result<Self, Self::Error> {
        if raw.format != crate::FORMAT_VERSION {
            return Err(InstanceError::Format(raw.format));
        }
        TallSmallInstance::new(raw.machines, raw.small, raw.tall)
    }
}

impl From<TallSmallInstance> for RawTallSmallInstance {
    fn from(inst: TallSmallInstance) -> Self {
        RawTallSmallInstance {
            format: crate::FORMAT_VERSION,
            machines: inst.machines,
            small: inst.small,
            tall: inst.tall,
        }
    }
}

impl TallSmallInstance {
    pub fn new(
        machines: usize,
        small: Vec<Window>,
        tall: Vec<Window>,
    ) -> Result<Self, InstanceError> {
        if machines == 0 {
            return Err(InstanceError::NoMachines);
        }
        for (kind, list) in [("small", &small), ("tall", &tall)] {
            for (job, w) in list.iter().enumerate() {
                if w.deadline < w.release + 1 {
                    return Err(InstanceError::EmptyWindow {
                        kind,
                        job,
                        release: w.release,
                        deadline: w.deadline,
                    });
                }
            }
        }
        Ok(TallSmallInstance {
            machines,
            small,
            tall,
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn small(&self) -> &[Window] {
        &self.small
    }

    pub fn tall(&self) -> &[Window] {
        &self.tall
    }

    fn all_windows(&self) -> impl Iterator<Item = &Window> {
        self.small.iter().chain(&self.tall)
    }

    /// Last deadline, or 0 without jobs.
    pub fn horizon(&self) -> i64 {
        self.all_windows().map(|w| w.deadline).max().unwrap_or(0)
    }
}

/// An independent piece of an instance, shifted so its first release is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub instance: TallSmallInstance,
    /// Original time = part time + `shift`.
    pub shift: i64,
    /// Original indices of the part's small and tall jobs.
    pub small_ids: Vec<usize>,
    pub tall_ids: Vec<usize>,
}

/// Splits at every slot no window covers and shifts each piece to start at 1.
pub fn normalize(inst: &TallSmallInstance) -> Vec<Part> {
    // (release, last usable slot, is_tall, index)
    let mut jobs: Vec<(i64, i64, bool, usize)> = inst
        .small
        .iter()
        .enumerate()
        .map(|(i, w)| (w.release, w.deadline - 1, false, i))
        .chain(
            inst.tall
                .iter()
                .enumerate()
                .map(|(i, w)| (w.release, w.deadline - 1, true, i)),
        )
        .collect();
    jobs.sort_unstable();

    let mut groups: Vec<Vec<(bool, usize)>> = Vec::new();
    let mut last_slot = i64::MIN;
    for (release, last, tall, idx) in jobs {
        if groups.is_empty() || release > last_slot + 1 {
            groups.push(Vec::new());
            last_slot = last;
        } else {
            last_slot = last_slot.max(last);
        }
        groups.last_mut().unwrap().push((tall, idx));
    }

    groups
        .into_iter()
        .map(|members| {
            let mut small_ids: Vec<usize> = members.iter().filter(|m| !m.0).map(|m| m.1).collect();
            let mut tall_ids: Vec<usize> = members.iter().filter(|m| m.0).map(|m| m.1).collect();
            small_ids.sort_unstable();
            tall_ids.sort_unstable();
            let shift = members
                .iter()
                .map(|&(t, i)| {
                    if t {
                        inst.tall[i].release
                    } else {
                        inst.small[i].release
                    }
                })
                .min()
                .unwrap()
                - 1;
            let moved = |w: &Window| Window::new(w.release - shift, w.deadline - shift);
            let instance = TallSmallInstance {
                machines: inst.machines,
                small: small_ids.iter().map(|&i| moved(&inst.small[i])).collect(),
                tall: tall_ids.iter().map(|&i| moved(&inst.tall[i])).collect(),
            };
            Part {
                instance,
                shift,
                small_ids,
                tall_ids,
            }
        })
        .collect()
}

/// `k[s][t]` (small) and `l[s][t]` (tall): jobs whose window lies inside
/// `[s, t]`, for `1 <= s <= t <= H`. Both matrices are `(H+1) x (H+1)`;
/// row and column 0 are unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandCounts {
    pub small: Vec<Vec<i64>>,
    pub tall: Vec<Vec<i64>>,
}

pub fn demand_counts(inst: &TallSmallInstance) -> DemandCounts {
    let h = inst.horizon().max(0) as usize;
    let count = |jobs: &[Window]| {
        // cell[r][d] then suffix over r, prefix over d
        let mut c = vec![vec![0i64; h + 2]; h + 2];
        for w in jobs {
            assert!(w.release >= 1, "demand counts need a normalized instance");
            c[w.release as usize][w.deadline as usize] += 1;
        }
        for r in (1..=h).rev() {
            for d in 1..=h {
                c[r][d] += c[r + 1][d] + c[r][d - 1] - c[r + 1][d - 1];
            }
        }
        c.truncate(h + 1);
        for row in c.iter_mut() {
            row.truncate(h + 1);
        }
        c
    };
    DemandCounts {
        small: count(&inst.small),
        tall: count(&inst.tall),
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

/// The skeleton system over `x_0..x_H` for a normalized instance.
pub fn build_system(inst: &TallSmallInstance) -> DiffSystem {
    let h = inst.horizon().max(0) as usize;
    let m = inst.machines as i64;
    let counts = demand_counts(inst);
    let mut sys = DiffSystem::new(h + 1, 0);
    for t in 1..=h {
        sys.add(t - 1, t, 0);
        sys.add(t, t - 1, 1);
    }
    for s in 1..=h {
        for t in (s + 1)..=h {
            let span = (t - s) as i64;
            sys.add(s - 1, t - 1, -counts.tall[s][t]);
            sys.add(t - 1, s - 1, span - ceil_div(counts.small[s][t], m));
        }
    }
    if h > 0 {
        sys.add(h, 0, inst.tall.len() as i64);
    }
    sys.dedup();
    sys
}

/// Cumulative tall-slot counts `x_0..x_H` of a normalized part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallProfile {
    pub x: Vec<i64>,
}

impl TallProfile {
    pub fn tall_slots(&self) -> Vec<i64> {
        (1..self.x.len())
            .filter(|&t| self.x[t] - self.x[t - 1] == 1)
            .map(|t| t as i64)
            .collect()
    }
}

pub fn solve_skeleton(inst: &TallSmallInstance) -> Result<TallProfile, Certificate> {
    let sys = build_system(inst);
    match graphlp::solve_max(&sys) {
        Ok(val) => Ok(TallProfile { x: val.0 }),
        Err(LpError::Infeasible(cycle)) => Err(Certificate {
            labels: cycle.nodes.iter().map(|&v| v as i64).collect(),
            cycle,
        }),
        Err(e) => unreachable!("x_H reaches every node through the cap and order arcs: {e}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallPlacement {
    /// 1-based machine number.
    pub machine: usize,
    pub slot: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallSmallSchedule {
    /// Slot per tall job, instance order.
    pub tall: Vec<i64>,
    /// Placement per small job, instance order.
    pub small: Vec<SmallPlacement>,
}

impl TallSmallSchedule {
    /// `sum (slot + 1)` over tall jobs.
    pub fn tall_completion(&self) -> i64 {
        self.tall.iter().map(|t| t + 1).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentFailure {
    #[error("{kind} job {job} cannot meet its deadline at slot {slot}")]
    DeadlineMissed {
        kind: &'static str,
        job: usize,
        slot: i64,
    },
    #[error("{count} {kind} job(s) left without a slot")]
    Unassigned { kind: &'static str, count: usize },
}

/// Earliest-due-date over a list of slot capacities `(slot, capacity)` sorted
/// by slot. Returns `(slot, position within the slot)` per job.
fn edd_fill(
    kind: &'static str,
    jobs: &[Window],
    slots: impl Iterator<Item = (i64, usize)>,
) -> Result<Vec<(i64, usize)>, AssignmentFailure> {
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&j| (jobs[j].release, jobs[j].deadline, j));
    let mut next = 0;
    let mut ready = BinaryHeap::new();
    let mut out = vec![None; jobs.len()];
    for (slot, cap) in slots {
        while next < order.len() && jobs[order[next]].release <= slot {
            ready.push(Reverse((jobs[order[next]].deadline, order[next])));
            next += 1;
        }
        for pos in 0..cap {
            let Some(Reverse((deadline, job))) = ready.pop() else {
                break;
            };
            if slot + 1 > deadline {
                return Err(AssignmentFailure::DeadlineMissed { kind, job, slot });
            }
            out[job] = Some((slot, pos));
        }
    }
    let missing = out.iter().filter(|o| o.is_none()).count();
    if missing > 0 {
        return Err(AssignmentFailure::Unassigned {
            kind,
            count: missing,
        });
    }
    Ok(out.into_iter().flatten().collect())
}

/// Tall jobs by earliest due date over the profile's tall slots, then small
/// jobs over the remaining slots at `m` per slot.
pub fn assign_jobs(
    inst: &TallSmallInstance,
    profile: &TallProfile,
) -> Result<TallSmallSchedule, AssignmentFailure> {
    let tall_slots = profile.tall_slots();
    let tall = edd_fill("tall", &inst.tall, tall_slots.iter().map(|&t| (t, 1)))?;
    let h = profile.x.len() as i64 - 1;
    let m = inst.machines;
    let free = (1..=h)
        .filter(|t| tall_slots.binary_search(t).is_err())
        .map(|t| (t, m));
    let small = edd_fill("small", &inst.small, free)?;
    Ok(TallSmallSchedule {
        tall: tall.into_iter().map(|(t, _)| t).collect(),
        small: small
            .into_iter()
            .map(|(slot, pos)| SmallPlacement {
                machine: pos + 1,
                slot,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleViolation {
    #[error("schedule has {got} {kind} assignments for {expected} jobs")]
    JobCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{kind} job {job} in slot {slot}, outside its window")]
    Window {
        kind: &'static str,
        job: usize,
        slot: i64,
    },
    #[error("small job {job} on machine {machine}, outside 1..={machines}")]
    Machine {
        job: usize,
        machine: usize,
        machines: usize,
    },
    #[error("tall jobs {first} and {second} share slot {slot}")]
    TallClash {
        first: usize,
        second: usize,
        slot: i64,
    },
    #[error("small jobs {first} and {second} share machine {machine} in slot {slot}")]
    SmallClash {
        first: usize,
        second: usize,
        machine: usize,
        slot: i64,
    },
    #[error("small job {small} runs in slot {slot}, taken by tall job {tall}")]
    TallBlocked {
        small: usize,
        tall: usize,
        slot: i64,
    },
}

/// Checks windows, slot exclusivity and that tall slots block every machine.
/// Returns the tall-job total completion time.
pub fn verify_tallsmall(
    inst: &TallSmallInstance,
    sched: &TallSmallSchedule,
) -> Result<i64, Vec<ScheduleViolation>> {
    let mut bad = Vec::new();
    if sched.tall.len() != inst.tall.len() {
        bad.push(ScheduleViolation::JobCount {
            kind: "tall",
            expected: inst.tall.len(),
            got: sched.tall.len(),
        });
    }
    if sched.small.len() != inst.small.len() {
        bad.push(ScheduleViolation::JobCount {
            kind: "small",
            expected: inst.small.len(),
            got: sched.small.len(),
        });
    }
    if !bad.is_empty() {
        return Err(bad);
    }
    let fits = |w: &Window, t: i64| w.release <= t && t < w.deadline;
    for (job, (&slot, w)) in sched.tall.iter().zip(&inst.tall).enumerate() {
        if !fits(w, slot) {
            bad.push(ScheduleViolation::Window {
                kind: "tall",
                job,
                slot,
            });
        }
    }
    for (job, (pl, w)) in sched.small.iter().zip(&inst.small).enumerate() {
        if !fits(w, pl.slot) {
            bad.push(ScheduleViolation::Window {
                kind: "small",
                job,
                slot: pl.slot,
            });
        }
        if pl.machine == 0 || pl.machine > inst.machines {
            bad.push(ScheduleViolation::Machine {
                job,
                machine: pl.machine,
                machines: inst.machines,
            });
        }
    }
    let mut tall: Vec<(i64, usize)> = sched
        .tall
        .iter()
        .enumerate()
        .map(|(j, &t)| (t, j))
        .collect();
    tall.sort_unstable();
    for pair in tall.windows(2) {
        if pair[0].0 == pair[1].0 {
            bad.push(ScheduleViolation::TallClash {
                first: pair[0].1,
                second: pair[1].1,
                slot: pair[0].0,
            });
        }
    }
    let mut small: Vec<(i64, usize, usize)> = sched
        .small
        .iter()
        .enumerate()
        .map(|(j, pl)| (pl.slot, pl.machine, j))
        .collect();
    small.sort_unstable();
    for pair in small.windows(2) {
        if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
            bad.push(ScheduleViolation::SmallClash {
                first: pair[0].2,
                second: pair[1].2,
                machine: pair[0].1,
                slot: pair[0].0,
            });
        }
    }
    for &(slot, _, job) in &small {
        if let Ok(i) = tall.binary_search_by_key(&slot, |&(t, _)| t) {
            bad.push(ScheduleViolation::TallBlocked {
                small: job,
                tall: tall[i].1,
                slot,
            });
        }
    }
    if bad.is_empty() {
        Ok(sched.tall_completion())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallSmallSolution {
    /// Schedule in original time coordinates.
    pub schedule: TallSmallSchedule,
    pub tall_completion: i64,
    /// Tall slots (original coordinates) no tall job uses.
    pub idle_tall_slots: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("instance is infeasible")]
    Infeasible(Certificate),
    #[error("greedy assignment failed on an LP skeleton: {0}")]
    Assignment(#[from] AssignmentFailure),
}

/// Normalizes, solves every part and maps the schedule back. Certificate
/// labels are `x` indices translated to original time.
pub fn solve(inst: &TallSmallInstance) -> Result<TallSmallSolution, SolveError> {
    let mut tall = vec![0i64; inst.tall.len()];
    let mut small = vec![
        SmallPlacement {
            machine: 0,
            slot: 0
        };
        inst.small.len()
    ];
    let mut idle = Vec::new();
    for part in normalize(inst) {
        let profile = solve_skeleton(&part.instance).map_err(|mut cert| {
            for l in cert.labels.iter_mut() {
                *l += part.shift;
            }
            SolveError::Infeasible(cert)
        })?;
        let sched = assign_jobs(&part.instance, &profile)?;
        for (&id, &t) in part.tall_ids.iter().zip(&sched.tall) {
            tall[id] = t + part.shift;
        }
        for (&id, pl) in part.small_ids.iter().zip(&sched.small) {
            small[id] = SmallPlacement {
                machine: pl.machine,
                slot: pl.slot + part.shift,
            };
        }
        for t in profile.tall_slots() {
            if !sched.tall.contains(&t) {
                idle.push(t + part.shift);
            }
        }
    }
    let schedule = TallSmallSchedule { tall, small };
    Ok(TallSmallSolution {
        tall_completion: schedule.tall_completion(),
        schedule,
        idle_tall_slots: idle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(r: i64, d: i64) -> Window {
        Window::new(r, d)
    }

    fn inst(m: usize, small: &[(i64, i64)], tall: &[(i64, i64)]) -> TallSmallInstance {
        TallSmallInstance::new(
            m,
            small.iter().map(|&(r, d)| w(r, d)).collect(),
            tall.iter().map(|&(r, d)| w(r, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dead_slot_splits() {
        let parts = normalize(&inst(1, &[(1, 2)], &[(5, 6)]));
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].shift, 0);
        assert_eq!(parts[1].shift, 4);
        assert_eq!(parts[1].instance.tall(), &[w(1, 2)]);
    }

    #[test]
    fn contiguous_part_unchanged() {
        let i = inst(2, &[(1, 3), (2, 4)], &[(1, 2)]);
        let parts = normalize(&i);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].instance, i);
    }

    #[test]
    fn shifted_part() {
        let parts = normalize(&inst(1, &[(4, 6), (5, 7)], &[]));
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].instance.small(), &[w(1, 3), w(2, 4)]);
    }

    #[test]
    fn adjacent_windows_stay_together() {
        assert_eq!(normalize(&inst(1, &[(1, 2), (2, 3)], &[])).len(), 1);
    }

    #[test]
    fn demand_counts_small_cases() {
        let c = demand_counts(&inst(1, &[], &[(1, 2)]));
        assert_eq!(c.tall[1][2], 1);
        assert_eq!(c.tall[2][2], 0);
        let c = demand_counts(&inst(1, &[(1, 3), (1, 3)], &[]));
        assert_eq!(c.small[1][3], 2);
        assert_eq!(c.small[1][2], 0);
    }

    #[test]
    fn demand_counts_match_double_loop() {
        let i = inst(2, &[(1, 4), (2, 3), (3, 5), (1, 2)], &[(2, 5), (1, 3)]);
        let c = demand_counts(&i);
        let h = i.horizon();
        for s in 1..=h {
            for t in s..=h {
                let inside = |ws: &[Window]| {
                    ws.iter()
                        .filter(|w| s <= w.release && w.deadline <= t)
                        .count() as i64
                };
                assert_eq!(
                    c.small[s as usize][t as usize],
                    inside(i.small()),
                    "k[{s}][{t}]"
                );
                assert_eq!(
                    c.tall[s as usize][t as usize],
                    inside(i.tall()),
                    "l[{s}][{t}]"
                );
            }
        }
    }

    #[test]
    fn tall_and_small_clash_on_one_machine() {
        let i = inst(1, &[(1, 2)], &[(1, 2)]);
        let cert = solve_skeleton(&i).unwrap_err();
        assert!(cert.cycle.verify(&build_system(&i)));
    }

    #[test]
    fn no_jobs_is_trivial() {
        let i = inst(3, &[], &[]);
        let sys = build_system(&i);
        assert_eq!(sys.node_count(), 1);
        assert!(sys.constraints().is_empty());
        let sol = solve(&i).unwrap();
        assert_eq!(sol.tall_completion, 0);
    }

    #[test]
    fn small_demand_bound() {
        let sys = build_system(&inst(2, &[(1, 3), (1, 3)], &[(1, 2)]));
        assert!(sys
            .constraints()
            .iter()
            .any(|c| (c.u, c.v, c.bound) == (2, 0, 1)));
    }

    #[test]
    fn two_machine_profile_and_assignment() {
        let i = inst(2, &[(1, 3), (1, 3)], &[(1, 2)]);
        let profile = solve_skeleton(&i).unwrap();
        assert_eq!(profile.x, vec![0, 1, 1, 1]);
        let sched = assign_jobs(&i, &profile).unwrap();
        assert_eq!(sched.tall, vec![1]);
        assert_eq!(
            sched.small,
            vec![
                SmallPlacement {
                    machine: 1,
                    slot: 2
                },
                SmallPlacement {
                    machine: 2,
                    slot: 2
                }
            ]
        );
        assert_eq!(verify_tallsmall(&i, &sched), Ok(2));
    }

    #[test]
    fn single_tall_goes_first() {
        let profile = solve_skeleton(&inst(1, &[], &[(1, 3)])).unwrap();
        assert_eq!(profile.x, vec![0, 1, 1, 1]);
    }

    // Without the tall-count cap the maximal profile opens slot 1 for tall
    // work no tall job can use and pushes the tall job to slot 3.
    #[test]
    fn cap_keeps_tall_completion_minimal() {
        let i = inst(1, &[(1, 3)], &[(2, 4)]);
        let sol = solve(&i).unwrap();
        assert_eq!(sol.schedule.tall, vec![2]);
        assert_eq!(sol.tall_completion, 3);
        assert!(sol.idle_tall_slots.is_empty());
    }

    #[test]
    fn edd_order_for_tall_jobs() {
        let i = inst(1, &[], &[(1, 3), (1, 2)]);
        let sol = solve(&i).unwrap();
        assert_eq!(sol.schedule.tall, vec![2, 1]);
    }

    #[test]
    fn verify_catches_small_in_tall_slot() {
        let i = inst(2, &[(1, 3)], &[(1, 2)]);
        let sched = TallSmallSchedule {
            tall: vec![1],
            small: vec![SmallPlacement {
                machine: 1,
                slot: 1,
            }],
        };
        let errs = verify_tallsmall(&i, &sched).unwrap_err();
        assert!(matches!(errs[0], ScheduleViolation::TallBlocked { .. }));
    }

    #[test]
    fn verify_catches_duplicate_machine_slot() {
        let i = inst(2, &[(1, 3), (1, 3)], &[]);
        let sched = TallSmallSchedule {
            tall: vec![],
            small: vec![
                SmallPlacement {
                    machine: 1,
                    slot: 2,
                },
                SmallPlacement {
                    machine: 1,
                    slot: 2,
                },
            ],
        };
        let errs = verify_tallsmall(&i, &sched).unwrap_err();
        assert!(matches!(errs[0], ScheduleViolation::SmallClash { .. }));
    }

    #[test]
    fn split_parts_map_back() {
        let i = inst(1, &[(10, 12)], &[(1, 2)]);
        let sol = solve(&i).unwrap();
        assert_eq!(sol.schedule.tall, vec![1]);
        assert_eq!(sol.schedule.small[0].slot, 10);
        assert_eq!(verify_tallsmall(&i, &sol.schedule), Ok(2));
    }

    #[test]
    fn empty_window_rejected() {
        assert!(TallSmallInstance::new(1, vec![w(3, 3)], vec![]).is_err());
    }
}

use super::{guard, OracleResult, SizeGuard};
use crate::tallsmall::{verify_tallsmall, SmallPlacement, TallSmallInstance, TallSmallSchedule};
use crate::Window;

const MAX_JOBS: usize = 6;
const MAX_SPAN: usize = 8;

/// Tries every placement of tall jobs into distinct slots and, for each,
/// searches for a placement of the small jobs into the remaining slots at
/// most `m` per slot. Minimizes the tall-job total completion time.
pub fn brute_tallsmall(
    inst: &TallSmallInstance,
) -> Result<OracleResult<TallSmallSchedule>, SizeGuard> {
    let (small, tall) = (inst.small(), inst.tall());
    guard("job count", small.len() + tall.len(), MAX_JOBS)?;
    let lo = small
        .iter()
        .chain(tall)
        .map(|w| w.release)
        .min()
        .unwrap_or(0);
    let hi = small
        .iter()
        .chain(tall)
        .map(|w| w.deadline)
        .max()
        .unwrap_or(0);
    guard("time span", (hi - lo) as usize, MAX_SPAN)?;

    let mut best: Option<(i64, Vec<i64>, Vec<i64>)> = None;
    let mut tall_slots = Vec::new();
    place_tall(inst, lo, hi, &mut tall_slots, 0, &mut best);

    let Some((objective, tall_slots, small_slots)) = best else {
        return Ok(OracleResult::Infeasible);
    };
    let mut used = std::collections::BTreeMap::new();
    let small_placements = small_slots
        .iter()
        .map(|&slot| {
            let c = used.entry(slot).or_insert(0usize);
            *c += 1;
            SmallPlacement { machine: *c, slot }
        })
        .collect();
    let witness = TallSmallSchedule {
        tall: tall_slots,
        small: small_placements,
    };
    debug_assert_eq!(verify_tallsmall(inst, &witness), Ok(objective));
    Ok(OracleResult::Optimal { objective, witness })
}

fn slots(w: &Window) -> std::ops::Range<i64> {
    w.release..w.deadline
}

fn place_tall(
    inst: &TallSmallInstance,
    lo: i64,
    hi: i64,
    chosen: &mut Vec<i64>,
    cost: i64,
    best: &mut Option<(i64, Vec<i64>, Vec<i64>)>,
) {
    let tall = inst.tall();
    let bound: i64 = tall[chosen.len()..].iter().map(|w| w.release + 1).sum();
    if best.as_ref().is_some_and(|(b, _, _)| cost + bound >= *b) {
        return;
    }
    if chosen.len() == tall.len() {
        let mut load = vec![0usize; (hi - lo).max(0) as usize];
        for &t in chosen.iter() {
            load[(t - lo) as usize] = inst.machines();
        }
        let mut small = Vec::new();
        if place_small(inst, lo, &mut load, &mut small) {
            *best = Some((cost, chosen.clone(), small));
        }
        return;
    }
    for t in slots(&tall[chosen.len()]) {
        if !chosen.contains(&t) {
            chosen.push(t);
            place_tall(inst, lo, hi, chosen, cost + t + 1, best);
            chosen.pop();
        }
    }
}

fn place_small(
    inst: &TallSmallInstance,
    lo: i64,
    load: &mut [usize],
    chosen: &mut Vec<i64>,
) -> bool {
    let small = inst.small();
    if chosen.len() == small.len() {
        return true;
    }
    for t in slots(&small[chosen.len()]) {
        let i = (t - lo) as usize;
        if load[i] < inst.machines() {
            load[i] += 1;
            chosen.push(t);
            if place_small(inst, lo, load, chosen) {
                return true;
            }
            chosen.pop();
            load[i] -= 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(m: usize, small: &[(i64, i64)], tall: &[(i64, i64)]) -> TallSmallInstance {
        let ws = |v: &[(i64, i64)]| v.iter().map(|&(r, d)| Window::new(r, d)).collect();
        TallSmallInstance::new(m, ws(small), ws(tall)).unwrap()
    }

    #[test]
    fn one_machine_clash() {
        assert_eq!(
            brute_tallsmall(&inst(1, &[(1, 2)], &[(1, 2)])).unwrap(),
            OracleResult::Infeasible
        );
    }

    #[test]
    fn two_machines() {
        let res = brute_tallsmall(&inst(2, &[(1, 3), (1, 3)], &[(1, 2)])).unwrap();
        assert_eq!(res.objective(), Some(2));
    }

    #[test]
    fn no_jobs() {
        assert_eq!(
            brute_tallsmall(&inst(1, &[], &[])).unwrap().objective(),
            Some(0)
        );
    }

    #[test]
    fn tall_waits_for_small() {
        let res = brute_tallsmall(&inst(1, &[(1, 3)], &[(2, 4)])).unwrap();
        assert_eq!(res.objective(), Some(3));
    }

    #[test]
    fn span_guard() {
        assert!(brute_tallsmall(&inst(1, &[(0, 20)], &[])).is_err());
    }
}

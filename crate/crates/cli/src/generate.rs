//! Seeded random instances. Every window holds at least one feasible start,
//! and `planted` instances are built around a hidden feasible schedule.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use slotsolve::equal::EqualInstance;
use slotsolve::prefetch::PrefetchInstance;
use slotsolve::tallsmall::TallSmallInstance;
use slotsolve::Window;

use crate::{render, Problem};

#[derive(Debug, Clone, PartialEq, Eq, clap::Args)]
pub struct GenParams {
    /// Jobs (equal), small jobs (tallsmall) or requests (prefetch).
    #[arg(long, default_value_t = 5)]
    pub jobs: usize,
    /// Tall jobs (tallsmall).
    #[arg(long, default_value_t = 2)]
    pub tall: usize,
    #[arg(long, default_value_t = 2)]
    pub machines: usize,
    /// Job length (equal).
    #[arg(long, default_value_t = 2)]
    pub length: i64,
    /// Latest release time.
    #[arg(long, default_value_t = 10)]
    pub horizon: i64,
    /// Largest extra room in a window beyond the job itself.
    #[arg(long, default_value_t = 3)]
    pub slack: i64,
    /// Distinct page names to draw from (prefetch).
    #[arg(long, default_value_t = 4)]
    pub alphabet: usize,
    /// Cache size (prefetch).
    #[arg(long, default_value_t = 2)]
    pub cache: usize,
    /// Fetch duration (prefetch).
    #[arg(long, default_value_t = 2)]
    pub fetch: usize,
    /// Build windows around a random feasible schedule.
    #[arg(long)]
    pub planted: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            jobs: 5,
            tall: 2,
            machines: 2,
            length: 2,
            horizon: 10,
            slack: 3,
            alphabet: 4,
            cache: 2,
            fetch: 2,
            planted: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{name} = {value} is outside {range}")]
pub struct GenError {
    pub name: &'static str,
    pub value: i64,
    pub range: &'static str,
}

const MAX_COUNT: usize = 100_000;
const MAX_TIME: i64 = 1_000_000_000;

fn check(
    name: &'static str,
    value: i64,
    lo: i64,
    hi: i64,
    range: &'static str,
) -> Result<(), GenError> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(GenError { name, value, range })
    }
}

impl GenParams {
    pub fn validate(&self, kind: Problem) -> Result<(), GenError> {
        let count = MAX_COUNT as i64;
        check("machines", self.machines as i64, 1, count, "1..=100000")?;
        check("horizon", self.horizon, 0, MAX_TIME, "0..=1e9")?;
        check("slack", self.slack, 0, MAX_TIME, "0..=1e9")?;
        match kind {
            Problem::Equal => {
                check("jobs", self.jobs as i64, 1, count, "1..=100000")?;
                check("length", self.length, 1, MAX_TIME, "1..=1e9")?;
            }
            Problem::TallSmall => {
                check("jobs", self.jobs as i64, 0, count, "0..=100000")?;
                check("tall", self.tall as i64, 0, count, "0..=100000")?;
            }
            Problem::Prefetch => {
                check("alphabet", self.alphabet as i64, 1, 100_000, "1..=100000")?;
                check(
                    "cache",
                    self.cache as i64,
                    1,
                    self.alphabet as i64,
                    "1..=alphabet",
                )?;
                check(
                    "jobs",
                    self.jobs as i64,
                    self.cache as i64,
                    count,
                    "cache..=100000",
                )?;
                check("fetch", self.fetch as i64, 1, MAX_TIME, "1..=1e9")?;
            }
        }
        Ok(())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Instance JSON for `(kind, seed, params)`; identical inputs give identical
/// bytes.
pub fn generate(kind: Problem, seed: u64, params: &GenParams) -> Result<String, GenError> {
    params.validate(kind)?;
    let mut r = rng(seed);
    let value = match kind {
        Problem::Equal => serde_json::to_value(equal(&mut r, params)),
        Problem::TallSmall => serde_json::to_value(tallsmall(&mut r, params)),
        Problem::Prefetch => serde_json::to_value(prefetch(&mut r, params)),
    }
    .expect("instances always serialize");
    Ok(render(&value))
}

/// Equal-length instance. Parameters must pass [`GenParams::validate`].
pub fn equal(rng: &mut impl Rng, params: &GenParams) -> EqualInstance {
    let p = params.length;
    let jobs = if params.planted {
        let mut free = vec![0i64; params.machines];
        (0..params.jobs)
            .map(|_| {
                let m = rng.gen_range(0..params.machines);
                let start = free[m] + rng.gen_range(0..=p);
                free[m] = start + p;
                let release = (start - rng.gen_range(0..=params.slack)).max(0);
                Window::new(release, start + p + rng.gen_range(0..=params.slack))
            })
            .collect()
    } else {
        (0..params.jobs)
            .map(|_| {
                let release = rng.gen_range(0..=params.horizon);
                Window::new(release, release + p + rng.gen_range(0..=params.slack))
            })
            .collect()
    };
    EqualInstance::new(params.machines, p, jobs).expect("generated windows fit the job length")
}

/// Tall/small instance with releases from 1. Parameters must pass
/// [`GenParams::validate`].
pub fn tallsmall(rng: &mut impl Rng, params: &GenParams) -> TallSmallInstance {
    let (small, tall) = if params.planted {
        planted_slots(rng, params)
    } else {
        let horizon = params.horizon.max(1);
        let small = (0..params.jobs)
            .map(|_| rng.gen_range(1..=horizon))
            .collect::<Vec<_>>();
        let tall = (0..params.tall)
            .map(|_| rng.gen_range(1..=horizon))
            .collect::<Vec<_>>();
        let widen = |slots: Vec<i64>, rng: &mut _| -> Vec<Window> {
            slots
                .into_iter()
                .map(|s| slot_window(rng, s, 0, params.slack))
                .collect()
        };
        (widen(small, rng), widen(tall, rng))
    };
    TallSmallInstance::new(params.machines, small, tall).expect("generated windows hold a slot")
}

/// A window around `slot` reaching back at most `back` and forward at most
/// `ahead` extra slots, never before slot 1.
fn slot_window(rng: &mut impl Rng, slot: i64, back: i64, ahead: i64) -> Window {
    let release = (slot - rng.gen_range(0..=back)).max(1);
    Window::new(release, slot + 1 + rng.gen_range(0..=ahead))
}

/// Small and tall windows around a random feasible slot assignment.
fn planted_slots(rng: &mut impl Rng, params: &GenParams) -> (Vec<Window>, Vec<Window>) {
    let mut kinds: Vec<bool> = std::iter::repeat_n(false, params.jobs)
        .chain(std::iter::repeat_n(true, params.tall))
        .collect();
    kinds.shuffle(rng);
    let mut next = 1i64;
    let mut open: Option<(i64, usize)> = None;
    let (mut small, mut tall) = (Vec::new(), Vec::new());
    for is_tall in kinds {
        next += rng.gen_range(0..=1);
        if is_tall {
            tall.push(slot_window(rng, next, params.slack, params.slack));
            next += 1;
            continue;
        }
        let slot = match open {
            Some((slot, used)) if used < params.machines && rng.gen_bool(0.7) => {
                open = Some((slot, used + 1));
                slot
            }
            _ => {
                open = Some((next, 1));
                next += 1;
                next - 1
            }
        };
        small.push(slot_window(rng, slot, params.slack, params.slack));
    }
    (small, tall)
}

/// Page name `i` of an alphabet of `size` names; single letters when they
/// suffice.
pub fn page_name(i: usize, size: usize) -> String {
    if size <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        let width = (size - 1).to_string().len();
        format!("p{i:0width$}")
    }
}

/// Prefetch trace over `alphabet` pages whose first `cache` requests are
/// distinct. Parameters must pass [`GenParams::validate`].
pub fn prefetch(rng: &mut impl Rng, params: &GenParams) -> PrefetchInstance {
    let a = params.alphabet;
    let mut ids: Vec<usize> = (0..a).collect();
    ids.shuffle(rng);
    let mut trace: Vec<usize> = ids[..params.cache].to_vec();
    trace.extend((params.cache..params.jobs).map(|_| rng.gen_range(0..a)));
    let names = trace.into_iter().map(|i| page_name(i, a));
    PrefetchInstance::new(names, params.cache, params.fetch, None)
        .expect("first requests fill the cache")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        for kind in [Problem::Equal, Problem::TallSmall, Problem::Prefetch] {
            let p = GenParams::default();
            assert_eq!(
                generate(kind, 7, &p).unwrap(),
                generate(kind, 7, &p).unwrap()
            );
        }
    }

    #[test]
    fn different_seeds_differ() {
        let p = GenParams::default();
        assert_ne!(
            generate(Problem::Equal, 1, &p).unwrap(),
            generate(Problem::Equal, 2, &p).unwrap()
        );
    }

    #[test]
    fn equal_output_parses() {
        for seed in 0..50 {
            let text = generate(Problem::Equal, seed, &GenParams::default()).unwrap();
            let inst: EqualInstance = serde_json::from_str(&text).unwrap();
            assert_eq!(inst.len(), 5);
        }
    }

    #[test]
    fn small_prefetch_fits_oracle() {
        let p = GenParams {
            jobs: 5,
            ..GenParams::default()
        };
        let text = generate(Problem::Prefetch, 3, &p).unwrap();
        let inst: PrefetchInstance = serde_json::from_str(&text).unwrap();
        assert!(slotsolve::oracle::brute_prefetch(&inst).is_ok());
    }

    #[test]
    fn planted_instances_are_feasible() {
        let p = GenParams {
            planted: true,
            jobs: 6,
            ..GenParams::default()
        };
        for seed in 0..50 {
            let mut r = rng(seed);
            assert!(slotsolve::equal::solve(&equal(&mut r, &p)).is_ok());
            assert!(slotsolve::tallsmall::solve(&tallsmall(&mut r, &p)).is_ok());
        }
    }

    #[test]
    fn range_errors() {
        let p = GenParams {
            cache: 5,
            alphabet: 4,
            ..GenParams::default()
        };
        assert_eq!(
            generate(Problem::Prefetch, 0, &p).unwrap_err().name,
            "cache"
        );
        let p = GenParams {
            jobs: 0,
            ..GenParams::default()
        };
        assert_eq!(generate(Problem::Equal, 0, &p).unwrap_err().name, "jobs");
    }

    #[test]
    fn wide_alphabet_names_sort_numerically() {
        assert_eq!(page_name(3, 100), "p03");
        assert_eq!(page_name(3, 4), "d");
    }
}

//! Offline single-disk prefetching with minimum total stall time.
//!
//! A fetch `(s, y, e, z)` evicts page `y` at time `s` and makes page `z`
//! available at time `e`, with `s <= e <= s + F`; it stalls the processor for
//! `F - (e - s)`. `O_t` and `I_t` count evictions and completed fetches up to
//! time `t`. Both are pinned to zero at `t = 1`, which the LP expresses by
//! merging `I_1` and `O_1` into the root node, so the first fetch starts at 2.
//!
//! Page ids are positions in the sorted list of page names.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphlp::{self, DiffSystem, Extreme, LinearObjective, LpError, NodeId};

pub type PageId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("cache size must be positive")]
    NoCache,
    #[error("fetch duration must be positive")]
    NoFetchTime,
    #[error("requests hold {distinct} distinct pages, fewer than the cache size {cache_size}")]
    FewPages { distinct: usize, cache_size: usize },
    #[error("initial cache holds {got} distinct pages, expected {cache_size}")]
    InitialCacheSize { got: usize, cache_size: usize },
    #[error("first request {0:?} is not in the initial cache")]
    FirstRequestMissing(String),
    #[error("unsupported format version {0}")]
    Format(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPrefetchInstance", into = "RawPrefetchInstance")]
pub struct PrefetchInstance {
    cache_size: usize,
    fetch_duration: usize,
    /// Page names as given, or `None` for the first `k` distinct requests.
    initial_names: Option<Vec<String>>,
    pages: Vec<String>,
    requests: Vec<PageId>,
    initial: Vec<PageId>,
}

#[derive(Serialize, Deserialize)]
struct RawPrefetchInstance {
    #[serde(default = "crate::default_format")]
    format: u32,
    cache_size: usize,
    fetch_duration: usize,
    requests: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_cache: Option<Vec<String>>,
}

impl TryFrom<RawPrefetchInstance> for PrefetchInstance {
    type Error = InstanceError;

    fn try_from(raw: RawPrefetchInstance) -> Result<Self, Self::Error> {
        if raw.format != crate::FORMAT_VERSION {
            return Err(InstanceError::Format(raw.format));
        }
        PrefetchInstance::new(
            raw.requests,
            raw.cache_size,
            raw.fetch_duration,
            raw.initial_cache,
        )
    }
}

impl From<PrefetchInstance> for RawPrefetchInstance {
    fn from(inst: PrefetchInstance) -> Self {
        let requests = inst
            .requests
            .iter()
            .map(|&p| inst.pages[p].clone())
            .collect();
        RawPrefetchInstance {
            format: crate::FORMAT_VERSION,
            cache_size: inst.cache_size,
            fetch_duration: inst.fetch_duration,
            requests,
            initial_cache: inst.initial_names,
        }
    }
}

impl PrefetchInstance {
    pub fn new<S: Into<String>>(
        requests: impl IntoIterator<Item = S>,
        cache_size: usize,
        fetch_duration: usize,
        initial_cache: Option<Vec<String>>,
    ) -> Result<Self, InstanceError> {
        let requests: Vec<String> = requests.into_iter().map(Into::into).collect();
        if cache_size == 0 {
            return Err(InstanceError::NoCache);
        }
        if fetch_duration == 0 {
            return Err(InstanceError::NoFetchTime);
        }
        let mut ids: BTreeMap<&str, PageId> = BTreeMap::new();
        for name in requests.iter().chain(initial_cache.iter().flatten()) {
            ids.insert(name, 0);
        }
        let pages: Vec<String> = ids.keys().map(|s| s.to_string()).collect();
        for (i, id) in ids.values_mut().enumerate() {
            *id = i;
        }
        let request_ids: Vec<PageId> = requests.iter().map(|r| ids[r.as_str()]).collect();

        let mut distinct = Vec::new();
        for &p in &request_ids {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        if distinct.len() < cache_size {
            return Err(InstanceError::FewPages {
                distinct: distinct.len(),
                cache_size,
            });
        }
        let initial = match &initial_cache {
            None => {
                let mut first = distinct[..cache_size].to_vec();
                first.sort_unstable();
                first
            }
            Some(names) => {
                let mut given: Vec<PageId> = names.iter().map(|n| ids[n.as_str()]).collect();
                given.sort_unstable();
                given.dedup();
                if given.len() != cache_size || names.len() != cache_size {
                    return Err(InstanceError::InitialCacheSize {
                        got: given.len(),
                        cache_size,
                    });
                }
                if !given.contains(&request_ids[0]) {
                    return Err(InstanceError::FirstRequestMissing(requests[0].clone()));
                }
                given
            }
        };
        Ok(PrefetchInstance {
            cache_size,
            fetch_duration,
            initial_names: initial_cache,
            pages,
            requests: request_ids,
            initial,
        })
    }

    pub fn cache_size(&self) -> usize {
        self.cache_size
    }

    pub fn fetch_duration(&self) -> usize {
        self.fetch_duration
    }

    /// Number of requests `n`.
    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// All page names, sorted; a page's id is its index here.
    pub fn pages(&self) -> &[String] {
        &self.pages
    }

    pub fn page_name(&self, page: PageId) -> &str {
        &self.pages[page]
    }

    /// Requested page per time, index `t - 1`.
    pub fn requests(&self) -> &[PageId] {
        &self.requests
    }

    /// Sorted initial cache contents.
    pub fn initial_cache(&self) -> &[PageId] {
        &self.initial
    }

    /// True when the initial cache is the first `k` distinct requests.
    pub fn has_default_cache(&self) -> bool {
        self.initial_names.is_none()
    }

    /// Requests at times `1..=t` missing from the initial cache, per `t`
    /// (index `t - 1`), counting each page once.
    fn initial_misses(&self) -> Vec<i64> {
        let mut seen = vec![false; self.pages.len()];
        let mut count = 0;
        self.requests
            .iter()
            .map(|&p| {
                if !seen[p] && self.initial.binary_search(&p).is_err() {
                    count += 1;
                }
                seen[p] = true;
                count
            })
            .collect()
    }
}

/// `d[s][t]`: distinct pages among `x_s..x_t` for `1 <= s <= t <= n`, as an
/// `(n+1) x (n+1)` matrix with row and column 0 unused.
pub fn distinct_counts(requests: &[PageId]) -> Vec<Vec<i64>> {
    let n = requests.len();
    let pages = requests.iter().max().map_or(0, |p| p + 1);
    let mut d = vec![vec![0i64; n + 1]; n + 1];
    let mut seen = vec![usize::MAX; pages];
    for s in 1..=n {
        let mut count = 0;
        for t in s..=n {
            let p = requests[t - 1];
            if seen[p] != s {
                seen[p] = s;
                count += 1;
            }
            d[s][t] = count;
        }
    }
    d
}

/// LP node layout: root `Z` stands for `I_1` and `O_1`, then `I_2..I_n`,
/// then `O_2..O_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileNodes {
    n: usize,
}

impl ProfileNodes {
    pub const ROOT: NodeId = 0;

    pub fn new(n: usize) -> Self {
        ProfileNodes { n }
    }

    pub fn node_count(&self) -> usize {
        if self.n == 0 {
            1
        } else {
            2 * self.n - 1
        }
    }

    /// Node of `I_t`, `1 <= t <= n`.
    pub fn input(&self, t: usize) -> NodeId {
        debug_assert!((1..=self.n).contains(&t));
        if t == 1 {
            Self::ROOT
        } else {
            t - 1
        }
    }

    /// Node of `O_t`, `1 <= t <= n`.
    pub fn output(&self, t: usize) -> NodeId {
        debug_assert!((1..=self.n).contains(&t));
        if t == 1 {
            Self::ROOT
        } else {
            self.n + t - 2
        }
    }

    /// Human-readable node name.
    pub fn label(&self, node: NodeId) -> String {
        if node == Self::ROOT {
            "Z".to_string()
        } else if node < self.n {
            format!("I{}", node + 1)
        } else {
            format!("O{}", node + 2 - self.n)
        }
    }
}

/// The stall-minimization LP over `I_t`, `O_t`.
///
/// Beyond the order, overfull, overlap, length and serve rows, two rows are
/// added: `I_n <= 2n` bounds the fetch count (an optimum never needs more
/// than one fetch per request) and ties every node to the root; with an
/// explicit initial cache `C_1`, `I_t >= |{x_1..x_t} \ C_1|` replaces what the
/// serve rows imply for the default cache.
pub fn build_lp(inst: &PrefetchInstance) -> (DiffSystem, LinearObjective) {
    let n = inst.len();
    let nodes = ProfileNodes::new(n);
    let k = inst.cache_size as i64;
    let f = inst.fetch_duration;
    let mut sys = DiffSystem::new(nodes.node_count(), ProfileNodes::ROOT);
    let (i, o) = (|t| nodes.input(t), |t| nodes.output(t));
    for t in 2..=n {
        sys.add(i(t - 1), i(t), 0);
        sys.add(o(t - 1), o(t), 0);
        sys.add(i(t), o(t), 0);
        sys.add(o(t), i(t), 1);
        sys.add(o(t), i((t + f).min(n)), 0);
    }
    let d = distinct_counts(&inst.requests);
    for s in 1..=n {
        for t in s.max(2)..=n {
            sys.add(o(s), i(t), k - d[s][t]);
        }
    }
    if n >= 2 {
        sys.add(i(n), ProfileNodes::ROOT, 2 * n as i64);
        if !inst.has_default_cache() {
            for (t, miss) in inst.initial_misses().into_iter().enumerate().skip(1) {
                sys.add(ProfileNodes::ROOT, i(t + 1), -miss);
            }
        }
    }
    sys.dedup();

    let mut coeffs = vec![0i64; nodes.node_count()];
    for t in 2..=n {
        coeffs[i(t)] += 1;
        coeffs[o(t)] -= 1;
    }
    if n >= 2 {
        coeffs[o(n)] += f as i64;
    }
    (sys, LinearObjective(coeffs))
}

/// Cumulative eviction (`o`) and completion (`i`) counts, index `t - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheProfile {
    pub i: Vec<i64>,
    pub o: Vec<i64>,
}

impl CacheProfile {
    pub fn zero(n: usize) -> Self {
        CacheProfile {
            i: vec![0; n],
            o: vec![0; n],
        }
    }

    fn from_valuation(n: usize, y: &[i64]) -> Self {
        let nodes = ProfileNodes::new(n);
        CacheProfile {
            i: (1..=n).map(|t| y[nodes.input(t)]).collect(),
            o: (1..=n).map(|t| y[nodes.output(t)]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("stall LP failed on a valid instance: {0}")]
    Lp(#[from] LpError),
    #[error("LP profile is malformed: {0}")]
    Malformed(#[from] MalformedProfile),
    #[error("greedy page assignment failed: {0}")]
    Assignment(#[from] AssignmentFailure),
}

/// Solves the stall LP and returns the optimal profile with its objective.
///
/// Among optimal profiles the componentwise-minimal one is returned; it never
/// carries zero-stall fetches that serve nothing.
pub fn solve_profile(inst: &PrefetchInstance) -> Result<(CacheProfile, i64), SolveError> {
    let n = inst.len();
    if n < 2 {
        return Ok((CacheProfile::zero(n), 0));
    }
    let (sys, obj) = build_lp(inst);
    let sol = graphlp::solve_difference_lp_at(&sys, &obj, Extreme::Min)?;
    Ok((
        CacheProfile::from_valuation(n, sol.valuation.values()),
        sol.objective,
    ))
}

/// A fetch interval `[start, end]`, 1-based times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn stall(&self, fetch_duration: usize) -> i64 {
        fetch_duration as i64 - (self.end as i64 - self.start as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedProfile {
    #[error("profile lengths differ ({i} completions, {o} evictions)")]
    Length { i: usize, o: usize },
    #[error("profile ends with {o} evictions but {i} completions")]
    Unclosed { i: i64, o: i64 },
    #[error("fetch {fetch} is {interval:?}, outside start <= end <= start + F")]
    Shape { fetch: usize, interval: Interval },
    #[error("fetch {fetch} starts before fetch {} ends", .fetch - 1)]
    Overlap { fetch: usize },
}

/// `s_j = min{t : O_t >= j}`, `e_j = min{t : I_t >= j}` for `j = 1..=O_n`.
pub fn extract_intervals(
    profile: &CacheProfile,
    fetch_duration: usize,
) -> Result<Vec<Interval>, MalformedProfile> {
    let (i, o) = (&profile.i, &profile.o);
    if i.len() != o.len() {
        return Err(MalformedProfile::Length {
            i: i.len(),
            o: o.len(),
        });
    }
    let (last_i, last_o) = (
        i.last().copied().unwrap_or(0),
        o.last().copied().unwrap_or(0),
    );
    if last_i != last_o {
        return Err(MalformedProfile::Unclosed {
            i: last_i,
            o: last_o,
        });
    }
    let first_reaching = |seq: &[i64], j: i64| seq.iter().position(|&v| v >= j).map(|p| p + 1);
    let mut out: Vec<Interval> = Vec::new();
    for j in 1..=last_o {
        let interval = Interval {
            start: first_reaching(o, j).unwrap(),
            end: first_reaching(i, j).unwrap(),
        };
        let fetch = out.len();
        if interval.end < interval.start || interval.end > interval.start + fetch_duration {
            return Err(MalformedProfile::Shape { fetch, interval });
        }
        if out.last().is_some_and(|prev| prev.end > interval.start) {
            return Err(MalformedProfile::Overlap { fetch });
        }
        out.push(interval);
    }
    Ok(out)
}

pub fn total_stall(intervals: &[Interval], fetch_duration: usize) -> i64 {
    intervals.iter().map(|iv| iv.stall(fetch_duration)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fetch {
    pub start: usize,
    pub evict: PageId,
    pub end: usize,
    pub fetch: PageId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FetchSchedule {
    pub fetches: Vec<Fetch>,
}

impl FetchSchedule {
    pub fn intervals(&self) -> Vec<Interval> {
        self.fetches
            .iter()
            .map(|f| Interval {
                start: f.start,
                end: f.end,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("request for page {page} at time {time} is not served")]
pub struct AssignmentFailure {
    pub time: usize,
    pub page: PageId,
}

/// Time of the next request of every page at or after a given time.
struct NextRequest {
    times: Vec<Vec<usize>>,
}

impl NextRequest {
    fn new(inst: &PrefetchInstance) -> Self {
        let mut times = vec![Vec::new(); inst.pages.len()];
        for (t, &p) in inst.requests.iter().enumerate() {
            times[p].push(t + 1);
        }
        NextRequest { times }
    }

    /// `usize::MAX` when never requested again.
    fn at_or_after(&self, page: PageId, t: usize) -> usize {
        let list = &self.times[page];
        let i = list.partition_point(|&x| x < t);
        list.get(i).copied().unwrap_or(usize::MAX)
    }
}

/// Assigns pages to intervals: at each start evict the cached page requested
/// furthest in the future, at each end fetch the uncached page requested
/// soonest. Ties go to the smaller page id. A completion and a start at the
/// same time are processed in interval order.
pub fn greedy_pages(
    inst: &PrefetchInstance,
    intervals: &[Interval],
) -> Result<FetchSchedule, AssignmentFailure> {
    let next = NextRequest::new(inst);
    let mut cached = vec![false; inst.pages.len()];
    for &p in &inst.initial {
        cached[p] = true;
    }
    let mut fetches = Vec::with_capacity(intervals.len());
    // events: 2j = start of interval j, 2j + 1 = its end
    let mut event = 0;
    for t in 1..=inst.len() {
        while event < 2 * intervals.len() {
            let iv = &intervals[event / 2];
            let time = if event % 2 == 0 { iv.start } else { iv.end };
            if time != t {
                break;
            }
            if event % 2 == 0 {
                let evict = (0..cached.len())
                    .filter(|&p| cached[p])
                    .max_by_key(|&p| (next.at_or_after(p, t), std::cmp::Reverse(p)))
                    .expect("cache is never empty at an eviction");
                cached[evict] = false;
                fetches.push(Fetch {
                    start: t,
                    evict,
                    end: iv.end,
                    fetch: evict,
                });
            } else {
                let fetch = (0..cached.len())
                    .filter(|&p| !cached[p])
                    .min_by_key(|&p| (next.at_or_after(p, t), p))
                    .expect("the evicted page is available to fetch");
                cached[fetch] = true;
                fetches.last_mut().unwrap().fetch = fetch;
            }
            event += 1;
        }
        let page = inst.requests[t - 1];
        if !cached[page] {
            return Err(AssignmentFailure { time: t, page });
        }
    }
    if event < 2 * intervals.len() {
        let iv = intervals[event / 2];
        return Err(AssignmentFailure {
            time: if event % 2 == 0 { iv.start } else { iv.end },
            page: usize::MAX,
        });
    }
    Ok(FetchSchedule { fetches })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `2 <= s <= e <= min(s + F, n)` fails.
    Geometry,
    /// The fetch starts before the previous one ends.
    Overlap,
    /// The page id is not a page of the instance.
    UnknownPage,
    /// The evicted page is not in the cache.
    EvictUncached,
    /// The fetched page is already in the cache.
    FetchCached,
    /// The cache holds more than `k` pages.
    Overflow,
    /// The requested page is not in the cache.
    Miss,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Geometry => "fetch interval out of shape",
            Rule::Overlap => "fetches overlap",
            Rule::UnknownPage => "unknown page",
            Rule::EvictUncached => "evicted page not cached",
            Rule::FetchCached => "fetched page already cached",
            Rule::Overflow => "cache overflow",
            Rule::Miss => "request not in cache",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("time {time}: {rule}{}", .fetch.map(|j| format!(" (fetch {j})")).unwrap_or_default())]
pub struct Violation {
    pub time: usize,
    pub rule: Rule,
    pub fetch: Option<usize>,
}

/// Result of replaying a schedule: the stall and the cache after all moves at
/// each time (index `t - 1`, sorted page ids).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub stall: i64,
    pub caches: Vec<Vec<PageId>>,
}

/// Replays a schedule and returns its total stall.
pub fn simulate(inst: &PrefetchInstance, sched: &FetchSchedule) -> Result<i64, Violation> {
    replay(inst, sched).map(|r| r.stall)
}

/// Replays a schedule from the initial cache. At time `t` the moves at `t`
/// happen in fetch order (a fetch's eviction, then its completion), then the
/// request at `t` must hit.
pub fn replay(inst: &PrefetchInstance, sched: &FetchSchedule) -> Result<Replay, Violation> {
    let n = inst.len();
    let f = inst.fetch_duration;
    let fail = |time, rule, fetch| Violation { time, rule, fetch };
    for (j, fe) in sched.fetches.iter().enumerate() {
        if fe.start < 2 || fe.end < fe.start || fe.end > n || fe.end > fe.start + f {
            return Err(fail(fe.start, Rule::Geometry, Some(j)));
        }
        if j > 0 && sched.fetches[j - 1].end > fe.start {
            return Err(fail(fe.start, Rule::Overlap, Some(j)));
        }
        if fe.evict >= inst.pages.len() || fe.fetch >= inst.pages.len() {
            return Err(fail(fe.start, Rule::UnknownPage, Some(j)));
        }
    }

    let mut cached = vec![false; inst.pages.len()];
    for &p in &inst.initial {
        cached[p] = true;
    }
    let mut size = inst.initial.len();
    let mut caches = Vec::with_capacity(n);
    let mut event = 0;
    let events = 2 * sched.fetches.len();
    for t in 1..=n {
        while event < events {
            let j = event / 2;
            let fe = &sched.fetches[j];
            let starting = event % 2 == 0;
            if (if starting { fe.start } else { fe.end }) != t {
                break;
            }
            if starting {
                if !cached[fe.evict] {
                    return Err(fail(t, Rule::EvictUncached, Some(j)));
                }
                cached[fe.evict] = false;
                size -= 1;
            } else {
                if cached[fe.fetch] {
                    return Err(fail(t, Rule::FetchCached, Some(j)));
                }
                cached[fe.fetch] = true;
                size += 1;
                if size > inst.cache_size {
                    return Err(fail(t, Rule::Overflow, Some(j)));
                }
            }
            event += 1;
        }
        if !cached[inst.requests[t - 1]] {
            return Err(fail(t, Rule::Miss, None));
        }
        caches.push((0..cached.len()).filter(|&p| cached[p]).collect());
    }
    Ok(Replay {
        stall: total_stall(&sched.intervals(), f),
        caches,
    })
}

/// Checks `I_t - I_s >= |{x_s..x_t} \ C_s|` for all `s <= t`, with `C_s` the
/// cache after the moves at time `s`. Returns the failing `(s, t)` pairs.
pub fn invariant_check(
    inst: &PrefetchInstance,
    profile: &CacheProfile,
    caches: &[Vec<PageId>],
) -> Result<(), Vec<(usize, usize)>> {
    let n = inst.len();
    let mut bad = Vec::new();
    let mut counted = vec![usize::MAX; inst.pages.len()];
    for s in 1..=n {
        let cache = &caches[s - 1];
        let mut missing = 0;
        for t in s..=n {
            let p = inst.requests[t - 1];
            if counted[p] != s {
                counted[p] = s;
                if cache.binary_search(&p).is_err() {
                    missing += 1;
                }
            }
            if profile.i[t - 1] - profile.i[s - 1] < missing {
                bad.push((s, t));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefetchSolution {
    pub profile: CacheProfile,
    /// LP optimum, equal to the schedule's stall.
    pub objective: i64,
    pub intervals: Vec<Interval>,
    pub schedule: FetchSchedule,
}

pub fn solve(inst: &PrefetchInstance) -> Result<PrefetchSolution, SolveError> {
    let (profile, objective) = solve_profile(inst)?;
    let intervals = extract_intervals(&profile, inst.fetch_duration)?;
    let schedule = greedy_pages(inst, &intervals)?;
    Ok(PrefetchSolution {
        profile,
        objective,
        intervals,
        schedule,
    })
}

//! Exact two-phase solvers for three slot problems.
//!
//! Each solver first computes a job- or page-agnostic *skeleton* (a multiset
//! of slots, or a set of fetch intervals) from a linear program whose rows are
//! difference constraints, and then fills the skeleton greedily:
//!
//! - [`equal`]: `P | r_j; p_j = p; D_j | sum C_j`, skeleton by shortest paths,
//!   jobs by earliest due date.
//! - [`tallsmall`]: unit jobs on `m` machines where tall jobs occupy every
//!   machine; skeleton by shortest paths, tall then small jobs by earliest due
//!   date.
//! - [`prefetch`]: offline single-disk prefetching for minimum stall time;
//!   skeleton through the min-cost-flow dual, pages by furthest-next-request
//!   eviction and nearest-next-request fetching.
//!
//! [`graphlp`] holds the shared exact machinery and [`oracle`] independent
//! brute-force references for tiny instances.

// the DP tables read best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod equal;
pub mod graphlp;
pub mod oracle;
pub mod prefetch;
pub mod tallsmall;

use serde::{Deserialize, Serialize};

/// Instance and solution files carry this version in their `format` field.
pub const FORMAT_VERSION: u32 = 1;

/// A `[release, deadline]` time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub release: i64,
    pub deadline: i64,
}

impl Window {
    pub fn new(release: i64, deadline: i64) -> Self {
        Window { release, deadline }
    }
}

/// Infeasibility witness translated to problem coordinates.
///
/// `labels[i]` names the variable at `cycle.nodes[i]` (a time point for the
/// scheduling problems).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub labels: Vec<i64>,
    pub cycle: graphlp::NegativeCycle,
}

fn default_format() -> u32 {
    FORMAT_VERSION
}

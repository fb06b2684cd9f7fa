//! Brute-force reference solvers for tiny instances.
//!
//! They search the schedule space directly and share only the verifiers with
//! the solver modules, never the LP machinery. Hard size guards keep them
//! honest about their purpose.

mod equal;
mod prefetch;
mod tallsmall;

pub use equal::{brute_equal, feasible_slot_sets};
pub use prefetch::brute_prefetch;
pub use tallsmall::brute_tallsmall;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult<W> {
    Optimal { objective: i64, witness: W },
    Infeasible,
}

impl<W> OracleResult<W> {
    pub fn objective(&self) -> Option<i64> {
        match self {
            OracleResult::Optimal { objective, .. } => Some(*objective),
            OracleResult::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleResult::Optimal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} is {got}, above the oracle limit {limit}")]
pub struct SizeGuard {
    pub what: &'static str,
    pub limit: usize,
    pub got: usize,
}

fn guard(what: &'static str, got: usize, limit: usize) -> Result<(), SizeGuard> {
    if got > limit {
        Err(SizeGuard { what, limit, got })
    } else {
        Ok(())
    }
}

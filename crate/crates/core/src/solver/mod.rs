//! Feasibility deciders.
//!
//! - [`bw_tba_solve`]: backward attractor over antichains of minimal losing
//!   nodes, optionally restricted to the frontier of newly found elements.
//! - [`es_solve`]: explicit attractor over the forward-reachable graph.
//! - [`full_space_attractor_oracle`]: naive attractor over the whole bounded
//!   space, for cross-checking on tiny instances.
//!
//! Explored-node counting: a node counts once when its successor or
//! predecessor set is computed. Covering probes do not count.

mod backward;
mod explicit;

use rustc_hash::FxHashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::antichain::Antichain;
use crate::error::{Error, Result};
use crate::game::GameNode;

pub use backward::{
    bad_antichain, bw_tba_solve, bw_tba_solve_with, bw_tba_trace, pre_exists_sharp,
    pre_forall_sharp, pre_forall_sharp_with, BwOptions,
};
pub use explicit::{
    es_solve, full_space_attractor_oracle, Attractor, ExplicitGame, OracleResult,
};

/// Limits on a single solve call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_seconds: Option<f64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 50_000_000,
            max_seconds: None,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_nodes: u64::MAX,
            max_seconds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Es,
    BwTba,
    BwTbaNoFrontier,
    Edf,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Es => "es",
            Algorithm::BwTba => "bw-tba",
            Algorithm::BwTbaNoFrontier => "bw-tba-nofrontier",
            Algorithm::Edf => "edf",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "es" => Ok(Algorithm::Es),
            "bw-tba" => Ok(Algorithm::BwTba),
            "bw-tba-nofrontier" => Ok(Algorithm::BwTbaNoFrontier),
            "edf" => Ok(Algorithm::Edf),
            other => Err(Error::InvalidArgument(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExplorationMetrics {
    pub explored_nodes: u64,
    /// Largest antichain (backward) or attractor (explicit) held.
    pub peak_set_size: usize,
    pub wall_time: Duration,
}

impl ExplorationMetrics {
    pub fn wall_time_ms(&self) -> f64 {
        self.wall_time.as_secs_f64() * 1e3
    }
}

/// Result of one solve call.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub algorithm: Algorithm,
    /// The initial node is not losing.
    pub feasible: bool,
    /// Minimal losing nodes. For the explicit solver this is the
    /// minimization of the reachable attractor.
    pub losing: Antichain,
    /// The explicit attractor, sorted; only set by [`es_solve`].
    pub explicit_losing: Option<Vec<GameNode>>,
    pub metrics: ExplorationMetrics,
    /// Fixpoint rounds, counting the final round that adds nothing.
    pub iterations: u32,
}

/// Tracks explored nodes and enforces a [`Budget`].
pub(crate) struct Meter {
    seen: FxHashSet<GameNode>,
    budget: Budget,
    start: Instant,
    ticks: u32,
}

impl Meter {
    pub(crate) fn new(budget: Budget) -> Self {
        Meter {
            seen: FxHashSet::default(),
            budget,
            start: Instant::now(),
            ticks: 0,
        }
    }

    pub(crate) fn explored(&self) -> u64 {
        self.seen.len() as u64
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    /// Records `v` as explored.
    pub(crate) fn touch(&mut self, v: &GameNode) -> Result<()> {
        if !self.seen.contains(v) {
            self.seen.insert(v.clone());
        }
        self.check(0)
    }

    /// Fails when the explored count plus `pending` work exceeds the node
    /// budget, or when the time budget is spent.
    pub(crate) fn check(&mut self, pending: usize) -> Result<()> {
        let explored = self.explored();
        if explored.saturating_add(pending as u64) > self.budget.max_nodes {
            return Err(Error::BudgetExceeded {
                explored,
                reason: "node budget",
            });
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 1024 == 0 {
            if let Some(limit) = self.budget.max_seconds {
                if self.start.elapsed().as_secs_f64() > limit {
                    return Err(Error::BudgetExceeded {
                        explored,
                        reason: "time budget",
                    });
                }
            }
        }
        Ok(())
    }

    pub(crate) fn metrics(&self, peak_set_size: usize) -> ExplorationMetrics {
        ExplorationMetrics {
            explored_nodes: self.explored(),
            peak_set_size,
            wall_time: self.elapsed(),
        }
    }
}

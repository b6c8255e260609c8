//! Brute-force checkers used to cross-validate the decision procedures.
//!
//! Both searches are one-sided: a find is a proof, exhaustion is not.

mod concepts;
mod distinguish;
mod models;
mod random;

use std::time::{Duration, Instant};

use serde::Serialize;

pub use concepts::{enumerate_concepts, enumerate_definitions, ConceptEnumerator};
pub use distinguish::distinguishing_concept;
pub use models::bounded_joint_consistency;
pub use random::{random_instance, Instance};

use crate::error::{Error, Result};

/// Search limits shared by the oracles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// largest domain size of enumerated interpretations
    pub max_domain: usize,
    /// largest role depth of enumerated concepts
    pub max_depth: usize,
    /// largest number of constructors in an enumerated concept
    pub max_size: usize,
    /// most candidates examined before giving up
    pub max_candidates: u64,
    pub wall_clock: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_domain: 3,
            max_depth: 2,
            max_size: 6,
            max_candidates: 1 << 22,
            wall_clock: Duration::from_secs(60),
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_domain == 0
            || self.max_size == 0
            || self.max_candidates == 0
            || self.wall_clock.is_zero()
        {
            return Err(Error::Invalid(
                "search budget limits must be positive".into(),
            ));
        }
        if self.max_domain > 8 {
            return Err(Error::Invalid(
                "domain bound above 8 is not supported".into(),
            ));
        }
        Ok(())
    }
}

/// Why a search stopped without a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// every candidate within the bounds was examined
    Bounds,
    Candidates,
    WallClock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exhausted {
    pub reason: StopReason,
    /// the largest bound (domain size or concept size) searched completely
    pub complete_to: usize,
    pub candidates: u64,
}

/// The outcome of an oracle search.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum Search<T> {
    Found { result: T, candidates: u64 },
    Exhausted(Exhausted),
}

impl<T> Search<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Search::Found { result, .. } => Some(result),
            Search::Exhausted(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.found().is_some()
    }
}

/// Candidate and time accounting for one search.
pub(crate) struct Meter {
    start: Instant,
    budget: SearchBudget,
    pub(crate) candidates: u64,
}

impl Meter {
    pub(crate) fn new(budget: &SearchBudget) -> Self {
        Meter {
            start: Instant::now(),
            budget: budget.clone(),
            candidates: 0,
        }
    }

    /// Counts one candidate; `Some` when a limit is hit.
    pub(crate) fn tick(&mut self) -> Option<StopReason> {
        self.candidates += 1;
        if self.candidates > self.budget.max_candidates {
            return Some(StopReason::Candidates);
        }
        if self.candidates.is_multiple_of(1024) && self.start.elapsed() > self.budget.wall_clock {
            return Some(StopReason::WallClock);
        }
        None
    }

    pub(crate) fn remaining(&self) -> u64 {
        self.budget.max_candidates.saturating_sub(self.candidates)
    }

    pub(crate) fn out_of_time(&self) -> bool {
        self.start.elapsed() > self.budget.wall_clock
    }

    pub(crate) fn exhausted<T>(&self, reason: StopReason, complete_to: usize) -> Search<T> {
        Search::Exhausted(Exhausted {
            reason,
            complete_to,
            candidates: self.candidates,
        })
    }
}

//! Joint consistency modulo Σ-bisimulations via mosaic elimination, with
//! witness models for positive answers.
//!
//! The search runs per pair of u-uniform type classes. Types of both sides
//! are first narrowed to a pairwise compatibility relation; candidate
//! mosaics are cliques of it. Bad mosaics are eliminated to a greatest
//! fixpoint, then one type and one carrier per nominal and side are fixed by
//! branching over the survivors.

mod engine;
mod pairs;
mod search;
mod witness;

#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use engine::{Engine, JointProblem, MosaicOptions};
pub use pairs::PairRelation;
pub use witness::Witness;

use crate::bits::BitSet;
use crate::coherence::Mosaic;
use crate::error::{Error, Result};
use crate::syntax::{Dialect, Signature};

/// Most transcript events kept in a verdict.
const TRANSCRIPT_LIMIT: usize = 400;
/// Most branching nodes when fixing nominal types and carriers.
const RESOLUTION_LIMIT: usize = 20_000;
/// Most carrier choices when resolving a shrunk universe, which is only a
/// shortcut.
const SHORTCUT_LIMIT: usize = 64;

/// One step of the search, for the transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub stage: String,
    pub detail: String,
}

impl Event {
    pub(crate) fn new(stage: &str, detail: impl Into<String>) -> Self {
        Event {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub closure: usize,
    pub atoms: usize,
    pub realizable: [usize; 2],
    pub class_pairs: usize,
    pub universes: usize,
    pub largest_universe: usize,
}

/// The mosaic and types witnessing `C1` and `C2` side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Designated {
    pub mosaic: usize,
    pub t1: usize,
    pub t2: usize,
}

/// Universe budget for the shrunk and quick stages; leaves exceeding it in
/// the quick stage are retried with the full budget only if no leaf succeeds.
const QUICK_BUDGET: usize = 1 << 14;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    /// maximal cliques closed under shrinking, at the root and the leaves
    Shrunk,
    /// all cliques within `QUICK_BUDGET`, deferring larger leaves
    Quick,
    /// all cliques within the full budget
    Full,
}

/// The outcome of a joint-consistency run.
#[derive(Clone, Debug, Serialize)]
pub struct JointVerdict {
    pub consistent: bool,
    pub signature: Signature,
    pub dialect: Dialect,
    pub stats: Stats,
    /// the good set found, in canonical order (empty when inconsistent)
    pub good_set: Vec<Mosaic>,
    pub designated: Option<Designated>,
    /// member lists of the types used in the good set, keyed `side:tid`
    pub types: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub transcript: Vec<Event>,
}

/// A candidate mosaic universe for one pair of u-classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    pub classes: [usize; 2],
    pub exhaustive: bool,
    pub relation: PairRelation,
    pub mosaics: Vec<Mosaic>,
}

struct Walk<'a> {
    stage: Stage,
    deferred: &'a mut usize,
    nodes: &'a mut usize,
    stats: &'a mut Stats,
    leaves: usize,
}

impl Engine {
    fn class_pairs(&self) -> Vec<([usize; 2], [BitSet; 2])> {
        let (a, b) = (self.classes(0), self.classes(1));
        let mut out = Vec::new();
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out.push(([i, j], [x.clone(), y.clone()]));
            }
        }
        out
    }

    /// The candidate universes, one per pair of u-classes: the maximal
    /// cliques of the compatibility relation, or all of its cliques when
    /// `exhaustive` is set.
    pub fn universes(&self, exhaustive: bool, events: &mut Vec<Event>) -> Result<Vec<Universe>> {
        let mut out = Vec::new();
        for (ids, classes) in self.class_pairs() {
            let rel = pairs::refine(self, [&classes[0], &classes[1]], None, events)?;
            let mosaics = self.clique_universe(&rel, exhaustive, self.options.budget)?;
            out.push(Universe {
                classes: ids,
                exhaustive,
                relation: rel,
                mosaics,
            });
        }
        Ok(out)
    }

    fn clique_universe(
        &self,
        rel: &PairRelation,
        exhaustive: bool,
        budget: usize,
    ) -> Result<Vec<Mosaic>> {
        let universal = self.problem.dialect.universal;
        if exhaustive {
            search::all_cliques(rel, universal, budget)
        } else {
            search::maximal_cliques(rel, universal, budget)
        }
    }

    /// The greatest good subset of `universe`, ignoring nominal uniqueness.
    /// `order` permutes the inspection order; the result is independent of
    /// it.
    pub fn eliminate(&self, universe: &[Mosaic], order: Option<&[usize]>) -> Result<Vec<Mosaic>> {
        let alive = search::eliminate(self, universe, order, &mut Vec::new())?;
        Ok(universe
            .iter()
            .zip(alive)
            .filter(|(_, a)| *a)
            .map(|(m, _)| m.clone())
            .collect())
    }

    fn designated(&self, s: &[Mosaic]) -> Option<Designated> {
        s.iter().enumerate().find_map(|(k, p)| {
            let t1 =
                p.t1.iter()
                    .copied()
                    .find(|&t| self.tables[0].types[t].contains(self.goals[0]))?;
            let t2 =
                p.t2.iter()
                    .copied()
                    .find(|&t| self.tables[1].types[t].contains(self.goals[1]))?;
            Some(Designated { mosaic: k, t1, t2 })
        })
    }

    /// Fixes, for each nominal and side, one type and one carrier mosaic by
    /// branching over the elimination survivors.
    fn resolve(
        &self,
        universe: Vec<Mosaic>,
        required: BTreeSet<Mosaic>,
        nodes: &mut usize,
        limit: usize,
        events: &mut Vec<Event>,
    ) -> Result<Option<Vec<Mosaic>>> {
        self.options.check_cancel()?;
        *nodes += 1;
        if *nodes > limit {
            return Err(Error::Budget(format!(
                "more than {limit} nominal carrier choices"
            )));
        }
        let order = self.options.inspection_order(universe.len());
        let alive = search::eliminate(self, &universe, order.as_deref(), events)?;
        let s0: Vec<Mosaic> = universe
            .into_iter()
            .zip(alive)
            .filter(|(_, a)| *a)
            .map(|(m, _)| m)
            .collect();
        if !required.iter().all(|m| s0.binary_search(m).is_ok()) {
            events.push(Event::new("nominals", "a chosen carrier was eliminated"));
            return Ok(None);
        }
        if self.designated(&s0).is_none() {
            events.push(Event::new(
                "mosaics",
                "no surviving mosaic holds both designated types",
            ));
            return Ok(None);
        }
        let mut branch = None;
        'find: for (a, member, _) in self.nominal_members() {
            for side in 0..2 {
                let holders: Vec<(usize, usize)> = s0
                    .iter()
                    .enumerate()
                    .flat_map(|(k, p)| p.side(side).iter().map(move |&t| (t, k)))
                    .filter(|&(t, _)| self.tables[side].types[t].contains(member))
                    .collect();
                if holders.is_empty() {
                    events.push(Event::new(
                        "nominals",
                        format!("no surviving type for {{{a}}} on side {}", side + 1),
                    ));
                    return Ok(None);
                }
                if holders.len() > 1 {
                    branch = Some((side, member, holders));
                    break 'find;
                }
            }
        }
        let Some((side, member, mut holders)) = branch else {
            return Ok(Some(s0));
        };
        holders.sort();
        for (t, k) in holders {
            let carrier = &s0[k];
            let fix = |q: &Mosaic| -> Mosaic {
                let keep = |x: &usize| {
                    let has = self.tables[side].types[*x].contains(member);
                    !has || (*x == t && q == carrier)
                };
                let kept: BTreeSet<usize> = q.side(side).iter().copied().filter(keep).collect();
                if side == 0 {
                    Mosaic {
                        t1: kept,
                        t2: q.t2.clone(),
                    }
                } else {
                    Mosaic {
                        t1: q.t1.clone(),
                        t2: kept,
                    }
                }
            };
            let universal = self.problem.dialect.universal;
            let ok = |m: &Mosaic| {
                !m.is_empty() && (!universal || (!m.t1.is_empty() && !m.t2.is_empty()))
            };
            let next: BTreeSet<Mosaic> = s0.iter().map(fix).filter(ok).collect();
            let mut req: BTreeSet<Mosaic> = required.iter().map(fix).collect();
            req.insert(fix(carrier));
            if let Some(s) = self.resolve(next.into_iter().collect(), req, nodes, limit, events)? {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    /// Drops the mosaics not needed to serve the designated mosaic and the
    /// nominal carriers.
    fn trim(&self, s: Vec<Mosaic>) -> Vec<Mosaic> {
        let d = self
            .designated(&s)
            .expect("resolution keeps the designated pair");
        let mut roots = vec![d.mosaic];
        for (_, member, _) in self.nominal_members() {
            for side in 0..2 {
                roots.extend((0..s.len()).filter(|&k| {
                    s[k].side(side)
                        .iter()
                        .any(|&t| self.tables[side].types[t].contains(member))
                }));
            }
        }
        let keep = search::trim(self, &s, &roots);
        keep.into_iter().map(|k| s[k].clone()).collect()
    }

    /// Decides joint consistency of `O1, C1` and `O2, C2` modulo
    /// Σ-bisimulations.
    pub fn run(&self) -> Result<JointVerdict> {
        let mut events = Vec::new();
        let mut stats = Stats {
            closure: self.space.len(),
            atoms: self.space.atom_count(),
            realizable: [self.tables[0].len(), self.tables[1].len()],
            ..Stats::default()
        };
        let mut nodes = 0;
        let pairs = self.class_pairs();
        stats.class_pairs = pairs.len();
        let mut deferred = 0;
        // class pairs whose branching reaches a leaf; the rest fail the same
        // way at every stage
        let mut open = vec![true; pairs.len()];
        for stage in [Stage::Shrunk, Stage::Quick, Stage::Full] {
            if stage == Stage::Full && deferred == 0 {
                break;
            }
            for (k, (ids, classes)) in pairs.iter().enumerate() {
                if !open[k] {
                    continue;
                }
                let label = match stage {
                    Stage::Shrunk => "shrunk cliques",
                    Stage::Quick => "all cliques",
                    Stage::Full => "all cliques, full budget",
                };
                events.push(Event::new(
                    "classes",
                    format!("u-classes {} and {}: {label}", ids[0], ids[1]),
                ));
                let mut walk = Walk {
                    stage,
                    deferred: &mut deferred,
                    nodes: &mut nodes,
                    stats: &mut stats,
                    leaves: 0,
                };
                let found = self.explore(classes.clone(), None, &mut walk, &mut events)?;
                open[k] = walk.leaves > 0;
                if let Some(s) = found {
                    let s = self.trim(s);
                    let designated = self
                        .designated(&s)
                        .expect("resolution keeps the designated pair");
                    let witness = witness::build(self, &s, &designated)?;
                    return Ok(self.verdict(
                        true,
                        stats,
                        s,
                        Some(designated),
                        Some(witness),
                        events,
                    ));
                }
            }
        }
        Ok(self.verdict(false, stats, Vec::new(), None, None, events))
    }

    /// Fixes one live type per nominal and side, refining the compatibility
    /// relation after each choice, then searches the clique universe of the
    /// current stage at the leaves.
    fn explore(
        &self,
        classes: [BitSet; 2],
        parent: Option<&PairRelation>,
        walk: &mut Walk,
        events: &mut Vec<Event>,
    ) -> Result<Option<Vec<Mosaic>>> {
        *walk.nodes += 1;
        if *walk.nodes > RESOLUTION_LIMIT {
            return Err(Error::Budget(format!(
                "more than {RESOLUTION_LIMIT} nominal type choices"
            )));
        }
        let root = parent.is_none();
        let rel = pairs::refine(self, [&classes[0], &classes[1]], parent, events)?;
        let any_designated = (0..rel.n0).any(|x| {
            self.tables[0].types[x].contains(self.goals[0])
                && rel.rows[x].iter().any(|y| {
                    y >= rel.n0 && self.tables[1].types[y - rel.n0].contains(self.goals[1])
                })
        });
        if !any_designated {
            events.push(Event::new(
                "pairs",
                "no compatible pair of designated types",
            ));
            return Ok(None);
        }
        // Resolution handles nominal uniqueness itself, so the unbranched
        // shrunk universe often suffices.
        if root && walk.stage == Stage::Shrunk {
            if let Some(s) = self.shrunk(&rel, walk.stats, events)? {
                return Ok(Some(s));
            }
        }
        for (a, member, _) in self.nominal_members() {
            for side in 0..2 {
                let live: Vec<usize> = classes[side]
                    .iter()
                    .filter(|&t| {
                        rel.alive(rel.vertex(side, t))
                            && self.tables[side].types[t].contains(member)
                    })
                    .collect();
                if live.is_empty() {
                    events.push(Event::new(
                        "nominals",
                        format!("no live type for {{{a}}} on side {}", side + 1),
                    ));
                    return Ok(None);
                }
                if live.len() == 1 {
                    continue;
                }
                for &t in &live {
                    events.push(Event::new(
                        "nominals",
                        format!("try {}:t{t} for {{{a}}}", side + 1),
                    ));
                    let mut next = classes.clone();
                    for &other in &live {
                        if other != t {
                            next[side].remove(other);
                        }
                    }
                    if let Some(s) = self.explore(next, Some(&rel), walk, events)? {
                        return Ok(Some(s));
                    }
                }
                return Ok(None);
            }
        }
        walk.leaves += 1;
        match walk.stage {
            Stage::Shrunk if root => Ok(None),
            Stage::Shrunk => self.shrunk(&rel, walk.stats, events),
            Stage::Quick => {
                match self.clique_universe(&rel, true, QUICK_BUDGET.min(self.options.budget)) {
                    Err(e) if e.is_budget() => {
                        *walk.deferred += 1;
                        events.push(Event::new(
                            "universe",
                            format!("candidate cliques deferred: {e}"),
                        ));
                        Ok(None)
                    }
                    u => self.try_universe(u?, "candidate", RESOLUTION_LIMIT, walk.stats, events),
                }
            }
            Stage::Full => {
                let u = self.clique_universe(&rel, true, self.options.budget)?;
                self.try_universe(u, "candidate", RESOLUTION_LIMIT, walk.stats, events)
            }
        }
    }

    fn shrunk(
        &self,
        rel: &PairRelation,
        stats: &mut Stats,
        events: &mut Vec<Event>,
    ) -> Result<Option<Vec<Mosaic>>> {
        let budget = QUICK_BUDGET.min(self.options.budget);
        let u = self
            .clique_universe(rel, false, budget)
            .and_then(|m| search::shrink_closure(self, m, self.problem.dialect.universal, budget));
        match u
            .and_then(|u| self.try_universe(u, "maximal or shrunk", SHORTCUT_LIMIT, stats, events))
        {
            Err(e) if e.is_budget() => {
                events.push(Event::new(
                    "universe",
                    format!("shrunk cliques skipped: {e}"),
                ));
                Ok(None)
            }
            r => r,
        }
    }

    fn try_universe(
        &self,
        universe: Vec<Mosaic>,
        label: &str,
        limit: usize,
        stats: &mut Stats,
        events: &mut Vec<Event>,
    ) -> Result<Option<Vec<Mosaic>>> {
        stats.universes += 1;
        stats.largest_universe = stats.largest_universe.max(universe.len());
        events.push(Event::new(
            "universe",
            format!("{} {label} cliques", universe.len()),
        ));
        let mut carrier_nodes = 0;
        self.resolve(universe, BTreeSet::new(), &mut carrier_nodes, limit, events)
    }

    fn verdict(
        &self,
        consistent: bool,
        stats: Stats,
        good_set: Vec<Mosaic>,
        designated: Option<Designated>,
        witness: Option<Witness>,
        mut transcript: Vec<Event>,
    ) -> JointVerdict {
        if transcript.len() > TRANSCRIPT_LIMIT {
            let extra = transcript.len() - TRANSCRIPT_LIMIT;
            transcript.truncate(TRANSCRIPT_LIMIT);
            transcript.push(Event::new(
                "transcript",
                format!("{extra} further events omitted"),
            ));
        }
        let mut types = BTreeMap::new();
        for p in &good_set {
            for side in 0..2 {
                for &t in p.side(side) {
                    let members = self.tables[side].types[t]
                        .iter()
                        .map(|m| self.space.closure().get(m).to_string())
                        .collect();
                    types.insert(format!("{}:t{t}", side + 1), members);
                }
            }
        }
        JointVerdict {
            consistent,
            signature: self.problem.sigma.clone(),
            dialect: self.problem.dialect,
            stats,
            good_set,
            designated,
            types,
            witness,
            transcript,
        }
    }
}

/// Decides joint consistency with default options.
pub fn jointly_consistent(problem: JointProblem) -> Result<JointVerdict> {
    jointly_consistent_with(problem, MosaicOptions::default())
}

pub fn jointly_consistent_with(
    problem: JointProblem,
    options: MosaicOptions,
) -> Result<JointVerdict> {
    Engine::new(problem, options)?.run()
}

/// The maximal-clique universes of a problem, one per pair of u-classes.
pub fn enumerate_universes(problem: JointProblem, options: MosaicOptions) -> Result<Vec<Universe>> {
    Engine::new(problem, options)?.universes(false, &mut Vec::new())
}

//! Canonical enumeration of Σ-concepts and a search for explicit
//! definitions.

use super::{Meter, Search, SearchBudget, StopReason};
use crate::error::{Error, Result};
use crate::satcheck::model_of_with;
use crate::semantics::Interpretation;
use crate::syntax::{check_dialect, Concept, Dialect, Ontology, Role, Signature};

/// Σ-concepts of bounded role depth, layer by layer in the number of
/// constructors. Within a layer concepts follow the derived concept order;
/// double negations, conjunctions with `⊤` and unordered or repeated
/// conjuncts are skipped.
pub struct ConceptEnumerator {
    atoms: Vec<Concept>,
    roles: Vec<Role>,
    max_depth: usize,
    layers: Vec<Vec<Concept>>,
}

impl ConceptEnumerator {
    pub fn new(sigma: &Signature, d: Dialect, max_depth: usize) -> Self {
        let mut atoms: Vec<Concept> = sigma.concepts.iter().map(Concept::name).collect();
        if d.nominals {
            atoms.extend(sigma.individuals.iter().map(Concept::nominal));
        }
        let mut roles = Vec::new();
        for r in &sigma.roles {
            roles.push(Role::name(r));
            if d.inverse {
                roles.push(Role::inverse_of(r));
            }
        }
        if d.universal {
            roles.push(Role::universal());
        }
        ConceptEnumerator {
            atoms,
            roles,
            max_depth,
            layers: vec![Vec::new()],
        }
    }

    /// The concepts with exactly `size` constructors.
    pub fn layer(&mut self, size: usize) -> &[Concept] {
        while self.layers.len() <= size {
            let s = self.layers.len();
            let next = self.build(s);
            self.layers.push(next);
        }
        &self.layers[size]
    }

    fn build(&self, s: usize) -> Vec<Concept> {
        let mut out = Vec::new();
        if s == 1 {
            out.push(Concept::Top);
            out.extend(self.atoms.iter().cloned());
            return out;
        }
        for c in &self.layers[s - 1] {
            if !matches!(c, Concept::Not(_)) {
                out.push(Concept::Not(Box::new(c.clone())));
            }
            if c.depth() < self.max_depth {
                for r in &self.roles {
                    out.push(Concept::exists(r.clone(), c.clone()));
                }
            }
        }
        for sa in 1..s - 1 {
            for a in &self.layers[sa] {
                for b in &self.layers[s - 1 - sa] {
                    if *a != Concept::Top && *b != Concept::Top && a < b {
                        out.push(Concept::And(Box::new(a.clone()), Box::new(b.clone())));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Every Σ-concept up to the given depth and size, in canonical order.
pub fn enumerate_concepts(
    sigma: &Signature,
    d: Dialect,
    max_depth: usize,
    max_size: usize,
) -> Vec<Concept> {
    let mut e = ConceptEnumerator::new(sigma, d, max_depth);
    (1..=max_size).flat_map(|s| e.layer(s).to_vec()).collect()
}

/// Models of `O` used to reject candidates cheaply: a candidate must agree
/// with `C` on every element of every sample.
struct Samples {
    models: Vec<(Interpretation, Vec<bool>)>,
}

impl Samples {
    fn add(&mut self, m: Interpretation, c: &Concept) -> Result<()> {
        let ext = m.eval_mask(c)?;
        self.models.push((m, ext));
        Ok(())
    }

    fn agree(&self, d: &Concept) -> Result<bool> {
        for (m, ext) in &self.models {
            if m.eval_mask(d)? != *ext {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The first Σ-concept `D` in canonical order with `O ⊨ C ≡ D`, searching
/// up to `budget.max_depth` and `budget.max_size`.
pub fn enumerate_definitions(
    o: &Ontology,
    c: &Concept,
    sigma: &Signature,
    d: Dialect,
    budget: &SearchBudget,
) -> Result<Search<Concept>> {
    budget.validate()?;
    check_dialect(d, &[o], &[c])?;
    if !sigma.is_subset(&Signature::of(o, c)) {
        return Err(Error::Invalid("signature symbols not in the input".into()));
    }
    let mut samples = Samples { models: Vec::new() };
    for goal in [c.clone(), c.negate()] {
        if let Some((m, _)) = model_of_with(&goal, o, d, crate::coherence::DEFAULT_ATOM_LIMIT)? {
            samples.add(m, c)?;
        }
    }
    let mut meter = Meter::new(budget);
    let mut e = ConceptEnumerator::new(sigma, d, budget.max_depth);
    for size in 1..=budget.max_size {
        let layer = e.layer(size).to_vec();
        for cand in layer {
            if let Some(r) = meter.tick() {
                return Ok(meter.exhausted(r, size - 1));
            }
            if !samples.agree(&cand)? {
                continue;
            }
            let mut refuted = false;
            for q in [c.clone().and(cand.negate()), cand.clone().and(c.negate())] {
                if let Some((m, _)) = model_of_with(&q, o, d, crate::coherence::DEFAULT_ATOM_LIMIT)?
                {
                    samples.add(m, c)?;
                    refuted = true;
                    break;
                }
            }
            if !refuted {
                return Ok(Search::Found {
                    result: cand,
                    candidates: meter.candidates,
                });
            }
        }
        if meter.out_of_time() {
            return Ok(meter.exhausted(StopReason::WallClock, size));
        }
    }
    Ok(meter.exhausted(StopReason::Bounds, budget.max_size))
}

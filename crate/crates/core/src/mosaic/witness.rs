use std::collections::BTreeSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::engine::Engine;
use super::Designated;
use crate::coherence::Mosaic;
use crate::error::{Error, Result};
use crate::semantics::{is_bisimulation, largest_bisimulation, Interpretation};
use crate::syntax::{Concept, Dialect, Ontology, Signature};

/// Two models with designated elements and a bisimulation between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub i1: Interpretation,
    pub d1: usize,
    pub i2: Interpretation,
    pub d2: usize,
    pub relation: BTreeSet<(usize, usize)>,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Witness", 5)?;
        st.serialize_field("model1", &self.i1.to_json())?;
        st.serialize_field("d1", &self.i1.domain[self.d1])?;
        st.serialize_field("model2", &self.i2.to_json())?;
        st.serialize_field("d2", &self.i2.domain[self.d2])?;
        let rel: Vec<(&str, &str)> = self
            .relation
            .iter()
            .map(|&(x, y)| (self.i1.domain[x].as_str(), self.i2.domain[y].as_str()))
            .collect();
        st.serialize_field("relation", &rel)?;
        st.end()
    }
}

impl Witness {
    /// Re-checks the witness from scratch: both models satisfy their
    /// ontology, the designated points satisfy their concept, the relation
    /// is a Σ-bisimulation linking them and lies inside the largest one.
    /// Returns the failed checks.
    pub fn validate(
        &self,
        o1: &Ontology,
        c1: &Concept,
        o2: &Ontology,
        c2: &Concept,
        sigma: &Signature,
        d: Dialect,
    ) -> Result<Vec<String>> {
        let mut failed = Vec::new();
        for (k, (m, o)) in [(&self.i1, o1), (&self.i2, o2)].into_iter().enumerate() {
            let (ok, bad) = m.is_model(o)?;
            if !ok {
                failed.push(format!("model {} violates {}", k + 1, bad[0]));
            }
        }
        if !self.i1.eval_mask(c1)?[self.d1] {
            failed.push("first point is outside its concept".into());
        }
        if !self.i2.eval_mask(c2)?[self.d2] {
            failed.push("second point is outside its concept".into());
        }
        if !self.relation.contains(&(self.d1, self.d2)) {
            failed.push("relation misses the designated pair".into());
        }
        if !is_bisimulation(&self.i1, &self.i2, &self.relation, sigma, d) {
            failed.push("relation is not a bisimulation".into());
        }
        let z = largest_bisimulation(&self.i1, &self.i2, sigma, d);
        if !self.relation.iter().all(|&(x, y)| z.contains(x, y)) {
            failed.push("relation leaves the largest bisimulation".into());
        }
        Ok(failed)
    }
}

/// The model of side `side` over a good set: elements are pairs of a type
/// and a mosaic holding it on that side.
pub(super) fn side_model(
    e: &Engine,
    s: &[Mosaic],
    side: usize,
) -> (Interpretation, Vec<(usize, usize)>) {
    let elems: Vec<(usize, usize)> = s
        .iter()
        .enumerate()
        .flat_map(|(k, p)| p.side(side).iter().map(move |&t| (t, k)))
        .collect();
    let tab = &e.tables[side];
    let mut m = Interpretation::with_domain(elems.iter().map(|(t, k)| format!("t{t}@m{k}")));
    for (name, member) in e.space.names() {
        m.concepts.entry(name.clone()).or_default();
        for (x, &(t, _)) in elems.iter().enumerate() {
            if tab.types[t].contains(*member) {
                m.add_concept(name, x);
            }
        }
    }
    for (rid, role) in e.space.roles().iter().enumerate() {
        let (Some(name), false) = (role.role_name(), role.is_inverted()) else {
            continue;
        };
        m.roles.entry(name.to_string()).or_default();
        let steps: Vec<Vec<bool>> = s
            .iter()
            .map(|p| s.iter().map(|q| e.mosaic_step(side, rid, p, q)).collect())
            .collect();
        for (x, &(t, p)) in elems.iter().enumerate() {
            for (y, &(t2, q)) in elems.iter().enumerate() {
                if steps[p][q] && tab.coherent(t, t2, rid) {
                    m.add_edge(name, x, y);
                }
            }
        }
    }
    for (a, member) in e.space.nominals() {
        if let Some(x) = elems
            .iter()
            .position(|&(t, _)| tab.types[t].contains(*member))
        {
            m.set_individual(a, x);
        }
    }
    (m, elems)
}

/// Builds the witness models of a good set and checks them: both are models
/// of their ontologies, the designated elements lie in `C1` and `C2`, and
/// the relation is a bisimulation containing the designated pair.
pub(crate) fn build(e: &Engine, s: &[Mosaic], d: &Designated) -> Result<Witness> {
    let (i1, el1) = side_model(e, s, 0);
    let (i2, el2) = side_model(e, s, 1);
    let d1 = el1
        .iter()
        .position(|&x| x == (d.t1, d.mosaic))
        .expect("designated element");
    let d2 = el2
        .iter()
        .position(|&x| x == (d.t2, d.mosaic))
        .expect("designated element");
    let mut relation = BTreeSet::new();
    for (x, &(_, p)) in el1.iter().enumerate() {
        for (y, &(_, q)) in el2.iter().enumerate() {
            if p == q {
                relation.insert((x, y));
            }
        }
    }
    let w = Witness {
        i1,
        d1,
        i2,
        d2,
        relation,
    };
    verify(e, &w)?;
    Ok(w)
}

pub(crate) fn verify(e: &Engine, w: &Witness) -> Result<()> {
    let p = &e.problem;
    let fail = |what: &str| Err(Error::Invalid(format!("witness check failed: {what}")));
    if !w.i1.is_model(&p.o1)?.0 {
        return fail("first model");
    }
    if !w.i2.is_model(&p.o2)?.0 {
        return fail("second model");
    }
    if !w.i1.eval(&p.c1)?.contains(&w.d1) || !w.i2.eval(&p.c2)?.contains(&w.d2) {
        return fail("designated elements");
    }
    let big = largest_bisimulation(&w.i1, &w.i2, &p.sigma, p.dialect);
    if !w.relation.is_subset(&big.pairs) || !big.contains(w.d1, w.d2) {
        return fail("bisimulation");
    }
    Ok(())
}

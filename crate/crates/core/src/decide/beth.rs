//! Relativization and the reduction of non-projective definability in
//! ALCO and ALCHO to satisfiability.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::syntax::{Concept, ConceptInclusion, Ontology, Renaming, Role, Signature};

/// Relativizes `c` to the concept name `d`: every existential restriction
/// only looks at `d`-elements.
pub fn relativize_concept(c: &Concept, d: &str) -> Concept {
    match c {
        Concept::Top | Concept::Name(_) | Concept::Nominal(_) => c.clone(),
        Concept::Not(x) => Concept::Not(Box::new(relativize_concept(x, d))),
        Concept::And(a, b) => Concept::And(
            Box::new(relativize_concept(a, d)),
            Box::new(relativize_concept(b, d)),
        ),
        Concept::Exists(r, x) => {
            Concept::exists(r.clone(), Concept::name(d).and(relativize_concept(x, d)))
        }
    }
}

/// The relativization of `o` to `d`: `C ⊑ C'` becomes
/// `d ⊓ rel(C) ⊑ rel(C')`. Role inclusions are kept.
pub fn relativize(o: &Ontology, d: &str) -> Result<Ontology> {
    if Signature::of_ontology(o).concepts.contains(d) {
        return Err(Error::Invalid(format!("concept name `{d}` is not fresh")));
    }
    Ok(Ontology {
        cis: o
            .cis
            .iter()
            .map(|ci| ConceptInclusion {
                lhs: Concept::name(d).and(relativize_concept(&ci.lhs, d)),
                rhs: relativize_concept(&ci.rhs, d),
            })
            .collect(),
        ris: o.ris.clone(),
    })
}

/// The ontology `O''` and goal concept whose unsatisfiability is equivalent
/// to `A` being explicitly definable under `O` from `sig(O) \ {A}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BethReduction {
    pub ontology: Ontology,
    pub goal: Concept,
    pub signature: Signature,
    /// the fresh names: generated-part marker, the two domain markers, and
    /// the copies of `A` and of the individuals
    pub generated: String,
    pub domains: [String; 2],
    pub copies: Renaming,
}

fn fresh(base: &str, taken: &mut BTreeSet<String>) -> String {
    if taken.insert(base.to_string()) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| taken.insert(n.clone()))
        .expect("unbounded")
}

pub fn build_beth_reduction(o: &Ontology, a: &str) -> Result<BethReduction> {
    let sig = Signature::of_ontology(o);
    if !sig.concepts.contains(a) {
        return Err(Error::Invalid(format!(
            "concept name `{a}` does not occur in the ontology"
        )));
    }
    let sigma = sig.difference(&Signature::new().with_concept(a));
    let mut taken: BTreeSet<String> = sig
        .concepts
        .iter()
        .chain(&sig.roles)
        .chain(&sig.individuals)
        .cloned()
        .collect();
    let d = fresh("D", &mut taken);
    let d1 = fresh("D1", &mut taken);
    let d2 = fresh("D2", &mut taken);
    let mut to_copy = Signature::new().with_concept(a);
    to_copy.individuals = sig.individuals.clone();
    let avoid = Signature {
        concepts: taken.clone(),
        ..Signature::new()
    };
    let copies = Renaming::outside(&to_copy, &Signature::new(), &avoid.union(&sig));
    let primed = copies.ontology(o);

    let mut out = relativize(o, &d1)?;
    let second = relativize(&primed, &d2)?;
    out.cis.extend(second.cis);
    out.ris.extend(second.ris);
    let dc = || Concept::name(&d);
    for r in &sigma.roles {
        out = out.with_ci(dc(), Concept::forall(Role::name(r), dc()));
    }
    out = out
        .with_ci(dc(), Concept::name(&d1))
        .with_ci(dc(), Concept::name(&d2));
    for (x, x2) in &copies.individuals {
        let (n, n2) = (Concept::nominal(x), Concept::nominal(x2));
        out = out
            .with_ci(n.clone(), Concept::name(&d1))
            .with_ci(n2.clone(), Concept::name(&d2));
        out = out
            .with_ci(dc().and(n.clone()), n2.clone())
            .with_ci(dc().and(n2), n);
    }
    let a2 = &copies.concepts[a];
    let goal = Concept::name(a).and(Concept::name(a2).negate()).and(dc());
    Ok(BethReduction {
        ontology: out,
        goal,
        signature: sigma,
        generated: d,
        domains: [d1, d2],
        copies,
    })
}

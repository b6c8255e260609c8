use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::concept::{map_role, Concept, ConceptInclusion, Ontology, RoleInclusion};
use super::signature::Signature;

/// Old-name to fresh-name maps, one per kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Renaming {
    pub concepts: BTreeMap<String, String>,
    pub roles: BTreeMap<String, String>,
    pub individuals: BTreeMap<String, String>,
}

impl Renaming {
    /// Maps every symbol of `sig` outside `keep` to a fresh primed name
    /// (`B` to `B_1`, or `B_2` when `B_1` is taken), avoiding `avoid`.
    pub fn outside(sig: &Signature, keep: &Signature, avoid: &Signature) -> Renaming {
        let mut taken: BTreeSet<String> = avoid
            .union(sig)
            .concepts
            .iter()
            .chain(avoid.union(sig).roles.iter())
            .chain(avoid.union(sig).individuals.iter())
            .cloned()
            .collect();
        let mut fresh = |n: &str| {
            let mut k = 1;
            loop {
                let cand = format!("{n}_{k}");
                if taken.insert(cand.clone()) {
                    return cand;
                }
                k += 1;
            }
        };
        let mut out = Renaming::default();
        for n in sig.concepts.difference(&keep.concepts) {
            out.concepts.insert(n.clone(), fresh(n));
        }
        for n in sig.roles.difference(&keep.roles) {
            out.roles.insert(n.clone(), fresh(n));
        }
        for n in sig.individuals.difference(&keep.individuals) {
            out.individuals.insert(n.clone(), fresh(n));
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.roles.is_empty() && self.individuals.is_empty()
    }

    pub fn concept(&self, c: &Concept) -> Concept {
        let look = |m: &BTreeMap<String, String>, n: &str| {
            m.get(n).cloned().unwrap_or_else(|| n.to_string())
        };
        c.map_names(
            &|n| look(&self.concepts, n),
            &|n| look(&self.roles, n),
            &|n| look(&self.individuals, n),
        )
    }

    pub fn ontology(&self, o: &Ontology) -> Ontology {
        let role = |n: &str| self.roles.get(n).cloned().unwrap_or_else(|| n.to_string());
        Ontology {
            cis: o
                .cis
                .iter()
                .map(|ci| ConceptInclusion {
                    lhs: self.concept(&ci.lhs),
                    rhs: self.concept(&ci.rhs),
                })
                .collect(),
            ris: o
                .ris
                .iter()
                .map(|ri| RoleInclusion {
                    lhs: map_role(&ri.lhs, &role),
                    rhs: map_role(&ri.rhs, &role),
                })
                .collect(),
        }
    }
}

/// Renames every non-`keep` symbol of `o` and `c` uniformly to a fresh one.
pub fn rename_outside(
    o: &Ontology,
    c: &Concept,
    keep: &Signature,
) -> (Ontology, Concept, Renaming) {
    let sig = Signature::of(o, c);
    let ren = Renaming::outside(&sig, keep, &keep.clone());
    (ren.ontology(o), ren.concept(c), ren)
}

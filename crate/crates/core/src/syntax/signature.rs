use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::concept::{Concept, Ontology, Role};

/// Concept, role and individual names. The universal role is never a member.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_concept(mut self, n: &str) -> Self {
        self.concepts.insert(n.to_string());
        self
    }

    pub fn with_role(mut self, n: &str) -> Self {
        self.roles.insert(n.to_string());
        self
    }

    pub fn with_individual(mut self, n: &str) -> Self {
        self.individuals.insert(n.to_string());
        self
    }

    pub fn of_concept(c: &Concept) -> Self {
        let mut s = Signature::new();
        s.add_concept(c);
        s
    }

    pub fn of_ontology(o: &Ontology) -> Self {
        let mut s = Signature::new();
        s.add_ontology(o);
        s
    }

    pub fn of(o: &Ontology, c: &Concept) -> Self {
        let mut s = Signature::of_ontology(o);
        s.add_concept(c);
        s
    }

    pub fn add_concept(&mut self, c: &Concept) {
        c.visit(&mut |d| match d {
            Concept::Name(n) => {
                self.concepts.insert(n.clone());
            }
            Concept::Nominal(a) => {
                self.individuals.insert(a.clone());
            }
            Concept::Exists(r, _) => self.add_role(r),
            _ => {}
        });
    }

    pub fn add_role(&mut self, r: &Role) {
        if let Some(n) = r.role_name() {
            self.roles.insert(n.to_string());
        }
    }

    pub fn add_ontology(&mut self, o: &Ontology) {
        for c in o.concepts() {
            self.add_concept(c);
        }
        for ri in &o.ris {
            self.add_role(&ri.lhs);
            self.add_role(&ri.rhs);
        }
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self.concepts.union(&other.concepts).cloned().collect(),
            roles: self.roles.union(&other.roles).cloned().collect(),
            individuals: self
                .individuals
                .union(&other.individuals)
                .cloned()
                .collect(),
        }
    }

    pub fn intersection(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self
                .concepts
                .intersection(&other.concepts)
                .cloned()
                .collect(),
            roles: self.roles.intersection(&other.roles).cloned().collect(),
            individuals: self
                .individuals
                .intersection(&other.individuals)
                .cloned()
                .collect(),
        }
    }

    pub fn difference(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self.concepts.difference(&other.concepts).cloned().collect(),
            roles: self.roles.difference(&other.roles).cloned().collect(),
            individuals: self
                .individuals
                .difference(&other.individuals)
                .cloned()
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Signature) -> bool {
        self.concepts.is_subset(&other.concepts)
            && self.roles.is_subset(&other.roles)
            && self.individuals.is_subset(&other.individuals)
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.roles.is_empty() && self.individuals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.concepts.len() + self.roles.len() + self.individuals.len()
    }

    /// Whether a role (ignoring direction) is over this signature. The
    /// universal role never is.
    pub fn has_role(&self, r: &Role) -> bool {
        r.role_name().is_some_and(|n| self.roles.contains(n))
    }

    pub fn contains_concept(&self, c: &Concept) -> bool {
        Signature::of_concept(c).is_subset(self)
    }
}

impl fmt::Display for Signature {
    /// Renders in the signature-file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words = self
            .concepts
            .iter()
            .map(|n| format!("C:{n}"))
            .chain(self.roles.iter().map(|n| format!("R:{n}")))
            .chain(self.individuals.iter().map(|n| format!("I:{n}")))
            .collect::<Vec<_>>();
        f.write_str(&words.join(" "))
    }
}

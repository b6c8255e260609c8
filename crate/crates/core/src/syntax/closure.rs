use std::collections::{BTreeSet, HashMap};

use super::concept::{Concept, Ontology};

/// Subconcepts of a set of inputs, closed under single negation, in
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiClosure {
    members: Vec<Concept>,
    index: HashMap<Concept, usize>,
    negation: Vec<usize>,
}

impl XiClosure {
    /// The closure of the given concepts.
    pub fn from_concepts<'a, I: IntoIterator<Item = &'a Concept>>(concepts: I) -> Self {
        let mut set = BTreeSet::new();
        for c in concepts {
            c.visit(&mut |d| {
                set.insert(d.clone());
            });
        }
        let negs: Vec<Concept> = set.iter().map(Concept::negate).collect();
        set.extend(negs);
        let members: Vec<Concept> = set.into_iter().collect();
        let index: HashMap<Concept, usize> = members
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let negation = members.iter().map(|c| index[&c.negate()]).collect();
        XiClosure {
            members,
            index,
            negation,
        }
    }

    /// The closure of `O1, O2, C1, C2`.
    pub fn new(o1: &Ontology, o2: &Ontology, c1: &Concept, c2: &Concept) -> Self {
        Self::from_concepts(o1.concepts().chain(o2.concepts()).chain([c1, c2]))
    }

    pub fn of(o: &Ontology, c: &Concept) -> Self {
        Self::from_concepts(o.concepts().chain([c]))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Concept] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Concept {
        &self.members[i]
    }

    pub fn id(&self, c: &Concept) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn contains(&self, c: &Concept) -> bool {
        self.index.contains_key(c)
    }

    /// Id of the single negation of member `i`.
    pub fn neg(&self, i: usize) -> usize {
        self.negation[i]
    }

    /// Canonical text, one member per line.
    pub fn serialize(&self) -> String {
        self.members.iter().map(|c| format!("{c}\n")).collect()
    }
}

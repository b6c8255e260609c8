use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Axiom, Concept, Ontology, Role, RoleBase};

/// A finite interpretation. Elements are indices into `domain`, which holds
/// their display names.
///
/// Concept and role names missing from the maps have empty extensions.
/// Individuals may be left uninterpreted; evaluating such a nominal fails.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub domain: Vec<String>,
    pub concepts: BTreeMap<String, BTreeSet<usize>>,
    pub roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub individuals: BTreeMap<String, usize>,
}

/// The JSON shape, with elements referenced by name.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InterpretationJson {
    pub domain: Vec<String>,
    #[serde(default)]
    pub concepts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub roles: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub individuals: BTreeMap<String, String>,
}

impl Interpretation {
    pub fn with_domain<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        Interpretation {
            domain: names.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == name)
    }

    pub fn add_concept(&mut self, a: &str, e: usize) {
        self.concepts.entry(a.to_string()).or_default().insert(e);
    }

    pub fn add_edge(&mut self, r: &str, from: usize, to: usize) {
        self.roles
            .entry(r.to_string())
            .or_default()
            .insert((from, to));
    }

    pub fn set_individual(&mut self, a: &str, e: usize) {
        self.individuals.insert(a.to_string(), e);
    }

    /// Pairs in the extension of a role; the universal role is total.
    pub fn role_pairs(&self, r: &Role) -> Vec<(usize, usize)> {
        match r.base() {
            RoleBase::Universal => {
                let n = self.len();
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect()
            }
            RoleBase::Name(name) => {
                let pairs = self.roles.get(name).into_iter().flatten().copied();
                if r.is_inverted() {
                    pairs.map(|(x, y)| (y, x)).collect()
                } else {
                    pairs.collect()
                }
            }
        }
    }

    /// Successor lists for a role, indexed by element.
    pub fn successors(&self, r: &Role) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (x, y) in self.role_pairs(r) {
            out[x].push(y);
        }
        out
    }

    /// Extension of `c` as a membership mask.
    pub fn eval_mask(&self, c: &Concept) -> Result<Vec<bool>> {
        let n = self.len();
        Ok(match c {
            Concept::Top => vec![true; n],
            Concept::Name(a) => {
                let ext = self.concepts.get(a);
                (0..n)
                    .map(|e| ext.is_some_and(|s| s.contains(&e)))
                    .collect()
            }
            Concept::Nominal(a) => {
                let e = *self
                    .individuals
                    .get(a)
                    .ok_or_else(|| Error::Uninterpreted(a.clone()))?;
                (0..n).map(|x| x == e).collect()
            }
            Concept::Not(d) => self.eval_mask(d)?.into_iter().map(|b| !b).collect(),
            Concept::And(a, b) => {
                let (a, b) = (self.eval_mask(a)?, self.eval_mask(b)?);
                a.into_iter().zip(b).map(|(x, y)| x && y).collect()
            }
            Concept::Exists(r, d) => {
                let inner = self.eval_mask(d)?;
                let mut out = vec![false; n];
                for (x, y) in self.role_pairs(r) {
                    if inner[y] {
                        out[x] = true;
                    }
                }
                out
            }
        })
    }

    /// `C^I` as a set of elements.
    pub fn eval(&self, c: &Concept) -> Result<BTreeSet<usize>> {
        Ok(self
            .eval_mask(c)?
            .into_iter()
            .enumerate()
            .filter(|(_, b)| *b)
            .map(|(i, _)| i)
            .collect())
    }

    /// Element names of `C^I`.
    pub fn eval_names(&self, c: &Concept) -> Result<BTreeSet<String>> {
        Ok(self
            .eval(c)?
            .into_iter()
            .map(|e| self.domain[e].clone())
            .collect())
    }

    pub fn satisfies(&self, ax: &Axiom) -> Result<bool> {
        Ok(match ax {
            Axiom::Concept(ci) => {
                let (l, r) = (self.eval_mask(&ci.lhs)?, self.eval_mask(&ci.rhs)?);
                l.iter().zip(&r).all(|(a, b)| !a || *b)
            }
            Axiom::Role(ri) => {
                let sup: BTreeSet<(usize, usize)> = self.role_pairs(&ri.rhs).into_iter().collect();
                self.role_pairs(&ri.lhs).iter().all(|p| sup.contains(p))
            }
        })
    }

    /// Whether every axiom holds, together with the failing axioms.
    pub fn is_model(&self, o: &Ontology) -> Result<(bool, Vec<Axiom>)> {
        let mut failing = Vec::new();
        for ax in o.axioms() {
            if !self.satisfies(&ax)? {
                failing.push(ax);
            }
        }
        Ok((failing.is_empty(), failing))
    }

    /// Restriction to a subset of the domain, preserving element order.
    /// Individuals mapped outside the subset become uninterpreted.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> (Interpretation, Vec<usize>) {
        let old: Vec<usize> = keep.iter().copied().collect();
        let new_of: HashMap<usize, usize> = old.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mut out = Interpretation::with_domain(old.iter().map(|&o| self.domain[o].clone()));
        for (a, ext) in &self.concepts {
            let s: BTreeSet<usize> = ext.iter().filter_map(|e| new_of.get(e).copied()).collect();
            out.concepts.insert(a.clone(), s);
        }
        for (r, ext) in &self.roles {
            let s = ext
                .iter()
                .filter_map(|(x, y)| Some((*new_of.get(x)?, *new_of.get(y)?)))
                .collect();
            out.roles.insert(r.clone(), s);
        }
        for (a, e) in &self.individuals {
            if let Some(&n) = new_of.get(e) {
                out.individuals.insert(a.clone(), n);
            }
        }
        (out, old)
    }

    pub fn to_json(&self) -> InterpretationJson {
        let name = |e: &usize| self.domain[*e].clone();
        InterpretationJson {
            domain: self.domain.clone(),
            concepts: self
                .concepts
                .iter()
                .map(|(a, s)| (a.clone(), s.iter().map(name).collect()))
                .collect(),
            roles: self
                .roles
                .iter()
                .map(|(r, s)| {
                    (
                        r.clone(),
                        s.iter().map(|(x, y)| (name(x), name(y))).collect(),
                    )
                })
                .collect(),
            individuals: self
                .individuals
                .iter()
                .map(|(a, e)| (a.clone(), name(e)))
                .collect(),
        }
    }

    pub fn from_json(j: &InterpretationJson) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, d) in j.domain.iter().enumerate() {
            if index.insert(d.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate domain element {d:?}")));
            }
        }
        let look = |d: &str| {
            index
                .get(d)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("element {d:?} is not in the domain")))
        };
        let mut out = Interpretation::with_domain(j.domain.iter().cloned());
        for (a, ext) in &j.concepts {
            let mut s = BTreeSet::new();
            for d in ext {
                s.insert(look(d)?);
            }
            out.concepts.insert(a.clone(), s);
        }
        for (r, ext) in &j.roles {
            let mut s = BTreeSet::new();
            for (x, y) in ext {
                s.insert((look(x)?, look(y)?));
            }
            out.roles.insert(r.clone(), s);
        }
        for (a, d) in &j.individuals {
            out.individuals.insert(a.clone(), look(d)?);
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: InterpretationJson =
            serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        Self::from_json(&j)
    }

    /// Graphviz rendering: nodes labelled with their concept names and
    /// individuals, one edge per role pair.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        for (e, d) in self.domain.iter().enumerate() {
            let mut label = vec![d.clone()];
            label.extend(
                self.individuals
                    .iter()
                    .filter(|(_, &x)| x == e)
                    .map(|(a, _)| format!("{{{a}}}")),
            );
            label.extend(
                self.concepts
                    .iter()
                    .filter(|(_, s)| s.contains(&e))
                    .map(|(a, _)| a.clone()),
            );
            let _ = writeln!(
                out,
                "  n{e} [label=\"{}\"];",
                label.join("\\n").replace('"', "'")
            );
        }
        for (r, pairs) in &self.roles {
            for (x, y) in pairs {
                let _ = writeln!(out, "  n{x} -> n{y} [label=\"{r}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

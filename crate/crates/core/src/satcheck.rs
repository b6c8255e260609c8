//! Concept satisfiability and entailment by type elimination, and the
//! realizability filter for types.

use std::collections::BTreeMap;

use crate::bits::BitSet;
use crate::coherence::{RoleHierarchy, TypeSpace, TypeTable, XiType, DEFAULT_ATOM_LIMIT};
use crate::error::Result;
use crate::semantics::Interpretation;
use crate::syntax::{check_dialect, Concept, Dialect, Ontology, XiClosure};

/// A set of types surviving elimination, together with the type chosen for
/// each nominal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSet {
    pub types: BitSet,
    pub nominals: BTreeMap<String, usize>,
}

#[derive(Clone, Copy)]
enum Goal {
    Type(usize),
    Member(usize),
}

/// Elimination state for one closure and one ontology.
pub(crate) struct Eliminator<'a> {
    space: &'a TypeSpace,
    pub(crate) table: TypeTable,
    witnesses: Vec<Vec<(usize, BitSet)>>,
    /// per nominal of the space, the types containing it
    nominal_types: Vec<BitSet>,
    /// u-literal signature of each type
    u_class: Vec<BitSet>,
}

impl<'a> Eliminator<'a> {
    pub(crate) fn new(space: &'a TypeSpace, o: &Ontology, limit: usize) -> Result<Self> {
        let h = RoleHierarchy::new(space, o);
        let table = prune(
            space,
            TypeTable::new(space, &h, space.propositional_types(o, limit)?),
        );
        let table = TypeTable::new(space, &h, table);
        let witnesses = table.witnesses(space);
        let n = table.len();
        let nominal_types = space
            .nominals()
            .iter()
            .map(|(_, m)| BitSet::from_iter(n, (0..n).filter(|&t| table.types[t].contains(*m))))
            .collect();
        let u = space.universal_role();
        let u_exists: Vec<usize> = space
            .exists()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.role == u)
            .map(|(k, _)| k)
            .collect();
        let u_class = table
            .types
            .iter()
            .map(|t| {
                BitSet::from_iter(
                    u_exists.len(),
                    u_exists
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| t.contains(space.exists()[k].member))
                        .map(|(j, _)| j),
                )
            })
            .collect();
        Ok(Eliminator {
            space,
            table,
            witnesses,
            nominal_types,
            u_class,
        })
    }

    /// Removes types with an unwitnessed existential until nothing changes.
    pub(crate) fn eliminate(&self, mut alive: BitSet) -> BitSet {
        loop {
            let dead: Vec<usize> = alive
                .iter()
                .filter(|&t| self.witnesses[t].iter().any(|(_, w)| !w.intersects(&alive)))
                .collect();
            if dead.is_empty() {
                return alive;
            }
            for t in dead {
                alive.remove(t);
            }
        }
    }

    /// The u-uniform classes: types sharing a u-literal signature, minus
    /// those containing a filler the signature denies.
    fn classes(&self) -> Vec<BitSet> {
        let n = self.table.len();
        let mut sigs: Vec<&BitSet> = self.u_class.iter().collect();
        sigs.sort();
        sigs.dedup();
        let u = self.space.universal_role();
        let u_exists: Vec<_> = self.space.exists().iter().filter(|e| e.role == u).collect();
        sigs.into_iter()
            .map(|sig| {
                BitSet::from_iter(
                    n,
                    (0..n).filter(|&t| {
                        &self.u_class[t] == sig
                            && u_exists.iter().enumerate().all(|(j, e)| {
                                sig.contains(j) || !self.table.types[t].contains(e.filler)
                            })
                    }),
                )
            })
            .collect()
    }

    fn goal_met(&self, alive: &BitSet, goal: Goal) -> bool {
        match goal {
            Goal::Type(t) => alive.contains(t),
            Goal::Member(m) => alive.iter().any(|t| self.table.types[t].contains(m)),
        }
    }

    /// Depth-first search over one type per nominal.
    fn search(
        &self,
        alive: BitSet,
        assigned: &mut Vec<Option<usize>>,
        goal: Goal,
    ) -> Option<TypeSet> {
        let alive = self.eliminate(alive);
        if !self.goal_met(&alive, goal) {
            return None;
        }
        for (k, a) in assigned.iter().enumerate() {
            match a {
                Some(t) if !alive.contains(*t) => return None,
                None if !self.nominal_types[k].intersects(&alive) => return None,
                _ => {}
            }
        }
        let Some(k) = assigned.iter().position(Option::is_none) else {
            let nominals = self
                .space
                .nominals()
                .iter()
                .zip(assigned.iter())
                .map(|((a, _), t)| (a.clone(), t.expect("assigned")))
                .collect();
            return Some(TypeSet {
                types: alive,
                nominals,
            });
        };
        let mut choices = self.nominal_types[k].clone();
        choices.intersect_with(&alive);
        for t in choices.iter() {
            let mut next = alive.clone();
            let saved = assigned.clone();
            for (j, nt) in self.nominal_types.iter().enumerate() {
                if nt.contains(t) {
                    assigned[j] = Some(t);
                    for other in nt.iter() {
                        if other != t {
                            next.remove(other);
                        }
                    }
                }
            }
            if let Some(found) = self.search(next, assigned, goal) {
                return Some(found);
            }
            *assigned = saved;
        }
        None
    }

    fn find(&self, goal: Goal) -> Option<TypeSet> {
        for class in self.classes() {
            let mut assigned = vec![None; self.nominal_types.len()];
            if let Some(found) = self.search(class, &mut assigned, goal) {
                return Some(found);
            }
        }
        None
    }

    /// Ids of the types realizable in some model.
    pub(crate) fn realizable(&self) -> BitSet {
        let n = self.table.len();
        let mut known = BitSet::new(n);
        for class in self.classes() {
            let mut candidates = self.eliminate(class.clone());
            loop {
                let Some(t) = candidates.iter().find(|&t| !known.contains(t)) else {
                    break;
                };
                let mut assigned = vec![None; self.nominal_types.len()];
                if let Some(found) = self.search(class.clone(), &mut assigned, Goal::Type(t)) {
                    known.union_with(&found.types);
                }
                candidates.remove(t);
            }
        }
        known
    }

    /// The model whose elements are the surviving types of `ts`.
    pub(crate) fn model(&self, ts: &TypeSet) -> Interpretation {
        let ids: Vec<usize> = ts.types.iter().collect();
        let mut m = Interpretation::with_domain(ids.iter().map(|t| format!("t{t}")));
        for (name, member) in self.space.names() {
            m.concepts.entry(name.clone()).or_default();
            for (k, &t) in ids.iter().enumerate() {
                if self.table.types[t].contains(*member) {
                    m.add_concept(name, k);
                }
            }
        }
        for (rid, role) in self.space.roles().iter().enumerate() {
            let (Some(name), false) = (role.role_name(), role.is_inverted()) else {
                continue;
            };
            m.roles.entry(name.to_string()).or_default();
            for (k, &t) in ids.iter().enumerate() {
                for (l, &t2) in ids.iter().enumerate() {
                    if self.table.coherent(t, t2, rid) {
                        m.add_edge(name, k, l);
                    }
                }
            }
        }
        for (a, t) in &ts.nominals {
            let k = ids
                .iter()
                .position(|x| x == t)
                .expect("nominal type survives");
            m.set_individual(a, k);
        }
        m
    }
}

/// Unconstrained elimination with cached witnesses: every search later
/// works inside the survivors, since further constraints only remove types.
fn prune(space: &TypeSpace, table: TypeTable) -> Vec<BitSet> {
    let n = table.len();
    let u = space.universal_role();
    let demands: Vec<Vec<usize>> = (0..n)
        .map(|t| {
            (0..space.exists().len())
                .filter(|&k| table.types[t].contains(space.exists()[k].member))
                .collect()
        })
        .collect();
    let mut alive = vec![true; n];
    let mut support: Vec<Vec<usize>> = demands.iter().map(|d| vec![0; d.len()]).collect();
    loop {
        let mut changed = false;
        for t in 0..n {
            if !alive[t] {
                continue;
            }
            for (j, &k) in demands[t].iter().enumerate() {
                let e = space.exists()[k];
                let ok = |t2: usize| {
                    alive[t2]
                        && table.types[t2].contains(e.filler)
                        && (e.role == u || table.coherent(t, t2, e.role))
                };
                let s = support[t][j];
                if ok(s) {
                    continue;
                }
                match (s + 1..n).chain(0..s).find(|&t2| ok(t2)) {
                    Some(t2) => support[t][j] = t2,
                    None => {
                        alive[t] = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    table
        .types
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(t, _)| t)
        .collect()
}

/// The types over `space` realizable in some model of `o`, in canonical order.
pub(crate) fn realizable_in(
    space: &TypeSpace,
    o: &Ontology,
    limit: usize,
) -> Result<Vec<crate::bits::BitSet>> {
    let e = Eliminator::new(space, o, limit)?;
    Ok(e.realizable()
        .iter()
        .map(|t| e.table.types[t].clone())
        .collect())
}

/// Whether `c` is satisfiable with respect to `o`.
pub fn satisfiable(c: &Concept, o: &Ontology, d: Dialect) -> Result<bool> {
    Ok(model_of(c, o, d)?.is_some())
}

/// A finite model of `o` in which `c` is non-empty, if one exists, together
/// with an element of `c`.
pub fn model_of(c: &Concept, o: &Ontology, d: Dialect) -> Result<Option<(Interpretation, usize)>> {
    model_of_with(c, o, d, DEFAULT_ATOM_LIMIT)
}

/// [`model_of`] with an explicit atom budget.
pub fn model_of_with(
    c: &Concept,
    o: &Ontology,
    d: Dialect,
    atom_limit: usize,
) -> Result<Option<(Interpretation, usize)>> {
    check_dialect(d, &[o], &[c])?;
    let space = TypeSpace::new(XiClosure::of(o, c), &[o]);
    let e = Eliminator::new(&space, o, atom_limit)?;
    let goal = space.member(c).expect("closure contains its input");
    Ok(e.find(Goal::Member(goal)).map(|ts| {
        let pos = ts
            .types
            .iter()
            .position(|t| e.table.types[t].contains(goal))
            .expect("goal met");
        (e.model(&ts), pos)
    }))
}

/// Whether `o ⊨ c ⊑ d`.
pub fn entails_ci(o: &Ontology, c: &Concept, d: &Concept, dialect: Dialect) -> Result<bool> {
    entails_ci_with(o, c, d, dialect, DEFAULT_ATOM_LIMIT)
}

/// [`entails_ci`] with an explicit atom budget.
pub fn entails_ci_with(
    o: &Ontology,
    c: &Concept,
    d: &Concept,
    dialect: Dialect,
    atom_limit: usize,
) -> Result<bool> {
    check_dialect(dialect, &[o], &[c, d])?;
    Ok(model_of_with(&c.clone().and(d.negate()), o, dialect, atom_limit)?.is_none())
}

/// The Ξ-types realizable in a model of `o`, in canonical order.
pub fn realizable_types(xi: &XiClosure, o: &Ontology, d: Dialect) -> Result<Vec<XiType>> {
    check_dialect(d, &[o], &[])?;
    let space = TypeSpace::new(xi.clone(), &[o]);
    let types = realizable_in(&space, o, DEFAULT_ATOM_LIMIT)?;
    Ok(types
        .into_iter()
        .enumerate()
        .map(|(id, members)| XiType { id, members })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{parse_concept, parse_ontology};

    fn c(s: &str) -> Concept {
        parse_concept(s).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let e = Ontology::new();
        assert!(satisfiable(&Concept::Top, &e, Dialect::ALCO).unwrap());
        assert!(!satisfiable(&c("A and not A"), &e, Dialect::ALCO).unwrap());
        assert!(entails_ci(&e, &c("A"), &c("A"), Dialect::ALCO).unwrap());
        assert!(!satisfiable(&c("exists r bot"), &e, Dialect::ALCO).unwrap());
    }

    #[test]
    fn o1_nominal_loop() {
        let o1 = parse_ontology(fixtures::O1).unwrap();
        let (m, x) = model_of(&c("{a} and exists r {a}"), &o1, Dialect::ALCO)
            .unwrap()
            .unwrap();
        assert!(m.is_model(&o1).unwrap().0);
        assert!(m.eval(&c("{a} and exists r {a}")).unwrap().contains(&x));
        assert!(!satisfiable(&c("{a} and not exists r {a}"), &o1, Dialect::ALCO).unwrap());
    }

    #[test]
    fn role_inclusions_propagate() {
        let o2 = parse_ontology(fixtures::O2).unwrap();
        assert!(entails_ci(
            &o2,
            &c("exists r top"),
            &c("exists r1 top and exists r2 top"),
            Dialect::ALCH
        )
        .unwrap());
        assert!(!entails_ci(&o2, &c("exists r1 top"), &c("exists r top"), Dialect::ALCH).unwrap());
    }

    #[test]
    fn inverse_reasoning() {
        let o = parse_ontology("A sub forall r B").unwrap();
        assert!(entails_ci(&o, &c("exists r- A"), &c("B"), Dialect::ALCIO).unwrap());
        assert!(!entails_ci(&o, &c("exists r A"), &c("B"), Dialect::ALCIO).unwrap());
    }

    #[test]
    fn universal_role() {
        let o = parse_ontology("A sub exists u B\nB sub C").unwrap();
        let d = Dialect::ALCO.with_universal();
        assert!(entails_ci(&o, &c("A"), &c("exists u C"), d).unwrap());
        assert!(!satisfiable(&c("A and forall u not C"), &o, d).unwrap());
        assert!(satisfiable(&c("not A and forall u not C"), &o, d).unwrap());
        let (m, _) = model_of(&c("A"), &o, d).unwrap().unwrap();
        assert!(m.is_model(&o).unwrap().0);
    }

    #[test]
    fn nominals_are_singletons() {
        let o = Ontology::new();
        assert!(!satisfiable(
            &c("exists r ({a} and B) and exists r ({a} and not B)"),
            &o,
            Dialect::ALCO
        )
        .unwrap());
        assert!(satisfiable(
            &c("exists r (C and B) and exists r (C and not B)"),
            &o,
            Dialect::ALCO
        )
        .unwrap());
        assert!(satisfiable(&c("{a} and {b}"), &o, Dialect::ALCO).unwrap());
    }

    #[test]
    fn spy_definition_is_equivalent() {
        let o = parse_ontology(fixtures::SPY).unwrap();
        let def = c(fixtures::SPY_DEFINITION);
        let d2 = Concept::nominal("d2");
        assert!(entails_ci(&o, &d2, &def, Dialect::ALCIO).unwrap());
        assert!(entails_ci(&o, &def, &d2, Dialect::ALCIO).unwrap());
    }

    #[test]
    fn realizability_filter() {
        let a = Concept::name("A");
        let xi = XiClosure::from_concepts([&a]);
        assert_eq!(
            realizable_types(&xi, &Ontology::new(), Dialect::ALCO)
                .unwrap()
                .len(),
            2
        );
        let o1 = parse_ontology(fixtures::O1).unwrap();
        let xi = XiClosure::of(&o1, &Concept::nominal("a"));
        let ts = realizable_types(&xi, &o1, Dialect::ALCO).unwrap();
        let (na, loop_) = (
            xi.id(&c("{a}")).unwrap(),
            xi.id(&c("exists r {a}")).unwrap(),
        );
        assert!(!ts.is_empty());
        assert!(ts.iter().all(|t| !(t.contains(na) && !t.contains(loop_))));
        for t in &ts {
            let conj = Concept::conjunction(t.concepts(&xi).cloned());
            assert!(satisfiable(&conj, &o1, Dialect::ALCO).unwrap());
        }
    }

    #[test]
    fn witness_models_are_models() {
        for (src, goal, d) in [
            (fixtures::O1, "not {a}", Dialect::ALCO),
            (fixtures::O2, "exists r top", Dialect::ALCH),
            (fixtures::SPY, "{d2}", Dialect::ALCIO),
            (fixtures::BETH, "{b} and B", Dialect::ALCO),
        ] {
            let o = parse_ontology(src).unwrap();
            let (m, x) = model_of(&c(goal), &o, d).unwrap().expect("satisfiable");
            let (ok, bad) = m.is_model(&o).unwrap();
            assert!(ok, "{src}: {bad:?}");
            assert!(m.eval(&c(goal)).unwrap().contains(&x));
        }
    }
}

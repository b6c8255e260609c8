//! Ξ-types, role-hierarchy entailment and coherence between types and
//! mosaics.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::syntax::{Concept, Ontology, Role, XiClosure};

/// Largest number of propositional atoms a closure may have before type
/// enumeration gives up.
pub const DEFAULT_ATOM_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Top,
    Atom(usize),
    Not(usize),
    And(usize, usize),
}

/// A positive existential member `∃r.C` of the closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exist {
    pub member: usize,
    pub role: usize,
    pub filler: usize,
}

/// The propositional skeleton of a closure: which members are atoms, how the
/// others are built from them, and the role universe of the existentials.
#[derive(Clone, Debug)]
pub struct TypeSpace {
    xi: XiClosure,
    nodes: Vec<Node>,
    order: Vec<usize>,
    atoms: Vec<usize>,
    exists: Vec<Exist>,
    roles: Vec<Role>,
    role_index: HashMap<Role, usize>,
    inverse: Vec<usize>,
    nominals: Vec<(String, usize)>,
    names: Vec<(String, usize)>,
}

impl TypeSpace {
    /// Builds the space for `xi`; the role universe also covers the role
    /// inclusions of `ontologies`. The universal role always gets the last id.
    pub fn new(xi: XiClosure, ontologies: &[&Ontology]) -> Self {
        let mut role_set: BTreeSet<Role> = BTreeSet::new();
        let mut add = |r: &Role| {
            if !r.is_universal() {
                role_set.insert(r.clone());
                role_set.insert(r.inverse());
            }
        };
        for c in xi.members() {
            if let Concept::Exists(r, _) = c {
                add(r);
            }
        }
        for o in ontologies {
            for ri in &o.ris {
                add(&ri.lhs);
                add(&ri.rhs);
            }
        }
        let mut roles: Vec<Role> = role_set.into_iter().collect();
        roles.push(Role::universal());
        let role_index: HashMap<Role, usize> = roles
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, r)| (r, i))
            .collect();
        let inverse = roles.iter().map(|r| role_index[&r.inverse()]).collect();

        let mut nodes = Vec::with_capacity(xi.len());
        let mut atoms = Vec::new();
        let mut exists = Vec::new();
        let mut nominals = Vec::new();
        let mut names = Vec::new();
        for (i, c) in xi.members().iter().enumerate() {
            let node = match c {
                Concept::Top => Node::Top,
                Concept::Not(d) => Node::Not(xi.id(d).expect("closed")),
                Concept::And(a, b) => {
                    Node::And(xi.id(a).expect("closed"), xi.id(b).expect("closed"))
                }
                Concept::Name(n) => {
                    names.push((n.clone(), i));
                    atoms.push(i);
                    Node::Atom(atoms.len() - 1)
                }
                Concept::Nominal(a) => {
                    nominals.push((a.clone(), i));
                    atoms.push(i);
                    Node::Atom(atoms.len() - 1)
                }
                Concept::Exists(r, d) => {
                    exists.push(Exist {
                        member: i,
                        role: role_index[r],
                        filler: xi.id(d).expect("closed"),
                    });
                    atoms.push(i);
                    Node::Atom(atoms.len() - 1)
                }
            };
            nodes.push(node);
        }
        let mut order: Vec<usize> = (0..xi.len()).collect();
        order.sort_by_key(|&i| (xi.get(i).size(), i));
        TypeSpace {
            xi,
            nodes,
            order,
            atoms,
            exists,
            roles,
            role_index,
            inverse,
            nominals,
            names,
        }
    }

    pub fn closure(&self) -> &XiClosure {
        &self.xi
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn exists(&self) -> &[Exist] {
        &self.exists
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn universal_role(&self) -> usize {
        self.roles.len() - 1
    }

    pub fn role_id(&self, r: &Role) -> Option<usize> {
        self.role_index.get(r).copied()
    }

    pub fn inverse_role(&self, r: usize) -> usize {
        self.inverse[r]
    }

    /// `(individual, member id)` for each nominal of the closure.
    pub fn nominals(&self) -> &[(String, usize)] {
        &self.nominals
    }

    /// `(concept name, member id)` for each concept name of the closure.
    pub fn names(&self) -> &[(String, usize)] {
        &self.names
    }

    pub fn member(&self, c: &Concept) -> Option<usize> {
        self.xi.id(c)
    }

    fn eval(&self, i: usize, atoms: &[bool]) -> bool {
        match self.nodes[i] {
            Node::Top => true,
            Node::Atom(k) => atoms[k],
            Node::Not(j) => !self.eval(j, atoms),
            Node::And(a, b) => self.eval(a, atoms) && self.eval(b, atoms),
        }
    }

    /// Extends an atom assignment to the full member set.
    pub fn saturate(&self, atoms: &[bool]) -> BitSet {
        let mut val = vec![false; self.len()];
        for &i in &self.order {
            val[i] = match self.nodes[i] {
                Node::Top => true,
                Node::Atom(k) => atoms[k],
                Node::Not(j) => !val[j],
                Node::And(a, b) => val[a] && val[b],
            };
        }
        BitSet::from_iter(
            self.len(),
            val.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i),
        )
    }

    /// All boolean-saturated member sets satisfying the concept inclusions
    /// of `o` locally, in canonical order.
    pub fn propositional_types(&self, o: &Ontology, limit: usize) -> Result<Vec<BitSet>> {
        if self.atoms.len() > limit {
            return Err(Error::Budget(format!(
                "{} propositional atoms over a closure of {} members exceed the limit of {limit}",
                self.atoms.len(),
                self.len()
            )));
        }
        // each inclusion is checked as soon as its last atom is assigned
        let mut checks: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.atoms.len() + 1];
        for ci in &o.cis {
            let (l, r) = match (self.xi.id(&ci.lhs), self.xi.id(&ci.rhs)) {
                (Some(l), Some(r)) => (l, r),
                _ => return Err(Error::Invalid("inclusion outside the closure".into())),
            };
            let last = self
                .last_atom(l)
                .max(self.last_atom(r))
                .map_or(0, |k| k + 1);
            checks[last].push((l, r));
        }
        let mut out = Vec::new();
        let mut assign = vec![false; self.atoms.len()];
        self.enumerate(0, &mut assign, &checks, &mut out);
        out.sort();
        Ok(out)
    }

    fn last_atom(&self, i: usize) -> Option<usize> {
        match self.nodes[i] {
            Node::Top => None,
            Node::Atom(k) => Some(k),
            Node::Not(j) => self.last_atom(j),
            Node::And(a, b) => self.last_atom(a).max(self.last_atom(b)),
        }
    }

    fn enumerate(
        &self,
        k: usize,
        assign: &mut Vec<bool>,
        checks: &[Vec<(usize, usize)>],
        out: &mut Vec<BitSet>,
    ) {
        if !checks[k]
            .iter()
            .all(|&(l, r)| !self.eval(l, assign) || self.eval(r, assign))
        {
            return;
        }
        if k == self.atoms.len() {
            out.push(self.saturate(assign));
            return;
        }
        for v in [false, true] {
            assign[k] = v;
            self.enumerate(k + 1, assign, checks, out);
        }
        assign[k] = false;
    }
}

/// The reflexive-transitive closure of the role inclusions of an ontology,
/// closed under inversion. The universal role is a super-role of every role.
#[derive(Clone, Debug)]
pub struct RoleHierarchy {
    sup: Vec<BitSet>,
}

impl RoleHierarchy {
    pub fn new(space: &TypeSpace, o: &Ontology) -> Self {
        let n = space.roles.len();
        let u = space.universal_role();
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for ri in &o.ris {
            if let (Some(a), Some(b)) = (space.role_id(&ri.lhs), space.role_id(&ri.rhs)) {
                edges[a].push(b);
                edges[space.inverse[a]].push(space.inverse[b]);
            }
        }
        let sup = (0..n)
            .map(|r| {
                let mut seen = BitSet::new(n);
                let mut stack = vec![r];
                seen.insert(r);
                while let Some(x) = stack.pop() {
                    for &y in &edges[x] {
                        if !seen.contains(y) {
                            seen.insert(y);
                            stack.push(y);
                        }
                    }
                }
                seen.insert(u);
                seen
            })
            .collect();
        RoleHierarchy { sup }
    }

    pub fn entails(&self, r: usize, s: usize) -> bool {
        self.sup[r].contains(s)
    }

    pub fn supers(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.sup[r].iter()
    }
}

/// Whether `O ⊨ r ⊑ s` for roles that are not universal.
pub fn role_entails(o: &Ontology, r: &Role, s: &Role) -> Result<bool> {
    if r.is_universal() || s.is_universal() {
        return Err(Error::Invalid(
            "role entailment is only defined for role names and inverses".into(),
        ));
    }
    if r == s {
        return Ok(true);
    }
    let space = TypeSpace::new(XiClosure::from_concepts(&[]), &[o]);
    let (Some(a), Some(b)) = (space.role_id(r), space.role_id(s)) else {
        return Ok(false);
    };
    Ok(RoleHierarchy::new(&space, o).entails(a, b))
}

/// A set of types over one closure with precomputed coherence data for one
/// role hierarchy.
///
/// For a type `t` and role `r`, `fwd[t][r]` collects the fillers `C` with
/// `¬∃s.C ∈ t` for some super-role `s` of `r`, and `bwd[t][r]` the fillers
/// with `¬∃s⁻.C ∈ t`. Then `t ⇝_r t′` iff `t′` avoids `fwd[t][r]` and `t`
/// avoids `bwd[t′][r]`.
#[derive(Clone, Debug)]
pub struct TypeTable {
    pub types: Vec<BitSet>,
    fwd: Vec<Vec<BitSet>>,
    bwd: Vec<Vec<BitSet>>,
    index: HashMap<BitSet, usize>,
}

impl TypeTable {
    pub fn new(space: &TypeSpace, h: &RoleHierarchy, types: Vec<BitSet>) -> Self {
        let nroles = space.roles.len();
        let mut fwd = Vec::with_capacity(types.len());
        let mut bwd = Vec::with_capacity(types.len());
        for t in &types {
            // fillers of negated existentials, per role
            let mut neg: Vec<BitSet> = vec![BitSet::new(space.len()); nroles];
            for e in &space.exists {
                if !t.contains(e.member) {
                    neg[e.role].insert(e.filler);
                }
            }
            let mut f = Vec::with_capacity(nroles);
            let mut b = Vec::with_capacity(nroles);
            for r in 0..nroles {
                let mut fr = BitSet::new(space.len());
                let mut br = BitSet::new(space.len());
                for s in h.supers(r) {
                    fr.union_with(&neg[s]);
                    br.union_with(&neg[space.inverse[s]]);
                }
                f.push(fr);
                b.push(br);
            }
            fwd.push(f);
            bwd.push(b);
        }
        let index = types
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        TypeTable {
            types,
            fwd,
            bwd,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn id(&self, t: &BitSet) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// `t ⇝_r t′`.
    #[inline]
    pub fn coherent(&self, t: usize, t2: usize, r: usize) -> bool {
        !self.fwd[t][r].intersects(&self.types[t2]) && !self.bwd[t2][r].intersects(&self.types[t])
    }

    /// For every type and every existential it contains, the set of types
    /// that can serve as its witness: they contain the filler and are
    /// coherent over the role (any type with the filler for `u`).
    pub fn witnesses(&self, space: &TypeSpace) -> Vec<Vec<(usize, BitSet)>> {
        let u = space.universal_role();
        let n = self.len();
        (0..n)
            .map(|t| {
                space
                    .exists
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| self.types[t].contains(e.member))
                    .map(|(k, e)| {
                        let w = BitSet::from_iter(
                            n,
                            (0..n).filter(|&t2| {
                                self.types[t2].contains(e.filler)
                                    && (e.role == u || self.coherent(t, t2, e.role))
                            }),
                        );
                        (k, w)
                    })
                    .collect()
            })
            .collect()
    }
}

/// A Ξ-type: a member set over a closure, with its position in a type list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XiType {
    pub id: usize,
    pub members: BitSet,
}

impl XiType {
    pub fn contains(&self, member: usize) -> bool {
        self.members.contains(member)
    }

    /// The member concepts, in closure order.
    pub fn concepts<'a>(&'a self, xi: &'a XiClosure) -> impl Iterator<Item = &'a Concept> {
        self.members.iter().map(|i| xi.get(i))
    }
}

/// A pair of sets of type ids, one per side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mosaic {
    pub t1: BTreeSet<usize>,
    pub t2: BTreeSet<usize>,
}

impl Mosaic {
    pub fn new<I: IntoIterator<Item = usize>, J: IntoIterator<Item = usize>>(t1: I, t2: J) -> Self {
        Mosaic {
            t1: t1.into_iter().collect(),
            t2: t2.into_iter().collect(),
        }
    }

    pub fn side(&self, i: usize) -> &BTreeSet<usize> {
        if i == 0 {
            &self.t1
        } else {
            &self.t2
        }
    }

    pub fn is_empty(&self) -> bool {
        self.t1.is_empty() && self.t2.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairMode {
    Forward,
    Full,
}

/// `m ⇝_s m′` (forward) or its two-sided strengthening (full). Types of side
/// `i` are looked up in `tables[i]`, whose hierarchy is that of `O_i`.
pub fn pair_coherent(
    m: &Mosaic,
    m2: &Mosaic,
    s: usize,
    tables: [&TypeTable; 2],
    mode: PairMode,
) -> bool {
    (0..2).all(|i| {
        let (a, b, tab) = (m.side(i), m2.side(i), tables[i]);
        let forth = a
            .iter()
            .all(|&t| b.iter().any(|&t2| tab.coherent(t, t2, s)));
        let back = mode == PairMode::Forward
            || b.iter()
                .all(|&t2| a.iter().any(|&t| tab.coherent(t, t2, s)));
        forth && back
    })
}

/// `t1 ⇝_{r,O} t2` for two member sets of the closure of `space`.
pub fn type_coherent(
    space: &TypeSpace,
    o: &Ontology,
    t1: &BitSet,
    t2: &BitSet,
    r: &Role,
) -> Result<bool> {
    let rid = space
        .role_id(r)
        .ok_or_else(|| Error::Invalid(format!("role {r} is not in the closure")))?;
    let table = TypeTable::new(
        space,
        &RoleHierarchy::new(space, o),
        vec![t1.clone(), t2.clone()],
    );
    Ok(table.coherent(0, 1, rid))
}

/// All Ξ-types: boolean-saturated member sets whose conjunction is
/// satisfiable in some interpretation.
pub fn candidate_types(xi: &XiClosure) -> Result<Vec<XiType>> {
    let empty = Ontology::new();
    let space = TypeSpace::new(xi.clone(), &[]);
    let types = crate::satcheck::realizable_in(&space, &empty, DEFAULT_ATOM_LIMIT)?;
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

    fn space_of(o: &Ontology, cs: &[&str]) -> TypeSpace {
        let cs: Vec<Concept> = cs.iter().map(|c| parse_concept(c).unwrap()).collect();
        TypeSpace::new(
            XiClosure::from_concepts(o.concepts().chain(cs.iter())),
            &[o],
        )
    }

    fn type_with(space: &TypeSpace, o: &Ontology, pos: &[&str], neg: &[&str]) -> BitSet {
        let types = space.propositional_types(o, 30).unwrap();
        let id = |c: &str| space.member(&parse_concept(c).unwrap()).unwrap();
        types
            .into_iter()
            .find(|t| {
                pos.iter().all(|c| t.contains(id(c))) && neg.iter().all(|c| !t.contains(id(c)))
            })
            .expect("type exists")
    }

    #[test]
    fn role_entailment() {
        let o2 = parse_ontology(fixtures::O2).unwrap();
        assert!(role_entails(&o2, &Role::name("r"), &Role::name("r1")).unwrap());
        assert!(!role_entails(&o2, &Role::name("r1"), &Role::name("r")).unwrap());
        assert!(role_entails(&Ontology::new(), &Role::name("q"), &Role::name("q")).unwrap());
        let o = parse_ontology("role r sub s\nrole s sub t").unwrap();
        assert!(role_entails(&o, &Role::name("r"), &Role::name("t")).unwrap());
        assert!(role_entails(&o, &Role::inverse_of("r"), &Role::inverse_of("t")).unwrap());
        assert!(!role_entails(&o, &Role::name("r"), &Role::inverse_of("t")).unwrap());
        assert!(role_entails(&o, &Role::universal(), &Role::name("t")).is_err());
    }

    #[test]
    fn propositional_types_of_small_closures() {
        let s = space_of(&Ontology::new(), &["A"]);
        assert_eq!(
            s.propositional_types(&Ontology::new(), 10).unwrap().len(),
            2
        );
        let s = space_of(&Ontology::new(), &["A", "B"]);
        assert_eq!(
            s.propositional_types(&Ontology::new(), 10).unwrap().len(),
            4
        );
        let o = parse_ontology("A sub B").unwrap();
        let s = space_of(&o, &[]);
        assert_eq!(s.propositional_types(&o, 10).unwrap().len(), 3);
    }

    #[test]
    fn types_are_boolean_saturated() {
        let o1 = parse_ontology(fixtures::O1).unwrap();
        let s = space_of(&o1, &["{a}"]);
        for t in s.propositional_types(&o1, 30).unwrap() {
            for i in 0..s.len() {
                assert_ne!(t.contains(i), t.contains(s.closure().neg(i)));
                if let Concept::And(a, b) = s.closure().get(i) {
                    let (a, b) = (s.member(a).unwrap(), s.member(b).unwrap());
                    assert_eq!(t.contains(i), t.contains(a) && t.contains(b));
                }
            }
        }
    }

    #[test]
    fn no_negated_existentials_means_coherent() {
        let o = Ontology::new();
        let s = space_of(&o, &["exists r A", "B"]);
        let t1 = type_with(&s, &o, &["exists r A"], &[]);
        for t2 in s.propositional_types(&o, 10).unwrap() {
            assert!(type_coherent(&s, &o, &t1, &t2, &Role::name("r")).unwrap());
        }
    }

    #[test]
    fn coherence_follows_the_hierarchy() {
        let o2 = parse_ontology(fixtures::O2).unwrap();
        let s = space_of(&o2, &["exists r1 A", "A"]);
        let t1 = type_with(
            &s,
            &o2,
            &[
                "exists r top",
                "exists r1 not A",
                "exists r2 A",
                "exists r2 not A",
            ],
            &["exists r1 A"],
        );
        let t2 = type_with(&s, &o2, &["A"], &[]);
        assert!(!type_coherent(&s, &o2, &t1, &t2, &Role::name("r")).unwrap());
        assert!(!type_coherent(&s, &o2, &t1, &t2, &Role::name("r1")).unwrap());
        assert!(type_coherent(&s, &Ontology::new(), &t1, &t2, &Role::name("r")).unwrap());
    }

    #[test]
    fn backward_coherence_with_inverses() {
        let o = Ontology::new();
        let s = space_of(&o, &["exists r- B", "B"]);
        let t1 = type_with(&s, &o, &["B", "exists r- B"], &[]);
        let t2 = type_with(&s, &o, &[], &["exists r- B", "B"]);
        assert!(!type_coherent(&s, &o, &t1, &t2, &Role::name("r")).unwrap());
        assert!(type_coherent(&s, &o, &t2, &t1, &Role::name("r")).unwrap());
    }

    #[test]
    fn pair_coherence_modes() {
        let o2 = parse_ontology(fixtures::O2).unwrap();
        let s = space_of(&o2, &["exists r1 A", "A"]);
        let types = s.propositional_types(&o2, 30).unwrap();
        let h = RoleHierarchy::new(&s, &o2);
        let tab = TypeTable::new(&s, &h, types.clone());
        let r1 = s.role_id(&Role::name("r1")).unwrap();
        let bad = tab.id(&type_with(&s, &o2, &[], &["exists r1 A"])).unwrap();
        let a = tab.id(&type_with(&s, &o2, &["A"], &[])).unwrap();
        let m = Mosaic::new([bad], []);
        let m2 = Mosaic::new([a], []);
        assert!(!pair_coherent(&m, &m2, r1, [&tab, &tab], PairMode::Forward));
        let empty = Mosaic::new([], []);
        assert!(pair_coherent(
            &empty,
            &m2,
            r1,
            [&tab, &tab],
            PairMode::Forward
        ));
        for x in 0..tab.len() {
            for y in 0..tab.len() {
                let (m, m2) = (Mosaic::new([x], [y]), Mosaic::new([y], [x]));
                if pair_coherent(&m, &m2, r1, [&tab, &tab], PairMode::Full) {
                    assert!(pair_coherent(&m, &m2, r1, [&tab, &tab], PairMode::Forward));
                }
            }
        }
    }

    #[test]
    fn candidate_types_of_small_closures() {
        let a = Concept::name("A");
        assert_eq!(
            candidate_types(&XiClosure::from_concepts([&a]))
                .unwrap()
                .len(),
            2
        );
        let b = Concept::name("B");
        assert_eq!(
            candidate_types(&XiClosure::from_concepts([&a, &b]))
                .unwrap()
                .len(),
            4
        );
    }

    #[test]
    fn co_denoting_nominals_are_candidates() {
        let (a, b) = (Concept::nominal("a"), Concept::nominal("b"));
        let xi = XiClosure::from_concepts([&a, &b]);
        let ts = candidate_types(&xi).unwrap();
        // {a,b}, {a,¬b}, {¬a,b}, {¬a,¬b}
        assert_eq!(ts.len(), 4);
        let both = Concept::nominal("a").and(Concept::nominal("b"));
        assert!(crate::satcheck::satisfiable(
            &both,
            &Ontology::new(),
            crate::syntax::Dialect::ALCO
        )
        .unwrap());
        // ∃r.{a} with {a} is fine, but ¬∃r.⊤ together with ∃r.{a} is not
        let c = parse_concept("exists r {a} and not exists r top").unwrap();
        let xi = XiClosure::from_concepts([&c]);
        let ts = candidate_types(&xi).unwrap();
        let id = xi.id(&c).unwrap();
        assert!(ts.iter().all(|t| !t.contains(id)));
    }
}

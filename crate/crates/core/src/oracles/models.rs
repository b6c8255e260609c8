//! Exhaustive search for pairs of small bisimilar models.
//!
//! Interpretations are enumerated over bitmasks with their own evaluator,
//! so the search shares no code with the type-based procedures. Pointed
//! models are bucketed by iterated Σ-colour refinement; a bucket shared by
//! both sides is confirmed with the bisimulation checker.

use std::collections::HashMap;

use super::{Meter, Search, SearchBudget, StopReason};
use crate::error::Result;
use crate::mosaic::Witness;
use crate::semantics::{largest_bisimulation, Interpretation};
use crate::syntax::{check_dialect, Concept, Dialect, Ontology, Role, RoleBase, Signature};

#[derive(Clone, Copy, Debug)]
enum RoleRef {
    Fwd(usize),
    Inv(usize),
    U,
}

#[derive(Debug)]
enum Expr {
    Top,
    Name(usize),
    Nom(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Exists(RoleRef, Box<Expr>),
}

/// A model with at most eight elements: name extensions, successor masks
/// per role and element, and the element of each individual.
#[derive(Clone, Debug)]
struct Small {
    n: usize,
    names: Vec<u8>,
    edges: Vec<Vec<u8>>,
    noms: Vec<u8>,
}

impl Small {
    fn full(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    fn role(&self, r: RoleRef) -> Vec<u8> {
        match r {
            RoleRef::Fwd(i) => self.edges[i].clone(),
            RoleRef::Inv(i) => {
                let mut t = vec![0u8; self.n];
                for x in 0..self.n {
                    for (y, row) in t.iter_mut().enumerate() {
                        if self.edges[i][x] >> y & 1 == 1 {
                            *row |= 1 << x;
                        }
                    }
                }
                t
            }
            RoleRef::U => vec![self.full(); self.n],
        }
    }

    fn eval(&self, e: &Expr) -> u8 {
        match e {
            Expr::Top => self.full(),
            Expr::Name(i) => self.names[*i],
            Expr::Nom(i) => 1 << self.noms[*i],
            Expr::Not(x) => !self.eval(x) & self.full(),
            Expr::And(a, b) => self.eval(a) & self.eval(b),
            Expr::Exists(RoleRef::U, x) => {
                if self.eval(x) != 0 {
                    self.full()
                } else {
                    0
                }
            }
            Expr::Exists(RoleRef::Fwd(r), x) => {
                let m = self.eval(x);
                (0..self.n)
                    .filter(|&v| self.edges[*r][v] & m != 0)
                    .fold(0, |acc, v| acc | 1 << v)
            }
            Expr::Exists(RoleRef::Inv(r), x) => {
                let m = self.eval(x);
                (0..self.n)
                    .filter(|&v| m >> v & 1 == 1)
                    .fold(0, |acc, v| acc | self.edges[*r][v])
            }
        }
    }

    fn to_interpretation(&self, v: &Vocab) -> Interpretation {
        let mut m = Interpretation::with_domain((0..self.n).map(|x| format!("e{x}")));
        for (i, a) in v.names.iter().enumerate() {
            m.concepts.entry(a.clone()).or_default();
            for x in 0..self.n {
                if self.names[i] >> x & 1 == 1 {
                    m.add_concept(a, x);
                }
            }
        }
        for (i, r) in v.roles.iter().enumerate() {
            m.roles.entry(r.clone()).or_default();
            for x in 0..self.n {
                for y in 0..self.n {
                    if self.edges[i][x] >> y & 1 == 1 {
                        m.add_edge(r, x, y);
                    }
                }
            }
        }
        for (i, a) in v.inds.iter().enumerate() {
            m.set_individual(a, self.noms[i] as usize);
        }
        m
    }
}

struct Vocab {
    names: Vec<String>,
    roles: Vec<String>,
    inds: Vec<String>,
}

impl Vocab {
    fn new(sig: &Signature) -> Self {
        Vocab {
            names: sig.concepts.iter().cloned().collect(),
            roles: sig.roles.iter().cloned().collect(),
            inds: sig.individuals.iter().cloned().collect(),
        }
    }

    fn pos(list: &[String], n: &str) -> usize {
        list.iter()
            .position(|x| x == n)
            .expect("symbol in vocabulary")
    }

    fn role(&self, r: &Role) -> RoleRef {
        match r.base() {
            RoleBase::Universal => RoleRef::U,
            RoleBase::Name(n) if r.is_inverted() => RoleRef::Inv(Self::pos(&self.roles, n)),
            RoleBase::Name(n) => RoleRef::Fwd(Self::pos(&self.roles, n)),
        }
    }

    fn compile(&self, c: &Concept) -> Expr {
        match c {
            Concept::Top => Expr::Top,
            Concept::Name(a) => Expr::Name(Self::pos(&self.names, a)),
            Concept::Nominal(a) => Expr::Nom(Self::pos(&self.inds, a)),
            Concept::Not(x) => Expr::Not(Box::new(self.compile(x))),
            Concept::And(a, b) => Expr::And(Box::new(self.compile(a)), Box::new(self.compile(b))),
            Concept::Exists(r, x) => Expr::Exists(self.role(r), Box::new(self.compile(x))),
        }
    }
}

/// One side of the search: its vocabulary, compiled axioms and goal, and
/// the positions of the signature symbols.
struct Side {
    vocab: Vocab,
    cis: Vec<(Expr, Expr)>,
    ris: Vec<(RoleRef, RoleRef)>,
    goal: Expr,
    sigma_names: Vec<usize>,
    sigma_roles: Vec<RoleRef>,
    sigma_inds: Vec<usize>,
}

impl Side {
    fn new(o: &Ontology, c: &Concept, sigma: &Signature, d: Dialect) -> Self {
        let vocab = Vocab::new(&Signature::of(o, c).union(sigma));
        let cis = o
            .cis
            .iter()
            .map(|ci| (vocab.compile(&ci.lhs), vocab.compile(&ci.rhs)))
            .collect();
        let ris = o
            .ris
            .iter()
            .map(|ri| (vocab.role(&ri.lhs), vocab.role(&ri.rhs)))
            .collect();
        let goal = vocab.compile(c);
        let sigma_names = sigma
            .concepts
            .iter()
            .map(|a| Vocab::pos(&vocab.names, a))
            .collect();
        let mut sigma_roles = Vec::new();
        for r in &sigma.roles {
            let i = Vocab::pos(&vocab.roles, r);
            sigma_roles.push(RoleRef::Fwd(i));
            if d.inverse {
                sigma_roles.push(RoleRef::Inv(i));
            }
        }
        if d.universal {
            sigma_roles.push(RoleRef::U);
        }
        let sigma_inds = if d.nominals {
            sigma
                .individuals
                .iter()
                .map(|a| Vocab::pos(&vocab.inds, a))
                .collect()
        } else {
            Vec::new()
        };
        Side {
            vocab,
            cis,
            ris,
            goal,
            sigma_names,
            sigma_roles,
            sigma_inds,
        }
    }

    fn is_model(&self, m: &Small) -> bool {
        let full = m.full();
        self.cis
            .iter()
            .all(|(l, r)| m.eval(l) & !m.eval(r) & full == 0)
            && self.ris.iter().all(|&(l, r)| {
                let (a, b) = (m.role(l), m.role(r));
                a.iter().zip(&b).all(|(x, y)| x & !y == 0)
            })
    }

    /// Label and nominal placements of an `n`-element domain, with elements
    /// sorted by their labels to break symmetry.
    fn labellings(&self, n: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
        let (k, j) = (self.vocab.names.len(), self.vocab.inds.len());
        let mut out = Vec::new();
        let nom_count = n.pow(j as u32);
        for code in 0..nom_count {
            let noms: Vec<u8> = (0..j).map(|i| (code / n.pow(i as u32) % n) as u8).collect();
            let nom_bits: Vec<u64> = (0..n)
                .map(|x| {
                    noms.iter()
                        .enumerate()
                        .filter(|(_, &e)| e as usize == x)
                        .fold(0, |a, (i, _)| a | 1 << i)
                })
                .collect();
            let mut labels = vec![0u64; n];
            loop {
                let keys: Vec<u64> = (0..n).map(|x| nom_bits[x] << k | labels[x]).collect();
                if keys.windows(2).all(|w| w[0] <= w[1]) {
                    let names = (0..k)
                        .map(|a| {
                            (0..n)
                                .filter(|&x| labels[x] >> a & 1 == 1)
                                .fold(0u8, |m, x| m | 1 << x)
                        })
                        .collect();
                    out.push((names, noms.clone()));
                }
                let mut x = 0;
                loop {
                    if x == n {
                        break;
                    }
                    labels[x] += 1;
                    if labels[x] < 1 << k {
                        break;
                    }
                    labels[x] = 0;
                    x += 1;
                }
                if x == n {
                    break;
                }
            }
        }
        out
    }

    fn cost(&self, n: usize) -> Option<u64> {
        let bits = self.vocab.roles.len() * n * n;
        if bits > 40 || self.vocab.names.len() * n > 24 {
            return None;
        }
        Some((self.labellings(n).len() as u64).saturating_mul(1 << bits))
    }

    /// Calls `f` on every model of the side's ontology with `n` elements.
    fn models(&self, n: usize, meter: &mut Meter, f: &mut dyn FnMut(&Small)) -> Option<StopReason> {
        let roles = self.vocab.roles.len();
        let bits = roles * n * n;
        for (names, noms) in self.labellings(n) {
            for code in 0u64..1 << bits {
                if let Some(r) = meter.tick() {
                    return Some(r);
                }
                let edges = (0..roles)
                    .map(|r| {
                        (0..n)
                            .map(|x| (code >> ((r * n + x) * n) & ((1 << n) - 1)) as u8)
                            .collect()
                    })
                    .collect();
                let m = Small {
                    n,
                    names: names.clone(),
                    edges,
                    noms: noms.clone(),
                };
                if self.is_model(&m) {
                    f(&m);
                }
            }
        }
        None
    }
}

/// Canonical colours of Σ-bisimilarity up to a fixed number of rounds,
/// shared by both sides.
struct Colours {
    ids: HashMap<Vec<u32>, u32>,
    rounds: usize,
}

impl Colours {
    fn intern(&mut self, key: Vec<u32>) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }

    fn of(&mut self, side: &Side, m: &Small) -> Vec<u32> {
        let mut col: Vec<u32> = (0..m.n)
            .map(|x| {
                let mut key = vec![0];
                key.extend(
                    side.sigma_names
                        .iter()
                        .map(|&a| u32::from(m.names[a] >> x & 1)),
                );
                key.extend(
                    side.sigma_inds
                        .iter()
                        .map(|&a| u32::from(m.noms[a] as usize == x)),
                );
                self.intern(key)
            })
            .collect();
        let rels: Vec<Vec<u8>> = side.sigma_roles.iter().map(|&r| m.role(r)).collect();
        for round in 1..=self.rounds {
            let next = (0..m.n)
                .map(|x| {
                    let mut key = vec![round as u32, col[x]];
                    for rel in &rels {
                        let mut succ: Vec<u32> = (0..m.n)
                            .filter(|&y| rel[x] >> y & 1 == 1)
                            .map(|y| col[y])
                            .collect();
                        succ.sort_unstable();
                        succ.dedup();
                        key.push(u32::MAX);
                        key.extend(succ);
                    }
                    self.intern(key)
                })
                .collect();
            col = next;
        }
        col
    }
}

/// Searches for models `I1` of `O1` and `I2` of `O2` with at most
/// `budget.max_domain` elements and points `d1 ∈ C1`, `d2 ∈ C2` linked by a
/// Σ-bisimulation.
pub fn bounded_joint_consistency(
    o1: &Ontology,
    c1: &Concept,
    o2: &Ontology,
    c2: &Concept,
    sigma: &Signature,
    d: Dialect,
    budget: &SearchBudget,
) -> Result<Search<Witness>> {
    budget.validate()?;
    check_dialect(d, &[o1, o2], &[c1, c2])?;
    let sides = [Side::new(o1, c1, sigma, d), Side::new(o2, c2, sigma, d)];
    let mut meter = Meter::new(budget);
    let mut colours = Colours {
        ids: HashMap::new(),
        rounds: 2 * budget.max_domain + 1,
    };
    let mut seen: [HashMap<u32, (Small, usize)>; 2] = [HashMap::new(), HashMap::new()];
    for n in 1..=budget.max_domain {
        let cost = sides
            .iter()
            .map(|s| s.cost(n))
            .try_fold(0u64, |acc, c| c.map(|c| acc.saturating_add(c)));
        match cost {
            Some(c) if c <= meter.remaining() => {}
            _ => return Ok(meter.exhausted(StopReason::Candidates, n - 1)),
        }
        for (i, side) in sides.iter().enumerate() {
            let mut found = Vec::new();
            let stop = side.models(n, &mut meter, &mut |m| {
                let goal = m.eval(&side.goal);
                if goal == 0 {
                    return;
                }
                let col = colours.of(side, m);
                for x in (0..m.n).filter(|&x| goal >> x & 1 == 1) {
                    found.push((col[x], m.clone(), x));
                }
            });
            for (c, m, x) in found {
                seen[i].entry(c).or_insert((m, x));
            }
            if let Some(r) = stop {
                return Ok(meter.exhausted(r, n - 1));
            }
        }
        let mut shared: Vec<u32> = seen[0]
            .keys()
            .filter(|c| seen[1].contains_key(c))
            .copied()
            .collect();
        shared.sort_unstable();
        for c in shared {
            let (m1, x1) = &seen[0][&c];
            let (m2, x2) = &seen[1][&c];
            let (i1, i2) = (
                m1.to_interpretation(&sides[0].vocab),
                m2.to_interpretation(&sides[1].vocab),
            );
            let z = largest_bisimulation(&i1, &i2, sigma, d);
            if z.contains(*x1, *x2) {
                let w = Witness {
                    i1,
                    d1: *x1,
                    i2,
                    d2: *x2,
                    relation: z.pairs,
                };
                return Ok(Search::Found {
                    result: w,
                    candidates: meter.candidates,
                });
            }
        }
    }
    Ok(meter.exhausted(StopReason::Bounds, budget.max_domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::O1;
    use crate::syntax::{parse_concept, parse_ontology, parse_signature};

    fn run(
        o1: &str,
        c1: &str,
        o2: &str,
        c2: &str,
        sigma: &str,
        d: Dialect,
        max_domain: usize,
    ) -> Search<Witness> {
        let budget = SearchBudget {
            max_domain,
            ..SearchBudget::default()
        };
        bounded_joint_consistency(
            &parse_ontology(o1).unwrap(),
            &parse_concept(c1).unwrap(),
            &parse_ontology(o2).unwrap(),
            &parse_concept(c2).unwrap(),
            &parse_signature(sigma).unwrap(),
            d,
            &budget,
        )
        .unwrap()
    }

    #[test]
    fn finds_the_two_element_o1_witness() {
        let s = run(O1, "{a}", O1, "not {a}", "R:r C:A", Dialect::ALCO, 2);
        let w = s.found().expect("witness");
        assert!(w.i1.len() <= 2 && w.i2.len() <= 2);
        let o = parse_ontology(O1).unwrap();
        assert!(w.i1.is_model(&o).unwrap().0 && w.i2.is_model(&o).unwrap().0);
        assert!(w
            .i1
            .eval(&parse_concept("{a}").unwrap())
            .unwrap()
            .contains(&w.d1));
        assert!(!w
            .i2
            .eval(&parse_concept("{a}").unwrap())
            .unwrap()
            .contains(&w.d2));
        assert!(w.relation.contains(&(w.d1, w.d2)));
    }

    #[test]
    fn bottom_exhausts() {
        let s = run("", "bot", "", "top", "", Dialect::ALCO, 3);
        assert!(
            matches!(s, Search::Exhausted(e) if e.reason == StopReason::Bounds && e.complete_to == 3)
        );
    }

    #[test]
    fn shared_names_cannot_disagree() {
        assert!(!run("", "A", "", "not A", "C:A", Dialect::ALCO, 3).is_found());
        assert!(run("", "A", "", "not A", "", Dialect::ALCO, 1).is_found());
    }

    #[test]
    fn universal_role_needs_total_relation() {
        let s = run(
            "",
            "A",
            "",
            "exists r B",
            "C:B R:r",
            Dialect::ALCO.with_universal(),
            2,
        );
        assert!(s.is_found());
        let s = run(
            "",
            "B and not exists u not B",
            "",
            "not B",
            "C:B",
            Dialect::ALCO.with_universal(),
            3,
        );
        assert!(!s.is_found());
    }

    #[test]
    fn candidate_budget_is_reported() {
        let budget = SearchBudget {
            max_candidates: 10,
            ..SearchBudget::default()
        };
        let o = parse_ontology(O1).unwrap();
        let s = bounded_joint_consistency(
            &o,
            &parse_concept("{a}").unwrap(),
            &o,
            &parse_concept("not {a}").unwrap(),
            &parse_signature("R:r C:A").unwrap(),
            Dialect::ALCO,
            &budget,
        )
        .unwrap();
        assert!(matches!(s, Search::Exhausted(e) if e.reason == StopReason::Candidates));
    }
}

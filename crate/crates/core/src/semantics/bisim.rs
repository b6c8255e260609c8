use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::interp::Interpretation;
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::syntax::{Dialect, Role, Signature};

/// A relation between the domains of two interpretations, together with the
/// signature and dialect it is meant to be a bisimulation for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(usize, usize)>,
    pub signature: Signature,
    pub dialect: Dialect,
}

impl BisimRelation {
    pub fn contains(&self, d: usize, e: usize) -> bool {
        self.pairs.contains(&(d, e))
    }

    pub fn is_subset(&self, other: &BisimRelation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

/// The roles whose edges a bisimulation must match: role names of the
/// signature, and their inverses in dialects with inverse roles.
fn matched_roles(sig: &Signature, d: Dialect) -> Vec<Role> {
    let mut out = Vec::new();
    for r in &sig.roles {
        out.push(Role::name(r.clone()));
        if d.inverse {
            out.push(Role::inverse_of(r.clone()));
        }
    }
    out
}

fn atoms_agree(
    i: &Interpretation,
    x: usize,
    j: &Interpretation,
    y: usize,
    sig: &Signature,
    d: Dialect,
) -> bool {
    let concept_ok = sig.concepts.iter().all(|a| {
        i.concepts.get(a).is_some_and(|s| s.contains(&x))
            == j.concepts.get(a).is_some_and(|s| s.contains(&y))
    });
    let nominal_ok = !d.nominals
        || sig
            .individuals
            .iter()
            .all(|a| (i.individuals.get(a) == Some(&x)) == (j.individuals.get(a) == Some(&y)));
    concept_ok && nominal_ok
}

/// The largest relation between `i` and `j` satisfying the atomic, forth and
/// back conditions of `d` over `sig`.
///
/// Computed by partition refinement on the disjoint union: elements start
/// coloured by their Σ-atoms and are split by the colours of their
/// successors until stable; related pairs are the cross pairs sharing a
/// colour. With the universal role the relation must also be total on both
/// sides; when it is not, no bisimulation exists and the result is empty.
/// Role inclusions play no part.
pub fn largest_bisimulation(
    i: &Interpretation,
    j: &Interpretation,
    sig: &Signature,
    d: Dialect,
) -> BisimRelation {
    let (n, m) = (i.len(), j.len());
    let roles = matched_roles(sig, d);
    let succ: Vec<Vec<Vec<usize>>> = roles
        .iter()
        .map(|r| {
            let mut s = i.successors(r);
            s.extend(
                j.successors(r)
                    .into_iter()
                    .map(|ys| ys.into_iter().map(|y| y + n).collect()),
            );
            s
        })
        .collect();
    let atoms = |x: usize| -> (Vec<bool>, Vec<bool>) {
        let (k, e) = if x < n { (i, x) } else { (j, x - n) };
        let c = sig
            .concepts
            .iter()
            .map(|a| k.concepts.get(a).is_some_and(|s| s.contains(&e)))
            .collect();
        let o = if d.nominals {
            sig.individuals
                .iter()
                .map(|a| k.individuals.get(a) == Some(&e))
                .collect()
        } else {
            Vec::new()
        };
        (c, o)
    };
    let mut colour = intern((0..n + m).map(atoms));
    let mut classes = colour.iter().collect::<BTreeSet<_>>().len();
    loop {
        let next = intern((0..n + m).map(|x| {
            let outs: Vec<Vec<usize>> = succ
                .iter()
                .map(|sk| {
                    sk[x]
                        .iter()
                        .map(|&y| colour[y])
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect()
                })
                .collect();
            (colour[x], outs)
        }));
        let count = next.iter().collect::<BTreeSet<_>>().len();
        colour = next;
        if count == classes {
            break;
        }
        classes = count;
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for x in 0..n {
        for y in 0..m {
            if colour[x] == colour[n + y] {
                pairs.insert((x, y));
            }
        }
    }
    if d.universal {
        let dom: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
        let ran: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
        if dom.len() != n || ran.len() != m {
            pairs.clear();
        }
    }
    BisimRelation {
        pairs,
        signature: sig.clone(),
        dialect: d,
    }
}

/// Dense ids for the distinct keys, in order of first appearance.
fn intern<K: Ord>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut ids = std::collections::BTreeMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

/// Whether `pairs` itself satisfies every bisimulation condition.
pub fn is_bisimulation(
    i: &Interpretation,
    j: &Interpretation,
    pairs: &BTreeSet<(usize, usize)>,
    sig: &Signature,
    d: Dialect,
) -> bool {
    if pairs
        .iter()
        .any(|&(x, y)| x >= i.len() || y >= j.len() || !atoms_agree(i, x, j, y, sig, d))
    {
        return false;
    }
    let mut fwd = vec![BitSet::new(j.len()); i.len()];
    let mut bwd = vec![BitSet::new(i.len()); j.len()];
    for &(x, y) in pairs {
        fwd[x].insert(y);
        bwd[y].insert(x);
    }
    for r in matched_roles(sig, d) {
        let (si, sj) = (i.successors(&r), j.successors(&r));
        let si_set: Vec<BitSet> = si
            .iter()
            .map(|xs| BitSet::from_iter(i.len(), xs.iter().copied()))
            .collect();
        let sj_set: Vec<BitSet> = sj
            .iter()
            .map(|ys| BitSet::from_iter(j.len(), ys.iter().copied()))
            .collect();
        for &(x, y) in pairs {
            let forth = si[x].iter().all(|&x2| fwd[x2].intersects(&sj_set[y]));
            let back = sj[y].iter().all(|&y2| bwd[y2].intersects(&si_set[x]));
            if !forth || !back {
                return false;
            }
        }
    }
    if d.universal {
        let dom: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
        let ran: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
        if dom.len() != i.len() || ran.len() != j.len() {
            return false;
        }
    }
    true
}

/// The subinterpretation generated by `d`: the smallest set containing `d`
/// and closed under outgoing edges of role names in `sig`. Returns the
/// restriction and the position of `d` in it.
pub fn generated_sub(
    i: &Interpretation,
    d: usize,
    sig: &Signature,
) -> (Interpretation, usize, Vec<usize>) {
    let mut seen = BTreeSet::from([d]);
    let mut queue = VecDeque::from([d]);
    let succ: Vec<Vec<Vec<usize>>> = sig
        .roles
        .iter()
        .map(|r| i.successors(&Role::name(r.clone())))
        .collect();
    while let Some(x) = queue.pop_front() {
        for s in &succ {
            for &y in &s[x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    let (sub, old) = i.restrict(&seen);
    let pos = old.iter().position(|&o| o == d).expect("generator is kept");
    (sub, pos, old)
}

/// The product structure over the pairs of a bisimulation, with the two
/// projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub interpretation: Interpretation,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Builds the bisimulation product induced by `s`: the domain is the set of
/// pairs in `s`, signature concept and role names are interpreted as in the
/// cartesian product, and a signature individual `a` denotes `(a^I1, a^I2)`
/// when that pair is in `s`.
pub fn bisimulation_product(
    i1: &Interpretation,
    i2: &Interpretation,
    s: &BisimRelation,
) -> Result<Product> {
    if !is_bisimulation(i1, i2, &s.pairs, &s.signature, s.dialect) {
        return Err(Error::Invalid("relation is not a bisimulation".into()));
    }
    let pairs: Vec<(usize, usize)> = s.pairs.iter().copied().collect();
    let mut out = Interpretation::with_domain(
        pairs
            .iter()
            .map(|&(x, y)| format!("({},{})", i1.domain[x], i2.domain[y])),
    );
    for a in &s.signature.concepts {
        let (e1, e2) = (i1.concepts.get(a), i2.concepts.get(a));
        let ext = pairs
            .iter()
            .enumerate()
            .filter(|(_, (x, y))| {
                e1.is_some_and(|e| e.contains(x)) && e2.is_some_and(|e| e.contains(y))
            })
            .map(|(k, _)| k)
            .collect();
        out.concepts.insert(a.clone(), ext);
    }
    for r in &s.signature.roles {
        let (r1, r2) = (i1.roles.get(r), i2.roles.get(r));
        let mut ext = BTreeSet::new();
        for (k, &(x, y)) in pairs.iter().enumerate() {
            for (l, &(x2, y2)) in pairs.iter().enumerate() {
                if r1.is_some_and(|e| e.contains(&(x, x2)))
                    && r2.is_some_and(|e| e.contains(&(y, y2)))
                {
                    ext.insert((k, l));
                }
            }
        }
        out.roles.insert(r.clone(), ext);
    }
    for a in &s.signature.individuals {
        if let (Some(&x), Some(&y)) = (i1.individuals.get(a), i2.individuals.get(a)) {
            if let Some(k) = pairs.iter().position(|&p| p == (x, y)) {
                out.individuals.insert(a.clone(), k);
            }
        }
    }
    Ok(Product {
        interpretation: out,
        left: pairs.iter().map(|p| p.0).collect(),
        right: pairs.iter().map(|p| p.1).collect(),
    })
}

impl Product {
    /// The projection onto one factor as a relation.
    pub fn projection(&self, left: bool) -> BTreeSet<(usize, usize)> {
        let f = if left { &self.left } else { &self.right };
        f.iter().enumerate().map(|(k, &x)| (k, x)).collect()
    }
}

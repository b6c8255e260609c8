//! Distinguishing concepts of bounded depth between two pointed models.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::semantics::Interpretation;
use crate::syntax::{Concept, Dialect, Role, Signature};

/// A Σ-concept of role depth at most `max_depth` true at `d1` in `i1` and
/// false at `d2` in `i2`, if one exists.
///
/// The definable sets of depth `k` over the disjoint union form a Boolean
/// algebra; its atoms are computed by `k` rounds of refinement, each atom
/// carrying a describing concept. The points are separated iff they fall in
/// different atoms, and the description of `d1`'s atom is then checked by
/// evaluation.
pub fn distinguishing_concept(
    i1: &Interpretation,
    d1: usize,
    i2: &Interpretation,
    d2: usize,
    sigma: &Signature,
    d: Dialect,
    max_depth: usize,
) -> Result<Option<Concept>> {
    let models = [i1, i2];
    let elems: Vec<(usize, usize)> = (0..2)
        .flat_map(|s| (0..models[s].len()).map(move |x| (s, x)))
        .collect();
    let target = (
        elems.iter().position(|&e| e == (0, d1)),
        elems.iter().position(|&e| e == (1, d2)),
    );
    let (Some(p1), Some(p2)) = target else {
        return Ok(None);
    };

    let mut atoms: Vec<Concept> = sigma.concepts.iter().map(Concept::name).collect();
    if d.nominals {
        atoms.extend(
            sigma
                .individuals
                .iter()
                .filter(|a| i1.individuals.contains_key(*a))
                .map(Concept::nominal),
        );
    }
    let mut roles = Vec::new();
    for r in &sigma.roles {
        roles.push(Role::name(r));
        if d.inverse {
            roles.push(Role::inverse_of(r));
        }
    }
    if d.universal {
        roles.push(Role::universal());
    }
    let succ: Vec<[Vec<Vec<usize>>; 2]> = roles
        .iter()
        .map(|r| [i1.successors(r), i2.successors(r)])
        .collect();

    let masks: Vec<[Vec<bool>; 2]> = atoms
        .iter()
        .map(|a| Ok([i1.eval_mask(a)?, i2.eval_mask(a)?]))
        .collect::<Result<_>>()?;
    let gens: Vec<(Concept, Vec<bool>)> = atoms
        .iter()
        .zip(&masks)
        .map(|(a, m)| (a.clone(), elems.iter().map(|&(s, x)| m[s][x]).collect()))
        .collect();
    let (mut class, mut desc) = split(&elems, &vec![0; elems.len()], &[Concept::Top], &gens);

    for _ in 0..=max_depth {
        if class[p1] != class[p2] {
            let c = desc[class[p1]].clone();
            let ok = i1.eval_mask(&c)?[d1] && !i2.eval_mask(&c)?[d2];
            return Ok(ok.then_some(c));
        }
        let mut gens = Vec::new();
        for (k, dk) in desc.iter().enumerate() {
            for (r, s) in roles.iter().zip(&succ) {
                let member = elems
                    .iter()
                    .map(|&(side, x)| {
                        s[side][x].iter().any(|&y| {
                            class[elems.iter().position(|&e| e == (side, y)).expect("element")] == k
                        })
                    })
                    .collect();
                gens.push((Concept::exists(r.clone(), dk.clone()), member));
            }
        }
        let (next, next_desc) = split(&elems, &class, &desc, &gens);
        if next_desc.len() == desc.len() {
            return Ok(None);
        }
        class = next;
        desc = next_desc;
    }
    Ok(None)
}

/// Refines `class` by the generators, describing each new class by its old
/// description and the generator literals that vary inside the old class.
fn split(
    elems: &[(usize, usize)],
    class: &[usize],
    desc: &[Concept],
    gens: &[(Concept, Vec<bool>)],
) -> (Vec<usize>, Vec<Concept>) {
    let varying: Vec<Vec<usize>> = (0..desc.len())
        .map(|k| {
            (0..gens.len())
                .filter(|&g| {
                    let mut vals = (0..elems.len())
                        .filter(|&x| class[x] == k)
                        .map(|x| gens[g].1[x]);
                    let first = vals.next();
                    vals.any(|v| Some(v) != first)
                })
                .collect()
        })
        .collect();
    let mut ids: BTreeMap<(usize, Vec<bool>), usize> = BTreeMap::new();
    let mut out_desc = Vec::new();
    let mut out = Vec::with_capacity(elems.len());
    for (x, &k) in class.iter().enumerate().take(elems.len()) {
        let key: Vec<bool> = varying[k].iter().map(|&g| gens[g].1[x]).collect();
        let next_id = ids.len();
        let id = *ids.entry((k, key.clone())).or_insert_with(|| {
            let mut c = desc[k].clone();
            for (&g, &v) in varying[k].iter().zip(&key) {
                let lit = if v {
                    gens[g].0.clone()
                } else {
                    gens[g].0.negate()
                };
                c = if c == Concept::Top { lit } else { c.and(lit) };
            }
            out_desc.push(c);
            next_id
        });
        out.push(id);
    }
    (out, out_desc)
}

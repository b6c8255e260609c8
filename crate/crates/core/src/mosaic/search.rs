use std::collections::{BTreeSet, HashMap};

use super::engine::{Demand, Engine};
use super::pairs::PairRelation;
use super::Event;
use crate::bits::BitSet;
use crate::coherence::{Mosaic, PairMode};
use crate::error::{Error, Result};

fn to_mosaic(rel: &PairRelation, clique: &[usize]) -> Mosaic {
    Mosaic::new(
        clique
            .iter()
            .filter(|&&v| rel.side(v) == 0)
            .map(|&v| rel.ty(v)),
        clique
            .iter()
            .filter(|&&v| rel.side(v) == 1)
            .map(|&v| rel.ty(v)),
    )
}

fn admissible(m: &Mosaic, universal: bool) -> bool {
    !m.is_empty() && (!universal || (!m.t1.is_empty() && !m.t2.is_empty()))
}

fn neighbours(rel: &PairRelation, v: usize) -> BitSet {
    let mut n = rel.rows[v].clone();
    n.remove(v);
    n
}

fn live(rel: &PairRelation) -> BitSet {
    BitSet::from_iter(rel.len(), (0..rel.len()).filter(|&v| rel.alive(v)))
}

/// Maximal cliques of the compatibility relation, as mosaics.
pub(crate) fn maximal_cliques(
    rel: &PairRelation,
    universal: bool,
    budget: usize,
) -> Result<Vec<Mosaic>> {
    let mut out = BTreeSet::new();
    let mut r = Vec::new();
    bron_kerbosch(
        rel,
        &mut r,
        live(rel),
        BitSet::new(rel.len()),
        &mut out,
        budget,
    )?;
    Ok(out
        .into_iter()
        .filter(|m| admissible(m, universal))
        .collect())
}

fn bron_kerbosch(
    rel: &PairRelation,
    r: &mut Vec<usize>,
    mut p: BitSet,
    mut x: BitSet,
    out: &mut BTreeSet<Mosaic>,
    budget: usize,
) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.insert(to_mosaic(rel, r));
            if out.len() > budget {
                return Err(Error::Budget(format!("more than {budget} maximal cliques")));
            }
        }
        return Ok(());
    }
    let mut px = p.clone();
    px.union_with(&x);
    let pivot = px.iter().max_by_key(|&u| {
        let mut c = neighbours(rel, u);
        c.intersect_with(&p);
        c.count()
    });
    let pivot_n = pivot.map(|u| neighbours(rel, u)).unwrap_or_default();
    let cands: Vec<usize> = p.iter().filter(|&v| !pivot_n.contains(v)).collect();
    for v in cands {
        let nv = neighbours(rel, v);
        let mut p2 = p.clone();
        p2.intersect_with(&nv);
        let mut x2 = x.clone();
        x2.intersect_with(&nv);
        r.push(v);
        bron_kerbosch(rel, r, p2, x2, out, budget)?;
        r.pop();
        p.remove(v);
        x.insert(v);
    }
    Ok(())
}

/// Every clique of the compatibility relation, as mosaics.
pub(crate) fn all_cliques(
    rel: &PairRelation,
    universal: bool,
    budget: usize,
) -> Result<Vec<Mosaic>> {
    let mut out = Vec::new();
    let mut r = Vec::new();
    extend(rel, &mut r, live(rel), &mut out, universal, budget)?;
    out.sort();
    Ok(out)
}

fn extend(
    rel: &PairRelation,
    r: &mut Vec<usize>,
    cands: BitSet,
    out: &mut Vec<Mosaic>,
    universal: bool,
    budget: usize,
) -> Result<()> {
    for v in cands.iter() {
        r.push(v);
        let m = to_mosaic(rel, r);
        if admissible(&m, universal) {
            out.push(m);
            if out.len() > budget {
                return Err(Error::Budget(format!(
                    "more than {budget} candidate mosaics in one universe"
                )));
            }
        }
        let mut next = neighbours(rel, v);
        next.intersect_with(&cands);
        let higher = BitSet::from_iter(rel.len(), next.iter().filter(|&w| w > v));
        extend(rel, r, higher, out, universal, budget)?;
        r.pop();
    }
    Ok(())
}

/// Largest universe for which step targets are computed as bitsets over
/// the universe rather than checked one mosaic at a time.
const INDEX_LIMIT: usize = 1 << 14;
/// Candidates checked one by one before step targets are computed.
const DIRECT_CHECKS: usize = 16;

/// Demand lookups over one universe: which mosaics hold a witness type of a
/// demand, and the last mosaic found to serve it.
struct Scan<'a> {
    e: &'a Engine,
    sides: Vec<[BitSet; 2]>,
    /// per side and type: the mosaics holding it
    holders: [Vec<BitSet>; 2],
    candidates: HashMap<(usize, usize, usize), BitSet>,
    support: HashMap<(usize, usize, usize, usize), usize>,
    /// per side, signature role and type `t`: the mosaics holding an
    /// `s`-successor of `t`
    hits: HashMap<(usize, usize, usize), BitSet>,
    /// step targets of one mosaic, per side and role of the demand
    targets: (usize, HashMap<(usize, usize), BitSet>),
}

impl<'a> Scan<'a> {
    fn new(e: &'a Engine, universe: &[Mosaic]) -> Self {
        let n = universe.len();
        let holders = [0, 1].map(|i| {
            let mut h = vec![BitSet::new(n); e.tables[i].len()];
            for (q, m) in universe.iter().enumerate() {
                for &t in m.side(i) {
                    h[t].insert(q);
                }
            }
            h
        });
        Scan {
            e,
            sides: side_sets(e, universe),
            holders,
            candidates: HashMap::new(),
            support: HashMap::new(),
            hits: HashMap::new(),
            targets: (usize::MAX, HashMap::new()),
        }
    }

    /// The mosaics `q` with `step_between(i, r, p, q)`.
    fn step_targets(&mut self, p: usize, i: usize, r: usize) -> &BitSet {
        if self.targets.0 != p {
            self.targets = (p, HashMap::new());
        }
        let (e, sides, holders, hits) = (self.e, &self.sides, &self.holders, &mut self.hits);
        let n = sides.len();
        self.targets.1.entry((i, r)).or_insert_with(|| {
            let mut out = BitSet::full(n);
            for &s in &e.sigma_sup[i][r] {
                for j in 0..2 {
                    let [fwd, _] = e.coherence_rows(j, s);
                    let mut cover = BitSet::new(fwd.len());
                    for t in sides[p][j].iter() {
                        let hit = hits.entry((j, s, t)).or_insert_with(|| {
                            let mut h = BitSet::new(n);
                            for t2 in fwd[t].iter() {
                                h.union_with(&holders[j][t2]);
                            }
                            h
                        });
                        out.intersect_with(hit);
                        cover.union_with(&fwd[t]);
                    }
                    if e.mode == PairMode::Full {
                        for t2 in (0..fwd.len()).filter(|&t2| !cover.contains(t2)) {
                            for q in holders[j][t2].iter() {
                                out.remove(q);
                            }
                        }
                    }
                }
            }
            out
        })
    }

    /// Whether a live mosaic serves the `k`-th demand of type `t` on side
    /// `i` of mosaic `p`.
    fn served(&mut self, alive: &[bool], p: usize, i: usize, t: usize, k: usize) -> bool {
        let key = (p, i, t, k);
        if self.support.get(&key).is_some_and(|&q| alive[q]) {
            return true;
        }
        let e = self.e;
        let d = &e.demands[i][t][k];
        let holders = &self.holders[i];
        let n = self.sides.len();
        let mut cands = self
            .candidates
            .entry((i, t, k))
            .or_insert_with(|| {
                let mut c = BitSet::new(n);
                for w in d.witnesses.iter() {
                    c.union_with(&holders[w]);
                }
                c
            })
            .clone();
        let found = if d.role == e.universal() || e.sigma_sup[i][d.role].is_empty() {
            cands.iter().find(|&q| alive[q])
        } else {
            let sides = &self.sides;
            let step = |q: usize| alive[q] && e.step_between(i, d.role, &sides[p], &sides[q]);
            let (first, more) = {
                let mut live = cands.iter().filter(|&q| alive[q]);
                let first = live.by_ref().take(DIRECT_CHECKS).find(|&q| step(q));
                (first, live.next().is_some())
            };
            match first {
                Some(q) => Some(q),
                None if !more => None,
                None if n <= INDEX_LIMIT => {
                    cands.intersect_with(self.step_targets(p, i, d.role));
                    cands.iter().find(|&q| alive[q])
                }
                None => cands.iter().find(|&q| step(q)),
            }
        };
        if let Some(q) = found {
            self.support.insert(key, q);
        }
        found.is_some()
    }

    /// The first demand of `p` that no live mosaic serves, as (side, type,
    /// existential).
    fn failing(
        &mut self,
        universe: &[Mosaic],
        alive: &[bool],
        p: usize,
    ) -> Option<(usize, usize, String)> {
        for i in 0..2 {
            for &t in universe[p].side(i) {
                for (k, d) in self.e.demands[i][t].iter().enumerate() {
                    if !self.served(alive, p, i, t, k) {
                        let c = self
                            .e
                            .space
                            .closure()
                            .get(self.e.space.exists()[d.exist].member);
                        return Some((i, t, c.to_string()));
                    }
                }
            }
        }
        None
    }
}

/// Greatest-fixpoint elimination of bad mosaics. `order` fixes the order in
/// which mosaics are inspected within a round; the result does not depend
/// on it. Returns the survivors' flags.
pub(crate) fn eliminate(
    e: &Engine,
    universe: &[Mosaic],
    order: Option<&[usize]>,
    events: &mut Vec<Event>,
) -> Result<Vec<bool>> {
    let n = universe.len();
    let default: Vec<usize> = (0..n).collect();
    let order = order.unwrap_or(&default);
    let mut scan = Scan::new(e, universe);
    let mut alive = vec![true; n];
    loop {
        e.options.check_cancel()?;
        let mut changed = false;
        for &p in order {
            if alive[p] && scan.failing(universe, &alive, p).is_some() {
                alive[p] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Reasons are taken against the final set so the log does not depend
    // on the inspection order.
    for p in (0..n).filter(|&p| !alive[p]) {
        let (i, t, c) = scan
            .failing(universe, &alive, p)
            .expect("a removed mosaic still fails against the fixpoint");
        events.push(Event::new(
            "mosaics",
            format!(
                "removed {}: no witness for {c} at {}:t{t}",
                describe(&universe[p]),
                i + 1
            ),
        ));
    }
    Ok(alive)
}

/// Grows `universe` by shrinking dead mosaics: each mosaic eliminated from
/// the current universe is replaced by its sub-mosaic without the types
/// whose demands went unserved, until no new mosaic appears.
pub(crate) fn shrink_closure(
    e: &Engine,
    universe: Vec<Mosaic>,
    universal: bool,
    budget: usize,
) -> Result<Vec<Mosaic>> {
    let mut known: BTreeSet<Mosaic> = universe.into_iter().collect();
    loop {
        let current: Vec<Mosaic> = known.iter().cloned().collect();
        let alive = eliminate(e, &current, None, &mut Vec::new())?;
        let mut scan = Scan::new(e, &current);
        let mut added = false;
        for p in (0..current.len()).filter(|&p| !alive[p]) {
            let mut m = current[p].clone();
            for i in 0..2 {
                for &t in current[p].side(i) {
                    let unserved =
                        (0..e.demands[i][t].len()).any(|k| !scan.served(&alive, p, i, t, k));
                    if unserved {
                        if i == 0 {
                            m.t1.remove(&t);
                        } else {
                            m.t2.remove(&t);
                        }
                    }
                }
            }
            if m != current[p] && admissible(&m, universal) && known.insert(m) {
                added = true;
                if known.len() > budget {
                    return Err(Error::Budget(format!(
                        "more than {budget} candidate mosaics in one universe"
                    )));
                }
            }
        }
        if !added {
            return Ok(known.into_iter().collect());
        }
    }
}

/// Whether mosaic `q` can serve demand `d` of a side-`i` type in `p`.
fn supports(e: &Engine, sides: &[[BitSet; 2]], i: usize, d: &Demand, p: usize, q: usize) -> bool {
    sides[q][i].intersects(&d.witnesses)
        && (d.role == e.universal() || e.step_between(i, d.role, &sides[p], &sides[q]))
}

fn side_sets(e: &Engine, universe: &[Mosaic]) -> Vec<[BitSet; 2]> {
    universe
        .iter()
        .map(|m| [0, 1].map(|i| BitSet::from_iter(e.tables[i].len(), m.side(i).iter().copied())))
        .collect()
}

/// The part of a good set reachable from `roots` by following, for every
/// demand, the first mosaic that serves it. The result is again good.
pub(crate) fn trim(e: &Engine, s: &[Mosaic], roots: &[usize]) -> Vec<usize> {
    let sides = side_sets(e, s);
    let mut keep = BTreeSet::new();
    let mut stack: Vec<usize> = roots.to_vec();
    while let Some(p) = stack.pop() {
        if !keep.insert(p) {
            continue;
        }
        for i in 0..2 {
            for &t in s[p].side(i) {
                for d in &e.demands[i][t] {
                    let q = (0..s.len())
                        .find(|&q| supports(e, &sides, i, d, p, q))
                        .expect("good set serves every demand");
                    stack.push(q);
                }
            }
        }
    }
    keep.into_iter().collect()
}

pub(crate) fn describe(m: &Mosaic) -> String {
    let f = |s: &BTreeSet<usize>| {
        s.iter()
            .map(|t| format!("t{t}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("({{{}}},{{{}}})", f(&m.t1), f(&m.t2))
}

//! Pairwise compatibility between types of the two sides.
//!
//! Two types are compatible when they may sit in a common mosaic of some
//! good set. The relation is computed as a greatest fixpoint of necessary
//! conditions, so every mosaic of every good set is a clique of it.

use std::collections::HashMap;

use super::engine::Engine;
use super::Event;
use crate::bits::BitSet;
use crate::error::Result;

/// A symmetric relation over side-tagged types: vertex `v < n0` is type `v`
/// of side 1, vertex `n0 + t` is type `t` of side 2. A vertex is alive when
/// it is related to itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRelation {
    pub n0: usize,
    pub rows: Vec<BitSet>,
}

impl PairRelation {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn side(&self, v: usize) -> usize {
        usize::from(v >= self.n0)
    }

    pub fn ty(&self, v: usize) -> usize {
        if v >= self.n0 {
            v - self.n0
        } else {
            v
        }
    }

    pub fn vertex(&self, side: usize, t: usize) -> usize {
        if side == 0 {
            t
        } else {
            self.n0 + t
        }
    }

    pub fn alive(&self, v: usize) -> bool {
        self.rows[v].contains(v)
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    /// Number of unordered related pairs, reflexive ones included.
    pub fn pair_count(&self) -> usize {
        (0..self.len())
            .map(|x| self.rows[x].iter().filter(|&y| y >= x).count())
            .sum()
    }
}

struct Refiner<'a> {
    e: &'a Engine,
    n0: usize,
    n: usize,
    succ: HashMap<(usize, usize), Vec<BitSet>>,
}

impl Refiner<'_> {
    fn types(&self, v: usize) -> &BitSet {
        if v < self.n0 {
            &self.e.tables[0].types[v]
        } else {
            &self.e.tables[1].types[v - self.n0]
        }
    }

    fn side(&self, v: usize) -> usize {
        usize::from(v >= self.n0)
    }

    fn offset(&self, side: usize) -> usize {
        if side == 0 {
            0
        } else {
            self.n0
        }
    }

    /// `s`-successors of every type of `side`, as vertex sets.
    fn successors(&mut self, side: usize, s: usize) -> &Vec<BitSet> {
        let (n, off) = (self.n, self.offset(side));
        let tab = &self.e.tables[side];
        self.succ.entry((side, s)).or_insert_with(|| {
            (0..tab.len())
                .map(|t| {
                    BitSet::from_iter(
                        n,
                        (0..tab.len())
                            .filter(|&t2| tab.coherent(t, t2, s))
                            .map(|t2| t2 + off),
                    )
                })
                .collect()
        })
    }

    fn atoms_agree(
        &self,
        x: usize,
        y: usize,
        names: &[usize],
        nominals: &[(String, usize, bool)],
    ) -> bool {
        let (tx, ty) = (self.types(x), self.types(y));
        if names.iter().any(|&m| tx.contains(m) != ty.contains(m)) {
            return false;
        }
        if x == y {
            return true;
        }
        let same_side = self.side(x) == self.side(y);
        nominals.iter().all(|(_, m, in_sigma)| {
            let (ax, ay) = (tx.contains(*m), ty.contains(*m));
            if same_side && (ax && ay || *in_sigma && (ax || ay)) {
                return false;
            }
            !*in_sigma || ax == ay
        })
    }

    /// Conditions on `x` that do not depend on its partner.
    fn vertex_violation(&self, rel: &[BitSet], x: usize) -> Option<Why> {
        let sx = self.side(x);
        let tx = x - self.offset(sx);
        if self.e.problem.dialect.universal {
            let off = self.offset(1 - sx);
            let len = self.e.tables[1 - sx].len();
            if !(off..off + len).any(|v| rel[x].contains(v)) {
                return Some(Why::Universal);
            }
        }
        let off = self.offset(sx);
        let u = self.e.universal();
        for d in &self.e.demands[sx][tx] {
            if (d.role == u || self.e.sigma_sup[sx][d.role].is_empty())
                && !d.witnesses.iter().any(|t| rel[t + off].contains(t + off))
            {
                return Some(Why::Exists(d.exist));
            }
        }
        None
    }

    /// Live witnesses of each demand of `x` whose role has signature
    /// super-roles.
    fn guarded(&self, rel: &[BitSet], x: usize) -> Vec<(usize, usize, BitSet)> {
        let sx = self.side(x);
        let (tx, off) = (x - self.offset(sx), self.offset(sx));
        let u = self.e.universal();
        self.e.demands[sx][tx]
            .iter()
            .filter(|d| d.role != u && !self.e.sigma_sup[sx][d.role].is_empty())
            .map(|d| {
                let w = BitSet::from_iter(
                    self.n,
                    d.witnesses
                        .iter()
                        .map(|t| t + off)
                        .filter(|&v| rel[v].contains(v)),
                );
                (d.exist, d.role, w)
            })
            .collect()
    }

    /// Vertices related to some `s`-successor of `y`.
    fn near<'n>(
        &mut self,
        rel: &[BitSet],
        near: &'n mut HashMap<(usize, usize), BitSet>,
        y: usize,
        s: usize,
    ) -> &'n BitSet {
        near.entry((y, s)).or_insert_with(|| {
            let sy = self.side(y);
            let ty = y - self.offset(sy);
            let mut acc = BitSet::new(self.n);
            for z in self.successors(sy, s)[ty].iter() {
                acc.union_with(&rel[z]);
            }
            acc
        })
    }

    /// The first guarded demand of `x` that no live witness serves next to
    /// `y`.
    fn pair_violation(
        &mut self,
        rel: &[BitSet],
        near: &mut HashMap<(usize, usize), BitSet>,
        guarded: &[(usize, usize, BitSet)],
        x: usize,
        y: usize,
    ) -> Option<Why> {
        let sx = self.side(x);
        for (exist, role, w) in guarded {
            let sups = &self.e.sigma_sup[sx][*role];
            let ok = if let [s] = sups.as_slice() {
                w.intersects(self.near(rel, near, y, *s))
            } else {
                let mut c = w.clone();
                for &s in sups {
                    c.intersect_with(self.near(rel, near, y, s));
                }
                !c.is_empty()
            };
            if !ok {
                return Some(Why::Exists(*exist));
            }
        }
        None
    }
}

#[derive(Clone, Copy)]
enum Why {
    Partner,
    Universal,
    Exists(usize),
}

impl Why {
    fn describe(self, e: &Engine) -> String {
        match self {
            Why::Partner => "partner eliminated".into(),
            Why::Universal => "Condition 3u".into(),
            Why::Exists(k) => {
                let c = e.space.closure().get(e.space.exists()[k].member);
                format!("existential saturation for {c}")
            }
        }
    }
}

/// The greatest compatibility relation over the given classes of types.
/// The greatest compatibility relation over the types in `classes`. A
/// `parent` relation computed over a superset of the classes is a valid
/// starting point and saves the rounds it already took.
pub(crate) fn refine(
    e: &Engine,
    classes: [&BitSet; 2],
    parent: Option<&PairRelation>,
    events: &mut Vec<Event>,
) -> Result<PairRelation> {
    let n0 = e.tables[0].len();
    let n = n0 + e.tables[1].len();
    let mut r = Refiner {
        e,
        n0,
        n,
        succ: HashMap::new(),
    };
    let names = e.sigma_names();
    let nominals = e.nominal_members();
    let alive: Vec<usize> = classes[0]
        .iter()
        .chain(classes[1].iter().map(|t| t + n0))
        .collect();
    let mut rel = vec![BitSet::new(n); n];
    match parent {
        Some(p) => {
            let keep = BitSet::from_iter(n, alive.iter().copied());
            for &x in &alive {
                rel[x] = p.rows[x].clone();
                rel[x].intersect_with(&keep);
            }
        }
        None => {
            for &x in &alive {
                for &y in &alive {
                    if r.atoms_agree(x, y, &names, &nominals) {
                        rel[x].insert(y);
                    }
                }
            }
        }
    }
    let designated = |x: usize, y: usize| {
        x < n0
            && y >= n0
            && e.tables[0].types[x].contains(e.goals[0])
            && e.tables[1].types[y - n0].contains(e.goals[1])
    };
    let mut rounds = 0;
    loop {
        e.options.check_cancel()?;
        rounds += 1;
        let vertex: Vec<Option<Why>> = (0..n)
            .map(|x| {
                if rel[x].contains(x) {
                    r.vertex_violation(&rel, x)
                } else {
                    Some(Why::Partner)
                }
            })
            .collect();
        let guarded: Vec<Vec<(usize, usize, BitSet)>> = (0..n)
            .map(|x| {
                if vertex[x].is_none() {
                    r.guarded(&rel, x)
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut near = HashMap::new();
        let mut dead = Vec::new();
        for x in 0..n {
            for y in rel[x].iter() {
                if y < x {
                    continue;
                }
                let why = vertex[x]
                    .or(vertex[y])
                    .or_else(|| r.pair_violation(&rel, &mut near, &guarded[x], x, y))
                    .or_else(|| r.pair_violation(&rel, &mut near, &guarded[y], y, x));
                if let Some(why) = why {
                    if designated(x, y) {
                        events.push(Event::new(
                            "pairs",
                            format!(
                                "removed designated pair (1:t{}, 2:t{}): {}",
                                x,
                                y - n0,
                                why.describe(e)
                            ),
                        ));
                    }
                    dead.push((x, y));
                }
            }
        }
        if dead.is_empty() {
            break;
        }
        for (x, y) in dead {
            rel[x].remove(y);
            rel[y].remove(x);
        }
    }
    let out = PairRelation { n0, rows: rel };
    events.push(Event::new(
        "pairs",
        format!(
            "{} compatible pairs over {} live types after {rounds} rounds",
            out.pair_count(),
            { (0..n).filter(|&v| out.alive(v)).count() }
        ),
    ));
    Ok(out)
}

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::bits::BitSet;
use crate::coherence::{Mosaic, PairMode, RoleHierarchy, TypeSpace, TypeTable, DEFAULT_ATOM_LIMIT};
use crate::error::{Error, Result};
use crate::satcheck::Eliminator;
use crate::syntax::{check_dialect, Concept, Dialect, Ontology, Signature, XiClosure};

/// Resource limits and cancellation for a joint-consistency run.
#[derive(Clone, Debug)]
pub struct MosaicOptions {
    /// Largest number of candidate mosaics per universe.
    pub budget: usize,
    /// Largest number of propositional atoms in the closure.
    pub atom_limit: usize,
    pub cancel: Option<Arc<AtomicBool>>,
    /// When set, elimination inspects mosaics in an order shuffled by this
    /// seed. Results and transcripts do not change.
    pub order_seed: Option<u64>,
}

impl Default for MosaicOptions {
    fn default() -> Self {
        MosaicOptions {
            budget: 1 << 20,
            atom_limit: DEFAULT_ATOM_LIMIT,
            cancel: None,
            order_seed: None,
        }
    }
}

impl MosaicOptions {
    pub(crate) fn inspection_order(&self, n: usize) -> Option<Vec<usize>> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let seed = self.order_seed?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed ^ n as u64));
        Some(order)
    }

    pub(crate) fn check_cancel(&self) -> Result<()> {
        match &self.cancel {
            Some(c) if c.load(Ordering::Relaxed) => Err(Error::Cancelled),
            _ => Ok(()),
        }
    }
}

/// The inputs of a joint-consistency question.
#[derive(Clone, Debug)]
pub struct JointProblem {
    pub o1: Ontology,
    pub c1: Concept,
    pub o2: Ontology,
    pub c2: Concept,
    pub sigma: Signature,
    pub dialect: Dialect,
}

/// A demand `∃r.C ∈ t` with the types of the same side that can witness it.
#[derive(Clone, Debug)]
pub(crate) struct Demand {
    pub exist: usize,
    pub role: usize,
    pub witnesses: BitSet,
}

/// Shared data for one problem: the closure, the realizable types of each
/// side with their coherence tables, and the signature super-roles.
pub struct Engine {
    pub(crate) problem: JointProblem,
    pub(crate) space: TypeSpace,
    pub(crate) tables: [TypeTable; 2],
    /// per side and role id: the super-roles that are roles over Σ
    pub(crate) sigma_sup: [Vec<Vec<usize>>; 2],
    /// per side and type: its demands
    pub(crate) demands: [Vec<Vec<Demand>>; 2],
    /// member ids of `C1` and `C2`
    pub(crate) goals: [usize; 2],
    pub(crate) mode: PairMode,
    pub(crate) options: MosaicOptions,
    /// per side and signature role `s`: `t ⇝_s t′` as rows indexed by `t`
    /// (forward) and by `t′` (backward)
    coherence: [Vec<Option<[Vec<BitSet>; 2]>>; 2],
}

impl Engine {
    pub fn new(problem: JointProblem, options: MosaicOptions) -> Result<Self> {
        let d = problem.dialect;
        check_dialect(d, &[&problem.o1, &problem.o2], &[&problem.c1, &problem.c2])?;
        let xi = XiClosure::new(&problem.o1, &problem.o2, &problem.c1, &problem.c2);
        let space = TypeSpace::new(xi, &[&problem.o1, &problem.o2]);
        let mut tables = Vec::with_capacity(2);
        let mut sigma_sup = Vec::with_capacity(2);
        for o in [&problem.o1, &problem.o2] {
            options.check_cancel()?;
            let h = RoleHierarchy::new(&space, o);
            if tables.len() == 1 && problem.o1 == problem.o2 {
                let same: &TypeTable = &tables[0];
                tables.push(same.clone());
            } else {
                let e = Eliminator::new(&space, o, options.atom_limit)?;
                let types: Vec<BitSet> = e
                    .realizable()
                    .iter()
                    .map(|t| e.table.types[t].clone())
                    .collect();
                tables.push(TypeTable::new(&space, &h, types));
            }
            let sup: Vec<Vec<usize>> = (0..space.roles().len())
                .map(|r| {
                    h.supers(r)
                        .filter(|&s| {
                            let role = &space.roles()[s];
                            role.role_name()
                                .is_some_and(|n| problem.sigma.roles.contains(n))
                                && (d.inverse || !role.is_inverted())
                        })
                        .collect()
                })
                .collect();
            sigma_sup.push(sup);
        }
        let tables: [TypeTable; 2] = tables.try_into().expect("two sides");
        let demands = [0, 1].map(|i| {
            let tab = &tables[i];
            tab.witnesses(&space)
                .into_iter()
                .map(|ws| {
                    ws.into_iter()
                        .map(|(k, w)| Demand {
                            exist: k,
                            role: space.exists()[k].role,
                            witnesses: w,
                        })
                        .collect()
                })
                .collect()
        });
        let goals = [
            space.member(&problem.c1).expect("closure contains C1"),
            space.member(&problem.c2).expect("closure contains C2"),
        ];
        let mode = if d.inverse {
            PairMode::Full
        } else {
            PairMode::Forward
        };
        let sigma_sup: [Vec<Vec<usize>>; 2] = sigma_sup.try_into().expect("two sides");
        let coherence = [0, 1].map(|i| {
            let tab = &tables[i];
            let n = tab.len();
            (0..space.roles().len())
                .map(|s| {
                    sigma_sup
                        .iter()
                        .flatten()
                        .any(|sup| sup.contains(&s))
                        .then(|| {
                            let fwd: Vec<BitSet> = (0..n)
                                .map(|t| {
                                    BitSet::from_iter(
                                        n,
                                        (0..n).filter(|&t2| tab.coherent(t, t2, s)),
                                    )
                                })
                                .collect();
                            let bwd = (0..n)
                                .map(|t2| {
                                    BitSet::from_iter(n, (0..n).filter(|&t| fwd[t].contains(t2)))
                                })
                                .collect();
                            [fwd, bwd]
                        })
                })
                .collect()
        });
        Ok(Engine {
            problem,
            space,
            tables,
            sigma_sup,
            coherence,
            demands,
            goals,
            mode,
            options,
        })
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn table(&self, side: usize) -> &TypeTable {
        &self.tables[side]
    }

    pub fn problem(&self) -> &JointProblem {
        &self.problem
    }

    pub(crate) fn universal(&self) -> usize {
        self.space.universal_role()
    }

    /// Member ids of the signature's concept names, and of the closure's
    /// individuals split by signature membership.
    pub(crate) fn sigma_names(&self) -> Vec<usize> {
        self.space
            .names()
            .iter()
            .filter(|(n, _)| self.problem.sigma.concepts.contains(n))
            .map(|(_, m)| *m)
            .collect()
    }

    pub(crate) fn nominal_members(&self) -> Vec<(String, usize, bool)> {
        self.space
            .nominals()
            .iter()
            .map(|(a, m)| (a.clone(), *m, self.problem.sigma.individuals.contains(a)))
            .collect()
    }

    /// The u-uniform classes of each side: realizable types grouped by the
    /// set of `∃u`-members they contain.
    pub(crate) fn classes(&self, side: usize) -> Vec<BitSet> {
        let tab = &self.tables[side];
        let u = self.universal();
        let u_members: Vec<usize> = self
            .space
            .exists()
            .iter()
            .filter(|e| e.role == u)
            .map(|e| e.member)
            .collect();
        let key = |t: usize| -> Vec<bool> {
            u_members
                .iter()
                .map(|&m| tab.types[t].contains(m))
                .collect()
        };
        let mut keys: Vec<Vec<bool>> = (0..tab.len()).map(key).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| BitSet::from_iter(tab.len(), (0..tab.len()).filter(|&t| key(t) == k)))
            .collect()
    }

    /// Whether every type of `p` has an `s`-coherent partner in `q` (and
    /// conversely in full mode), for all signature super-roles of `r` on
    /// side `side`.
    pub(crate) fn mosaic_step(&self, side: usize, r: usize, p: &Mosaic, q: &Mosaic) -> bool {
        let bits = |m: &Mosaic| {
            [0, 1].map(|i| BitSet::from_iter(self.tables[i].len(), m.side(i).iter().copied()))
        };
        self.step_between(side, r, &bits(p), &bits(q))
    }

    /// The forward and backward `s`-coherence rows of side `i`.
    pub(crate) fn coherence_rows(&self, i: usize, s: usize) -> &[Vec<BitSet>; 2] {
        self.coherence[i][s]
            .as_ref()
            .expect("rows for signature roles")
    }

    /// `mosaic_step` over mosaics given as per-side type sets.
    pub(crate) fn step_between(
        &self,
        side: usize,
        r: usize,
        p: &[BitSet; 2],
        q: &[BitSet; 2],
    ) -> bool {
        self.sigma_sup[side][r].iter().all(|&s| {
            (0..2).all(|i| {
                let [fwd, bwd] = self.coherence[i][s]
                    .as_ref()
                    .expect("rows for signature roles");
                p[i].iter().all(|t| fwd[t].intersects(&q[i]))
                    && (self.mode == PairMode::Forward
                        || q[i].iter().all(|t2| bwd[t2].intersects(&p[i])))
            })
        })
    }
}

//! Finite interpretations: evaluation, model checking, bisimulations,
//! generated subinterpretations and bisimulation products.

mod bisim;
mod interp;

pub use bisim::{
    bisimulation_product, generated_sub, is_bisimulation, largest_bisimulation, BisimRelation,
    Product,
};
pub use interp::{Interpretation, InterpretationJson};

#[cfg(test)]
pub(crate) mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;
    use crate::syntax::{Dialect, Role, Signature};

    pub(crate) fn o1_model() -> Interpretation {
        let mut i = Interpretation::with_domain(["c", "d"]);
        i.set_individual("a", 0);
        for (x, y) in [(0, 0), (0, 1), (1, 0)] {
            i.add_edge("r", x, y);
        }
        i.add_concept("A", 0);
        i.add_concept("A", 1);
        i
    }

    fn sig_ra() -> Signature {
        Signature::new().with_role("r").with_concept("A")
    }

    #[test]
    fn o1_model_is_fully_self_bisimilar() {
        let i = o1_model();
        let s = largest_bisimulation(&i, &i, &sig_ra(), Dialect::ALCIO.with_universal());
        assert_eq!(s.pairs, [(0, 0), (0, 1), (1, 0), (1, 1)].into());
    }

    #[test]
    fn empty_signature_relates_everything() {
        let i = o1_model();
        let s = largest_bisimulation(&i, &i, &Signature::new(), Dialect::ALCO);
        assert_eq!(s.pairs.len(), 4);
    }

    #[test]
    fn individuals_in_the_signature_separate() {
        let i = o1_model();
        let s = largest_bisimulation(&i, &i, &sig_ra().with_individual("a"), Dialect::ALCO);
        assert_eq!(s.pairs, [(0, 0), (1, 1)].into());
    }

    #[test]
    fn universal_totality_empties_the_relation() {
        // x has an A-successor, y does not; z is an A-point with no counterpart.
        let mut i = Interpretation::with_domain(["x"]);
        let mut j = Interpretation::with_domain(["y", "z"]);
        j.add_concept("A", 1);
        let sig = Signature::new().with_concept("A");
        assert_eq!(
            largest_bisimulation(&i, &j, &sig, Dialect::ALCO).pairs,
            [(0, 0)].into()
        );
        assert!(
            largest_bisimulation(&i, &j, &sig, Dialect::ALCO.with_universal())
                .pairs
                .is_empty()
        );
        i.add_concept("A", 0);
        assert_eq!(
            largest_bisimulation(&i, &j, &sig, Dialect::ALCO).pairs,
            [(0, 1)].into()
        );
    }

    #[test]
    fn inverse_edges_matter_only_with_inverses() {
        // x has an r-predecessor, y has none.
        let mut i = Interpretation::with_domain(["w", "x"]);
        i.add_edge("r", 0, 1);
        let j = Interpretation::with_domain(["y"]);
        let sig = Signature::new().with_role("r");
        assert!(largest_bisimulation(&i, &j, &sig, Dialect::ALCO).contains(1, 0));
        assert!(!largest_bisimulation(&i, &j, &sig, Dialect::ALCIO).contains(1, 0));
    }

    #[test]
    fn generated_sub_follows_forward_edges() {
        let mut i = Interpretation::with_domain(["x", "y", "z"]);
        i.add_edge("r", 0, 1);
        i.add_edge("r", 1, 2);
        let (sub, pos, _) = generated_sub(&i, 1, &Signature::new().with_role("r"));
        assert_eq!(sub.domain, vec!["y", "z"]);
        assert_eq!(pos, 0);
        let (sub, _, _) = generated_sub(&i, 1, &Signature::new());
        assert_eq!(sub.domain, vec!["y"]);
    }

    #[test]
    fn generated_sub_of_the_beth_example() {
        let mut i = Interpretation::with_domain(["a", "b"]);
        i.set_individual("a", 0);
        i.set_individual("b", 1);
        i.add_edge("r", 1, 0);
        i.add_concept("B", 1);
        let sig = Signature::new()
            .with_role("r")
            .with_concept("B")
            .with_individual("a")
            .with_individual("b");
        let (sub, _, _) = generated_sub(&i, 1, &sig);
        assert_eq!(sub, i);
    }

    #[test]
    fn identity_product_is_an_isomorphic_copy() {
        let i = o1_model();
        let sig = sig_ra().with_individual("a");
        let s = BisimRelation {
            pairs: [(0, 0), (1, 1)].into(),
            signature: sig.clone(),
            dialect: Dialect::ALCO,
        };
        let p = bisimulation_product(&i, &i, &s).unwrap();
        let iso = p.interpretation;
        assert_eq!(iso.len(), 2);
        assert_eq!(iso.roles["r"], i.roles["r"]);
        assert_eq!(iso.concepts["A"], i.concepts["A"]);
        assert_eq!(iso.individuals["a"], 0);
    }

    #[test]
    fn full_product_of_the_o1_model() {
        let i = o1_model();
        let s = largest_bisimulation(&i, &i, &sig_ra(), Dialect::ALCO);
        let p = bisimulation_product(&i, &i, &s).unwrap();
        let pi = &p.interpretation;
        assert_eq!(pi.len(), 4);
        assert_eq!(pi.concepts["A"].len(), 4);
        // hand-computed: ((x,y),(x',y')) with (x,x') and (y,y') in r; r has 3 pairs
        let mut expected = BTreeSet::new();
        let r = [(0, 0), (0, 1), (1, 0)];
        for &(x, x2) in &r {
            for &(y, y2) in &r {
                let k = s.pairs.iter().position(|&q| q == (x, y)).unwrap();
                let l = s.pairs.iter().position(|&q| q == (x2, y2)).unwrap();
                expected.insert((k, l));
            }
        }
        assert_eq!(pi.roles["r"], expected);
        assert_eq!(pi.roles["r"].len(), 9);
        for left in [true, false] {
            let f = p.projection(left);
            assert!(is_bisimulation(pi, &i, &f, &sig_ra(), Dialect::ALCO));
            let big = largest_bisimulation(pi, &i, &sig_ra(), Dialect::ALCO);
            assert!(f.is_subset(&big.pairs));
        }
    }

    #[test]
    fn product_rejects_non_bisimulations() {
        let i = o1_model();
        let s = BisimRelation {
            pairs: [(0, 1)].into(),
            signature: sig_ra().with_individual("a"),
            dialect: Dialect::ALCO,
        };
        assert!(bisimulation_product(&i, &i, &s).is_err());
    }

    pub(crate) fn arb_interpretation(max: usize) -> impl Strategy<Value = Interpretation> {
        (1..=max).prop_flat_map(|n| {
            let elems = n;
            (
                prop::collection::vec(prop::collection::vec(any::<bool>(), elems), 2),
                prop::collection::vec(prop::collection::vec(any::<bool>(), elems * elems), 2),
                0..elems,
            )
                .prop_map(move |(cs, rs, a)| {
                    let mut i = Interpretation::with_domain((0..elems).map(|k| format!("e{k}")));
                    for (name, bits) in ["A", "B"].iter().zip(&cs) {
                        i.concepts.insert(name.to_string(), BTreeSet::new());
                        for (e, &b) in bits.iter().enumerate() {
                            if b {
                                i.add_concept(name, e);
                            }
                        }
                    }
                    for (name, bits) in ["r", "s"].iter().zip(&rs) {
                        i.roles.insert(name.to_string(), BTreeSet::new());
                        for (k, &b) in bits.iter().enumerate() {
                            if b {
                                i.add_edge(name, k / elems, k % elems);
                            }
                        }
                    }
                    i.set_individual("a", a);
                    i
                })
        })
    }

    /// Pairwise greatest fixpoint, straight from the forth and back clauses.
    fn naive_largest(
        i: &Interpretation,
        j: &Interpretation,
        sig: &Signature,
        d: Dialect,
    ) -> BTreeSet<(usize, usize)> {
        let label = |k: &Interpretation, x: usize| {
            let c: Vec<bool> = sig
                .concepts
                .iter()
                .map(|a| k.concepts.get(a).is_some_and(|s| s.contains(&x)))
                .collect();
            let o: Vec<bool> = sig
                .individuals
                .iter()
                .map(|a| d.nominals && k.individuals.get(a) == Some(&x))
                .collect();
            (c, o)
        };
        let mut roles: Vec<Role> = sig.roles.iter().map(|r| Role::name(r.clone())).collect();
        if d.inverse {
            roles.extend(sig.roles.iter().map(|r| Role::inverse_of(r.clone())));
        }
        let mut z: BTreeSet<(usize, usize)> = (0..i.len())
            .flat_map(|x| (0..j.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| label(i, x) == label(j, y))
            .collect();
        loop {
            let keep: BTreeSet<(usize, usize)> = z
                .iter()
                .copied()
                .filter(|&(x, y)| {
                    roles.iter().all(|r| {
                        let (si, sj) = (i.successors(r), j.successors(r));
                        si[x]
                            .iter()
                            .all(|&a| sj[y].iter().any(|&b| z.contains(&(a, b))))
                            && sj[y]
                                .iter()
                                .all(|&b| si[x].iter().any(|&a| z.contains(&(a, b))))
                    })
                })
                .collect();
            if keep == z {
                break;
            }
            z = keep;
        }
        let total = (0..i.len()).all(|x| z.iter().any(|p| p.0 == x))
            && (0..j.len()).all(|y| z.iter().any(|p| p.1 == y));
        if d.universal && !total {
            z.clear();
        }
        z
    }

    fn arb_dialect() -> impl Strategy<Value = Dialect> {
        prop::sample::select(Dialect::all())
    }

    proptest! {
        #[test]
        fn refinement_matches_the_pairwise_fixpoint(
            i in arb_interpretation(4), j in arb_interpretation(4), d in arb_dialect(), full in any::<bool>()
        ) {
            let sig = if full {
                Signature::new().with_concept("A").with_concept("B").with_role("r").with_role("s").with_individual("a")
            } else {
                Signature::new().with_concept("A").with_role("r")
            };
            let fast = largest_bisimulation(&i, &j, &sig, d);
            prop_assert_eq!(&fast.pairs, &naive_largest(&i, &j, &sig, d));
            prop_assert!(fast.pairs.is_empty() || is_bisimulation(&i, &j, &fast.pairs, &sig, d));
        }

        #[test]
        fn self_bisimilarity_is_an_equivalence(i in arb_interpretation(4), d in arb_dialect()) {
            let sig = Signature::new().with_concept("A").with_role("r").with_individual("a");
            let s = largest_bisimulation(&i, &i, &sig, d);
            for x in 0..i.len() {
                prop_assert!(s.contains(x, x));
                for y in 0..i.len() {
                    prop_assert_eq!(s.contains(x, y), s.contains(y, x));
                    for z in 0..i.len() {
                        if s.contains(x, y) && s.contains(y, z) {
                            prop_assert!(s.contains(x, z));
                        }
                    }
                }
            }
        }

        #[test]
        fn shrinking_the_signature_grows_the_relation(
            i in arb_interpretation(3), j in arb_interpretation(3), d in arb_dialect()
        ) {
            let big = Signature::new().with_concept("A").with_concept("B").with_role("r").with_role("s").with_individual("a");
            let small = Signature::new().with_concept("A").with_role("r");
            let sb = largest_bisimulation(&i, &j, &big, d);
            let ss = largest_bisimulation(&i, &j, &small, d);
            prop_assert!(sb.is_subset(&ss));
            // the empty relation stands for "no bisimulation" under u
            prop_assert!(sb.pairs.is_empty() || is_bisimulation(&i, &j, &sb.pairs, &big, d));
        }
    }
}

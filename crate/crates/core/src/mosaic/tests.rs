use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use std::sync::Arc;

use super::*;
use crate::fixtures::{BETH, O1, O2, SPY};
use crate::syntax::{parse_concept, parse_ontology};

fn sig(concepts: &[&str], roles: &[&str], individuals: &[&str]) -> Signature {
    let mut s = Signature::new();
    for c in concepts {
        s = s.with_concept(c);
    }
    for r in roles {
        s = s.with_role(r);
    }
    for a in individuals {
        s = s.with_individual(a);
    }
    s
}

fn problem(
    o1: &str,
    c1: &str,
    o2: &str,
    c2: &str,
    sigma: Signature,
    dialect: Dialect,
) -> JointProblem {
    JointProblem {
        o1: parse_ontology(o1).unwrap(),
        c1: parse_concept(c1).unwrap(),
        o2: parse_ontology(o2).unwrap(),
        c2: parse_concept(c2).unwrap(),
        sigma,
        dialect,
    }
}

fn o1_problem() -> JointProblem {
    problem(
        O1,
        "{a}",
        O1,
        "not {a}",
        sig(&["A"], &["r"], &[]),
        Dialect::ALCO,
    )
}

fn decide(p: JointProblem) -> bool {
    jointly_consistent(p).unwrap().consistent
}

/// Every element of a witness model satisfies exactly the closure members
/// of its type.
fn check_truth_lemma(e: &Engine, v: &JointVerdict) {
    for side in 0..2 {
        let (m, elems) = witness::side_model(e, &v.good_set, side);
        for (id, c) in e.space.closure().members().iter().enumerate() {
            let ext = m.eval(c).unwrap();
            for (x, &(t, _)) in elems.iter().enumerate() {
                assert_eq!(
                    e.tables[side].types[t].contains(id),
                    ext.contains(&x),
                    "side {side}, {c} at t{t}"
                );
            }
        }
    }
}

#[test]
fn o1_nominal_is_not_explicitly_definable() {
    let v = jointly_consistent(o1_problem()).unwrap();
    assert!(v.consistent);
    let w = v.witness.as_ref().unwrap();
    assert!(w.relation.contains(&(w.d1, w.d2)));
}

#[test]
fn bottom_is_inconsistent() {
    assert!(!decide(problem(
        "",
        "bot",
        "",
        "top",
        Signature::new(),
        Dialect::ALCO
    )));
}

#[test]
fn o2_is_consistent_with_and_without_inverses() {
    for d in [Dialect::ALCH, Dialect::ALCHI] {
        assert!(decide(problem(
            O2,
            "exists r top",
            O2,
            "not exists r top",
            sig(&[], &["r1", "r2"], &[]),
            d
        )));
    }
}

#[test]
fn spy_target_depends_on_signature() {
    let full = sig(&["Spy"], &["suspects", "deceives"], &[]);
    let v =
        jointly_consistent(problem(SPY, "{d2}", SPY, "not {d2}", full, Dialect::ALCIO)).unwrap();
    assert!(!v.consistent);
    assert!(v.witness.is_none() && v.good_set.is_empty());
    assert!(decide(problem(
        SPY,
        "{d2}",
        SPY,
        "not {d2}",
        sig(&[], &["suspects"], &[]),
        Dialect::ALCIO
    )));
}

#[test]
fn nominals_across_the_interpolation_gap() {
    let p = problem(
        "",
        "{a} and exists r {a}",
        "",
        "not ({b} -> exists r {b})",
        sig(&[], &["r"], &[]),
        Dialect::ALCO,
    );
    assert!(decide(p));
}

#[test]
fn shared_names_must_agree() {
    assert!(!decide(problem(
        "",
        "A and B",
        "",
        "not (A or E)",
        sig(&["A"], &[], &[]),
        Dialect::ALCO
    )));
    assert!(decide(problem(
        "",
        "A and B",
        "",
        "not (A or E)",
        sig(&["B"], &[], &[]),
        Dialect::ALCO
    )));
}

#[test]
fn beth_fixture_depends_on_dialect() {
    let s = sig(&["B"], &["r"], &["a", "b"]);
    assert!(decide(problem(
        BETH,
        "A",
        BETH,
        "not A",
        s.clone(),
        Dialect::ALCO
    )));
    assert!(!decide(problem(
        BETH,
        "A",
        BETH,
        "not A",
        s.clone(),
        Dialect::ALCIO
    )));
    assert!(!decide(problem(
        BETH,
        "A",
        BETH,
        "not A",
        s,
        Dialect::ALCO.with_universal()
    )));
}

#[test]
fn truth_lemma_holds_in_witness_models() {
    let cases = vec![
        o1_problem(),
        problem(
            O2,
            "exists r top",
            O2,
            "not exists r top",
            sig(&[], &["r1", "r2"], &[]),
            Dialect::ALCHI,
        ),
        problem(
            BETH,
            "A",
            BETH,
            "not A",
            sig(&["B"], &["r"], &["a", "b"]),
            Dialect::ALCO,
        ),
        problem(
            "",
            "exists u A",
            "",
            "not exists r B",
            sig(&["A"], &["r"], &[]),
            Dialect::ALCO.with_universal(),
        ),
    ];
    for p in cases {
        let e = Engine::new(p, MosaicOptions::default()).unwrap();
        let v = e.run().unwrap();
        assert!(v.consistent);
        check_truth_lemma(&e, &v);
    }
}

#[test]
fn existential_free_types_give_one_point_models() {
    let v = jointly_consistent(problem(
        "",
        "A",
        "",
        "A",
        sig(&["A"], &[], &[]),
        Dialect::ALCO,
    ))
    .unwrap();
    let w = v.witness.unwrap();
    assert_eq!(v.good_set.len(), 1);
    assert_eq!((w.i1.len(), w.i2.len(), w.relation.len()), (1, 1, 1));
}

#[test]
fn elimination_ignores_order() {
    let mut rng = StdRng::seed_from_u64(7);
    let cases = [
        o1_problem(),
        problem(
            O2,
            "exists r top",
            O2,
            "not exists r top",
            sig(&[], &["r1", "r2"], &[]),
            Dialect::ALCH,
        ),
        problem(
            BETH,
            "A",
            BETH,
            "not A",
            sig(&["B"], &["r"], &["a", "b"]),
            Dialect::ALCO,
        ),
    ];
    for p in cases {
        let e = Engine::new(p, MosaicOptions::default()).unwrap();
        for u in e.universes(false, &mut Vec::new()).unwrap() {
            let base = e.eliminate(&u.mosaics, None).unwrap();
            let mut order: Vec<usize> = (0..u.mosaics.len()).collect();
            for _ in 0..20 {
                order.shuffle(&mut rng);
                assert_eq!(e.eliminate(&u.mosaics, Some(&order)).unwrap(), base);
            }
        }
    }
}

#[test]
fn no_nominals_means_one_universe_per_class_pair() {
    let p = problem(
        O2,
        "exists r top",
        O2,
        "not exists r top",
        sig(&[], &["r1", "r2"], &[]),
        Dialect::ALCH,
    );
    let us = enumerate_universes(p, MosaicOptions::default()).unwrap();
    assert_eq!(us.len(), 1);
    assert!(us[0].mosaics.iter().all(|m| !m.is_empty()));
}

#[test]
fn o1_universes_keep_nominal_types_apart() {
    let e = Engine::new(o1_problem(), MosaicOptions::default()).unwrap();
    let a = e.space.member(&parse_concept("{a}").unwrap()).unwrap();
    let v = e.run().unwrap();
    for side in 0..2 {
        let holders: Vec<_> = v
            .good_set
            .iter()
            .flat_map(|m| {
                m.side(side)
                    .iter()
                    .filter(|&&t| e.tables[side].types[t].contains(a))
            })
            .collect();
        assert_eq!(holders.len(), 1);
    }
}

#[test]
fn smaller_signatures_stay_consistent() {
    let full = sig(&["A"], &["r"], &[]);
    let p = o1_problem();
    assert!(decide(p.clone()));
    for smaller in [
        sig(&["A"], &[], &[]),
        sig(&[], &["r"], &[]),
        Signature::new(),
    ] {
        assert!(
            decide(JointProblem {
                sigma: smaller,
                ..p.clone()
            }),
            "{full:?}"
        );
    }
}

#[test]
fn cancellation_is_reported() {
    let flag = Arc::new(std::sync::atomic::AtomicBool::new(true));
    let opts = MosaicOptions {
        cancel: Some(flag),
        ..MosaicOptions::default()
    };
    assert!(matches!(
        jointly_consistent_with(o1_problem(), opts),
        Err(Error::Cancelled)
    ));
}

#[test]
fn verdict_serializes_deterministically() {
    let a = serde_json::to_string(&jointly_consistent(o1_problem()).unwrap()).unwrap();
    let b = serde_json::to_string(&jointly_consistent(o1_problem()).unwrap()).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["witness"]["relation"].is_array());
}

#[test]
fn shuffled_runs_give_identical_reports() {
    let base = serde_json::to_string(&jointly_consistent(o1_problem()).unwrap()).unwrap();
    for seed in 0..5 {
        let opts = MosaicOptions {
            order_seed: Some(seed),
            ..MosaicOptions::default()
        };
        let v = jointly_consistent_with(o1_problem(), opts).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), base);
    }
}

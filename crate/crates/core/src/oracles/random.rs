//! Seeded random instances for cross-validation.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::syntax::{Concept, Dialect, Ontology, Role, Signature};

const NAMES: [&str; 3] = ["A", "B", "E"];
const ROLES: [&str; 2] = ["r", "s"];
const INDIVIDUAL: &str = "a";

/// A definability instance: is `concept` explicitly definable from
/// `sigma` under `ontology`?
#[derive(Clone, Debug)]
pub struct Instance {
    pub ontology: Ontology,
    pub concept: Concept,
    pub sigma: Signature,
    pub dialect: Dialect,
}

struct Gen<'a> {
    rng: &'a mut StdRng,
    dialect: Dialect,
}

impl Gen<'_> {
    fn role(&mut self) -> Role {
        if self.dialect.universal && self.rng.gen_ratio(1, 6) {
            return Role::universal();
        }
        let r = *ROLES.choose(self.rng).expect("roles");
        if self.dialect.inverse && self.rng.gen_bool(0.3) {
            Role::inverse_of(r)
        } else {
            Role::name(r)
        }
    }

    fn atom(&mut self) -> Concept {
        if self.dialect.nominals && self.rng.gen_ratio(1, 4) {
            Concept::nominal(INDIVIDUAL)
        } else {
            Concept::name(*NAMES.choose(self.rng).expect("names"))
        }
    }

    fn concept(&mut self, depth: usize) -> Concept {
        let k = if depth == 0 {
            self.rng.gen_range(0..3)
        } else {
            self.rng.gen_range(0..7)
        };
        match k {
            0 | 1 => self.atom(),
            2 => self.atom().negate(),
            3 => self.concept(depth - 1).and(self.concept(depth - 1)),
            4 => self.concept(depth - 1).or(self.concept(depth - 1)),
            5 => Concept::exists(self.role(), self.concept(depth - 1)),
            _ => Concept::forall(self.role(), self.concept(depth - 1)),
        }
    }
}

/// A random instance with at most four axioms over at most three concept
/// names, two role names and one individual.
pub fn random_instance(seed: u64, dialect: Dialect) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut g = Gen {
        rng: &mut rng,
        dialect,
    };
    let mut o = Ontology::new();
    let axioms = g.rng.gen_range(1..=4);
    for _ in 0..axioms {
        if dialect.role_hierarchy && g.rng.gen_ratio(1, 4) {
            let (lhs, rhs) = (g.role(), g.role());
            if !lhs.is_universal() && !rhs.is_universal() && lhs != rhs {
                o = o.with_ri(lhs, rhs);
                continue;
            }
        }
        let (lhs, rhs) = (g.concept(1), g.concept(2));
        o = o.with_ci(lhs, rhs);
    }
    let concept = g.concept(1);
    let full = Signature::of(&o, &concept);
    let mut sigma = Signature::new();
    for n in &full.concepts {
        if g.rng.gen_bool(0.5) {
            sigma.concepts.insert(n.clone());
        }
    }
    for n in &full.roles {
        if g.rng.gen_bool(0.6) {
            sigma.roles.insert(n.clone());
        }
    }
    for n in &full.individuals {
        if g.rng.gen_bool(0.5) {
            sigma.individuals.insert(n.clone());
        }
    }
    Instance {
        ontology: o,
        concept,
        sigma,
        dialect,
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::concept::{Concept, Ontology, Role};
use crate::error::Error;

/// Which constructs a description logic admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dialect {
    pub nominals: bool,
    pub role_hierarchy: bool,
    pub inverse: bool,
    pub universal: bool,
}

impl Dialect {
    pub const ALCO: Dialect = Dialect {
        nominals: true,
        role_hierarchy: false,
        inverse: false,
        universal: false,
    };
    pub const ALCH: Dialect = Dialect {
        nominals: false,
        role_hierarchy: true,
        inverse: false,
        universal: false,
    };
    pub const ALCHO: Dialect = Dialect {
        nominals: true,
        role_hierarchy: true,
        inverse: false,
        universal: false,
    };
    pub const ALCIO: Dialect = Dialect {
        nominals: true,
        role_hierarchy: false,
        inverse: true,
        universal: false,
    };
    pub const ALCHI: Dialect = Dialect {
        nominals: false,
        role_hierarchy: true,
        inverse: true,
        universal: false,
    };
    pub const ALCHIO: Dialect = Dialect {
        nominals: true,
        role_hierarchy: true,
        inverse: true,
        universal: false,
    };

    pub fn with_universal(mut self) -> Self {
        self.universal = true;
        self
    }

    /// Members of the family other than ALCO and ALCHO (without `u`) have
    /// the non-projective Beth property.
    pub fn has_beth_property(&self) -> bool {
        !self.nominals || self.inverse || self.universal
    }

    pub fn all() -> Vec<Dialect> {
        let base = [
            Self::ALCO,
            Self::ALCH,
            Self::ALCHO,
            Self::ALCIO,
            Self::ALCHI,
            Self::ALCHIO,
        ];
        base.iter().flat_map(|d| [*d, d.with_universal()]).collect()
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ALC")?;
        if self.role_hierarchy {
            f.write_str("H")?;
        }
        if self.inverse {
            f.write_str("I")?;
        }
        if self.nominals {
            f.write_str("O")?;
        }
        if self.universal {
            f.write_str("^u")?;
        }
        Ok(())
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.to_ascii_lowercase();
        let (name, universal) = match lower.strip_suffix("^u").or_else(|| lower.strip_suffix("u")) {
            Some(stem) if stem.starts_with("alc") && stem.len() > 3 => (stem.to_string(), true),
            _ => (lower.clone(), false),
        };
        let d = match name.as_str() {
            "alco" => Dialect::ALCO,
            "alch" => Dialect::ALCH,
            "alcho" => Dialect::ALCHO,
            "alcio" => Dialect::ALCIO,
            "alchi" => Dialect::ALCHI,
            "alchio" => Dialect::ALCHIO,
            _ => return Err(Error::Invalid(format!("unknown dialect {s:?}"))),
        };
        Ok(if universal { d.with_universal() } else { d })
    }
}

fn role_violations(r: &Role, d: Dialect, out: &mut Vec<String>) {
    if r.is_universal() && !d.universal {
        out.push("universal role u".to_string());
    }
    if r.is_inverted() && !d.inverse {
        out.push(format!("inverse role {r}"));
    }
}

fn concept_violations(c: &Concept, d: Dialect, out: &mut Vec<String>) {
    c.visit(&mut |x| match x {
        Concept::Nominal(a) if !d.nominals => out.push(format!("nominal {{{a}}}")),
        Concept::Exists(r, _) => role_violations(r, d, out),
        _ => {}
    });
}

/// Every construct of `c` not licensed by `d`, deduplicated, in order of
/// first occurrence.
pub fn validate_concept(c: &Concept, d: Dialect) -> Vec<String> {
    let mut out = Vec::new();
    concept_violations(c, d, &mut out);
    dedup(out)
}

pub fn validate_ontology(o: &Ontology, d: Dialect) -> Vec<String> {
    let mut out = Vec::new();
    for c in o.concepts() {
        concept_violations(c, d, &mut out);
    }
    for ri in &o.ris {
        if !d.role_hierarchy {
            out.push(format!("role inclusion {} sub {}", ri.lhs, ri.rhs));
        }
        for r in [&ri.lhs, &ri.rhs] {
            if r.is_universal() {
                out.push("universal role in a role inclusion".to_string());
            } else {
                role_violations(r, d, &mut out);
            }
        }
    }
    dedup(out)
}

/// Validates ontologies and concepts together, failing with every violation.
pub fn check(d: Dialect, ontologies: &[&Ontology], concepts: &[&Concept]) -> Result<(), Error> {
    let mut all = Vec::new();
    for o in ontologies {
        all.extend(validate_ontology(o, d));
    }
    for c in concepts {
        all.extend(validate_concept(c, d));
    }
    let all = dedup(all);
    if all.is_empty() {
        Ok(())
    } else {
        Err(Error::Dialect(all))
    }
}

fn dedup(v: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    v.into_iter().filter(|s| seen.insert(s.clone())).collect()
}

use std::fmt;

/// The base of a role: a role name or the universal role `u`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleBase {
    Name(String),
    Universal,
}

/// A role name, its inverse, or the universal role.
///
/// The universal role is never inverted; `Role::inverse` on it is the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    base: RoleBase,
    inverted: bool,
}

impl Role {
    pub fn name(name: impl Into<String>) -> Self {
        Role {
            base: RoleBase::Name(name.into()),
            inverted: false,
        }
    }

    pub fn inverse_of(name: impl Into<String>) -> Self {
        Role {
            base: RoleBase::Name(name.into()),
            inverted: true,
        }
    }

    pub fn universal() -> Self {
        Role {
            base: RoleBase::Universal,
            inverted: false,
        }
    }

    pub fn base(&self) -> &RoleBase {
        &self.base
    }

    pub fn is_universal(&self) -> bool {
        self.base == RoleBase::Universal
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    /// The role name, `None` for the universal role.
    pub fn role_name(&self) -> Option<&str> {
        match &self.base {
            RoleBase::Name(n) => Some(n),
            RoleBase::Universal => None,
        }
    }

    pub fn inverse(&self) -> Self {
        match self.base {
            RoleBase::Universal => self.clone(),
            RoleBase::Name(_) => Role {
                base: self.base.clone(),
                inverted: !self.inverted,
            },
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            RoleBase::Universal => f.write_str("u"),
            RoleBase::Name(n) if self.inverted => write!(f, "{n}-"),
            RoleBase::Name(n) => f.write_str(n),
        }
    }
}

/// A concept over the primitive constructors.
///
/// The derived ordering compares the constructor first and the children
/// second; closures, types and mosaics are enumerated in this order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Name(String),
    Nominal(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Exists(Role, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Self {
        Concept::Name(n.into())
    }

    pub fn nominal(a: impl Into<String>) -> Self {
        Concept::Nominal(a.into())
    }

    pub fn bottom() -> Self {
        Concept::Top.negate()
    }

    /// Single negation: `¬¬C` collapses to `C`.
    pub fn negate(&self) -> Self {
        match self {
            Concept::Not(c) => (**c).clone(),
            other => Concept::Not(Box::new(other.clone())),
        }
    }

    pub fn and(self, other: Concept) -> Self {
        Concept::And(Box::new(self), Box::new(other))
    }

    /// `C ⊔ D` as `¬(¬C ⊓ ¬D)`.
    pub fn or(self, other: Concept) -> Self {
        self.negate().and(other.negate()).negate()
    }

    /// `C → D` as `¬C ⊔ D`.
    pub fn implies(self, other: Concept) -> Self {
        self.negate().or(other)
    }

    pub fn exists(role: Role, filler: Concept) -> Self {
        Concept::Exists(role, Box::new(filler))
    }

    /// `∀r.C` as `¬∃r.¬C`.
    pub fn forall(role: Role, filler: Concept) -> Self {
        Concept::exists(role, filler.negate()).negate()
    }

    /// Conjunction of a list, `⊤` when empty.
    pub fn conjunction<I: IntoIterator<Item = Concept>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Concept::Top,
            Some(first) => it.fold(first, Concept::and),
        }
    }

    /// Calls `f` on every subconcept, including `self`, parents before children.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        f(self);
        match self {
            Concept::Top | Concept::Name(_) | Concept::Nominal(_) => {}
            Concept::Not(c) | Concept::Exists(_, c) => c.visit(f),
            Concept::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Calls `f` on every role occurrence.
    pub fn visit_roles<'a>(&'a self, f: &mut impl FnMut(&'a Role)) {
        self.visit(&mut |c| {
            if let Concept::Exists(r, _) = c {
                f(r)
            }
        });
    }

    pub fn depth(&self) -> usize {
        match self {
            Concept::Top | Concept::Name(_) | Concept::Nominal(_) => 0,
            Concept::Not(c) => c.depth(),
            Concept::And(a, b) => a.depth().max(b.depth()),
            Concept::Exists(_, c) => 1 + c.depth(),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Rebuilds the concept bottom-up, replacing names through the maps.
    pub fn map_names(
        &self,
        concept: &impl Fn(&str) -> String,
        role: &impl Fn(&str) -> String,
        individual: &impl Fn(&str) -> String,
    ) -> Concept {
        match self {
            Concept::Top => Concept::Top,
            Concept::Name(n) => Concept::Name(concept(n)),
            Concept::Nominal(a) => Concept::Nominal(individual(a)),
            Concept::Not(c) => Concept::Not(Box::new(c.map_names(concept, role, individual))),
            Concept::And(a, b) => Concept::And(
                Box::new(a.map_names(concept, role, individual)),
                Box::new(b.map_names(concept, role, individual)),
            ),
            Concept::Exists(r, c) => Concept::Exists(
                map_role(r, role),
                Box::new(c.map_names(concept, role, individual)),
            ),
        }
    }
}

pub(crate) fn map_role(r: &Role, f: &impl Fn(&str) -> String) -> Role {
    match &r.base {
        RoleBase::Universal => r.clone(),
        RoleBase::Name(n) => Role {
            base: RoleBase::Name(f(n)),
            inverted: r.inverted,
        },
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("top"),
            Concept::Name(n) => f.write_str(n),
            Concept::Nominal(a) => write!(f, "{{{a}}}"),
            Concept::Not(c) if **c == Concept::Top => f.write_str("bot"),
            Concept::Not(c) => write!(f, "not {c}"),
            Concept::And(a, b) => write!(f, "({a} and {b})"),
            Concept::Exists(r, c) => write!(f, "exists {r} {c}"),
        }
    }
}

/// A concept inclusion `lhs ⊑ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptInclusion {
    pub lhs: Concept,
    pub rhs: Concept,
}

/// A role inclusion `lhs ⊑ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleInclusion {
    pub lhs: Role,
    pub rhs: Role,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Concept(ConceptInclusion),
    Role(RoleInclusion),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Concept(ci) => write!(f, "{} sub {}", ci.lhs, ci.rhs),
            Axiom::Role(ri) => write!(f, "role {} sub {}", ri.lhs, ri.rhs),
        }
    }
}

/// A finite set of concept and role inclusions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ontology {
    pub cis: Vec<ConceptInclusion>,
    pub ris: Vec<RoleInclusion>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ci(mut self, lhs: Concept, rhs: Concept) -> Self {
        self.cis.push(ConceptInclusion { lhs, rhs });
        self
    }

    pub fn with_ri(mut self, lhs: Role, rhs: Role) -> Self {
        self.ris.push(RoleInclusion { lhs, rhs });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.cis.is_empty() && self.ris.is_empty()
    }

    pub fn axioms(&self) -> impl Iterator<Item = Axiom> + '_ {
        self.cis
            .iter()
            .cloned()
            .map(Axiom::Concept)
            .chain(self.ris.iter().cloned().map(Axiom::Role))
    }

    /// Set union, keeping the first occurrence of duplicates.
    pub fn union(&self, other: &Ontology) -> Ontology {
        let mut out = self.clone();
        for ci in &other.cis {
            if !out.cis.contains(ci) {
                out.cis.push(ci.clone());
            }
        }
        for ri in &other.ris {
            if !out.ris.contains(ri) {
                out.ris.push(ri.clone());
            }
        }
        out
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.cis.iter().flat_map(|ci| [&ci.lhs, &ci.rhs])
    }
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in self.axioms() {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Concept {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Ontology {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

//! Interpolant, definition and referring-expression existence, implicit
//! definability and non-projective definability.
//!
//! Existence of an interpolant or explicit definition is the complement of
//! joint consistency modulo Σ-bisimulations. Implicit definability and the
//! non-projective question for ALCO and ALCHO reduce to entailment.

mod beth;

use serde::Serialize;

pub use beth::{build_beth_reduction, relativize, relativize_concept, BethReduction};

use crate::error::{Error, Result};
use crate::mosaic::{jointly_consistent_with, JointProblem, JointVerdict, MosaicOptions};
use crate::satcheck::{entails_ci_with, model_of_with};
use crate::syntax::{check_dialect, rename_outside, Concept, Dialect, Ontology, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Interpolant,
    ProjectiveDefinition,
    ReferringExpression,
    NonprojectiveDefinition,
    ImplicitDefinability,
}

/// How a question is answered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// the cheapest route that is correct for the dialect
    #[default]
    Auto,
    /// joint consistency modulo Σ-bisimulations
    Mosaic,
    /// two-way entailment against a renamed copy
    Implicit,
    /// satisfiability in the reduction ontology `O''`
    Reduction,
}

/// The answer to one question, with the evidence gathered for it.
#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    pub kind: Kind,
    pub answer: bool,
    pub signature: Signature,
    pub dialect: Dialect,
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<JointVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<BethReduction>,
}

impl Decision {
    fn new(kind: Kind, answer: bool, signature: Signature, dialect: Dialect, route: Route) -> Self {
        Decision {
            kind,
            answer,
            signature,
            dialect,
            route,
            joint: None,
            reduction: None,
        }
    }

    fn from_joint(kind: Kind, v: JointVerdict) -> Self {
        let mut d = Decision::new(
            kind,
            !v.consistent,
            v.signature.clone(),
            v.dialect,
            Route::Mosaic,
        );
        d.joint = Some(v);
        d
    }
}

/// A question with its inputs.
#[derive(Clone, Debug)]
pub enum Problem {
    Interpolant {
        o1: Ontology,
        c1: Concept,
        o2: Ontology,
        c2: Concept,
        dialect: Dialect,
    },
    Definition {
        o: Ontology,
        c: Concept,
        sigma: Signature,
        dialect: Dialect,
    },
    ReferringExpression {
        o: Ontology,
        individual: String,
        sigma: Option<Signature>,
        dialect: Dialect,
    },
    Nonprojective {
        o: Ontology,
        name: String,
        dialect: Dialect,
        route: Route,
    },
    Implicit {
        o: Ontology,
        c: Concept,
        sigma: Signature,
        dialect: Dialect,
    },
}

impl Problem {
    pub fn kind(&self) -> Kind {
        match self {
            Problem::Interpolant { .. } => Kind::Interpolant,
            Problem::Definition { .. } => Kind::ProjectiveDefinition,
            Problem::ReferringExpression { .. } => Kind::ReferringExpression,
            Problem::Nonprojective { .. } => Kind::NonprojectiveDefinition,
            Problem::Implicit { .. } => Kind::ImplicitDefinability,
        }
    }

    pub fn solve(&self, opts: &MosaicOptions) -> Result<Decision> {
        match self {
            Problem::Interpolant {
                o1,
                c1,
                o2,
                c2,
                dialect,
            } => interpolant_exists(o1, c1, o2, c2, *dialect, opts),
            Problem::Definition {
                o,
                c,
                sigma,
                dialect,
            } => definition_exists(o, c, sigma, *dialect, opts),
            Problem::ReferringExpression {
                o,
                individual,
                sigma,
                dialect,
            } => referring_expression_exists(o, individual, sigma.as_ref(), *dialect, opts),
            Problem::Nonprojective {
                o,
                name,
                dialect,
                route,
            } => nonprojective_definition_exists(o, name, *dialect, *route, opts),
            Problem::Implicit {
                o,
                c,
                sigma,
                dialect,
            } => {
                let answer = implicitly_definable(o, c, sigma, *dialect, opts)?;
                Ok(Decision::new(
                    Kind::ImplicitDefinability,
                    answer,
                    sigma.clone(),
                    *dialect,
                    Route::Implicit,
                ))
            }
        }
    }
}

fn check_sigma(sigma: &Signature, o: &Ontology, c: &Concept) -> Result<()> {
    let extra = sigma.difference(&Signature::of(o, c));
    if extra.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "signature symbols not in the input: {extra}"
        )))
    }
}

/// Whether `C1 ⊑ C2` has an interpolant under `O1 ∪ O2` over the shared
/// signature of `(O1, C1)` and `(O2, C2)`.
pub fn interpolant_exists(
    o1: &Ontology,
    c1: &Concept,
    o2: &Ontology,
    c2: &Concept,
    dialect: Dialect,
    opts: &MosaicOptions,
) -> Result<Decision> {
    check_dialect(dialect, &[o1, o2], &[c1, c2])?;
    let sigma = Signature::of(o1, c1).intersection(&Signature::of(o2, c2));
    let o = o1.union(o2);
    let problem = JointProblem {
        o1: o.clone(),
        c1: c1.clone(),
        o2: o,
        c2: c2.negate(),
        sigma,
        dialect,
    };
    Ok(Decision::from_joint(
        Kind::Interpolant,
        jointly_consistent_with(problem, opts.clone())?,
    ))
}

/// Whether `C` has an explicit definition over `Σ` under `O`.
pub fn definition_exists(
    o: &Ontology,
    c: &Concept,
    sigma: &Signature,
    dialect: Dialect,
    opts: &MosaicOptions,
) -> Result<Decision> {
    check_sigma(sigma, o, c)?;
    let problem = JointProblem {
        o1: o.clone(),
        c1: c.clone(),
        o2: o.clone(),
        c2: c.negate(),
        sigma: sigma.clone(),
        dialect,
    };
    Ok(Decision::from_joint(
        Kind::ProjectiveDefinition,
        jointly_consistent_with(problem, opts.clone())?,
    ))
}

/// Whether `{a}` has an explicit definition under `O`; `Σ` defaults to
/// `sig(O) \ {a}`.
pub fn referring_expression_exists(
    o: &Ontology,
    a: &str,
    sigma: Option<&Signature>,
    dialect: Dialect,
    opts: &MosaicOptions,
) -> Result<Decision> {
    let sig = Signature::of_ontology(o);
    if !sig.individuals.contains(a) {
        return Err(Error::Invalid(format!(
            "individual `{a}` does not occur in the ontology"
        )));
    }
    let sigma = match sigma {
        Some(s) if s.individuals.contains(a) => {
            return Err(Error::Invalid(format!(
                "individual `{a}` must not be in the signature"
            )))
        }
        Some(s) => s.clone(),
        None => sig.difference(&Signature::new().with_individual(a)),
    };
    let mut d = definition_exists(o, &Concept::nominal(a), &sigma, dialect, opts)?;
    d.kind = Kind::ReferringExpression;
    Ok(d)
}

/// Whether `C` is implicitly definable from `Σ` under `O`: `O ∪ O_Σ ⊨ C ≡ C_Σ`
/// where `O_Σ, C_Σ` rename every symbol outside `Σ` apart.
pub fn implicitly_definable(
    o: &Ontology,
    c: &Concept,
    sigma: &Signature,
    dialect: Dialect,
    opts: &MosaicOptions,
) -> Result<bool> {
    check_dialect(dialect, &[o], &[c])?;
    check_sigma(sigma, o, c)?;
    let (o2, c2, _) = rename_outside(o, c, sigma);
    let both = o.union(&o2);
    opts.check_cancel()?;
    let lim = opts.atom_limit;
    Ok(entails_ci_with(&both, c, &c2, dialect, lim)?
        && entails_ci_with(&both, &c2, c, dialect, lim)?)
}

/// Whether the concept name `A` has an explicit definition under `O` from
/// `sig(O) \ {A}`.
pub fn nonprojective_definition_exists(
    o: &Ontology,
    a: &str,
    dialect: Dialect,
    route: Route,
    opts: &MosaicOptions,
) -> Result<Decision> {
    check_dialect(dialect, &[o], &[])?;
    let sig = Signature::of_ontology(o);
    if !sig.concepts.contains(a) {
        return Err(Error::Invalid(format!(
            "concept name `{a}` does not occur in the ontology"
        )));
    }
    let sigma = sig.difference(&Signature::new().with_concept(a));
    let target = Concept::name(a);
    let route = match route {
        Route::Auto if dialect.has_beth_property() => Route::Implicit,
        Route::Auto => Route::Reduction,
        r => r,
    };
    let kind = Kind::NonprojectiveDefinition;
    match route {
        Route::Implicit if !dialect.has_beth_property() => Err(Error::Invalid(format!(
            "{dialect} lacks the Beth property; use the reduction or mosaic route"
        ))),
        Route::Implicit => {
            let answer = implicitly_definable(o, &target, &sigma, dialect, opts)?;
            Ok(Decision::new(kind, answer, sigma, dialect, route))
        }
        Route::Reduction if dialect.inverse || dialect.universal => Err(Error::Invalid(format!(
            "the reduction route covers ALCO and ALCHO only, not {dialect}"
        ))),
        Route::Reduction => {
            let red = build_beth_reduction(o, a)?;
            opts.check_cancel()?;
            let sat =
                model_of_with(&red.goal, &red.ontology, Dialect::ALCHO, opts.atom_limit)?.is_some();
            let mut d = Decision::new(kind, !sat, sigma, dialect, route);
            d.reduction = Some(red);
            Ok(d)
        }
        Route::Mosaic | Route::Auto => {
            let mut d = definition_exists(o, &target, &sigma, dialect, opts)?;
            d.kind = kind;
            Ok(d)
        }
    }
}

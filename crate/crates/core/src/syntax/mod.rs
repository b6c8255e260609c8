//! Concepts, ontologies, signatures, closures and the text format.

mod closure;
mod concept;
mod dialect;
mod parse;
mod rename;
mod signature;

pub use closure::XiClosure;
pub use concept::{Axiom, Concept, ConceptInclusion, Ontology, Role, RoleBase, RoleInclusion};
pub use dialect::{check as check_dialect, validate_concept, validate_ontology, Dialect};
pub use parse::{parse_concept, parse_document, parse_ontology, parse_role, parse_signature};
pub use rename::{rename_outside, Renaming};
pub use signature::Signature;

//! Relations, tableaux, the four dependency kinds and their semantics.

mod dependency;
mod ed;
pub mod homomorphism;
mod relation;
mod satisfy;

pub use dependency::{
    is_trivial_egd, is_trivial_tgd, trivial_witness, AttributeSeq, Dependency, Egd, Ejd, Formula,
    Ind, Tgd,
};
pub use ed::{normalize_ed, Atom, EdSentence, HeadAtom};
pub use homomorphism::{first_homomorphism, for_each_homomorphism, homomorphisms, Target};
pub use relation::{Relation, Tuple, Valuation};
pub use satisfy::{satisfies, violation, Violation};

use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("expected {expected} values, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("attribute {0} listed twice in a schema")]
    DuplicateAttribute(Symbol),
    #[error("attribute {0} is not in the relation schema")]
    UnknownAttribute(Symbol),
    #[error("schemas do not match")]
    SchemaMismatch,
    #[error("attribute sequences must be nonempty")]
    EmptySequence,
    #[error("a tgd head must contain at least one row")]
    EmptyHead,
    #[error("equated value {0} does not occur in the egd body")]
    EqualityOutsideBody(Symbol),
    #[error("a formula needs at least one conjunct")]
    EmptyFormula,
    #[error("embedded dependency mentions several relations: {0} and {1}")]
    Multirelational(String, String),
    #[error("equality atom uses existentially quantified variable {0}")]
    EqualityOverExistential(Symbol),
    #[error("embedded dependency has an empty head")]
    EmptyEdHead,
}

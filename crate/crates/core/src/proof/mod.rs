//! Deductions in the ind-based axiom system: a checker, a generator driven
//! by implied chases, and a replayer that builds the extensions promised by
//! soundness.

mod check;
mod generate;
mod replay;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Dependency, Formula, Ind, Valuation};
use crate::symbol::Symbol;

pub use check::{check_deduction, check_rule, expand_macros, LineContext};
pub use generate::{generate_deduction, generate_typed_deduction, GenerateError};
pub use replay::{replay_deduction, ReplayError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Premise(usize),
    Line(usize),
}

/// A conjunct of a premise or of an earlier line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ref {
    pub source: Source,
    pub conjunct: usize,
}

impl Ref {
    pub fn premise(index: usize) -> Ref {
        Ref {
            source: Source::Premise(index),
            conjunct: 0,
        }
    }

    pub fn line(index: usize, conjunct: usize) -> Ref {
        Ref {
            source: Source::Line(index),
            conjunct,
        }
    }
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            Source::Premise(i) => write!(f, "P{i}.{}", self.conjunct),
            Source::Line(i) => write!(f, "L{i}.{}", self.conjunct),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Premise,
    Cs,
    CsStar,
    CrTgd,
    CrEgd,
    CtTgd,
    CtEgd,
    CtStarTgd,
    CtStarEgd,
    Ee,
    Es,
    Et,
    AndIntro,
    AndElim,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::Premise,
        Rule::Cs,
        Rule::CsStar,
        Rule::CrTgd,
        Rule::CrEgd,
        Rule::CtTgd,
        Rule::CtEgd,
        Rule::CtStarTgd,
        Rule::CtStarEgd,
        Rule::Ee,
        Rule::Es,
        Rule::Et,
        Rule::AndIntro,
        Rule::AndElim,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::Premise => "Premise",
            Rule::Cs => "CS",
            Rule::CsStar => "CSstar",
            Rule::CrTgd => "CR-tgd",
            Rule::CrEgd => "CR-egd",
            Rule::CtTgd => "CT-tgd",
            Rule::CtEgd => "CT-egd",
            Rule::CtStarTgd => "CTstar-tgd",
            Rule::CtStarEgd => "CTstar-egd",
            Rule::Ee => "EE",
            Rule::Es => "ES",
            Rule::Et => "ET",
            Rule::AndIntro => "AndIntro",
            Rule::AndElim => "AndElim",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.tag() == tag)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lhs,
    Rhs,
}

/// An occurrence inside an ind: side and 0-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub side: Side,
    pub index: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Lhs => 'l',
            Side::Rhs => 'r',
        };
        write!(f, "{s}{}", self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    None,
    /// `f` for CR, `u` for CT.
    Valuation(Valuation),
    /// Occurrences swapped by EE.
    Positions(Vec<Position>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub rule: Rule,
    pub refs: Vec<Ref>,
    pub new_attrs: Vec<Symbol>,
    pub payload: Payload,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deduction {
    pub premises: Vec<Dependency>,
    pub lines: Vec<Line>,
}

impl Deduction {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Attributes introduced as new anywhere.
    pub fn new_attributes(&self) -> BTreeSet<Symbol> {
        self.lines.iter().flat_map(|l| l.new_attrs.iter().copied()).collect()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.lines.iter().filter(|l| l.rule == rule).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckErrorKind {
    #[error("reference {0} does not point to an earlier conjunct")]
    BadRef(Ref),
    #[error("rule needs {expected} references, found {found}")]
    RefCount { expected: String, found: usize },
    #[error("referenced {0} is not of the required kind")]
    WrongKind(Ref),
    #[error("required conjunct `{0}` is not referenced in order")]
    MissingConjunct(String),
    #[error("formula does not match the rule: expected `{expected}`")]
    WrongConclusion { expected: String },
    #[error("malformed instance: {0}")]
    Shape(String),
    #[error("payload does not fit the rule")]
    Payload,
    #[error("valuation is not 1-1 on the head-only values")]
    NotInjective,
    #[error("mapping is not the identity on shared value {0}")]
    NotIdentityOnShared(Symbol),
    #[error("tableau is not typed")]
    Untyped,
    #[error("attribute {0} is marked new but already occurs")]
    NotFresh(Symbol),
    #[error("attribute {0} is neither new nor introduced earlier")]
    UnknownAttribute(Symbol),
    #[error("new attributes must be {expected}")]
    NewAttributes { expected: String },
    #[error("premise not in the premise set")]
    NotAPremise,
    #[error("deduction is empty")]
    Empty,
    #[error("last formula is not the goal")]
    GoalMismatch,
    #[error("goal attribute {0} is new in the deduction")]
    NewInGoal(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct CheckError {
    /// Failing line, if the failure is local to one.
    pub line: Option<usize>,
    pub kind: CheckErrorKind,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(i) => write!(f, "line {i}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// `t(Ā) ⊆ Ā`.
pub(crate) fn row_ind(row: &[Symbol], attrs: &[Symbol]) -> Dependency {
    Ind::new(row.to_vec(), attrs.to_vec())
        .expect("row and schema have equal length")
        .into()
}

/// The two sides of an equality ind, smaller first; reflexive `AA <= AA`
/// yields `(A, A)`.
pub(crate) fn equality_pair(d: &Dependency) -> Option<(Symbol, Symbol)> {
    let Dependency::Ind(ind) = d else { return None };
    if let Some(p) = ind.as_equality() {
        return Some(p);
    }
    let (l, r) = (ind.lhs(), ind.rhs());
    if l.len() == 2 && l.iter().chain(r).all(|s| *s == l[0]) {
        return Some((l[0], l[0]));
    }
    None
}

/// Order-preserving dedup.
pub(crate) fn dedup<T: PartialEq>(items: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

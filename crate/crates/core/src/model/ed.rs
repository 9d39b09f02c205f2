use std::collections::BTreeSet;

use crate::model::{Dependency, Egd, ModelError, Relation, Tgd};
use crate::symbol::Symbol;

/// A relational atom `R(v1, ..., vn)`; arguments follow the header order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeadAtom {
    Rel(Atom),
    Eq(Symbol, Symbol),
}

/// First-order form `∀x̄ (φ → ∃z̄ ψ)` of an embedded dependency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdSentence {
    header: Vec<Symbol>,
    body: Vec<Atom>,
    head: Vec<HeadAtom>,
    universals: BTreeSet<Symbol>,
    existentials: BTreeSet<Symbol>,
}

impl EdSentence {
    /// `header` names the attributes matched positionally by atom arguments.
    /// Quantifier blocks are derived: universals are the body variables,
    /// existentials the remaining head variables.
    pub fn new(header: Vec<Symbol>, body: Vec<Atom>, head: Vec<HeadAtom>) -> Result<Self, ModelError> {
        if head.is_empty() {
            return Err(ModelError::EmptyEdHead);
        }
        let arity_ok = |a: &Atom| {
            if a.args.len() == header.len() {
                Ok(())
            } else {
                Err(ModelError::Arity {
                    expected: header.len(),
                    found: a.args.len(),
                })
            }
        };
        for a in &body {
            arity_ok(a)?;
        }
        let mut existentials = BTreeSet::new();
        let universals: BTreeSet<Symbol> = body.iter().flat_map(|a| a.args.iter().copied()).collect();
        for h in &head {
            match h {
                HeadAtom::Rel(a) => {
                    arity_ok(a)?;
                    existentials.extend(a.args.iter().filter(|v| !universals.contains(v)));
                }
                HeadAtom::Eq(x, y) => {
                    existentials.extend([x, y].into_iter().filter(|v| !universals.contains(v)));
                }
            }
        }
        Ok(EdSentence {
            header,
            body,
            head,
            universals,
            existentials,
        })
    }

    pub fn header(&self) -> &[Symbol] {
        &self.header
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn head(&self) -> &[HeadAtom] {
        &self.head
    }

    pub fn universals(&self) -> &BTreeSet<Symbol> {
        &self.universals
    }

    pub fn existentials(&self) -> &BTreeSet<Symbol> {
        &self.existentials
    }

    fn relation_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.body.iter().map(|a| a.relation.as_str()).chain(self.head.iter().filter_map(|h| match h {
            HeadAtom::Rel(a) => Some(a.relation.as_str()),
            HeadAtom::Eq(..) => None,
        }))
    }
}

/// Splits a unirelational ed into one tgd (all relational head atoms, if
/// any) and one egd per equality head atom, all sharing the body tableau.
pub fn normalize_ed(ed: &EdSentence) -> Result<Vec<Dependency>, ModelError> {
    let mut names = ed.relation_names();
    if let Some(first) = names.next() {
        if let Some(other) = names.find(|n| *n != first) {
            return Err(ModelError::Multirelational(first.to_owned(), other.to_owned()));
        }
    }
    for h in &ed.head {
        if let HeadAtom::Eq(x, y) = h {
            if let Some(v) = [x, y].into_iter().find(|v| ed.existentials.contains(v)) {
                return Err(ModelError::EqualityOverExistential(*v));
            }
        }
    }
    let body = Relation::new(&ed.header, ed.body.iter().map(|a| a.args.clone()))?;
    let head_rows: Vec<Vec<Symbol>> = ed
        .head
        .iter()
        .filter_map(|h| match h {
            HeadAtom::Rel(a) => Some(a.args.clone()),
            HeadAtom::Eq(..) => None,
        })
        .collect();
    let mut out = Vec::new();
    if !head_rows.is_empty() {
        let head = Relation::new(&ed.header, head_rows)?;
        out.push(Tgd::new(body.clone(), head)?.into());
    }
    for h in &ed.head {
        if let HeadAtom::Eq(x, y) = h {
            out.push(Egd::new(body.clone(), *x, *y)?.into());
        }
    }
    Ok(out)
}

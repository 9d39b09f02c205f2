//! Text format for relations, dependencies, and whole input files.
//!
//! ```text
//! relation r(A,B,C) { (0,1,2); (3,0,1); }
//! tgd mvd over (A,B,C): { (a,b,c); (a,_,d) } => { (a,b,d) }
//! egd fd over (A,B): { (x,y); (x,z) } => y = z
//! ind i1: A B <= B C
//! ejd j: join (A,B)(B,C)
//! ed e over (A,B,C): R(x,y,z) & R(_,x,y) -> R(z,_,x) & y = z
//! goal: mvd
//! ```
//!
//! `_` stands for a value occurring nowhere else; it is read as a fresh `@k`
//! symbol, which is also how it prints back.

mod document;
mod lexer;
mod parser;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::model::{normalize_ed, Dependency, EdSentence, Formula, HeadAtom, ModelError, Relation};
use crate::symbol::{FreshSource, Symbol};

pub(crate) use parser::Parser;
pub use document::{parse_deduction, write_deduction, write_relation, write_trace};
pub use parser::{parse_dependency, parse_formula};
pub(crate) use lexer::Tok;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { found: String, expected: String },
    #[error("expected {expected}, found end of input")]
    UnexpectedEof { expected: String },
    #[error("arity mismatch: expected {expected} values, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("attribute `{0}` is not declared in any header")]
    UnknownAttribute(String),
    #[error("name `{0}` is declared twice")]
    DuplicateName(String),
    #[error("no dependency named `{0}`")]
    UnknownName(String),
    #[error("more than one goal")]
    DuplicateGoal,
    #[error("{0}")]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn at(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }

    pub(crate) fn model(pos: Pos, e: ModelError) -> Self {
        ParseError {
            pos,
            kind: ParseErrorKind::Model(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoalRef {
    Named(String),
    Inline(Dependency),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Relation(Relation),
    Dependency(Dependency),
    Ed(EdSentence),
    Goal(GoalRef),
}

/// One top-level declaration; equality ignores the source position.
#[derive(Clone, Debug)]
pub struct Decl {
    pub name: Option<String>,
    pub item: Item,
    pub pos: Pos,
}

impl PartialEq for Decl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.item == other.item
    }
}

impl Eq for Decl {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

impl SourceFile {
    pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
        Self::parse_with(text, &mut FreshSource::new())
    }

    /// Parses with blanks minted from (and advancing) `fresh`, so several
    /// files can share one supply of distinct values.
    pub fn parse_with(text: &str, fresh: &mut FreshSource) -> Result<SourceFile, ParseError> {
        parser::parse_file(text, fresh)
    }

    fn validate(&self) -> Result<(), ParseError> {
        let mut names: HashMap<&str, &Decl> = HashMap::new();
        let mut declared: BTreeSet<Symbol> = BTreeSet::new();
        let mut goal: Option<&Decl> = None;
        for d in &self.decls {
            if let Some(n) = &d.name {
                if names.insert(n, d).is_some() {
                    return Err(ParseError::at(d.pos, ParseErrorKind::DuplicateName(n.clone())));
                }
            }
            match &d.item {
                Item::Relation(r) => declared.extend(r.schema().iter().copied()),
                Item::Dependency(Dependency::Egd(e)) => declared.extend(e.schema().iter().copied()),
                Item::Dependency(Dependency::Tgd(t)) => declared.extend(t.schema().iter().copied()),
                Item::Ed(e) => {
                    declared.extend(e.header().iter().copied());
                    normalize_ed(e).map_err(|e| ParseError::model(d.pos, e))?;
                }
                Item::Goal(_) => {
                    if goal.is_some() {
                        return Err(ParseError::at(d.pos, ParseErrorKind::DuplicateGoal));
                    }
                    goal = Some(d);
                }
                Item::Dependency(_) => {}
            }
        }
        if !declared.is_empty() {
            for d in &self.decls {
                let attrs = match &d.item {
                    Item::Dependency(dep @ (Dependency::Ind(_) | Dependency::Ejd(_))) => dep.attributes(),
                    Item::Goal(GoalRef::Inline(dep)) => dep.attributes(),
                    _ => continue,
                };
                if let Some(a) = attrs.iter().find(|a| !declared.contains(a)) {
                    return Err(ParseError::at(d.pos, ParseErrorKind::UnknownAttribute(a.to_string())));
                }
            }
        }
        if let Some(g) = goal {
            if let Item::Goal(GoalRef::Named(n)) = &g.item {
                match names.get(n.as_str()).map(|d| &d.item) {
                    Some(Item::Dependency(_)) | Some(Item::Ed(_)) => {}
                    _ => return Err(ParseError::at(g.pos, ParseErrorKind::UnknownName(n.clone()))),
                }
            }
        }
        Ok(())
    }

    fn goal_name(&self) -> Option<&str> {
        self.decls.iter().find_map(|d| match &d.item {
            Item::Goal(GoalRef::Named(n)) => Some(n.as_str()),
            _ => None,
        })
    }

    /// Declared dependencies with eds normalized, in declaration order.
    /// A declaration named by `goal:` is not included.
    pub fn dependencies(&self) -> Result<Vec<Dependency>, ModelError> {
        let skip = self.goal_name();
        let mut out = Vec::new();
        for d in &self.decls {
            if skip.is_some() && d.name.as_deref() == skip {
                continue;
            }
            match &d.item {
                Item::Dependency(dep) => out.push(dep.clone()),
                Item::Ed(e) => out.extend(normalize_ed(e)?),
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn relations(&self) -> Vec<(&str, &Relation)> {
        self.decls
            .iter()
            .filter_map(|d| match (&d.name, &d.item) {
                (Some(n), Item::Relation(r)) => Some((n.as_str(), r)),
                _ => None,
            })
            .collect()
    }

    pub fn goal(&self) -> Result<Option<Formula>, ModelError> {
        for d in &self.decls {
            match &d.item {
                Item::Goal(GoalRef::Inline(dep)) => return Ok(Some(Formula::single(dep.clone()))),
                Item::Goal(GoalRef::Named(n)) => {
                    let target = self.decls.iter().find(|t| t.name.as_deref() == Some(n));
                    return match target.map(|t| &t.item) {
                        Some(Item::Dependency(dep)) => Ok(Some(Formula::single(dep.clone()))),
                        Some(Item::Ed(e)) => Formula::new(normalize_ed(e)?).map(Some),
                        _ => Ok(None),
                    };
                }
                _ => {}
            }
        }
        Ok(None)
    }

    /// Largest fresh index used anywhere, plus one.
    pub fn fresh_watermark(&self) -> u32 {
        let mut all = Vec::new();
        for d in &self.decls {
            match &d.item {
                Item::Relation(r) => all.extend(r.values()),
                Item::Dependency(dep) | Item::Goal(GoalRef::Inline(dep)) => {
                    all.extend(dep.values());
                    all.extend(dep.attributes());
                }
                Item::Ed(e) => {
                    all.extend(e.universals().iter().copied());
                    all.extend(e.existentials().iter().copied());
                }
                Item::Goal(GoalRef::Named(_)) => {}
            }
        }
        FreshSource::above(all.iter()).watermark()
    }
}

fn write_named(f: &mut fmt::Formatter<'_>, kw: &str, name: &Option<String>) -> fmt::Result {
    match name {
        Some(n) => write!(f, "{kw} {n}"),
        None => write!(f, "{kw}"),
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Symbol]) -> fmt::Result {
    let parts: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    write!(f, "({})", parts.join(","))
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.item {
            Item::Relation(r) => {
                let text = r.to_string();
                let (header, rows) = text.split_once(": ").unwrap_or((&text, "{}"));
                write!(f, "relation {}{header} {rows}", self.name.as_deref().unwrap_or("r"))
            }
            Item::Dependency(dep) => {
                let text = dep.to_string();
                match dep {
                    Dependency::Egd(_) | Dependency::Tgd(_) => {
                        let (kw, rest) = text.split_at(3);
                        write_named(f, kw, &self.name)?;
                        write!(f, "{rest}")
                    }
                    Dependency::Ind(_) => {
                        write_named(f, "ind", &self.name)?;
                        write!(f, ": {}", text.strip_prefix("ind ").unwrap_or(&text))
                    }
                    Dependency::Ejd(_) => {
                        write_named(f, "ejd", &self.name)?;
                        write!(f, ": {text}")
                    }
                }
            }
            Item::Ed(e) => {
                write_named(f, "ed", &self.name)?;
                write!(f, " over ")?;
                write_args(f, e.header())?;
                write!(f, ":")?;
                for (i, a) in e.body().iter().enumerate() {
                    write!(f, "{} {}", if i > 0 { " &" } else { "" }, a.relation)?;
                    write_args(f, &a.args)?;
                }
                write!(f, " ->")?;
                for (i, h) in e.head().iter().enumerate() {
                    if i > 0 {
                        write!(f, " &")?;
                    }
                    match h {
                        HeadAtom::Rel(a) => {
                            write!(f, " {}", a.relation)?;
                            write_args(f, &a.args)?;
                        }
                        HeadAtom::Eq(x, y) => write!(f, " {x} = {y}")?,
                    }
                }
                Ok(())
            }
            Item::Goal(GoalRef::Named(n)) => write!(f, "goal: {n}"),
            Item::Goal(GoalRef::Inline(dep)) => write!(f, "goal: {dep}"),
        }
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::relation::{column_assignment, write_list, Relation};
use crate::model::ModelError;
use crate::symbol::Symbol;

/// An ordered attribute sequence; positions matter and duplicates are allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AttributeSeq(Vec<Symbol>);

impl AttributeSeq {
    pub fn new(attrs: Vec<Symbol>) -> Result<Self, ModelError> {
        if attrs.is_empty() {
            return Err(ModelError::EmptySequence);
        }
        Ok(AttributeSeq(attrs))
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for AttributeSeq {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

/// Equality generating dependency `(T, x = y)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Egd {
    body: Relation,
    lhs: Symbol,
    rhs: Symbol,
}

impl Egd {
    pub fn new(body: Relation, lhs: Symbol, rhs: Symbol) -> Result<Self, ModelError> {
        let vals = body.values();
        for s in [lhs, rhs] {
            if !vals.contains(&s) {
                return Err(ModelError::EqualityOutsideBody(s));
            }
        }
        Ok(Egd { body, lhs, rhs })
    }

    pub fn body(&self) -> &Relation {
        &self.body
    }

    pub fn lhs(&self) -> Symbol {
        self.lhs
    }

    pub fn rhs(&self) -> Symbol {
        self.rhs
    }

    pub fn schema(&self) -> &[Symbol] {
        self.body.schema()
    }
}

/// Tuple generating dependency `(T, T')`; the body may be empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Tgd {
    body: Relation,
    head: Relation,
}

impl Tgd {
    pub fn new(body: Relation, head: Relation) -> Result<Self, ModelError> {
        if body.schema() != head.schema() {
            return Err(ModelError::SchemaMismatch);
        }
        if head.is_empty() {
            return Err(ModelError::EmptyHead);
        }
        Ok(Tgd { body, head })
    }

    pub fn body(&self) -> &Relation {
        &self.body
    }

    pub fn head(&self) -> &Relation {
        &self.head
    }

    pub fn schema(&self) -> &[Symbol] {
        self.body.schema()
    }

    /// Values occurring in the head but not in the body.
    pub fn head_only_values(&self) -> BTreeSet<Symbol> {
        let body = self.body.values();
        self.head.values().into_iter().filter(|v| !body.contains(v)).collect()
    }

    pub fn shared_values(&self) -> BTreeSet<Symbol> {
        let body = self.body.values();
        self.head.values().into_iter().filter(|v| body.contains(v)).collect()
    }
}

/// Inclusion dependency `A1..An <= B1..Bn`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Ind {
    lhs: AttributeSeq,
    rhs: AttributeSeq,
}

impl Ind {
    pub fn new(lhs: Vec<Symbol>, rhs: Vec<Symbol>) -> Result<Self, ModelError> {
        if lhs.len() != rhs.len() {
            return Err(ModelError::Arity {
                expected: lhs.len(),
                found: rhs.len(),
            });
        }
        Ok(Ind {
            lhs: AttributeSeq::new(lhs)?,
            rhs: AttributeSeq::new(rhs)?,
        })
    }

    /// `A = B`, stored as `AB <= AA` with `A` the smaller symbol.
    pub fn equality(a: Symbol, b: Symbol) -> Ind {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Ind {
            lhs: AttributeSeq(vec![lo, hi]),
            rhs: AttributeSeq(vec![lo, lo]),
        }
    }

    pub fn lhs(&self) -> &[Symbol] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Symbol] {
        &self.rhs
    }

    /// If this ind states that two columns agree row-wise, the two attributes
    /// (smaller first). Recognizes `AB <= AA`, `AB <= BB` and their permutations.
    pub fn as_equality(&self) -> Option<(Symbol, Symbol)> {
        if self.lhs.len() != 2 {
            return None;
        }
        let target = self.rhs[0];
        if self.rhs[1] != target {
            return None;
        }
        let (p, q) = (self.lhs[0], self.lhs[1]);
        let other = if p == target {
            q
        } else if q == target {
            p
        } else {
            return None;
        };
        if other == target {
            return None;
        }
        Some(if target < other { (target, other) } else { (other, target) })
    }

    /// Canonical key: the set of column pairs. Inds with equal keys are
    /// equivalent (positions may be permuted or repeated).
    pub fn key(&self) -> BTreeSet<(Symbol, Symbol)> {
        self.lhs.iter().copied().zip(self.rhs.iter().copied()).collect()
    }

    pub fn attributes(&self) -> BTreeSet<Symbol> {
        self.lhs.iter().chain(self.rhs.iter()).copied().collect()
    }
}

/// Embedded join dependency over attribute sequences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Ejd {
    components: Vec<AttributeSeq>,
}

impl Ejd {
    pub fn new(components: Vec<Vec<Symbol>>) -> Result<Self, ModelError> {
        if components.is_empty() {
            return Err(ModelError::EmptySequence);
        }
        Ok(Ejd {
            components: components
                .into_iter()
                .map(AttributeSeq::new)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn components(&self) -> &[AttributeSeq] {
        &self.components
    }

    pub fn attributes(&self) -> BTreeSet<Symbol> {
        self.components.iter().flat_map(|c| c.iter().copied()).collect()
    }

    /// Component attribute sets; two ejds with the same key are equivalent.
    pub fn key(&self) -> BTreeSet<BTreeSet<Symbol>> {
        self.components
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }
}

/// Any of the four dependency kinds.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Dependency {
    Egd(Egd),
    Tgd(Tgd),
    Ind(Ind),
    Ejd(Ejd),
}

impl Dependency {
    /// `Att(d)`.
    pub fn attributes(&self) -> BTreeSet<Symbol> {
        match self {
            Dependency::Egd(e) => e.schema().iter().copied().collect(),
            Dependency::Tgd(t) => t.schema().iter().copied().collect(),
            Dependency::Ind(i) => i.attributes(),
            Dependency::Ejd(j) => j.attributes(),
        }
    }

    /// `Val(d)` for egds and tgds; empty for inds and ejds.
    pub fn values(&self) -> BTreeSet<Symbol> {
        match self {
            Dependency::Egd(e) => e.body.values(),
            Dependency::Tgd(t) => {
                let mut v = t.body.values();
                v.extend(t.head.values());
                v
            }
            _ => BTreeSet::new(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Dependency::Egd(_) => "egd",
            Dependency::Tgd(_) => "tgd",
            Dependency::Ind(_) => "ind",
            Dependency::Ejd(_) => "ejd",
        }
    }

    /// Equality up to the harmless permutations of ind positions and ejd
    /// component order.
    pub fn same_as(&self, other: &Dependency) -> bool {
        match (self, other) {
            (Dependency::Ind(a), Dependency::Ind(b)) => a.key() == b.key(),
            (Dependency::Ejd(a), Dependency::Ejd(b)) => a.key() == b.key(),
            _ => self == other,
        }
    }

    /// Trivial egds/tgds; inds and ejds are never reported trivial here.
    pub fn is_trivial(&self) -> bool {
        match self {
            Dependency::Egd(e) => is_trivial_egd(e),
            Dependency::Tgd(t) => is_trivial_tgd(t),
            _ => false,
        }
    }

    /// Every value occurs under exactly one attribute; egd sides share one.
    pub fn is_typed(&self) -> bool {
        match self {
            Dependency::Egd(e) => match column_assignment([&e.body]) {
                Some(cols) => cols.get(&e.lhs) == cols.get(&e.rhs),
                None => false,
            },
            Dependency::Tgd(t) => column_assignment([&t.body, &t.head]).is_some(),
            _ => true,
        }
    }

    /// Values occurring exactly once across all cells (egds exclude `x`, `y`).
    pub fn distinct_values(&self) -> BTreeSet<Symbol> {
        let (rels, excluded): (Vec<&Relation>, Vec<Symbol>) = match self {
            Dependency::Egd(e) => (vec![&e.body], vec![e.lhs, e.rhs]),
            Dependency::Tgd(t) => (vec![&t.body, &t.head], vec![]),
            _ => return BTreeSet::new(),
        };
        let mut counts: BTreeMap<Symbol, usize> = BTreeMap::new();
        for rel in rels {
            for v in rel.rows().flatten() {
                *counts.entry(*v).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .filter(|(v, n)| *n == 1 && !excluded.contains(v))
            .map(|(v, _)| v)
            .collect()
    }
}

pub fn is_trivial_egd(e: &Egd) -> bool {
    e.lhs == e.rhs
}

/// A valuation on `T'`, identity on shared values, mapping `T'` into `T`.
pub fn is_trivial_tgd(t: &Tgd) -> bool {
    trivial_witness(t).is_some()
}

pub fn trivial_witness(t: &Tgd) -> Option<crate::model::Valuation> {
    let fixed = t.shared_values().into_iter().map(|v| (v, v)).collect();
    crate::model::homomorphism::first_homomorphism(&t.head, &t.body, &fixed)
        .expect("head and body share a schema")
}

impl From<Egd> for Dependency {
    fn from(e: Egd) -> Self {
        Dependency::Egd(e)
    }
}

impl From<Tgd> for Dependency {
    fn from(t: Tgd) -> Self {
        Dependency::Tgd(t)
    }
}

impl From<Ind> for Dependency {
    fn from(i: Ind) -> Self {
        Dependency::Ind(i)
    }
}

impl From<Ejd> for Dependency {
    fn from(j: Ejd) -> Self {
        Dependency::Ejd(j)
    }
}

/// A nonempty conjunction of dependencies.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Formula {
    conjuncts: Vec<Dependency>,
}

impl Formula {
    pub fn new(conjuncts: Vec<Dependency>) -> Result<Self, ModelError> {
        if conjuncts.is_empty() {
            return Err(ModelError::EmptyFormula);
        }
        Ok(Formula { conjuncts })
    }

    pub fn single(d: impl Into<Dependency>) -> Self {
        Formula {
            conjuncts: vec![d.into()],
        }
    }

    pub fn conjuncts(&self) -> &[Dependency] {
        &self.conjuncts
    }

    pub fn into_conjuncts(self) -> Vec<Dependency> {
        self.conjuncts
    }

    pub fn attributes(&self) -> BTreeSet<Symbol> {
        self.conjuncts.iter().flat_map(|d| d.attributes()).collect()
    }
}

fn write_rows(f: &mut fmt::Formatter<'_>, r: &Relation) -> fmt::Result {
    write!(f, "{{")?;
    for (i, row) in r.rows().enumerate() {
        if i > 0 {
            write!(f, ";")?;
        }
        write!(f, " (")?;
        write_list(f, row)?;
        write!(f, ")")?;
    }
    if !r.is_empty() {
        write!(f, " ")?;
    }
    write!(f, "}}")
}

fn write_header(f: &mut fmt::Formatter<'_>, schema: &[Symbol]) -> fmt::Result {
    write!(f, "over (")?;
    write_list(f, schema)?;
    write!(f, ")")
}

fn write_seq(f: &mut fmt::Formatter<'_>, seq: &[Symbol]) -> fmt::Result {
    for (i, s) in seq.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

impl fmt::Display for Egd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "egd ")?;
        write_header(f, self.schema())?;
        write!(f, ": ")?;
        write_rows(f, &self.body)?;
        write!(f, " => {} = {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for Tgd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tgd ")?;
        write_header(f, self.schema())?;
        write!(f, ": ")?;
        write_rows(f, &self.body)?;
        write!(f, " => ")?;
        write_rows(f, &self.head)
    }
}

impl fmt::Display for Ind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lhs.len() == 2 && self.lhs[0] < self.lhs[1] && *self == Ind::equality(self.lhs[0], self.lhs[1]) {
            return write!(f, "{} = {}", self.lhs[0], self.lhs[1]);
        }
        write!(f, "ind ")?;
        write_seq(f, &self.lhs)?;
        write!(f, " <= ")?;
        write_seq(f, &self.rhs)
    }
}

impl fmt::Display for Ejd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "join ")?;
        for c in &self.components {
            write!(f, "(")?;
            write_list(f, c)?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dependency::Egd(e) => e.fmt(f),
            Dependency::Tgd(t) => t.fmt(f),
            Dependency::Ind(i) => i.fmt(f),
            Dependency::Ejd(j) => j.fmt(f),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

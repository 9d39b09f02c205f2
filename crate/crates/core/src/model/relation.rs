use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::ModelError;
use crate::symbol::Symbol;

/// A row of a relation, positional over the owning relation's schema.
pub type Tuple = Vec<Symbol>;

/// A finite set of tuples over a schema of attributes.
///
/// Columns are kept in symbol order, so two relations over the same attribute
/// set compare equal exactly when they hold the same tuples.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    schema: Vec<Symbol>,
    rows: BTreeSet<Tuple>,
}

impl Relation {
    /// Builds a relation from rows written positionally against `header`.
    pub fn new<I>(header: &[Symbol], rows: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let mut schema = header.to_vec();
        schema.sort();
        if let Some(w) = schema.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateAttribute(w[0]));
        }
        let perm: Vec<usize> = schema
            .iter()
            .map(|a| header.iter().position(|h| h == a).unwrap())
            .collect();
        let mut out = BTreeSet::new();
        for row in rows {
            if row.len() != header.len() {
                return Err(ModelError::Arity {
                    expected: header.len(),
                    found: row.len(),
                });
            }
            out.insert(perm.iter().map(|&i| row[i]).collect());
        }
        Ok(Relation { schema, rows: out })
    }

    pub fn empty(header: &[Symbol]) -> Result<Self, ModelError> {
        Self::new(header, std::iter::empty())
    }

    pub fn schema(&self) -> &[Symbol] {
        &self.schema
    }

    pub fn rows(&self) -> impl Iterator<Item = &Tuple> + '_ {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: &[Symbol]) -> bool {
        self.rows.contains(row)
    }

    pub fn column(&self, attr: Symbol) -> Option<usize> {
        self.schema.binary_search(&attr).ok()
    }

    pub fn has_attributes(&self, attrs: &[Symbol]) -> bool {
        attrs.iter().all(|a| self.column(*a).is_some())
    }

    /// Inserts a row given in schema order.
    pub fn insert(&mut self, row: Tuple) -> bool {
        debug_assert_eq!(row.len(), self.schema.len());
        self.rows.insert(row)
    }

    /// Value of `row` at attribute `attr`.
    pub fn cell(&self, row: &[Symbol], attr: Symbol) -> Option<Symbol> {
        self.column(attr).map(|i| row[i])
    }

    /// `Val(r)`: all values occurring in cells.
    pub fn values(&self) -> BTreeSet<Symbol> {
        self.rows.iter().flatten().copied().collect()
    }

    /// Restriction `r[X]` to the attributes in `attrs` (duplicates collapse).
    pub fn project(&self, attrs: &[Symbol]) -> Result<Relation, ModelError> {
        let idx = self.indices(attrs)?;
        Relation::new(
            attrs,
            self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()),
        )
    }

    /// Positions of `attrs` in this relation's schema.
    pub fn indices(&self, attrs: &[Symbol]) -> Result<Vec<usize>, ModelError> {
        attrs
            .iter()
            .map(|a| self.column(*a).ok_or(ModelError::UnknownAttribute(*a)))
            .collect()
    }

    /// Projection of a single row onto an attribute sequence (order kept).
    pub fn row_values(&self, row: &[Symbol], attrs: &[Symbol]) -> Result<Vec<Symbol>, ModelError> {
        Ok(self.indices(attrs)?.into_iter().map(|i| row[i]).collect())
    }

    /// Applies a valuation cell-wise.
    pub fn map(&self, f: &Valuation) -> Relation {
        Relation {
            schema: self.schema.clone(),
            rows: self.rows.iter().map(|r| f.apply_all(r)).collect(),
        }
    }

    pub fn union(&self, other: &Relation) -> Result<Relation, ModelError> {
        if self.schema != other.schema {
            return Err(ModelError::SchemaMismatch);
        }
        let mut out = self.clone();
        out.rows.extend(other.rows.iter().cloned());
        Ok(out)
    }

    /// Natural join; a cross product when the schemas are disjoint.
    pub fn join(&self, other: &Relation) -> Relation {
        let mut header: Vec<Symbol> = self.schema.clone();
        for a in &other.schema {
            if self.column(*a).is_none() {
                header.push(*a);
            }
        }
        let shared: Vec<(usize, usize)> = self
            .schema
            .iter()
            .enumerate()
            .filter_map(|(i, a)| other.column(*a).map(|j| (i, j)))
            .collect();
        let extra: Vec<usize> = other
            .schema
            .iter()
            .enumerate()
            .filter(|(_, a)| self.column(**a).is_none())
            .map(|(j, _)| j)
            .collect();
        let mut rows = Vec::new();
        for l in &self.rows {
            for r in &other.rows {
                if shared.iter().all(|&(i, j)| l[i] == r[j]) {
                    let mut row = l.clone();
                    row.extend(extra.iter().map(|&j| r[j]));
                    rows.push(row);
                }
            }
        }
        Relation::new(&header, rows).expect("join header is duplicate free")
    }

    /// True iff no value appears under two distinct attributes.
    pub fn is_typed(&self) -> bool {
        column_assignment(std::iter::once(self)).is_some()
    }
}

/// Maps each value to the single column it occurs in, or `None` if some value
/// occurs under two attributes.
pub(crate) fn column_assignment<'a>(
    rels: impl IntoIterator<Item = &'a Relation>,
) -> Option<BTreeMap<Symbol, Symbol>> {
    let mut seen: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    for rel in rels {
        for row in rel.rows() {
            for (attr, v) in rel.schema.iter().zip(row) {
                match seen.insert(*v, *attr) {
                    Some(prev) if prev != *attr => return None,
                    _ => {}
                }
            }
        }
    }
    Some(seen)
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        write_list(f, &self.schema)?;
        write!(f, "): {{")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, " (")?;
            write_list(f, row)?;
            write!(f, ")")?;
        }
        if !self.rows.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn write_list(f: &mut fmt::Formatter<'_>, items: &[Symbol]) -> fmt::Result {
    for (i, s) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// A (partial) map from symbols to symbols; identity outside its domain.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(BTreeMap<Symbol, Symbol>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: Symbol) -> Option<Symbol> {
        self.0.get(&s).copied()
    }

    pub fn apply(&self, s: Symbol) -> Symbol {
        self.get(s).unwrap_or(s)
    }

    pub fn apply_all(&self, row: &[Symbol]) -> Tuple {
        row.iter().map(|s| self.apply(*s)).collect()
    }

    pub fn insert(&mut self, from: Symbol, to: Symbol) -> Option<Symbol> {
        self.0.insert(from, to)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.0.contains_key(&s)
    }

    pub fn domain(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.0.iter().map(|(a, b)| (*a, *b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restriction to the symbols in `keep`.
    pub fn restrict<'a>(&self, keep: impl IntoIterator<Item = &'a Symbol>) -> Valuation {
        keep.into_iter()
            .filter_map(|s| self.get(*s).map(|v| (*s, v)))
            .collect()
    }

    /// True iff the valuation is injective on `over`.
    pub fn injective_on<'a>(&self, over: impl IntoIterator<Item = &'a Symbol>) -> bool {
        let mut images = BTreeSet::new();
        over.into_iter().all(|s| images.insert(self.apply(*s)))
    }
}

impl FromIterator<(Symbol, Symbol)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (Symbol, Symbol)>>(iter: T) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}->{b}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::syms;

    #[test]
    fn columns_are_sorted_on_construction() {
        let r = Relation::new(&syms("C A"), vec![syms("1 2")]).unwrap();
        assert_eq!(r.schema(), syms("A C").as_slice());
        assert!(r.contains(&syms("2 1")));
    }

    #[test]
    fn arity_and_duplicates_rejected() {
        assert!(matches!(
            Relation::new(&syms("A B"), vec![syms("1")]),
            Err(ModelError::Arity { .. })
        ));
        assert!(matches!(
            Relation::new(&syms("A A"), vec![]),
            Err(ModelError::DuplicateAttribute(_))
        ));
    }

    #[test]
    fn join_of_projections() {
        let r = Relation::new(&syms("A B C"), vec![syms("0 1 2"), syms("3 1 4")]).unwrap();
        let j = r.project(&syms("A B")).unwrap().join(&r.project(&syms("B C")).unwrap());
        assert_eq!(j.len(), 4);
        assert!(j.contains(&syms("0 1 4")));
    }

    #[test]
    fn typedness() {
        let t = Relation::new(&syms("A B"), vec![syms("x y"), syms("y x")]).unwrap();
        assert!(!t.is_typed());
        let u = Relation::new(&syms("A B"), vec![syms("x y"), syms("x z")]).unwrap();
        assert!(u.is_typed());
    }
}

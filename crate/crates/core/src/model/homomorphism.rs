//! Backtracking search for valuations embedding a tableau into a relation.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use crate::model::relation::{Relation, Tuple, Valuation};
use crate::model::ModelError;
use crate::symbol::Symbol;

struct Search<'a, 'v> {
    pattern: Vec<Vec<usize>>,
    order: Vec<usize>,
    vars: Vec<Symbol>,
    target: &'a Target,
    assignment: Vec<Option<Symbol>>,
    visit: &'v mut dyn FnMut(&Valuation) -> ControlFlow<()>,
}

impl Search<'_, '_> {
    fn run(&mut self, depth: usize) -> ControlFlow<()> {
        if depth == self.order.len() {
            let val: Valuation = self
                .vars
                .iter()
                .zip(&self.assignment)
                .map(|(v, a)| (*v, a.expect("every variable occurs in some row")))
                .collect();
            return (self.visit)(&val);
        }
        let target = self.target;
        let pattern = &self.pattern[self.order[depth]];
        let bucket: Option<&[usize]> = pattern
            .iter()
            .enumerate()
            .filter_map(|(col, &v)| self.assignment[v].map(|s| (col, s)))
            .map(|(col, s)| target.index[col].get(&s).map(Vec::as_slice).unwrap_or(&[]))
            .min_by_key(|b| b.len());
        let all: Vec<usize>;
        let candidates = match bucket {
            Some(b) => b,
            None => {
                all = (0..target.rows.len()).collect();
                &all
            }
        };
        let mut bound = Vec::with_capacity(pattern.len());
        for &c in candidates {
            bound.clear();
            let mut ok = true;
            for (col, &v) in self.pattern[self.order[depth]].iter().enumerate() {
                let value = target.rows[c][col];
                match self.assignment[v] {
                    Some(s) if s != value => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        self.assignment[v] = Some(value);
                        bound.push(v);
                    }
                }
            }
            if ok {
                self.run(depth + 1)?;
            }
            for v in bound.drain(..) {
                self.assignment[v] = None;
            }
        }
        ControlFlow::Continue(())
    }
}

/// A relation restricted to a schema and indexed by column values, for
/// repeated searches against the same rows.
pub struct Target {
    schema: Vec<Symbol>,
    rows: Vec<Tuple>,
    index: Vec<HashMap<Symbol, Vec<usize>>>,
}

impl Target {
    pub fn new(r: &Relation, schema: &[Symbol]) -> Result<Target, ModelError> {
        let restricted = if r.schema() == schema {
            r.clone()
        } else {
            r.project(schema)?
        };
        let rows: Vec<Tuple> = restricted.rows().cloned().collect();
        let mut index: Vec<HashMap<Symbol, Vec<usize>>> = vec![HashMap::new(); schema.len()];
        for (i, row) in rows.iter().enumerate() {
            for (col, s) in row.iter().enumerate() {
                index[col].entry(*s).or_default().push(i);
            }
        }
        Ok(Target {
            schema: restricted.schema().to_vec(),
            rows,
            index,
        })
    }

    /// Calls `visit` for each valuation `f` on `Val(t)` that extends `fixed`
    /// and satisfies `f(t) ⊆ r[schema(t)]`. Stops early when `visit` breaks.
    ///
    /// Rows of `t` are matched most-constrained first; candidate rows are
    /// tried in sorted order, so the enumeration order is deterministic.
    pub fn for_each(
        &self,
        t: &Relation,
        fixed: &Valuation,
        mut visit: impl FnMut(&Valuation) -> ControlFlow<()>,
    ) -> Result<(), ModelError> {
        if t.schema() != self.schema.as_slice() {
            return Err(ModelError::SchemaMismatch);
        }
        let vars: Vec<Symbol> = t.values().into_iter().collect();
        let var_index: BTreeMap<Symbol, usize> =
            vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let pattern: Vec<Vec<usize>> = t
            .rows()
            .map(|row| row.iter().map(|s| var_index[s]).collect())
            .collect();
        let assignment: Vec<Option<Symbol>> = vars.iter().map(|v| fixed.get(*v)).collect();

        let mut known: Vec<bool> = assignment.iter().map(Option::is_some).collect();
        let mut remaining: Vec<usize> = (0..pattern.len()).collect();
        let mut order = Vec::with_capacity(pattern.len());
        while !remaining.is_empty() {
            let (pos, _) = remaining
                .iter()
                .enumerate()
                .max_by_key(|(pos, &row)| {
                    let score = pattern[row].iter().filter(|&&v| known[v]).count();
                    (score, std::cmp::Reverse(*pos))
                })
                .expect("nonempty");
            let row = remaining.remove(pos);
            for &v in &pattern[row] {
                known[v] = true;
            }
            order.push(row);
        }

        let mut search = Search {
            pattern,
            order,
            vars,
            target: self,
            assignment,
            visit: &mut visit,
        };
        let _ = search.run(0);
        Ok(())
    }

    pub fn first(&self, t: &Relation, fixed: &Valuation) -> Result<Option<Valuation>, ModelError> {
        let mut out = None;
        self.for_each(t, fixed, |v| {
            out = Some(v.clone());
            ControlFlow::Break(())
        })?;
        Ok(out)
    }

    pub fn all(&self, t: &Relation, fixed: &Valuation) -> Result<Vec<Valuation>, ModelError> {
        let mut out = Vec::new();
        self.for_each(t, fixed, |v| {
            out.push(v.clone());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }
}

/// One-shot [`Target::for_each`].
pub fn for_each_homomorphism(
    t: &Relation,
    r: &Relation,
    fixed: &Valuation,
    visit: impl FnMut(&Valuation) -> ControlFlow<()>,
) -> Result<(), ModelError> {
    Target::new(r, t.schema())?.for_each(t, fixed, visit)
}

/// All homomorphisms in enumeration order.
pub fn homomorphisms(
    t: &Relation,
    r: &Relation,
    fixed: &Valuation,
) -> Result<Vec<Valuation>, ModelError> {
    Target::new(r, t.schema())?.all(t, fixed)
}

pub fn first_homomorphism(
    t: &Relation,
    r: &Relation,
    fixed: &Valuation,
) -> Result<Option<Valuation>, ModelError> {
    Target::new(r, t.schema())?.first(t, fixed)
}

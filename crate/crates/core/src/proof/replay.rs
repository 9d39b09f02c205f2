use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    homomorphisms, satisfies, Target, Dependency, ModelError, Relation, Valuation,
};
use crate::proof::check::{start_shape, typed_start_shape};
use crate::proof::{Deduction, Payload, Rule, Source};
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("the relation has no attribute {0}")]
    MissingAttribute(Symbol),
    #[error("the relation violates premise {0}")]
    PremiseViolated(usize),
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
}

type Row = BTreeMap<Symbol, Symbol>;

fn to_relation(schema: &BTreeSet<Symbol>, rows: &[Row]) -> Relation {
    let header: Vec<Symbol> = schema.iter().copied().collect();
    Relation::new(&header, rows.iter().map(|r| r.values().copied().collect::<Vec<_>>()))
        .expect("rows are keyed by the schema")
}

fn model_err(line: usize) -> impl Fn(ModelError) -> ReplayError {
    move |e| match e {
        ModelError::UnknownAttribute(a) => ReplayError::MissingAttribute(a),
        other => ReplayError::Line {
            line,
            reason: other.to_string(),
        },
    }
}

/// Extends `r` line by line to the attributes a deduction introduces, using
/// the constructions from the soundness argument, and checks every conjunct
/// of every line on the extension.
///
/// A chase-start line joins the current relation with all embeddings of its
/// tableau `T`; when `T` has no embedding the result is empty.
pub fn replay_deduction(r: &Relation, ded: &Deduction) -> Result<Relation, ReplayError> {
    for (i, p) in ded.premises.iter().enumerate() {
        if !satisfies(r, p).map_err(model_err(0))? {
            return Err(ReplayError::PremiseViolated(i));
        }
    }
    let mut schema: BTreeSet<Symbol> = r.schema().iter().copied().collect();
    let mut rows: Vec<Row> = r
        .rows()
        .map(|row| r.schema().iter().copied().zip(row.iter().copied()).collect())
        .collect();
    for (i, line) in ded.lines.iter().enumerate() {
        let fail = |reason: String| ReplayError::Line { line: i, reason };
        let conj = line.formula.conjuncts();
        let start = match line.rule {
            Rule::Cs => match &conj[0] {
                Dependency::Tgd(t) => Some(start_shape(t).map_err(|e| fail(e.to_string()))?.2),
                _ => return Err(fail("CS without a start tgd".into())),
            },
            Rule::CsStar => {
                let (attrs, t_rows) = typed_start_shape(conj).map_err(|e| fail(e.to_string()))?;
                Some(Relation::new(&attrs, t_rows).map_err(|e| fail(e.to_string()))?)
            }
            _ => None,
        };
        if let Some(t) = start {
            let current = to_relation(&schema, &rows);
            let hs = homomorphisms(&t, &current, &Valuation::new()).map_err(model_err(i))?;
            let added = t.values();
            if let Some(a) = added.iter().find(|a| schema.contains(a)) {
                return Err(fail(format!("attribute {a} already present")));
            }
            rows = rows
                .iter()
                .flat_map(|s| {
                    hs.iter().map(move |h| {
                        let mut row = s.clone();
                        row.extend(h.iter());
                        row
                    })
                })
                .collect();
            schema.extend(added);
        } else if line.rule == Rule::CrTgd {
            let dep = line
                .refs
                .first()
                .and_then(|r| match r.source {
                    Source::Premise(p) => ded.premises.get(p),
                    Source::Line(l) => ded.lines.get(l).and_then(|l| l.formula.conjuncts().get(r.conjunct)),
                })
                .ok_or_else(|| fail("dangling reference".into()))?;
            let (Dependency::Tgd(tau), Payload::Valuation(f)) = (dep, &line.payload) else {
                return Err(fail("CR-tgd needs a tgd and a valuation".into()));
            };
            let target = Target::new(&to_relation(&schema, &rows), tau.schema()).map_err(model_err(i))?;
            let fresh = tau.head_only_values();
            let mut extended = Vec::with_capacity(rows.len());
            for s in &rows {
                let mut fixed = Valuation::new();
                for x in tau.body().values() {
                    let attr = f.apply(x);
                    let v = *s.get(&attr).ok_or(ReplayError::MissingAttribute(attr))?;
                    fixed.insert(x, v);
                }
                let g = target
                    .first(tau.head(), &fixed)
                    .map_err(model_err(i))?
                    .ok_or_else(|| fail("no witness for the head".into()))?;
                let mut row = s.clone();
                for x in &fresh {
                    row.insert(f.apply(*x), g.apply(*x));
                }
                extended.push(row);
            }
            schema.extend(fresh.iter().map(|x| f.apply(*x)));
            rows = extended;
        }
        let current = to_relation(&schema, &rows);
        for (j, d) in conj.iter().enumerate() {
            if !satisfies(&current, d).map_err(model_err(i))? {
                return Err(fail(format!("conjunct {j} fails on the extension")));
            }
        }
    }
    Ok(to_relation(&schema, &rows))
}

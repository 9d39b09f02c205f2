use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::model::homomorphism::{for_each_homomorphism, Target};
use crate::model::{Dependency, ModelError, Relation, Tuple, Valuation};
use crate::symbol::Symbol;

/// Why a relation fails a dependency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// An embedding of the body that equates nothing / admits no extension.
    Valuation(Valuation),
    /// A row whose left-hand projection has no match (inds).
    Row(Tuple),
    /// A tuple of the join missing from the relation (ejds), over the
    /// sorted union of the component attributes.
    JoinTuple(Tuple),
}

/// `r ⊨ d`. The relation may have extra columns; only the restriction to
/// the dependency's attributes matters.
pub fn satisfies(r: &Relation, d: &Dependency) -> Result<bool, ModelError> {
    Ok(violation(r, d)?.is_none())
}

/// The first violation found, in deterministic order.
pub fn violation(r: &Relation, d: &Dependency) -> Result<Option<Violation>, ModelError> {
    let attrs: Vec<Symbol> = d.attributes().into_iter().collect();
    if let Some(missing) = attrs.iter().find(|a| r.column(**a).is_none()) {
        return Err(ModelError::UnknownAttribute(*missing));
    }
    match d {
        Dependency::Egd(e) => {
            let mut bad = None;
            for_each_homomorphism(e.body(), r, &Valuation::new(), |f| {
                if f.apply(e.lhs()) != f.apply(e.rhs()) {
                    bad = Some(f.clone());
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            })?;
            Ok(bad.map(Violation::Valuation))
        }
        Dependency::Tgd(t) => {
            let target = Target::new(r, t.schema())?;
            let shared = t.shared_values();
            let mut bad = None;
            let mut err = None;
            target.for_each(t.body(), &Valuation::new(), |f| {
                let fixed = f.restrict(&shared);
                match target.first(t.head(), &fixed) {
                    Ok(Some(_)) => ControlFlow::Continue(()),
                    Ok(None) => {
                        bad = Some(f.clone());
                        ControlFlow::Break(())
                    }
                    Err(e) => {
                        err = Some(e);
                        ControlFlow::Break(())
                    }
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            Ok(bad.map(Violation::Valuation))
        }
        Dependency::Ind(i) => {
            let lhs = r.indices(i.lhs())?;
            let rhs = r.indices(i.rhs())?;
            let targets: BTreeSet<Vec<Symbol>> = r
                .rows()
                .map(|row| rhs.iter().map(|&c| row[c]).collect())
                .collect();
            Ok(r
                .rows()
                .find(|row| !targets.contains(&lhs.iter().map(|&c| row[c]).collect::<Vec<_>>()))
                .map(|row| Violation::Row(row.clone())))
        }
        Dependency::Ejd(j) => {
            let whole = r.project(&attrs)?;
            let mut joined: Option<Relation> = None;
            for comp in j.components() {
                let mut set: Vec<Symbol> = comp.iter().copied().collect();
                set.sort();
                set.dedup();
                let p = r.project(&set)?;
                joined = Some(match joined {
                    None => p,
                    Some(acc) => acc.join(&p),
                });
            }
            let joined = joined.expect("ejd has a component");
            let missing = joined.rows().find(|row| !whole.contains(row)).cloned();
            Ok(missing.map(Violation::JoinTuple))
        }
    }
}

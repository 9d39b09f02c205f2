use std::collections::BTreeMap;

use thiserror::Error;

use crate::chase::{ChaseGoal, ChaseOutcome, ChaseStep, Verdict};
use crate::model::{trivial_witness, Dependency, Ejd, Formula, Ind, Relation, Tuple, Valuation};
use crate::proof::{dedup, row_ind, Deduction, Line, Payload, Position, Ref, Rule, Side};
use crate::symbol::{FreshSource, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("the chase verdict is {0}, not implied")]
    NotImplied(Verdict),
    #[error("untyped input")]
    Untyped,
    #[error("value {0} of the goal is also an attribute of its schema")]
    ValueIsAttribute(Symbol),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Latest derived ind for a body row: `version(Ā) ⊆ Ā` at `at`, valid up to
/// the egd steps before `since`.
#[derive(Clone, Debug)]
struct RowProof {
    at: Ref,
    version: Tuple,
    since: usize,
}

struct EgdEq {
    at: Ref,
    replaced: Symbol,
    by: Symbol,
}

struct Builder<'a> {
    outcome: &'a ChaseOutcome,
    attrs: Vec<Symbol>,
    lines: Vec<Line>,
    rows: BTreeMap<Tuple, RowProof>,
    eqs: Vec<Option<EgdEq>>,
    chains: BTreeMap<Symbol, (Option<Ref>, Symbol)>,
}

fn internal(msg: impl Into<String>) -> GenerateError {
    GenerateError::Internal(msg.into())
}

impl Builder<'_> {
    fn push(&mut self, line: Line) -> usize {
        self.lines.push(line);
        self.lines.len() - 1
    }

    fn ee(&mut self, eq: Ref, sigma: Ref, from: &Tuple, to: &Tuple) -> Ref {
        let positions = from
            .iter()
            .zip(to)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(index, _)| Position {
                side: Side::Lhs,
                index,
            })
            .collect();
        let idx = self.push(Line {
            rule: Rule::Ee,
            refs: vec![eq, sigma],
            new_attrs: Vec::new(),
            payload: Payload::Positions(positions),
            formula: Formula::single(row_ind(to, &self.attrs)),
        });
        Ref::line(idx, 0)
    }

    /// Reference to `row(Ā) ⊆ Ā` for a row of the body before step `m`,
    /// deriving it along pending egd steps if needed.
    fn materialize(&mut self, row: &Tuple, m: usize) -> Result<Ref, GenerateError> {
        let mut p = self
            .rows
            .get(row)
            .cloned()
            .ok_or_else(|| internal(format!("no derivation for row {row:?}")))?;
        for j in p.since..m {
            let Some(eq) = &self.eqs[j] else { continue };
            if !p.version.contains(&eq.replaced) {
                continue;
            }
            let (at, replaced, by) = (eq.at, eq.replaced, eq.by);
            let next: Tuple = p
                .version
                .iter()
                .map(|s| if *s == replaced { by } else { *s })
                .collect();
            p.at = self.ee(at, p.at, &p.version, &next);
            p.version = next;
        }
        if &p.version != row {
            return Err(internal("row history does not reach the current row"));
        }
        p.since = m;
        let at = p.at;
        self.rows.insert(row.clone(), p);
        Ok(at)
    }

    fn body_refs(&mut self, body: &Relation, f: &Valuation, m: usize) -> Result<Vec<Ref>, GenerateError> {
        let images = dedup(body.rows().map(|t| f.apply_all(t)));
        images.iter().map(|row| self.materialize(row, m)).collect()
    }

    fn tgd_step(&mut self, m: usize, k: usize, extensions: &[Valuation]) -> Result<(), GenerateError> {
        let Some(Dependency::Tgd(tau)) = self.outcome.sigma.get(k) else {
            return Err(internal("tgd step without a tgd"));
        };
        let fresh = tau.head_only_values();
        for ext in extensions {
            let mut refs = vec![Ref::premise(k)];
            refs.extend(self.body_refs(tau.body(), ext, m)?);
            let out = dedup(tau.head().rows().map(|t| ext.apply_all(t)));
            let idx = self.push(Line {
                rule: Rule::CrTgd,
                refs,
                new_attrs: fresh.iter().map(|v| ext.apply(*v)).collect(),
                payload: Payload::Valuation(ext.clone()),
                formula: Formula::new(out.iter().map(|r| row_ind(r, &self.attrs)).collect())
                    .expect("head is nonempty"),
            });
            for (j, row) in out.into_iter().enumerate() {
                self.rows.entry(row.clone()).or_insert(RowProof {
                    at: Ref::line(idx, j),
                    version: row,
                    since: m + 1,
                });
            }
        }
        self.eqs.push(None);
        Ok(())
    }

    fn egd_step(
        &mut self,
        m: usize,
        k: usize,
        f: &Valuation,
        replaced: Symbol,
        by: Symbol,
    ) -> Result<(), GenerateError> {
        let Some(Dependency::Egd(tau)) = self.outcome.sigma.get(k) else {
            return Err(internal("egd step without an egd"));
        };
        let mut refs = vec![Ref::premise(k)];
        refs.extend(self.body_refs(tau.body(), f, m)?);
        let idx = self.push(Line {
            rule: Rule::CrEgd,
            refs,
            new_attrs: Vec::new(),
            payload: Payload::Valuation(f.clone()),
            formula: Formula::single(Ind::equality(f.apply(tau.lhs()), f.apply(tau.rhs()))),
        });
        self.eqs.push(Some(EgdEq {
            at: Ref::line(idx, 0),
            replaced,
            by,
        }));
        let old = std::mem::take(&mut self.rows);
        for (row, p) in old {
            let key = row.iter().map(|s| if *s == replaced { by } else { *s }).collect();
            self.rows.entry(key).or_insert(p);
        }
        Ok(())
    }

    /// Derives `v = ρ(v)` by chaining the egd equalities that moved `v`.
    /// Returns `None` for the reference when `ρ(v) = v`.
    fn chain(&mut self, v: Symbol) -> (Option<Ref>, Symbol) {
        if let Some(c) = self.chains.get(&v) {
            return *c;
        }
        let mut cur = v;
        let mut acc: Option<Ref> = None;
        for j in 0..self.eqs.len() {
            let Some(eq) = &self.eqs[j] else { continue };
            if eq.replaced != cur {
                continue;
            }
            let (at, by) = (eq.at, eq.by);
            acc = Some(match acc {
                None => at,
                Some(prev) => {
                    let idx = self.push(Line {
                        rule: Rule::Et,
                        refs: vec![prev, at],
                        new_attrs: Vec::new(),
                        payload: Payload::None,
                        formula: Formula::single(Ind::equality(v, by)),
                    });
                    Ref::line(idx, 0)
                }
            });
            cur = by;
        }
        self.chains.insert(v, (acc, cur));
        (acc, cur)
    }
}

/// Opening line: CS, or CS* when `typed`. Returns the line and the offset
/// of the `t(Ā) ⊆ Ā` conjuncts.
fn start_line(goal: &ChaseGoal, floor: u32, typed: bool) -> (Line, usize) {
    let t = goal.body();
    let attrs = t.schema().to_vec();
    let s: Vec<Symbol> = t.values().into_iter().collect();
    let row_inds: Vec<Dependency> = t.rows().map(|row| row_ind(row, &attrs)).collect();
    if typed {
        let rows: Vec<Tuple> = t.rows().cloned().collect();
        let mut conj: Vec<Dependency> = rows
            .iter()
            .map(|row| Ind::new(attrs.clone(), row.clone()).expect("same length").into())
            .collect();
        conj.push(Ejd::new(rows.clone()).expect("nonempty rows").into());
        conj.extend(row_inds);
        let line = Line {
            rule: Rule::CsStar,
            refs: Vec::new(),
            new_attrs: s,
            payload: Payload::None,
            formula: Formula::new(conj).expect("nonempty"),
        };
        return (line, rows.len() + 1);
    }
    let mut fresh = FreshSource::new();
    fresh.raise_to(floor);
    let header: Vec<Symbol> = attrs.iter().chain(&s).copied().collect();
    let body_rows: Vec<Tuple> = t
        .rows()
        .map(|row| row.iter().copied().chain(s.iter().map(|_| fresh.mint())).collect())
        .collect();
    let head_row: Tuple = attrs.iter().map(|_| fresh.mint()).chain(s.iter().copied()).collect();
    let body = Relation::new(&header, body_rows).expect("schema has no repeats");
    let head = Relation::new(&header, [head_row]).expect("schema has no repeats");
    let start = crate::model::Tgd::new(body, head).expect("one head row");
    let mut conj = vec![Dependency::Tgd(start)];
    conj.extend(row_inds);
    let line = Line {
        rule: Rule::Cs,
        refs: Vec::new(),
        new_attrs: s,
        payload: Payload::None,
        formula: Formula::new(conj).expect("nonempty"),
    };
    (line, 1)
}

fn generate(outcome: &ChaseOutcome, typed: bool) -> Result<Deduction, GenerateError> {
    if outcome.verdict != Verdict::Implied {
        return Err(GenerateError::NotImplied(outcome.verdict));
    }
    let goal = &outcome.initial;
    let attrs = goal.schema().to_vec();
    if let Some(v) = goal.values().into_iter().find(|v| attrs.contains(v)) {
        return Err(GenerateError::ValueIsAttribute(v));
    }
    if typed
        && !(goal.to_dependency().is_typed() && outcome.sigma.iter().all(Dependency::is_typed))
    {
        return Err(GenerateError::Untyped);
    }
    let (first, offset) = start_line(goal, outcome.fresh_floor, typed);
    let start_refs: Vec<Ref> = (0..offset).map(|j| Ref::line(0, j)).collect();
    let mut b = Builder {
        outcome,
        attrs: attrs.clone(),
        lines: vec![first],
        rows: BTreeMap::new(),
        eqs: Vec::new(),
        chains: BTreeMap::new(),
    };
    for (j, row) in goal.body().rows().enumerate() {
        b.rows.insert(
            row.clone(),
            RowProof {
                at: Ref::line(0, offset + j),
                version: row.clone(),
                since: 0,
            },
        );
    }
    for (m, step) in outcome.steps.iter().enumerate() {
        match step {
            ChaseStep::Tgd {
                dependency,
                extensions,
            } => b.tgd_step(m, *dependency, extensions)?,
            ChaseStep::Egd {
                dependency,
                valuation,
                replaced,
                by,
            } => b.egd_step(m, *dependency, valuation, *replaced, *by)?,
        }
    }
    let n = outcome.steps.len();
    let mut refs = start_refs;
    let (rule, payload) = match goal {
        ChaseGoal::Egd(e) => {
            let (x, y) = (e.lhs(), e.rhs());
            if x != y {
                let (ex, zx) = b.chain(x);
                let (ey, zy) = b.chain(y);
                if zx != zy {
                    return Err(internal("final egd is not trivial"));
                }
                let eq = match (ex, ey) {
                    (None, Some(r)) | (Some(r), None) => r,
                    (Some(rx), Some(ry)) => {
                        let idx = b.push(Line {
                            rule: Rule::Et,
                            refs: vec![rx, ry],
                            new_attrs: Vec::new(),
                            payload: Payload::None,
                            formula: Formula::single(Ind::equality(x, y)),
                        });
                        Ref::line(idx, 0)
                    }
                    (None, None) => return Err(internal("distinct values never merged")),
                };
                refs.push(eq);
            }
            let rule = if typed { Rule::CtStarEgd } else { Rule::CtEgd };
            (rule, Payload::None)
        }
        ChaseGoal::Tgd(t) => {
            let ChaseGoal::Tgd(last) = &outcome.last else {
                return Err(internal("goal kind changed"));
            };
            let f = trivial_witness(last).ok_or_else(|| internal("final tgd is not trivial"))?;
            let rho = &outcome.rho;
            let body_values = t.body().values();
            let mut u = Valuation::new();
            for v in t.head().values() {
                u.insert(v, if body_values.contains(&v) { v } else { f.apply(v) });
            }
            let mut done: Vec<Tuple> = Vec::new();
            for row in t.head().rows() {
                let want = u.apply_all(row);
                if done.contains(&want) {
                    continue;
                }
                let mut cur = f.apply_all(&rho.apply_all(row));
                let mut at = b.materialize(&cur, n)?;
                let shared = dedup(row.iter().copied().filter(|v| body_values.contains(v)));
                for v in shared {
                    let (eq, z) = b.chain(v);
                    let Some(eq) = eq else { continue };
                    if z != rho.apply(v) {
                        return Err(internal("equality chain disagrees with rho"));
                    }
                    let next: Tuple = cur
                        .iter()
                        .zip(row)
                        .map(|(c, orig)| if *orig == v { v } else { *c })
                        .collect();
                    at = b.ee(eq, at, &cur, &next);
                    cur = next;
                }
                if cur != want {
                    return Err(internal("head row was not rebuilt"));
                }
                refs.push(at);
                done.push(want);
            }
            let rule = if typed { Rule::CtStarTgd } else { Rule::CtTgd };
            (rule, Payload::Valuation(u))
        }
    };
    b.push(Line {
        rule,
        refs,
        new_attrs: Vec::new(),
        payload,
        formula: Formula::single(goal.to_dependency()),
    });
    Ok(Deduction {
        premises: outcome.sigma.clone(),
        lines: b.lines,
    })
}

/// A deduction of the chased goal from the chased premises, following the
/// chase step by step: chase start, one chase-rule line per tgd extension
/// and per egd application, equality rewriting, and chase termination.
pub fn generate_deduction(outcome: &ChaseOutcome) -> Result<Deduction, GenerateError> {
    generate(outcome, false)
}

/// Like [`generate_deduction`] but opens with CS* and closes with CT*.
/// Requires the goal and every premise to be typed.
pub fn generate_typed_deduction(outcome: &ChaseOutcome) -> Result<Deduction, GenerateError> {
    generate(outcome, true)
}

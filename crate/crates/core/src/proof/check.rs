use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Dependency, Ejd, Formula, Ind, Relation, Tgd, Valuation};
use crate::proof::{
    dedup, equality_pair, row_ind, CheckError, CheckErrorKind, Deduction, Line, Payload, Position,
    Ref, Rule, Side, Source,
};
use crate::symbol::Symbol;

/// Premises plus the lines before the one being checked.
#[derive(Clone, Copy, Debug)]
pub struct LineContext<'a> {
    pub premises: &'a [Dependency],
    pub lines: &'a [Line],
}

type Res<T> = Result<T, CheckErrorKind>;

impl LineContext<'_> {
    fn get(&self, r: Ref) -> Res<&Dependency> {
        let formula = match r.source {
            Source::Premise(i) => {
                return match (self.premises.get(i), r.conjunct) {
                    (Some(d), 0) => Ok(d),
                    _ => Err(CheckErrorKind::BadRef(r)),
                }
            }
            Source::Line(i) => self.lines.get(i).map(|l| &l.formula),
        };
        formula
            .and_then(|f| f.conjuncts().get(r.conjunct))
            .ok_or(CheckErrorKind::BadRef(r))
    }

    fn tgd(&self, r: Ref) -> Res<&Tgd> {
        match self.get(r)? {
            Dependency::Tgd(t) => Ok(t),
            _ => Err(CheckErrorKind::WrongKind(r)),
        }
    }

    fn ind(&self, r: Ref) -> Res<&Ind> {
        match self.get(r)? {
            Dependency::Ind(i) => Ok(i),
            _ => Err(CheckErrorKind::WrongKind(r)),
        }
    }

    fn equality(&self, r: Ref) -> Res<(Symbol, Symbol)> {
        equality_pair(self.get(r)?).ok_or(CheckErrorKind::WrongKind(r))
    }
}

fn ref_count(refs: &[Ref], expected: &str, ok: bool) -> Res<()> {
    if ok {
        Ok(())
    } else {
        Err(CheckErrorKind::RefCount {
            expected: expected.into(),
            found: refs.len(),
        })
    }
}

fn expect_formula(line: &Line, expected: Vec<Dependency>) -> Res<()> {
    if line.formula.conjuncts() == expected.as_slice() {
        Ok(())
    } else {
        let text = Formula::new(expected)
            .map(|f| f.to_string())
            .unwrap_or_default();
        Err(CheckErrorKind::WrongConclusion { expected: text })
    }
}

fn expect_new(line: &Line, expected: &BTreeSet<Symbol>) -> Res<()> {
    let given: BTreeSet<Symbol> = line.new_attrs.iter().copied().collect();
    if given == *expected && given.len() == line.new_attrs.len() {
        Ok(())
    } else {
        let list: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        Err(CheckErrorKind::NewAttributes {
            expected: format!("[{}]", list.join(",")),
        })
    }
}

/// The referenced conjuncts must be exactly `required`, in order.
fn expect_refs(ctx: &LineContext, refs: &[Ref], required: &[Dependency]) -> Res<()> {
    for (i, need) in required.iter().enumerate() {
        match refs.get(i) {
            Some(r) if ctx.get(*r)? == need => {}
            _ => return Err(CheckErrorKind::MissingConjunct(need.to_string())),
        }
    }
    ref_count(refs, &required.len().to_string(), refs.len() == required.len())
}

fn valuation(line: &Line) -> Res<&Valuation> {
    match &line.payload {
        Payload::Valuation(v) => Ok(v),
        _ => Err(CheckErrorKind::Payload),
    }
}

fn no_payload(line: &Line) -> Res<()> {
    match line.payload {
        Payload::None => Ok(()),
        _ => Err(CheckErrorKind::Payload),
    }
}

fn covers(v: &Valuation, values: &BTreeSet<Symbol>) -> Res<()> {
    if values.iter().all(|x| v.contains(*x)) {
        Ok(())
    } else {
        Err(CheckErrorKind::Payload)
    }
}

/// `(T*, id)[RS]`: returns `R` (schema order), `S`, and `T = T*[R]`.
pub(crate) fn start_shape(t: &Tgd) -> Res<(Vec<Symbol>, BTreeSet<Symbol>, Relation)> {
    let shape = |msg: &str| CheckErrorKind::Shape(msg.into());
    let schema = t.schema();
    let mut heads = t.head().rows();
    let head = match (heads.next(), heads.next()) {
        (Some(h), None) => h,
        _ => return Err(shape("the start tgd needs exactly one head row")),
    };
    let distinct = Dependency::Tgd(t.clone()).distinct_values();
    let mut r_attrs = Vec::new();
    let mut s_attrs = BTreeSet::new();
    for (a, v) in schema.iter().zip(head) {
        if a == v {
            s_attrs.insert(*a);
        } else if distinct.contains(v) {
            r_attrs.push(*a);
        } else {
            return Err(shape("head values on R must be distinct"));
        }
    }
    let s_cols: Vec<Symbol> = s_attrs.iter().copied().collect();
    let r_part = t.body().project(&r_attrs).map_err(|e| CheckErrorKind::Shape(e.to_string()))?;
    if r_part.values() != s_attrs {
        return Err(shape("S must be the value set of T*[R]"));
    }
    if !s_cols.is_empty() {
        let s_part = t.body().project(&s_cols).map_err(|e| CheckErrorKind::Shape(e.to_string()))?;
        if !s_part.rows().flatten().all(|v| distinct.contains(v)) {
            return Err(shape("T*[S] must consist of distinct values"));
        }
    }
    Ok((r_attrs, s_attrs, r_part))
}

/// Splits `Ā ⊆ t(Ā)` conjuncts, the ejd, and the `t(Ā) ⊆ Ā` conjuncts of a
/// CS* formula; returns `Ā` and the rows.
pub(crate) fn typed_start_shape(conj: &[Dependency]) -> Res<(Vec<Symbol>, Vec<Vec<Symbol>>)> {
    let shape = |msg: &str| CheckErrorKind::Shape(msg.into());
    if conj.len() < 3 || conj.len().is_multiple_of(2) {
        return Err(shape("CS* has 2|T|+1 conjuncts"));
    }
    let k = conj.len() / 2;
    let (attrs, rows) = typed_prefix(&conj[..=k])?;
    for (i, row) in rows.iter().enumerate() {
        if conj[k + 1 + i] != row_ind(row, &attrs) {
            return Err(shape("expected t(A) <= A"));
        }
    }
    Ok((attrs, rows))
}

/// `Ā ⊆ t(Ā)` conjuncts followed by the ejd over the rows.
fn typed_prefix(conj: &[Dependency]) -> Res<(Vec<Symbol>, Vec<Vec<Symbol>>)> {
    let shape = |msg: &str| CheckErrorKind::Shape(msg.into());
    let (last, inds) = conj.split_last().ok_or_else(|| shape("missing ejd"))?;
    let mut attrs: Option<Vec<Symbol>> = None;
    let mut rows = Vec::new();
    for d in inds {
        let Dependency::Ind(i) = d else {
            return Err(shape("expected A <= t(A)"));
        };
        match &attrs {
            None => attrs = Some(i.lhs().to_vec()),
            Some(a) if a.as_slice() == i.lhs() => {}
            _ => return Err(shape("A <= t(A) conjuncts disagree on A")),
        }
        rows.push(i.rhs().to_vec());
    }
    let attrs = attrs.ok_or_else(|| shape("T must be nonempty"))?;
    let expected = Ejd::new(rows.clone()).map_err(|e| CheckErrorKind::Shape(e.to_string()))?;
    if *last != Dependency::Ejd(expected) {
        return Err(shape("ejd must join the rows t(A)"));
    }
    Ok((attrs, rows))
}

fn typed_relation(attrs: &[Symbol], rows: &[Vec<Symbol>]) -> Res<Relation> {
    let t = Relation::new(attrs, rows.iter().cloned()).map_err(|e| CheckErrorKind::Shape(e.to_string()))?;
    Ok(t)
}

/// Inds `u∘t'(Ā) ⊆ Ā` for the head rows of `head`, with `u` the identity
/// on values shared with `body_values`.
fn head_inds(
    head: &Relation,
    body_values: &BTreeSet<Symbol>,
    u: &Valuation,
) -> Res<Vec<Dependency>> {
    for v in head.values() {
        if body_values.contains(&v) {
            if u.apply(v) != v {
                return Err(CheckErrorKind::NotIdentityOnShared(v));
            }
        } else if !u.contains(v) {
            return Err(CheckErrorKind::Payload);
        }
    }
    Ok(dedup(head.rows().map(|t| row_ind(&u.apply_all(t), head.schema()))))
}

/// Checks the output of the chase-termination rules against `T`.
fn check_termination(
    line: &Line,
    ctx: &LineContext,
    tail: &[Ref],
    t: &Relation,
    egd: bool,
) -> Res<()> {
    let [conclusion] = line.formula.conjuncts() else {
        return Err(CheckErrorKind::Shape("one conclusion expected".into()));
    };
    match (conclusion, egd) {
        (Dependency::Tgd(goal), false) => {
            if goal.body() != t {
                return Err(CheckErrorKind::Shape("body differs from T*[R]".into()));
            }
            let u = valuation(line)?;
            let need = head_inds(goal.head(), &goal.body().values(), u)?;
            expect_refs(ctx, tail, &need)
        }
        (Dependency::Egd(goal), true) => {
            no_payload(line)?;
            if goal.body() != t {
                return Err(CheckErrorKind::Shape("body differs from T*[R]".into()));
            }
            let (x, y) = (goal.lhs(), goal.rhs());
            match tail {
                [] if x == y => Ok(()),
                [r] => {
                    let pair = ctx.equality(*r)?;
                    if pair == (x.min(y), x.max(y)) {
                        Ok(())
                    } else {
                        Err(CheckErrorKind::MissingConjunct(Ind::equality(x, y).to_string()))
                    }
                }
                _ => ref_count(tail, "1", false),
            }
        }
        _ => Err(CheckErrorKind::Shape("conclusion kind does not match the rule".into())),
    }
}

fn swap_positions(
    sigma: &Ind,
    pair: (Symbol, Symbol),
    positions: &[Position],
) -> Res<Ind> {
    let (a, b) = pair;
    let mut lhs = sigma.lhs().to_vec();
    let mut rhs = sigma.rhs().to_vec();
    let mut seen = BTreeSet::new();
    for p in positions {
        if !seen.insert(*p) {
            return Err(CheckErrorKind::Payload);
        }
        let cell = match p.side {
            Side::Lhs => lhs.get_mut(p.index),
            Side::Rhs => rhs.get_mut(p.index),
        }
        .ok_or(CheckErrorKind::Payload)?;
        *cell = if *cell == a {
            b
        } else if *cell == b {
            a
        } else {
            return Err(CheckErrorKind::Shape(format!("{cell} is not {a} or {b}")));
        };
    }
    Ok(Ind::new(lhs, rhs).expect("lengths unchanged"))
}

fn check_transitivity(e1: (Symbol, Symbol), e2: (Symbol, Symbol), out: (Symbol, Symbol)) -> bool {
    for (x, m) in [e1, (e1.1, e1.0)] {
        for (m2, z) in [e2, (e2.1, e2.0)] {
            if m == m2 && (x.min(z), x.max(z)) == out {
                return true;
            }
        }
    }
    false
}

/// Checks that `line` follows by its rule from `ctx`, including the set of
/// attributes it declares new. Attribute bookkeeping across lines is left
/// to [`check_deduction`].
pub fn check_rule(line: &Line, ctx: &LineContext) -> Result<(), CheckErrorKind> {
    let refs = line.refs.as_slice();
    let none = BTreeSet::new();
    match line.rule {
        Rule::Premise => {
            ref_count(refs, "0", refs.is_empty())?;
            no_payload(line)?;
            match line.formula.conjuncts() {
                [d] if ctx.premises.iter().any(|p| p.same_as(d)) => {}
                _ => return Err(CheckErrorKind::NotAPremise),
            }
            expect_new(line, &none)
        }
        Rule::AndIntro | Rule::AndElim => {
            ref_count(refs, "at least 1", !refs.is_empty())?;
            no_payload(line)?;
            if line.rule == Rule::AndElim && refs.iter().any(|r| r.source != refs[0].source) {
                return Err(CheckErrorKind::Shape("elimination works within one formula".into()));
            }
            let got: Vec<Dependency> = refs.iter().map(|r| ctx.get(*r).cloned()).collect::<Res<_>>()?;
            expect_formula(line, got)?;
            expect_new(line, &none)
        }
        Rule::Ee => {
            ref_count(refs, "2", refs.len() == 2)?;
            let pair = ctx.equality(refs[0])?;
            let sigma = ctx.ind(refs[1])?;
            let Payload::Positions(pos) = &line.payload else {
                return Err(CheckErrorKind::Payload);
            };
            let tau = swap_positions(sigma, pair, pos)?;
            expect_formula(line, vec![tau.into()])?;
            expect_new(line, &none)
        }
        Rule::Es => {
            ref_count(refs, "1", refs.len() == 1)?;
            no_payload(line)?;
            let pair = ctx.equality(refs[0])?;
            match line.formula.conjuncts() {
                [d] if equality_pair(d) == Some(pair) => {}
                _ => {
                    return Err(CheckErrorKind::WrongConclusion {
                        expected: Ind::equality(pair.1, pair.0).to_string(),
                    })
                }
            }
            expect_new(line, &none)
        }
        Rule::Et => {
            ref_count(refs, "2", refs.len() == 2)?;
            no_payload(line)?;
            let e1 = ctx.equality(refs[0])?;
            let e2 = ctx.equality(refs[1])?;
            let ok = match line.formula.conjuncts() {
                [d] => equality_pair(d).is_some_and(|out| check_transitivity(e1, e2, out)),
                _ => false,
            };
            if !ok {
                return Err(CheckErrorKind::Shape("equalities do not chain".into()));
            }
            expect_new(line, &none)
        }
        Rule::Cs => {
            ref_count(refs, "0", refs.is_empty())?;
            no_payload(line)?;
            let conj = line.formula.conjuncts();
            let Dependency::Tgd(start) = &conj[0] else {
                return Err(CheckErrorKind::Shape("CS starts with the tgd (T*, id)".into()));
            };
            let (r_attrs, s_attrs, t) = start_shape(start)?;
            let mut expected = vec![conj[0].clone()];
            expected.extend(t.rows().map(|row| row_ind(row, &r_attrs)));
            expect_formula(line, expected)?;
            expect_new(line, &s_attrs)
        }
        Rule::CsStar => {
            ref_count(refs, "0", refs.is_empty())?;
            no_payload(line)?;
            let (attrs, rows) = typed_start_shape(line.formula.conjuncts())?;
            let t = typed_relation(&attrs, &rows)?;
            if !t.is_typed() {
                return Err(CheckErrorKind::Untyped);
            }
            expect_new(line, &t.values())
        }
        Rule::CrTgd | Rule::CrEgd => {
            ref_count(refs, "at least 1", !refs.is_empty())?;
            let f = valuation(line)?;
            let dep = ctx.get(refs[0])?;
            let (body, attrs) = match (dep, line.rule) {
                (Dependency::Tgd(t), Rule::CrTgd) => (t.body(), t.schema()),
                (Dependency::Egd(e), Rule::CrEgd) => (e.body(), e.schema()),
                _ => return Err(CheckErrorKind::WrongKind(refs[0])),
            };
            covers(f, &dep.values())?;
            let need = dedup(body.rows().map(|t| row_ind(&f.apply_all(t), attrs)));
            expect_refs(ctx, &refs[1..], &need)?;
            match dep {
                Dependency::Tgd(t) => {
                    let fresh = t.head_only_values();
                    let images: BTreeSet<Symbol> = fresh.iter().map(|v| f.apply(*v)).collect();
                    if images.len() != fresh.len() {
                        return Err(CheckErrorKind::NotInjective);
                    }
                    let out = dedup(t.head().rows().map(|row| row_ind(&f.apply_all(row), attrs)));
                    expect_formula(line, out)?;
                    expect_new(line, &images)
                }
                Dependency::Egd(e) => {
                    let (a, b) = (f.apply(e.lhs()), f.apply(e.rhs()));
                    match line.formula.conjuncts() {
                        [d] if equality_pair(d) == Some((a.min(b), a.max(b))) => {}
                        _ => {
                            return Err(CheckErrorKind::WrongConclusion {
                                expected: Ind::equality(a, b).to_string(),
                            })
                        }
                    }
                    expect_new(line, &none)
                }
                _ => unreachable!(),
            }
        }
        Rule::CtTgd | Rule::CtEgd => {
            ref_count(refs, "at least 1", !refs.is_empty())?;
            let start = ctx.tgd(refs[0])?;
            let (_, _, t) = start_shape(start)?;
            check_termination(line, ctx, &refs[1..], &t, line.rule == Rule::CtEgd)?;
            expect_new(line, &none)
        }
        Rule::CtStarTgd | Rule::CtStarEgd => {
            let split = refs
                .iter()
                .position(|r| matches!(ctx.get(*r), Ok(Dependency::Ejd(_))))
                .ok_or_else(|| CheckErrorKind::Shape("CT* needs the ejd".into()))?;
            let prefix: Vec<Dependency> =
                refs[..=split].iter().map(|r| ctx.get(*r).cloned()).collect::<Res<_>>()?;
            let (attrs, rows) = typed_prefix(&prefix)?;
            let t = typed_relation(&attrs, &rows)?;
            check_termination(line, ctx, &refs[split + 1..], &t, line.rule == Rule::CtStarEgd)?;
            expect_new(line, &none)
        }
    }
}

/// Checks every line, the new-attribute discipline, and that the last line
/// is `goal` with none of its attributes new anywhere.
///
/// Attributes of the goal count as introduced before the first line.
pub fn check_deduction(ded: &Deduction, goal: &Dependency) -> Result<(), CheckError> {
    let at = |line: usize, kind| CheckError {
        line: Some(line),
        kind,
    };
    let mut known: BTreeSet<Symbol> = ded.premises.iter().flat_map(|p| p.attributes()).collect();
    known.extend(goal.attributes());
    let mut all_new = BTreeSet::new();
    for (i, line) in ded.lines.iter().enumerate() {
        let ctx = LineContext {
            premises: &ded.premises,
            lines: &ded.lines[..i],
        };
        check_rule(line, &ctx).map_err(|k| at(i, k))?;
        let attrs: BTreeSet<Symbol> = line
            .formula
            .conjuncts()
            .iter()
            .flat_map(|d| d.attributes())
            .collect();
        let new: BTreeSet<Symbol> = line.new_attrs.iter().copied().collect();
        for a in &new {
            if !attrs.contains(a) {
                return Err(at(i, CheckErrorKind::Shape(format!("new attribute {a} does not occur"))));
            }
            if known.contains(a) {
                return Err(at(i, CheckErrorKind::NotFresh(*a)));
            }
        }
        if let Some(a) = attrs.iter().find(|a| !new.contains(a) && !known.contains(a)) {
            return Err(at(i, CheckErrorKind::UnknownAttribute(*a)));
        }
        known.extend(attrs);
        all_new.extend(new);
    }
    let last = ded.lines.len().checked_sub(1).ok_or(CheckError {
        line: None,
        kind: CheckErrorKind::Empty,
    })?;
    match ded.lines[last].formula.conjuncts() {
        [d] if d.same_as(goal) => {}
        _ => return Err(at(last, CheckErrorKind::GoalMismatch)),
    }
    if let Some(a) = goal.attributes().into_iter().find(|a| all_new.contains(a)) {
        return Err(at(last, CheckErrorKind::NewInGoal(a)));
    }
    Ok(())
}

fn ee_line(eq: Ref, sigma: Ref, from: &Ind, to: &Ind) -> Line {
    let mut positions = Vec::new();
    for (side, a, b) in [(Side::Lhs, from.lhs(), to.lhs()), (Side::Rhs, from.rhs(), to.rhs())] {
        for (index, (x, y)) in a.iter().zip(b).enumerate() {
            if x != y {
                positions.push(Position { side, index });
            }
        }
    }
    Line {
        rule: Rule::Ee,
        refs: vec![eq, sigma],
        new_attrs: Vec::new(),
        payload: Payload::Positions(positions),
        formula: Formula::single(to.clone()),
    }
}

/// Rewrites every ES/ET line as EE lines and renumbers references.
pub fn expand_macros(ded: &Deduction) -> Deduction {
    let mut lines: Vec<Line> = Vec::new();
    // old line index -> new index of its last expansion line
    let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
    let fix = |r: Ref, renumber: &BTreeMap<usize, usize>| match r.source {
        Source::Line(i) => Ref::line(*renumber.get(&i).unwrap_or(&i), r.conjunct),
        Source::Premise(_) => r,
    };
    for (old, line) in ded.lines.iter().enumerate() {
        let refs: Vec<Ref> = line.refs.iter().map(|r| fix(*r, &renumber)).collect();
        let ctx = LineContext {
            premises: &ded.premises,
            lines: &lines,
        };
        let target = match line.formula.conjuncts() {
            [Dependency::Ind(i)] => Some(i.clone()),
            _ => None,
        };
        let expanded = match (line.rule, target) {
            (Rule::Es, Some(to)) if refs.len() == 1 => ctx
                .ind(refs[0])
                .ok()
                .map(|from| vec![ee_line(refs[0], refs[0], from, &to)]),
            (Rule::Et, Some(to)) if refs.len() == 2 => {
                expand_transitivity(&ctx, refs[0], refs[1], &to, lines.len())
            }
            _ => None,
        };
        match expanded {
            Some(new_lines) => lines.extend(new_lines),
            None => lines.push(Line {
                refs,
                ..line.clone()
            }),
        }
        renumber.insert(old, lines.len() - 1);
    }
    Deduction {
        premises: ded.premises.clone(),
        lines,
    }
}

fn expand_transitivity(
    ctx: &LineContext,
    r1: Ref,
    r2: Ref,
    to: &Ind,
    next_index: usize,
) -> Option<Vec<Line>> {
    let e1 = ctx.equality(r1).ok()?;
    let e2 = ctx.equality(r2).ok()?;
    let from = ctx.ind(r1).ok()?;
    for (a, b) in [e1, (e1.1, e1.0)] {
        for (b2, c) in [e2, (e2.1, e2.0)] {
            if b != b2 || equality_pair(&to.clone().into()) != Some((a.min(c), a.max(c))) {
                continue;
            }
            // `to` with c written as b, reachable from e1 by one exchange
            let back = |s: &Symbol| if *s == c && c != a { b } else { *s };
            let mid = Ind::new(
                to.lhs().iter().map(back).collect(),
                to.rhs().iter().map(back).collect(),
            )
            .ok()?;
            return Some(vec![
                ee_line(r1, r1, from, &mid),
                ee_line(r2, Ref::line(next_index, 0), &mid, to),
            ]);
        }
    }
    None
}

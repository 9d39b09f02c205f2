//! Line-oriented record formats for deductions and chase traces.
//!
//! ```text
//! deduction v1
//! premise index=0 formula=tgd over (A,B): { (x,y) } => { (y,x) }
//! line index=0 rule=CS refs=[] new=[@3,@4] payload=- formula=...
//! line index=1 rule=CR-tgd refs=[P0.0,L0.1] new=[@5] payload={x->@3,y->@4} formula=...
//! conclusion formula=...
//! ```

use std::fmt::Write as _;

use crate::chase::{ChaseOutcome, ChaseStep};
use crate::model::{Dependency, Formula, Relation};
use crate::proof::{Deduction, Line, Payload, Position, Ref, Rule, Side, Source};
use crate::symbol::Symbol;
use crate::textio::{Parser, ParseError, ParseErrorKind, Tok};

fn list<T: ToString>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn payload_text(p: &Payload) -> String {
    match p {
        Payload::None => "-".into(),
        Payload::Valuation(v) => v.to_string(),
        Payload::Positions(ps) => list(ps),
    }
}

pub fn write_deduction(ded: &Deduction) -> String {
    let mut out = String::from("deduction v1\n");
    for (i, p) in ded.premises.iter().enumerate() {
        let _ = writeln!(out, "premise index={i} formula={p}");
    }
    for (i, l) in ded.lines.iter().enumerate() {
        let _ = writeln!(
            out,
            "line index={i} rule={} refs={} new={} payload={} formula={}",
            l.rule,
            list(&l.refs),
            list(&l.new_attrs),
            payload_text(&l.payload),
            l.formula
        );
    }
    if let Some(c) = ded.conclusion() {
        let _ = writeln!(out, "conclusion formula={c}");
    }
    out
}

impl Parser {
    fn field(&mut self, name: &str) -> Result<(), ParseError> {
        self.keyword(name)?;
        self.expect(Tok::Eq)
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Ident(w)) if w.bytes().all(|b| b.is_ascii_digit()) => {
                let n = w.parse().map_err(|_| self.error("number"))?;
                self.ident()?;
                Ok(n)
            }
            _ => Err(self.error("number")),
        }
    }

    fn index(&mut self, expected: usize) -> Result<(), ParseError> {
        self.field("index")?;
        let pos = self.pos();
        let n = self.number()?;
        if n != expected {
            return Err(ParseError::at(
                pos,
                ParseErrorKind::Unexpected {
                    found: n.to_string(),
                    expected: format!("index {expected}"),
                },
            ));
        }
        Ok(())
    }

    fn bracketed<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    /// `P0.0` or `L3.1`.
    fn reference(&mut self) -> Result<Ref, ParseError> {
        let err = self.error("reference like `P0.0` or `L3.1`");
        let head = self.ident().map_err(|_| err.clone())?;
        let (kind, num) = head.split_at(1);
        let n: usize = num.parse().map_err(|_| err.clone())?;
        let source = match kind {
            "P" => Source::Premise(n),
            "L" => Source::Line(n),
            _ => return Err(err),
        };
        self.expect(Tok::Dot)?;
        let conjunct = self.number()?;
        Ok(Ref { source, conjunct })
    }

    fn position(&mut self) -> Result<Position, ParseError> {
        let err = self.error("position like `l0` or `r1`");
        let w = self.ident().map_err(|_| err.clone())?;
        let (side, num) = w.split_at(1);
        let side = match side {
            "l" => Side::Lhs,
            "r" => Side::Rhs,
            _ => return Err(err),
        };
        let index = num.parse().map_err(|_| err)?;
        Ok(Position { side, index })
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let pos = self.pos();
        let mut tag = self.ident()?;
        if self.eat(&Tok::Dash) {
            tag.push('-');
            tag.push_str(&self.ident()?);
        }
        Rule::from_tag(&tag).ok_or_else(|| {
            ParseError::at(
                pos,
                ParseErrorKind::Unexpected {
                    found: format!("`{tag}`"),
                    expected: "rule tag".into(),
                },
            )
        })
    }

    fn payload(&mut self) -> Result<Payload, ParseError> {
        match self.peek() {
            Some(Tok::Dash) => {
                self.expect(Tok::Dash)?;
                Ok(Payload::None)
            }
            Some(Tok::LBrace) => Ok(Payload::Valuation(self.valuation()?)),
            Some(Tok::LBracket) => Ok(Payload::Positions(self.bracketed(Self::position)?)),
            _ => Err(self.error("payload")),
        }
    }

    fn proof_line(&mut self, index: usize) -> Result<Line, ParseError> {
        self.keyword("line")?;
        self.index(index)?;
        self.field("rule")?;
        let rule = self.rule()?;
        self.field("refs")?;
        let refs = self.bracketed(Self::reference)?;
        self.field("new")?;
        let new_attrs = self.bracketed(Self::attribute)?;
        self.field("payload")?;
        let payload = self.payload()?;
        self.field("formula")?;
        let formula = self.formula()?;
        Ok(Line {
            rule,
            refs,
            new_attrs,
            payload,
            formula,
        })
    }
}

/// Parses a document written by [`write_deduction`]. A `conclusion`
/// record, when present, must repeat the last line's formula.
pub fn parse_deduction(text: &str) -> Result<Deduction, ParseError> {
    let mut p = Parser::new(text, 0)?;
    p.keyword("deduction")?;
    p.keyword("v1")?;
    let mut premises: Vec<Dependency> = Vec::new();
    while p.is_keyword("premise") {
        p.keyword("premise")?;
        p.index(premises.len())?;
        p.field("formula")?;
        premises.push(p.dependency()?);
    }
    let mut lines = Vec::new();
    while p.is_keyword("line") {
        let l = p.proof_line(lines.len())?;
        lines.push(l);
    }
    if p.is_keyword("conclusion") {
        p.keyword("conclusion")?;
        p.field("formula")?;
        let pos = p.pos();
        let c: Formula = p.formula()?;
        if lines.last().map(|l: &Line| &l.formula) != Some(&c) {
            return Err(ParseError::at(
                pos,
                ParseErrorKind::Unexpected {
                    found: c.to_string(),
                    expected: "the last line's formula".into(),
                },
            ));
        }
    }
    if !p.at_end() {
        return Err(p.error("`premise`, `line` or `conclusion` record"));
    }
    Ok(Deduction { premises, lines })
}

/// One record per chase state: the initial goal, then every step with the
/// premise it used, the symbols it minted, its payload and the resulting
/// dependency.
pub fn write_trace(outcome: &ChaseOutcome) -> String {
    let mut out = String::from("chase-trace v1\n");
    for (i, p) in outcome.sigma.iter().enumerate() {
        let _ = writeln!(out, "premise index={i} formula={p}");
    }
    let states = outcome.states();
    let _ = writeln!(out, "step index=0 rule=init formula={}", states[0]);
    for (n, (step, state)) in outcome.steps.iter().zip(&states[1..]).enumerate() {
        let minted: Vec<Symbol> = step.minted(&outcome.sigma);
        let (rule, payload) = match step {
            ChaseStep::Egd {
                valuation,
                replaced,
                by,
                ..
            } => ("egd", format!("{valuation} replace={replaced} by={by}")),
            ChaseStep::Tgd { extensions, .. } => ("tgd", list(extensions)),
        };
        let _ = writeln!(
            out,
            "step index={} rule={rule} refs=[P{}.0] new={} payload={payload} formula={state}",
            n + 1,
            step.dependency(),
            list(&minted)
        );
    }
    let _ = writeln!(out, "verdict value={} steps={}", outcome.verdict, outcome.steps.len());
    out
}

/// A relation as a single `relation` declaration.
pub fn write_relation(name: &str, r: &Relation) -> String {
    let text = r.to_string();
    let (header, rows) = text.split_once(": ").unwrap_or((&text, "{}"));
    format!("relation {name}{header} {rows}\n")
}

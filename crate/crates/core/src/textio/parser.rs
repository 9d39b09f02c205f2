use crate::model::{
    Atom, Dependency, EdSentence, Egd, Ejd, Formula, HeadAtom, Ind, Relation, Tgd, Valuation,
};
use crate::symbol::{FreshSource, Symbol};
use crate::textio::lexer::{tokenize, Tok, Token};
use crate::textio::{Decl, GoalRef, Item, ParseError, ParseErrorKind, Pos, SourceFile};

pub(crate) struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: Pos,
    pub(crate) fresh: FreshSource,
}

impl Parser {
    /// Tokenizes `text`; blanks are minted above every `@k` already present
    /// and above `floor`.
    pub(crate) fn new(text: &str, floor: u32) -> Result<Self, ParseError> {
        let toks = tokenize(text)?;
        let literal_max = toks
            .iter()
            .filter_map(|t| match t.tok {
                Tok::Fresh(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut fresh = FreshSource::new();
        fresh.raise_to(literal_max.max(floor));
        let lines = text.lines().count().max(1);
        let last_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Ok(Parser {
            toks,
            at: 0,
            end: Pos {
                line: lines,
                col: last_col,
            },
            fresh,
        })
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|t| t.pos).unwrap_or(self.end)
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    pub(crate) fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.at + n).map(|t| &t.tok)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub(crate) fn error(&self, expected: &str) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::Unexpected {
                found: t.to_string(),
                expected: expected.to_owned(),
            },
            None => ParseErrorKind::UnexpectedEof {
                expected: expected.to_owned(),
            },
        };
        ParseError {
            pos: self.pos(),
            kind,
        }
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    pub(crate) fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == word)
    }

    pub(crate) fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.is_keyword(word) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{word}`")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error("identifier")),
        }
    }

    /// A value: identifier, `@k`, or `_` (minted as a fresh distinct symbol).
    pub(crate) fn value(&mut self) -> Result<Symbol, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = Symbol::named(s);
                self.at += 1;
                Ok(s)
            }
            Some(Tok::Fresh(k)) => {
                let s = Symbol::fresh(*k);
                self.at += 1;
                Ok(s)
            }
            Some(Tok::Blank) => {
                self.at += 1;
                Ok(self.fresh.mint())
            }
            _ => Err(self.error("value")),
        }
    }

    /// An attribute: like a value, but blanks are not allowed.
    pub(crate) fn attribute(&mut self) -> Result<Symbol, ParseError> {
        if self.peek() == Some(&Tok::Blank) {
            return Err(self.error("attribute"));
        }
        self.value()
    }

    fn starts_symbol(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Fresh(_)))
    }

    pub(crate) fn attr_list(&mut self) -> Result<Vec<Symbol>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = vec![self.attribute()?];
        while self.eat(&Tok::Comma) {
            out.push(self.attribute()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn row(&mut self, arity: usize) -> Result<Vec<Symbol>, ParseError> {
        let pos = self.pos();
        self.expect(Tok::LParen)?;
        let mut out = vec![self.value()?];
        while self.eat(&Tok::Comma) {
            out.push(self.value()?);
        }
        self.expect(Tok::RParen)?;
        if out.len() != arity {
            return Err(ParseError {
                pos,
                kind: ParseErrorKind::Arity {
                    expected: arity,
                    found: out.len(),
                },
            });
        }
        Ok(out)
    }

    fn rowset(&mut self, header: &[Symbol]) -> Result<Relation, ParseError> {
        let pos = self.pos();
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            rows.push(self.row(header.len())?);
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Relation::new(header, rows).map_err(|e| ParseError::model(pos, e))
    }

    /// `over (A,B): rows`
    pub(crate) fn tableau(&mut self) -> Result<Relation, ParseError> {
        self.keyword("over")?;
        let header = self.attr_list()?;
        self.expect(Tok::Colon)?;
        self.rowset(&header)
    }

    fn tgd_or_egd_tail(&mut self, is_tgd: bool) -> Result<Dependency, ParseError> {
        let pos = self.pos();
        let body = self.tableau()?;
        self.expect(Tok::FatArrow)?;
        if is_tgd {
            let head = self.rowset(body.schema())?;
            Tgd::new(body, head)
                .map(Dependency::from)
                .map_err(|e| ParseError::model(pos, e))
        } else {
            let x = self.value()?;
            self.expect(Tok::Eq)?;
            let y = self.value()?;
            Egd::new(body, x, y)
                .map(Dependency::from)
                .map_err(|e| ParseError::model(pos, e))
        }
    }

    fn seq_until_relation(&mut self) -> Result<Vec<Symbol>, ParseError> {
        let mut out = vec![self.attribute()?];
        while self.starts_symbol() {
            out.push(self.attribute()?);
        }
        Ok(out)
    }

    /// `A B <= C D` or `A = B`.
    fn ind_tail(&mut self) -> Result<Dependency, ParseError> {
        let pos = self.pos();
        let lhs = self.seq_until_relation()?;
        if self.eat(&Tok::Eq) {
            if lhs.len() != 1 {
                return Err(ParseError {
                    pos,
                    kind: ParseErrorKind::Arity {
                        expected: 1,
                        found: lhs.len(),
                    },
                });
            }
            let rhs = self.attribute()?;
            return Ok(Ind::equality(lhs[0], rhs).into());
        }
        self.expect(Tok::Subset)?;
        let mut rhs = Vec::with_capacity(lhs.len());
        for _ in 0..lhs.len() {
            rhs.push(self.attribute()?);
        }
        Ind::new(lhs, rhs)
            .map(Dependency::from)
            .map_err(|e| ParseError::model(pos, e))
    }

    fn join_tail(&mut self) -> Result<Dependency, ParseError> {
        let pos = self.pos();
        self.keyword("join")?;
        let mut comps = vec![self.attr_list()?];
        while self.peek() == Some(&Tok::LParen) {
            comps.push(self.attr_list()?);
        }
        Ejd::new(comps)
            .map(Dependency::from)
            .map_err(|e| ParseError::model(pos, e))
    }

    /// One conjunct in formula syntax (no names).
    pub(crate) fn dependency(&mut self) -> Result<Dependency, ParseError> {
        match self.peek() {
            Some(Tok::Ident(w)) if w == "tgd" || w == "egd" => {
                let is_tgd = w == "tgd";
                self.at += 1;
                self.tgd_or_egd_tail(is_tgd)
            }
            Some(Tok::Ident(w)) if w == "ind" => {
                self.at += 1;
                self.ind_tail()
            }
            Some(Tok::Ident(w)) if w == "join" => self.join_tail(),
            Some(Tok::Ident(_)) | Some(Tok::Fresh(_)) => {
                let pos = self.pos();
                let a = self.attribute()?;
                self.expect(Tok::Eq)
                    .map_err(|_| ParseError::at(pos, ParseErrorKind::Unexpected {
                        found: a.to_string(),
                        expected: "dependency".into(),
                    }))?;
                let b = self.attribute()?;
                Ok(Ind::equality(a, b).into())
            }
            _ => Err(self.error("dependency")),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let mut conj = vec![self.dependency()?];
        while self.eat(&Tok::Amp) {
            conj.push(self.dependency()?);
        }
        Formula::new(conj).map_err(|e| ParseError::model(pos, e))
    }

    /// `{x->y, ...}`
    pub(crate) fn valuation(&mut self) -> Result<Valuation, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut out = Valuation::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            let a = self.attribute()?;
            self.expect(Tok::Arrow)?;
            let b = self.attribute()?;
            out.insert(a, b);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn optional_name(&mut self) -> Option<String> {
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(w)), _) if w == "over" => None,
            (Some(Tok::Ident(w)), Some(Tok::Colon)) | (Some(Tok::Ident(w)), Some(Tok::Ident(_)))
                if w != "over" =>
            {
                let w = w.clone();
                self.at += 1;
                Some(w)
            }
            _ => None,
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let relation = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.value()?];
        while self.eat(&Tok::Comma) {
            args.push(self.value()?);
        }
        self.expect(Tok::RParen)?;
        Ok(Atom { relation, args })
    }

    fn ed_tail(&mut self) -> Result<EdSentence, ParseError> {
        self.keyword("over")?;
        let header = self.attr_list()?;
        self.expect(Tok::Colon)?;
        let pos = self.pos();
        let mut body = Vec::new();
        if self.peek() != Some(&Tok::Arrow) {
            body.push(self.atom()?);
            while self.eat(&Tok::Amp) {
                body.push(self.atom()?);
            }
        }
        self.expect(Tok::Arrow)?;
        let mut head = Vec::new();
        loop {
            if matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) == Some(&Tok::LParen) {
                head.push(HeadAtom::Rel(self.atom()?));
            } else {
                let x = self.value()?;
                self.expect(Tok::Eq)?;
                let y = self.value()?;
                head.push(HeadAtom::Eq(x, y));
            }
            if !self.eat(&Tok::Amp) {
                break;
            }
        }
        EdSentence::new(header, body, head).map_err(|e| ParseError::model(pos, e))
    }

    pub(crate) fn decl(&mut self) -> Result<Decl, ParseError> {
        let pos = self.pos();
        let word = self.ident()?;
        let (name, item) = match word.as_str() {
            "relation" => {
                let name = self.ident()?;
                let header = self.attr_list()?;
                (Some(name), Item::Relation(self.rowset(&header)?))
            }
            "tgd" | "egd" => {
                let name = self.optional_name();
                (name, Item::Dependency(self.tgd_or_egd_tail(word == "tgd")?))
            }
            "ind" => {
                let name = self.optional_name();
                self.expect(Tok::Colon)?;
                (name, Item::Dependency(self.ind_tail()?))
            }
            "ejd" => {
                let name = self.optional_name();
                self.expect(Tok::Colon)?;
                (name, Item::Dependency(self.join_tail()?))
            }
            "ed" => {
                let name = self.optional_name();
                (name, Item::Ed(self.ed_tail()?))
            }
            "goal" => {
                self.expect(Tok::Colon)?;
                let is_ref = matches!(self.peek(), Some(Tok::Ident(w))
                    if !matches!(w.as_str(), "tgd" | "egd" | "ind" | "join"))
                    && self.peek_at(1) != Some(&Tok::Eq);
                let goal = if is_ref {
                    GoalRef::Named(self.ident()?)
                } else {
                    GoalRef::Inline(self.dependency()?)
                };
                (None, Item::Goal(goal))
            }
            _ => {
                self.at -= 1;
                return Err(self.error("declaration keyword"));
            }
        };
        Ok(Decl { name, item, pos })
    }
}

pub(crate) fn parse_file(text: &str, fresh: &mut FreshSource) -> Result<SourceFile, ParseError> {
    let mut p = Parser::new(text, fresh.watermark())?;
    let mut decls = Vec::new();
    while !p.at_end() {
        decls.push(p.decl()?);
    }
    fresh.raise_to(p.fresh.watermark());
    let file = SourceFile { decls };
    file.validate()?;
    Ok(file)
}

/// Parses a whole input as one formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, 0)?;
    let f = p.formula()?;
    if !p.at_end() {
        return Err(p.error("end of formula"));
    }
    Ok(f)
}

/// Parses a single dependency in formula syntax.
pub fn parse_dependency(text: &str) -> Result<Dependency, ParseError> {
    let mut p = Parser::new(text, 0)?;
    let d = p.dependency()?;
    if !p.at_end() {
        return Err(p.error("end of dependency"));
    }
    Ok(d)
}

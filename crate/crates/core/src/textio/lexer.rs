use std::fmt;

use crate::textio::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Blank,
    Fresh(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Amp,
    Dot,
    Eq,
    FatArrow,
    Arrow,
    Dash,
    Subset,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Blank => f.write_str("`_`"),
            Tok::Fresh(k) => write!(f, "`@{k}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Dash => f.write_str("`-`"),
            Tok::Subset => f.write_str("`<=`"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let two = |n: char| chars.get(i + 1) == Some(&n);
        let (tok, width) = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            ':' => (Tok::Colon, 1),
            '&' => (Tok::Amp, 1),
            '.' => (Tok::Dot, 1),
            '=' if two('>') => (Tok::FatArrow, 2),
            '=' => (Tok::Eq, 1),
            '-' if two('>') => (Tok::Arrow, 2),
            '-' => (Tok::Dash, 1),
            '<' if two('=') => (Tok::Subset, 2),
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[start..j].iter().collect();
                let k = digits.parse::<u32>().map_err(|_| ParseError {
                    pos,
                    kind: ParseErrorKind::Lexical('@'),
                })?;
                (Tok::Fresh(k), j - i)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = if word == "_" { Tok::Blank } else { Tok::Ident(word) };
                (tok, j - i)
            }
            other => {
                return Err(ParseError {
                    pos,
                    kind: ParseErrorKind::Lexical(other),
                })
            }
        };
        out.push(Token { tok, pos });
        i += width;
        col += width;
    }
    Ok(out)
}

//! Recursive-descent parser for the formula grammar:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := un ("&" un)*
//! un      := "~" un | ("exists" | "forall") VAR "." un | atom | "(" formula ")"
//! atom    := NAME "(" VAR ("," VAR)* ")" | VAR "=" VAR | "true" | "false"
//! ```

use super::Formula;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Exists,
    Forall,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Exists => "`exists`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Equals => "`=`".into(),
        }
    }
}

/// Byte offset -> (line, column), both 1-based.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, message: String| {
        let (line, column) = position(text, i);
        Error::Parse {
            line,
            column,
            message,
        }
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'=' => Tok::Equals,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::DArrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    match word {
                        "exists" => Tok::Exists,
                        "forall" => Tok::Forall,
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    },
                    start,
                ));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unknown token `{ch}`")));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let offset = self
            .toks
            .get(self.pos)
            .map_or(self.text.len(), |&(_, o)| o);
        let (line, column) = position(self.text, offset);
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.unexpected(&t.describe())
        }
    }

    fn var(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => self.unexpected("variable"),
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut f = self.imp()?;
        while self.eat(&Tok::DArrow) {
            f = Formula::iff(f, self.imp()?);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula> {
        let f = self.or()?;
        if self.eat(&Tok::Arrow) {
            return Ok(Formula::implies(f, self.imp()?));
        }
        Ok(f)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.eat(&Tok::Pipe) {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(q @ (Tok::Exists | Tok::Forall)) => {
                let universal = *q == Tok::Forall;
                self.pos += 1;
                let v = self.var()?;
                self.expect(&Tok::Dot)?;
                let body = self.unary()?;
                Ok(if universal {
                    Formula::forall(&v, body)
                } else {
                    Formula::exists(&v, body)
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let mut args = vec![self.var()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.var()?);
                    }
                    self.expect(&Tok::RParen)?;
                    Ok(Formula::Atom(name, args))
                } else if self.eat(&Tok::Equals) {
                    let rhs = self.var()?;
                    Ok(Formula::Eq(name, rhs))
                } else {
                    self.unexpected("`(` or `=`")
                }
            }
            _ => self.unexpected("formula"),
        }
    }
}

/// Parse a formula from text.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser { text, toks, pos: 0 };
    let f = p.iff()?;
    if p.pos < p.toks.len() {
        return p.unexpected("end of input");
    }
    Ok(f)
}

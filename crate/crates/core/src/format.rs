//! Structure file formats: JSON and a small text DSL.
//!
//! JSON:
//!
//! ```json
//! {"name": "s", "universe": 3, "elements": ["a", "b", "c"],
//!  "relations": {"E": {"arity": 2, "tuples": [[0, 1], ["b", "c"]]}}}
//! ```
//!
//! `elements` is optional; when present, tuple entries may be element names.
//!
//! DSL:
//!
//! ```text
//! # comment
//! structure s;
//! universe 3;
//! elements a b c;
//! relation E/2 { (0,1) (b,c) }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::structure::FiniteStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dsl,
}

impl Format {
    /// Guess from a file extension: `.json` is JSON, anything else is DSL.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Dsl,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "dsl" => Ok(Format::Dsl),
            other => Err(Error::Precondition(format!("unknown format `{other}`"))),
        }
    }
}

pub fn load_structure(text: &str, format: Format) -> Result<FiniteStructure> {
    match format {
        Format::Json => load_json(text),
        Format::Dsl => load_dsl(text),
    }
}

pub fn save_structure(s: &FiniteStructure, format: Format) -> String {
    match format {
        Format::Json => save_json(s),
        Format::Dsl => save_dsl(s),
    }
}

/// Raw element reference before resolution against the element names.
enum ElementRef {
    Index(usize),
    Name(String),
}

fn resolve(r: ElementRef, s: &FiniteStructure) -> Result<usize> {
    match r {
        ElementRef::Index(i) if i < s.universe() => Ok(i),
        ElementRef::Index(i) => Err(Error::ElementOutOfRange {
            element: i,
            universe: s.universe(),
        }),
        ElementRef::Name(n) => s
            .element_names()
            .and_then(|names| names.iter().position(|x| *x == n))
            .ok_or(Error::UnknownElement(n)),
    }
}

fn build_relation(
    s: &FiniteStructure,
    name: &str,
    arity: usize,
    tuples: Vec<Vec<ElementRef>>,
) -> Result<Relation> {
    if arity == 0 {
        return Err(Error::Precondition(format!("relation `{name}` has arity 0")));
    }
    let mut rel = Relation::empty(s.universe(), arity)?;
    for t in tuples {
        if t.len() != arity {
            return Err(Error::ArityMismatch {
                name: name.to_string(),
                expected: arity,
                found: t.len(),
            });
        }
        let t = t
            .into_iter()
            .map(|r| resolve(r, s))
            .collect::<Result<Vec<_>>>()?;
        rel.insert(&t)?;
    }
    Ok(rel)
}

fn json_err(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

fn load_json(text: &str) -> Result<FiniteStructure> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| json_err("top level must be an object"))?;
    for key in obj.keys() {
        if !["name", "universe", "elements", "relations"].contains(&key.as_str()) {
            return Err(json_err(format!("unknown key `{key}`")));
        }
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| json_err("`name` must be a string"))?;
    let universe = obj
        .get("universe")
        .and_then(Value::as_u64)
        .ok_or_else(|| json_err("`universe` must be a non-negative integer"))?;
    let mut s = FiniteStructure::new(name, universe as usize)?;
    if let Some(elements) = obj.get("elements") {
        let names = elements
            .as_array()
            .ok_or_else(|| json_err("`elements` must be an array"))?
            .iter()
            .map(|v| v.as_str().map(str::to_string))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| json_err("`elements` must hold strings"))?;
        s = s.with_element_names(names)?;
    }
    let empty = serde_json::Map::new();
    let relations = match obj.get("relations") {
        None => &empty,
        Some(v) => v
            .as_object()
            .ok_or_else(|| json_err("`relations` must be an object"))?,
    };
    for (rname, body) in relations {
        let body = body
            .as_object()
            .ok_or_else(|| json_err(format!("relation `{rname}` must be an object")))?;
        let arity = body
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| json_err(format!("relation `{rname}` needs an integer `arity`")))?
            as usize;
        let raw = body
            .get("tuples")
            .and_then(Value::as_array)
            .ok_or_else(|| json_err(format!("relation `{rname}` needs a `tuples` array")))?;
        let mut tuples = Vec::with_capacity(raw.len());
        for t in raw {
            let t = t
                .as_array()
                .ok_or_else(|| json_err(format!("tuple of `{rname}` must be an array")))?;
            let refs = t
                .iter()
                .map(|e| match e {
                    Value::Number(n) => n
                        .as_u64()
                        .map(|i| ElementRef::Index(i as usize))
                        .ok_or_else(|| json_err(format!("bad element {n}"))),
                    Value::String(n) => Ok(ElementRef::Name(n.clone())),
                    other => Err(json_err(format!("bad element {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            tuples.push(refs);
        }
        let rel = build_relation(&s, rname, arity, tuples)?;
        s.add_relation(rname, rel)?;
    }
    Ok(s)
}

fn save_json(s: &FiniteStructure) -> String {
    let q = |x: &str| serde_json::to_string(x).expect("string serializes");
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"name\": {},", q(s.name()));
    let _ = writeln!(out, "  \"universe\": {},", s.universe());
    if let Some(names) = s.element_names() {
        let list: Vec<_> = names.iter().map(|n| q(n)).collect();
        let _ = writeln!(out, "  \"elements\": [{}],", list.join(", "));
    }
    if s.relation_count() == 0 {
        out.push_str("  \"relations\": {}\n}\n");
        return out;
    }
    out.push_str("  \"relations\": {\n");
    let count = s.relation_count();
    for (ri, (name, rel)) in s.relations().enumerate() {
        let _ = writeln!(out, "    {}: {{", q(name));
        let _ = writeln!(out, "      \"arity\": {},", rel.arity());
        let tuples: Vec<String> = rel
            .tuples()
            .map(|t| {
                let parts: Vec<_> = t.iter().map(usize::to_string).collect();
                format!("[{}]", parts.join(", "))
            })
            .collect();
        if tuples.is_empty() {
            out.push_str("      \"tuples\": []\n");
        } else {
            out.push_str("      \"tuples\": [\n");
            for (i, t) in tuples.iter().enumerate() {
                let sep = if i + 1 < tuples.len() { "," } else { "" };
                let _ = writeln!(out, "        {t}{sep}");
            }
            out.push_str("      ]\n");
        }
        let sep = if ri + 1 < count { "," } else { "" };
        let _ = writeln!(out, "    }}{sep}");
    }
    out.push_str("  }\n}\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Punct(char),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.char_indices().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, column) = (self.line, self.column);
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_ascii_digit() {
                let mut s = String::new();
                while let Some(d) = self.peek().filter(char::is_ascii_digit) {
                    s.push(d);
                    self.bump();
                }
                let n = s.parse().map_err(|_| Error::Parse {
                    line,
                    column,
                    message: format!("integer `{s}` too large"),
                })?;
                out.push((Tok::Int(n), line, column));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(d) = self.peek().filter(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    s.push(d);
                    self.bump();
                }
                out.push((Tok::Ident(s), line, column));
            } else if ";/{}(),".contains(c) {
                self.bump();
                out.push((Tok::Punct(c), line, column));
            } else {
                return Err(Error::Parse {
                    line,
                    column,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        Ok(out)
    }
}

struct DslParser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl DslParser {
    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        self.pos += 1;
        t
    }

    fn punct(&mut self, p: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Punct(c)) if *c == p => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{p}`")),
        }
    }

    fn eat_punct(&mut self, p: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(c)) if *c == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn int(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected integer"),
        }
    }

    fn element(&mut self) -> Result<ElementRef> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(ElementRef::Index(n)),
            Some(Tok::Ident(s)) => Ok(ElementRef::Name(s)),
            _ => {
                self.pos -= 1;
                self.err("expected element")
            }
        }
    }

    fn structure(&mut self) -> Result<FiniteStructure> {
        self.keyword("structure")?;
        let name = self.ident()?;
        self.punct(';')?;
        self.keyword("universe")?;
        let m = self.int()?;
        self.punct(';')?;
        let mut s = FiniteStructure::new(&name, m).or_else(|e| self.err(e.to_string()))?;
        if matches!(self.peek(), Some(Tok::Ident(k)) if k == "elements") {
            self.pos += 1;
            let mut names = Vec::new();
            while let Some(Tok::Ident(_)) = self.peek() {
                names.push(self.ident()?);
            }
            self.punct(';')?;
            s = s.with_element_names(names)?;
        }
        let mut seen = BTreeMap::new();
        while self.peek().is_some() {
            self.keyword("relation")?;
            let at = self.here();
            let rname = self.ident()?;
            self.punct('/')?;
            let arity = self.int()?;
            self.punct('{')?;
            let mut tuples = Vec::new();
            while self.eat_punct('(') {
                let mut t = vec![self.element()?];
                while self.eat_punct(',') {
                    t.push(self.element()?);
                }
                self.punct(')')?;
                tuples.push(t);
            }
            self.punct('}')?;
            self.eat_punct(';');
            if seen.insert(rname.clone(), at).is_some() {
                return Err(Error::NameClash(rname));
            }
            let rel = build_relation(&s, &rname, arity, tuples)?;
            s.add_relation(&rname, rel)?;
        }
        Ok(s)
    }
}

fn load_dsl(text: &str) -> Result<FiniteStructure> {
    let toks = Lexer::new(text).tokens()?;
    let end = text.lines().count().max(1);
    let last_col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    let mut p = DslParser {
        toks,
        pos: 0,
        end: (end, last_col),
    };
    p.structure()
}

fn save_dsl(s: &FiniteStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "structure {};", s.name());
    let _ = writeln!(out, "universe {};", s.universe());
    if let Some(names) = s.element_names() {
        let _ = writeln!(out, "elements {};", names.join(" "));
    }
    for (name, rel) in s.relations() {
        let _ = writeln!(out, "relation {}/{} {{", name, rel.arity());
        for t in rel.tuples() {
            let parts: Vec<_> = t.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "  ({})", parts.join(","));
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_R: &str = r#"{
        "name": "example_R", "universe": 4, "elements": ["a", "b", "c", "d"],
        "relations": {"R": {"arity": 3, "tuples": [
            ["a","b","c"],["b","a","d"],["b","c","d"],["c","b","a"],
            ["a","c","d"],["c","a","b"],["c","d","a"],["d","c","b"],
            ["d","a","b"],["a","d","c"],["b","d","a"],["d","b","c"]]}}}"#;

    #[test]
    fn pure_set_json() {
        let s = load_structure(r#"{"name": "p", "universe": 3, "relations": {}}"#, Format::Json)
            .unwrap();
        assert_eq!(s.universe(), 3);
        assert_eq!(s.relation_count(), 0);
    }

    #[test]
    fn named_elements_map_in_declaration_order() {
        let s = load_structure(EXAMPLE_R, Format::Json).unwrap();
        let r = s.relation("R").unwrap();
        assert_eq!(r.count(), 12);
        assert!(r.contains(&[0, 1, 2]));
        assert!(r.contains(&[1, 0, 3]));
        assert!(r.contains(&[3, 1, 2]));
        assert!(!r.contains(&[0, 1, 3]));
    }

    #[test]
    fn out_of_range_element() {
        let text = r#"{"name": "p", "universe": 3,
            "relations": {"E": {"arity": 2, "tuples": [[0, 5]]}}}"#;
        assert_eq!(
            load_structure(text, Format::Json).unwrap_err(),
            Error::ElementOutOfRange { element: 5, universe: 3 }
        );
    }

    #[test]
    fn arity_mismatch() {
        let text = r#"{"name": "p", "universe": 3,
            "relations": {"E": {"arity": 2, "tuples": [[0, 1, 2]]}}}"#;
        assert!(matches!(
            load_structure(text, Format::Json).unwrap_err(),
            Error::ArityMismatch { expected: 2, found: 3, .. }
        ));
    }

    #[test]
    fn json_syntax_error_has_position() {
        let err = load_structure("{\n  \"name\": \"p\",\n  \"universe\": }", Format::Json).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dsl_parses_with_comments() {
        let text = "# a test\nstructure t; universe 3;\nelements a b c;\n\
                    relation E/2 { (0,1) (b,c) } # trailing\nrelation P/1 { }";
        let s = load_structure(text, Format::Dsl).unwrap();
        assert!(s.relation("E").unwrap().contains(&[1, 2]));
        assert!(s.relation("P").unwrap().is_empty());
    }

    #[test]
    fn dsl_error_position() {
        let err = load_structure("structure t;\nuniverse 3;\nrelation E/2 { (0,1 }", Format::Dsl)
            .unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 21)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_both_formats() {
        let s = load_structure(EXAMPLE_R, Format::Json).unwrap();
        for f in [Format::Json, Format::Dsl] {
            let text = save_structure(&s, f);
            let back = load_structure(&text, f).unwrap();
            assert_eq!(back, s);
            assert_eq!(save_structure(&back, f), text);
        }
    }

    #[test]
    fn mixed_arities_round_trip_bytes() {
        let s = FiniteStructure::new("mix", 3)
            .unwrap()
            .with_relation("P", Relation::from_tuples(3, 1, [[2]]).unwrap())
            .unwrap()
            .with_relation("T", Relation::from_tuples(3, 3, [[0, 1, 2], [2, 2, 0]]).unwrap())
            .unwrap();
        let text = save_structure(&s, Format::Json);
        let again = save_structure(&load_structure(&text, Format::Json).unwrap(), Format::Json);
        assert_eq!(text.as_bytes(), again.as_bytes());
    }
}

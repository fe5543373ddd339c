//! Finite relational structures.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relation::Relation;

const KEYWORDS: [&str; 4] = ["exists", "forall", "true", "false"];

/// `[A-Za-z_][A-Za-z0-9_]*`, excluding the formula keywords.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

pub(crate) fn check_identifier(s: &str) -> Result<()> {
    if is_identifier(s) {
        Ok(())
    } else {
        Err(Error::InvalidIdentifier(s.to_string()))
    }
}

/// Relation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<()> {
        check_identifier(name)?;
        if arity == 0 {
            return Err(Error::Precondition(format!("symbol `{name}` has arity 0")));
        }
        if self.arity_of(name).is_some() {
            return Err(Error::NameClash(name.to_string()));
        }
        self.symbols.push((name.to_string(), arity));
        Ok(())
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, a)| a)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A finite structure with universe `{0..m-1}` and named relations.
///
/// Relations are kept in name order so that every traversal (serialization,
/// reports, automorphism search) is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    name: String,
    universe: usize,
    elements: Option<Vec<String>>,
    relations: BTreeMap<String, Relation>,
}

impl FiniteStructure {
    pub fn new(name: &str, universe: usize) -> Result<Self> {
        check_identifier(name)?;
        if universe == 0 {
            return Err(Error::Precondition("universe must be nonempty".into()));
        }
        Ok(FiniteStructure {
            name: name.to_string(),
            universe,
            elements: None,
            relations: BTreeMap::new(),
        })
    }

    /// Attach element names; position `i` names element `i`.
    pub fn with_element_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.universe {
            return Err(Error::Precondition(format!(
                "{} element names for a universe of size {}",
                names.len(),
                self.universe
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::NameClash(n.clone()));
            }
        }
        self.elements = Some(names);
        Ok(self)
    }

    pub fn with_relation(mut self, name: &str, relation: Relation) -> Result<Self> {
        self.add_relation(name, relation)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, name: &str, relation: Relation) -> Result<()> {
        check_identifier(name)?;
        if relation.arity() == 0 {
            return Err(Error::Precondition(format!("relation `{name}` has arity 0")));
        }
        if relation.universe() != self.universe {
            return Err(Error::UniverseMismatch {
                left: self.universe,
                right: relation.universe(),
            });
        }
        if self.relations.contains_key(name) {
            return Err(Error::NameClash(name.to_string()));
        }
        self.relations.insert(name.to_string(), relation);
        Ok(())
    }

    pub fn renamed(mut self, name: &str) -> Result<Self> {
        check_identifier(name)?;
        self.name = name.to_string();
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Universe size `m`.
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn element_names(&self) -> Option<&[String]> {
        self.elements.as_deref()
    }

    /// Display label for element `i`: its declared name, or the index.
    pub fn element_label(&self, i: usize) -> String {
        match &self.elements {
            Some(names) => names[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(n, r)| (n.as_str(), r))
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn signature(&self) -> Signature {
        Signature {
            symbols: self
                .relations
                .iter()
                .map(|(n, r)| (n.clone(), r.arity()))
                .collect(),
        }
    }

    /// Isomorphic copy along a permutation `perm` of the universe (element
    /// `i` becomes `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteStructure> {
        let mut seen = vec![false; self.universe];
        if perm.len() != self.universe
            || perm.iter().any(|&p| p >= self.universe || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Precondition("relabeling is not a permutation".into()));
        }
        let mut out = FiniteStructure::new(&self.name, self.universe)?;
        for (n, r) in &self.relations {
            out.add_relation(n, r.map_elements(perm))?;
        }
        if let Some(names) = &self.elements {
            let mut moved = vec![String::new(); self.universe];
            for (i, n) in names.iter().enumerate() {
                moved[perm[i]] = n.clone();
            }
            out.elements = Some(moved);
        }
        Ok(out)
    }
}

/// Ordered, duplicate-free variable list fixing the coordinates of a relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarContext(Vec<String>);

impl VarContext {
    pub fn new<I, S>(vars: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for v in vars {
            let v = v.into();
            check_identifier(&v)?;
            if out.contains(&v) {
                return Err(Error::DuplicateVariable(v));
            }
            out.push(v);
        }
        Ok(VarContext(out))
    }

    /// Parse a comma-separated list such as `x,y,z`. The empty string gives
    /// the empty context.
    pub fn parse(list: &str) -> Result<Self> {
        let trimmed = list.trim();
        if trimmed.is_empty() {
            return Ok(VarContext::default());
        }
        Self::new(trimmed.split(',').map(|s| s.trim().to_string()))
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.0.iter().position(|v| v == var)
    }
}

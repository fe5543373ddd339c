use std::fmt;

use rand::Rng;

/// First-order formula over a relational signature with equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `R(x, y, ..)`; variables may repeat.
    Atom(String, Vec<String>),
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn atom<S: Into<String>>(name: &str, args: impl IntoIterator<Item = S>) -> Formula {
        Formula::Atom(name.to_string(), args.into_iter().map(Into::into).collect())
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.to_string(), y.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Left-folded conjunction; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-folded disjunction; `false` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Universal closure over the listed variables, outermost first.
    pub fn forall_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    /// Variables with a free occurrence, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut Vec<String>) {
        let mut note = |v: &str, bound: &Vec<&str>| {
            if !bound.contains(&v) && !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| note(a, bound)),
            Formula::Eq(x, y) => {
                note(x, bound);
                note(y, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => 0,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.precedence();
        if p < min {
            f.write_str("(")?;
        }
        match self {
            Formula::True => f.write_str("true")?,
            Formula::False => f.write_str("false")?,
            Formula::Atom(name, args) => write!(f, "{}({})", name, args.join(", "))?,
            Formula::Eq(x, y) => write!(f, "{x} = {y}")?,
            Formula::Not(g) => {
                f.write_str("~")?;
                g.write_prec(f, 5)?;
            }
            Formula::And(a, b) => {
                a.write_prec(f, 4)?;
                f.write_str(" & ")?;
                b.write_prec(f, 5)?;
            }
            Formula::Or(a, b) => {
                a.write_prec(f, 3)?;
                f.write_str(" | ")?;
                b.write_prec(f, 4)?;
            }
            Formula::Implies(a, b) => {
                a.write_prec(f, 3)?;
                f.write_str(" -> ")?;
                b.write_prec(f, 2)?;
            }
            Formula::Iff(a, b) => {
                a.write_prec(f, 1)?;
                f.write_str(" <-> ")?;
                b.write_prec(f, 2)?;
            }
            Formula::Exists(v, body) => {
                write!(f, "exists {v} . ")?;
                body.write_prec(f, 5)?;
            }
            Formula::Forall(v, body) => {
                write!(f, "forall {v} . ")?;
                body.write_prec(f, 5)?;
            }
        }
        if p < min {
            f.write_str(")")?;
        }
        Ok(())
    }

    /// Random formula of depth at most `max_depth` over the given symbols and
    /// variable pool.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        symbols: &[(String, usize)],
        vars: &[String],
        max_depth: usize,
    ) -> Formula {
        assert!(!vars.is_empty(), "variable pool must be nonempty");
        let var = |rng: &mut R| vars[rng.gen_range(0..vars.len())].clone();
        if max_depth == 0 || rng.gen_bool(0.25) {
            let choice = rng.gen_range(0..10);
            return match choice {
                0 => Formula::True,
                1 => Formula::False,
                2..=4 => Formula::Eq(var(rng), var(rng)),
                _ if symbols.is_empty() => Formula::Eq(var(rng), var(rng)),
                _ => {
                    let (name, arity) = &symbols[rng.gen_range(0..symbols.len())];
                    Formula::Atom(name.clone(), (0..*arity).map(|_| var(rng)).collect())
                }
            };
        }
        let d = max_depth - 1;
        let sub = |rng: &mut R| Box::new(Formula::random(rng, symbols, vars, d));
        match rng.gen_range(0..7) {
            0 => Formula::Not(sub(rng)),
            1 => Formula::And(sub(rng), sub(rng)),
            2 => Formula::Or(sub(rng), sub(rng)),
            3 => Formula::Implies(sub(rng), sub(rng)),
            4 => Formula::Iff(sub(rng), sub(rng)),
            5 => Formula::Exists(var(rng), sub(rng)),
            _ => Formula::Forall(var(rng), sub(rng)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

//! Evaluation of formulas over finite structures.
//!
//! [`evaluate`] works bottom-up on full truth tables: every subformula is a
//! relation over the variables in scope, and quantifiers are projections.
//! [`satisfies`] is the textbook per-assignment recursion; it is slower but
//! shares no code with the table evaluator, which makes it a useful check.

use super::Formula;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::structure::{FiniteStructure, VarContext};

fn lookup(scope: &[&str], var: &str) -> Result<usize> {
    scope
        .iter()
        .rposition(|v| *v == var)
        .ok_or_else(|| Error::UnboundVariable(var.to_string()))
}

fn base_relation<'s>(s: &'s FiniteStructure, name: &str, found: usize) -> Result<&'s Relation> {
    let rel = s
        .relation(name)
        .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
    if rel.arity() != found {
        return Err(Error::ArityMismatch {
            name: name.to_string(),
            expected: rel.arity(),
            found,
        });
    }
    Ok(rel)
}

fn table<'a>(f: &'a Formula, s: &FiniteStructure, scope: &mut Vec<&'a str>) -> Result<Relation> {
    let m = s.universe();
    let k = scope.len();
    Ok(match f {
        Formula::True => Relation::full(m, k)?,
        Formula::False => Relation::empty(m, k)?,
        Formula::Atom(name, args) => {
            let rel = base_relation(s, name, args.len())?;
            let positions = args
                .iter()
                .map(|a| lookup(scope, a))
                .collect::<Result<Vec<_>>>()?;
            rel.pullback(k, &positions)?
        }
        Formula::Eq(x, y) => {
            let px = lookup(scope, x)?;
            let py = lookup(scope, y)?;
            Relation::diagonal(m)?.pullback(k, &[px, py])?
        }
        Formula::Not(g) => table(g, s, scope)?.complement(),
        Formula::And(a, b) => table(a, s, scope)?.intersection(&table(b, s, scope)?)?,
        Formula::Or(a, b) => table(a, s, scope)?.union(&table(b, s, scope)?)?,
        Formula::Implies(a, b) => table(a, s, scope)?
            .complement()
            .union(&table(b, s, scope)?)?,
        Formula::Iff(a, b) => table(a, s, scope)?
            .symmetric_difference(&table(b, s, scope)?)?
            .complement(),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let universal = matches!(f, Formula::Forall(..));
            scope.push(v);
            let inner = table(body, s, scope);
            scope.pop();
            let inner = inner?;
            let keep: Vec<usize> = (0..k).collect();
            if universal {
                inner.complement().project_onto(&keep)?.complement()
            } else {
                inner.project_onto(&keep)?
            }
        }
    })
}

/// The set of assignments to `ctx` satisfying `f` in `s`, as a relation of
/// arity `ctx.len()`.
pub fn evaluate(f: &Formula, s: &FiniteStructure, ctx: &VarContext) -> Result<Relation> {
    if let Some(v) = f.free_vars().into_iter().find(|v| ctx.position(v).is_none()) {
        return Err(Error::UnboundVariable(v));
    }
    let mut scope: Vec<&str> = ctx.vars().iter().map(String::as_str).collect();
    table(f, s, &mut scope)
}

/// Truth of a sentence in `s`.
pub fn check_sentence(f: &Formula, s: &FiniteStructure) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::NotASentence(free));
    }
    Ok(!evaluate(f, s, &VarContext::default())?.is_empty())
}

/// Tarskian satisfaction under an explicit assignment. Later bindings shadow
/// earlier ones.
pub fn satisfies(f: &Formula, s: &FiniteStructure, assignment: &[(String, usize)]) -> Result<bool> {
    let mut env: Vec<(&str, usize)> = assignment.iter().map(|(v, a)| (v.as_str(), *a)).collect();
    if let Some(&(_, a)) = env.iter().find(|&&(_, a)| a >= s.universe()) {
        return Err(Error::ElementOutOfRange {
            element: a,
            universe: s.universe(),
        });
    }
    holds(f, s, &mut env)
}

fn value(env: &[(&str, usize)], var: &str) -> Result<usize> {
    env.iter()
        .rev()
        .find(|(v, _)| *v == var)
        .map(|&(_, a)| a)
        .ok_or_else(|| Error::UnboundVariable(var.to_string()))
}

fn holds<'a>(f: &'a Formula, s: &FiniteStructure, env: &mut Vec<(&'a str, usize)>) -> Result<bool> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(name, args) => {
            let rel = base_relation(s, name, args.len())?;
            let t = args
                .iter()
                .map(|a| value(env, a))
                .collect::<Result<Vec<_>>>()?;
            rel.contains(&t)
        }
        Formula::Eq(x, y) => value(env, x)? == value(env, y)?,
        Formula::Not(g) => !holds(g, s, env)?,
        Formula::And(a, b) => holds(a, s, env)? && holds(b, s, env)?,
        Formula::Or(a, b) => holds(a, s, env)? || holds(b, s, env)?,
        Formula::Implies(a, b) => !holds(a, s, env)? || holds(b, s, env)?,
        Formula::Iff(a, b) => holds(a, s, env)? == holds(b, s, env)?,
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut result = universal;
            for a in 0..s.universe() {
                env.push((v, a));
                let r = holds(body, s, env);
                env.pop();
                if r? != universal {
                    result = !universal;
                    break;
                }
            }
            result
        }
    })
}

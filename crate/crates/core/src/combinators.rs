//! Constructions on relations and structures: cylinders and projections,
//! Cartesian and mixed sums and products, disjoint unions, compositions,
//! and the singleton expansions that make a finite theory unary or binary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{evaluate, Formula};
use crate::relation::{all_tuples, Relation};
use crate::structure::{is_identifier, FiniteStructure, VarContext};
use crate::symmetry::Symmetry;

/// Where each coordinate of a source relation lands in a target of arity
/// `arity`. Positions are 0-based and pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateMap {
    arity: usize,
    positions: Vec<usize>,
}

impl CoordinateMap {
    pub fn new(arity: usize, positions: Vec<usize>) -> Result<Self> {
        for (i, &p) in positions.iter().enumerate() {
            if p >= arity || positions[..i].contains(&p) {
                return Err(Error::InvalidCoordinates(format!(
                    "{positions:?} is not an injective map into 0..{arity}"
                )));
            }
        }
        Ok(CoordinateMap { arity, positions })
    }

    /// Source coordinate `i` goes to target `offset + i`.
    pub fn shifted(arity: usize, source: usize, offset: usize) -> Result<Self> {
        CoordinateMap::new(arity, (offset..offset + source).collect())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }
}

/// `{t : (t[p_0], ..., t[p_{j-1}]) in x}`; unmapped coordinates are free.
pub fn cylindrify(x: &Relation, map: &CoordinateMap) -> Result<Relation> {
    if map.positions.len() != x.arity() {
        return Err(Error::InvalidCoordinates(format!(
            "map has {} positions for a relation of arity {}",
            map.positions.len(),
            x.arity()
        )));
    }
    x.pullback(map.arity, &map.positions)
}

/// Existential projection onto strictly increasing `positions`.
pub fn project(x: &Relation, positions: &[usize]) -> Result<Relation> {
    let increasing = positions.windows(2).all(|w| w[0] < w[1]);
    if positions.is_empty() || !increasing || positions.iter().any(|&p| p >= x.arity()) {
        return Err(Error::InvalidCoordinates(format!(
            "{positions:?} is not a nonempty increasing subset of 0..{}",
            x.arity()
        )));
    }
    x.project_onto(positions)
}

fn blocks(x: &Relation, y: &Relation) -> Result<(Relation, Relation)> {
    if x.universe() != y.universe() {
        return Err(Error::UniverseMismatch {
            left: x.universe(),
            right: y.universe(),
        });
    }
    let k = x.arity() + y.arity();
    let left = cylindrify(x, &CoordinateMap::shifted(k, x.arity(), 0)?)?;
    let right = cylindrify(y, &CoordinateMap::shifted(k, y.arity(), x.arity())?)?;
    Ok((left, right))
}

/// `{(a, b) : a in x and b in y}`.
pub fn cartesian_product(x: &Relation, y: &Relation) -> Result<Relation> {
    let (l, r) = blocks(x, y)?;
    l.intersection(&r)
}

/// `{(a, b) : a in x or b in y}`.
pub fn cartesian_sum(x: &Relation, y: &Relation) -> Result<Relation> {
    let (l, r) = blocks(x, y)?;
    l.union(&r)
}

/// Placement of two relations in a shared variable context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSpec {
    pub left: CoordinateMap,
    pub right: CoordinateMap,
}

impl OverlapSpec {
    pub fn new(left: CoordinateMap, right: CoordinateMap) -> Result<Self> {
        if left.arity != right.arity {
            return Err(Error::InvalidCoordinates(format!(
                "targets of arity {} and {} differ",
                left.arity, right.arity
            )));
        }
        Ok(OverlapSpec { left, right })
    }

    /// Context = left variables, then right variables not already present.
    pub fn from_vars(left: &[&str], right: &[&str]) -> Result<(Self, VarContext)> {
        let mut ctx: Vec<String> = Vec::new();
        for v in left.iter().chain(right) {
            if !ctx.iter().any(|c| c == v) {
                ctx.push(v.to_string());
            }
        }
        let place = |vars: &[&str]| -> Vec<usize> {
            vars.iter()
                .map(|v| ctx.iter().position(|c| c == v).expect("collected"))
                .collect()
        };
        let k = ctx.len();
        let spec = OverlapSpec::new(
            CoordinateMap::new(k, place(left))?,
            CoordinateMap::new(k, place(right))?,
        )?;
        Ok((spec, VarContext::new(ctx)?))
    }

    pub fn arity(&self) -> usize {
        self.left.arity
    }
}

/// Conjunction of `x` and `y` over the shared context.
pub fn mixed_product(x: &Relation, y: &Relation, spec: &OverlapSpec) -> Result<Relation> {
    cylindrify(x, &spec.left)?.intersection(&cylindrify(y, &spec.right)?)
}

/// Disjunction of `x` and `y` over the shared context.
pub fn mixed_sum(x: &Relation, y: &Relation, spec: &OverlapSpec) -> Result<Relation> {
    cylindrify(x, &spec.left)?.union(&cylindrify(y, &spec.right)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rename {
    pub part: usize,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnionPart {
    pub structure: String,
    pub offset: usize,
    pub size: usize,
    pub predicate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnionReport {
    pub parts: Vec<UnionPart>,
    pub renames: Vec<Rename>,
}

impl UnionReport {
    /// `(part, element within part)` for a union element.
    pub fn locate(&self, element: usize) -> Option<(usize, usize)> {
        self.parts
            .iter()
            .position(|p| (p.offset..p.offset + p.size).contains(&element))
            .map(|i| (i, element - self.parts[i].offset))
    }
}

fn fresh(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (2..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !taken(c))
        .expect("unbounded")
}

/// Side-by-side union with a fresh unary sort predicate `P{i}` per part
/// (1-based). Relation names used by more than one part, or clashing with
/// a sort predicate, get the owning structure's name as prefix.
pub fn disjoint_union(parts: &[FiniteStructure]) -> Result<(FiniteStructure, UnionReport)> {
    if parts.is_empty() {
        return Err(Error::Precondition("disjoint union of no structures".into()));
    }
    let m: usize = parts.iter().map(FiniteStructure::universe).sum();
    let name = parts.iter().map(FiniteStructure::name).collect::<Vec<_>>().join("_plus_");
    let name = if is_identifier(&name) { name } else { "union".to_string() };
    let mut out = FiniteStructure::new(&name, m)?;
    let predicates: Vec<String> = (1..=parts.len()).map(|i| format!("P{i}")).collect();
    let shared = |rel: &str, me: usize| {
        predicates.iter().any(|p| p == rel)
            || parts
                .iter()
                .enumerate()
                .any(|(j, s)| j != me && s.relation(rel).is_some())
    };
    let mut report = UnionReport {
        parts: Vec::new(),
        renames: Vec::new(),
    };
    let mut offset = 0;
    let mut planned: Vec<(usize, String, String)> = Vec::new();
    for (i, s) in parts.iter().enumerate() {
        for (rel, _) in s.relations() {
            let target = if shared(rel, i) { format!("{}_{rel}", s.name()) } else { rel.to_string() };
            planned.push((i, rel.to_string(), target));
        }
    }
    let mut used: Vec<String> = predicates.clone();
    for (i, rel, target) in &mut planned {
        let candidate = fresh(target, &|c| used.iter().any(|u| u == c));
        if candidate != *rel {
            report.renames.push(Rename {
                part: *i,
                from: rel.clone(),
                to: candidate.clone(),
            });
        }
        used.push(candidate.clone());
        *target = candidate;
    }
    for (i, s) in parts.iter().enumerate() {
        let size = s.universe();
        let shift: Vec<usize> = (0..size).map(|a| a + offset).collect();
        for (part, rel, target) in &planned {
            if *part != i {
                continue;
            }
            let r = s.relation(rel).expect("planned from this part");
            let moved = Relation::from_tuples(
                m,
                r.arity(),
                r.tuples().map(|t| t.iter().map(|&a| shift[a]).collect::<Vec<_>>()),
            )?;
            out.add_relation(target, moved)?;
        }
        out.add_relation(
            &predicates[i],
            Relation::from_fn(m, 1, |t| (offset..offset + size).contains(&t[0]))?,
        )?;
        report.parts.push(UnionPart {
            structure: s.name().to_string(),
            offset,
            size,
            predicate: predicates[i].clone(),
        });
        offset += size;
    }
    Ok((out, report))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionReport {
    pub outer: String,
    pub inner: String,
    /// Size of each copy of the inner structure.
    pub fiber_size: usize,
    /// `fibers[e] = [a, b]` for element `e = a * fiber_size + b`.
    pub fibers: Vec<[usize; 2]>,
    pub shared_symbols: Vec<String>,
}

/// Composition `M[N]` on `M x N`, element `(a, b)` encoded as
/// `a * |N| + b`. Relations of `M` read first coordinates; relations of `N`
/// hold inside a single fiber; a symbol in both is the disjunction.
pub fn compose(outer: &FiniteStructure, inner: &FiniteStructure) -> Result<(FiniteStructure, CompositionReport)> {
    let (mm, nn) = (outer.universe(), inner.universe());
    let size = mm.checked_mul(nn).ok_or_else(|| Error::cap("composed universe size", u128::MAX, usize::MAX as u128))?;
    let name = format!("{}_of_{}", outer.name(), inner.name());
    let mut out = FiniteStructure::new(&name, size)?;
    let split = |e: usize| (e / nn, e % nn);
    let mut shared_symbols = Vec::new();
    let mut names: Vec<&str> = outer.relations().map(|(n, _)| n).collect();
    for (n, _) in inner.relations() {
        if !names.contains(&n) {
            names.push(n);
        }
    }
    names.sort_unstable();
    for name in names {
        let rm = outer.relation(name);
        let rn = inner.relation(name);
        if let (Some(a), Some(b)) = (rm, rn) {
            if a.arity() != b.arity() {
                return Err(Error::ArityMismatch {
                    name: name.to_string(),
                    expected: a.arity(),
                    found: b.arity(),
                });
            }
            shared_symbols.push(name.to_string());
        }
        let k = rm.or(rn).expect("listed from one side").arity();
        let mut a = vec![0; k];
        let mut b = vec![0; k];
        let rel = Relation::from_fn(size, k, |t| {
            for (j, &e) in t.iter().enumerate() {
                (a[j], b[j]) = split(e);
            }
            let outer_holds = rm.is_some_and(|r| r.contains(&a));
            let inner_holds = rn.is_some_and(|r| a.iter().all(|&x| x == a[0]) && r.contains(&b));
            outer_holds || inner_holds
        })?;
        out.add_relation(name, rel)?;
    }
    let report = CompositionReport {
        outer: outer.name().to_string(),
        inner: inner.name().to_string(),
        fiber_size: nn,
        fibers: (0..size).map(|e| [e / nn, e % nn]).collect(),
        shared_symbols,
    };
    Ok((out, report))
}

/// Whether "same fiber" is invariant under every automorphism of the
/// composed structure, i.e. definable without parameters.
pub fn e_definable_check(composed: &FiniteStructure, fiber_size: usize) -> Result<bool> {
    let m = composed.universe();
    if fiber_size == 0 || !m.is_multiple_of(fiber_size) {
        return Err(Error::Precondition(format!(
            "fiber size {fiber_size} does not divide universe {m}"
        )));
    }
    let e = Relation::from_fn(m, 2, |t| t[0] / fiber_size == t[1] / fiber_size)?;
    Symmetry::new(composed)?.is_definable(&e)
}

/// Which singleton basis an expansion adds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `U_i = {i}`.
    Unary,
    /// `B_i_j = {(i, j)}`.
    Binary,
}

impl Basis {
    pub fn bound(&self) -> usize {
        match self {
            Basis::Unary => 1,
            Basis::Binary => 2,
        }
    }

    fn atom(&self, tuple: &[usize], vars: &[String]) -> Formula {
        match self {
            Basis::Unary => Formula::conjunction(
                tuple
                    .iter()
                    .zip(vars)
                    .map(|(a, v)| Formula::atom(&format!("U_{a}"), [v.as_str()])),
            ),
            Basis::Binary if tuple.len() == 1 => {
                let (a, v) = (tuple[0], vars[0].as_str());
                Formula::atom(&format!("B_{a}_{a}"), [v, v])
            }
            Basis::Binary => {
                let mut parts = Vec::new();
                for i in 0..tuple.len() {
                    for j in (i + 1)..tuple.len() {
                        parts.push(Formula::atom(
                            &format!("B_{}_{}", tuple[i], tuple[j]),
                            [vars[i].as_str(), vars[j].as_str()],
                        ));
                    }
                }
                Formula::conjunction(parts)
            }
        }
    }
}

/// Quantifier-free definition of `rel` over the singleton basis: one
/// disjunct per tuple.
pub fn rewriting_formula(rel: &Relation, basis: Basis) -> (Formula, Vec<String>) {
    let vars: Vec<String> = (1..=rel.arity()).map(|i| format!("x{i}")).collect();
    let f = Formula::disjunction(rel.tuples().map(|t| basis.atom(&t, &vars)));
    (f, vars)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rewrite {
    pub relation: String,
    pub disjuncts: usize,
    /// The rewriting formula evaluates to exactly the original relation.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub basis: Basis,
    pub added: usize,
    /// Arity of the quantifier-free basis exhibited by the construction.
    pub basis_bound: usize,
    pub rewrites: Vec<Rewrite>,
    /// Theory arity of the expansion computed semantically, when within caps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantic_arity: Option<usize>,
}

fn expand_singletons(s: &FiniteStructure, basis: Basis) -> Result<(FiniteStructure, ExpansionReport)> {
    let m = s.universe();
    let mut out = s.clone();
    let mut added = 0;
    match basis {
        Basis::Unary => {
            for a in 0..m {
                out.add_relation(&format!("U_{a}"), Relation::from_tuples(m, 1, [[a]])?)?;
                added += 1;
            }
        }
        Basis::Binary => {
            for t in all_tuples(m, 2) {
                out.add_relation(&format!("B_{}_{}", t[0], t[1]), Relation::from_tuples(m, 2, [t.clone()])?)?;
                added += 1;
            }
        }
    }
    let mut rewrites = Vec::new();
    for (name, rel) in s.relations() {
        let (f, vars) = rewriting_formula(rel, basis);
        let verified = evaluate(&f, &out, &VarContext::new(vars)?)? == *rel;
        rewrites.push(Rewrite {
            relation: name.to_string(),
            disjuncts: rel.count(),
            verified,
        });
    }
    let semantic_arity = match Symmetry::new(&out) {
        Ok(sym) => Some(sym.theory_arity(None)?.arity),
        Err(e) if e.is_cap() => None,
        Err(e) => return Err(e),
    };
    Ok((
        out,
        ExpansionReport {
            basis,
            added,
            basis_bound: basis.bound(),
            rewrites,
            semantic_arity,
        },
    ))
}

/// Add `B_i_j = {(i, j)}` for all `i, j`.
pub fn binarize(s: &FiniteStructure) -> Result<(FiniteStructure, ExpansionReport)> {
    expand_singletons(s, Basis::Binary)
}

/// Add `U_i = {i}` for every element.
pub fn unarize(s: &FiniteStructure) -> Result<(FiniteStructure, ExpansionReport)> {
    expand_singletons(s, Basis::Unary)
}

/// `s` plus one more named relation, invariant or not.
pub fn expand_with(s: &FiniteStructure, name: &str, x: Relation) -> Result<FiniteStructure> {
    s.clone().with_relation(name, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{example_r, pure_set};

    #[test]
    fn cylinder_of_diagonal() {
        let d = Relation::diagonal(2).unwrap();
        let c = cylindrify(&d, &CoordinateMap::new(3, vec![0, 2]).unwrap()).unwrap();
        assert_eq!(c.count(), 4);
        assert!(c.tuples().all(|t| t[0] == t[2]));
        let full = cylindrify(&Relation::full(2, 1).unwrap(), &CoordinateMap::new(2, vec![1]).unwrap()).unwrap();
        assert!(full.is_full());
    }

    #[test]
    fn bad_maps() {
        assert!(CoordinateMap::new(3, vec![0, 0]).is_err());
        assert!(CoordinateMap::new(2, vec![2]).is_err());
        let x = Relation::full(2, 2).unwrap();
        assert!(project(&x, &[1, 0]).is_err());
        assert!(project(&x, &[]).is_err());
    }

    #[test]
    fn product_and_sum_small() {
        let x = Relation::from_tuples(2, 1, [[0]]).unwrap();
        let y = Relation::from_tuples(2, 1, [[1]]).unwrap();
        let p = cartesian_product(&x, &y).unwrap();
        assert_eq!(p.tuples().collect::<Vec<_>>(), vec![vec![0, 1]]);
        let s = cartesian_sum(&x, &y).unwrap();
        assert_eq!(s.tuples().collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        let empty = Relation::empty(2, 1).unwrap();
        assert_eq!(
            cartesian_sum(&x, &empty).unwrap(),
            cylindrify(&x, &CoordinateMap::new(2, vec![0]).unwrap()).unwrap()
        );
    }

    #[test]
    fn mixed_on_diagonals() {
        let d = Relation::diagonal(2).unwrap();
        let (spec, ctx) = OverlapSpec::from_vars(&["v1", "v2"], &["v2", "v3"]).unwrap();
        assert_eq!(ctx.vars(), ["v1", "v2", "v3"]);
        let p = mixed_product(&d, &d, &spec).unwrap();
        assert_eq!(p.tuples().collect::<Vec<_>>(), vec![vec![0, 0, 0], vec![1, 1, 1]]);
        let s = mixed_sum(&d, &d, &spec).unwrap();
        assert_eq!(s, Relation::from_fn(2, 3, |t| t[0] == t[1] || t[1] == t[2]).unwrap());
    }

    #[test]
    fn union_of_pure_sets() {
        let (u, rep) = disjoint_union(&[pure_set(2).unwrap(), pure_set(3).unwrap()]).unwrap();
        assert_eq!(u.universe(), 5);
        assert_eq!(u.relation("P1").unwrap().count(), 2);
        assert_eq!(u.relation("P2").unwrap().count(), 3);
        assert_eq!(rep.locate(3), Some((1, 1)));
        assert!(rep.renames.is_empty());
    }

    #[test]
    fn union_renames_collisions() {
        let a = FiniteStructure::new("a", 2)
            .unwrap()
            .with_relation("E", Relation::diagonal(2).unwrap())
            .unwrap();
        let b = FiniteStructure::new("b", 2)
            .unwrap()
            .with_relation("E", Relation::full(2, 2).unwrap())
            .unwrap()
            .with_relation("P1", Relation::full(2, 1).unwrap())
            .unwrap();
        let (u, rep) = disjoint_union(&[a, b]).unwrap();
        assert!(u.relation("a_E").is_some() && u.relation("b_E").is_some());
        assert!(u.relation("b_P1").is_some());
        assert_eq!(rep.renames.len(), 3);
        assert_eq!(u.relation("b_E").unwrap().count(), 4);
        assert!(u.relation("b_E").unwrap().contains(&[2, 3]));
    }

    #[test]
    fn compose_pure_sets() {
        let (c, rep) = compose(&pure_set(2).unwrap(), &pure_set(2).unwrap()).unwrap();
        assert_eq!(c.universe(), 4);
        assert_eq!(c.relation_count(), 0);
        assert_eq!(rep.fibers[3], [1, 1]);
        assert!(!e_definable_check(&c, 2).unwrap());
        let (one, _) = compose(&pure_set(3).unwrap(), &pure_set(1).unwrap()).unwrap();
        assert!(e_definable_check(&one, 1).unwrap());
    }

    #[test]
    fn expansions_rewrite_exactly() {
        let s = example_r();
        for (t, rep) in [unarize(&s).unwrap(), binarize(&s).unwrap()] {
            assert!(rep.rewrites.iter().all(|r| r.verified));
            assert_eq!(rep.semantic_arity, Some(1));
            assert!(Symmetry::new(&t).unwrap().group().is_trivial());
        }
        assert_eq!(binarize(&s).unwrap().1.added, 16);
    }

    #[test]
    fn expand_clash() {
        let s = example_r();
        assert_eq!(
            expand_with(&s, "R", Relation::full(4, 1).unwrap()).unwrap_err(),
            Error::NameClash("R".into())
        );
    }
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arity_core::combinators::{
    binarize, cartesian_product, cartesian_sum, compose, cylindrify, disjoint_union,
    e_definable_check, mixed_product, mixed_sum, project, unarize, CoordinateMap, OverlapSpec,
};
use arity_core::generators::{corpus, pure_set, random_invariant_relation};
use arity_core::{
    closure_oracle, evaluate, load_structure, save_structure, FiniteStructure, Format, Formula,
    OracleLimits, Relation, Symmetry, VarContext,
};

fn relation(m: usize, k: usize, bits: &[bool]) -> Relation {
    let mut i = 0;
    Relation::from_fn(m, k, |_| {
        i += 1;
        bits[i - 1]
    })
    .unwrap()
}

fn arb_relation(m: usize, k: usize) -> impl Strategy<Value = Relation> {
    prop::collection::vec(any::<bool>(), m.pow(k as u32)).prop_map(move |b| relation(m, k, &b))
}

/// Structure with a binary `E` and a unary `U` on `1..=max_m` points.
fn arb_graph(max_m: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max_m).prop_flat_map(|m| {
        (arb_relation(m, 2), arb_relation(m, 1)).prop_map(move |(e, u)| {
            FiniteStructure::new("g", m)
                .unwrap()
                .with_relation("E", e)
                .unwrap()
                .with_relation("U", u)
                .unwrap()
        })
    })
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn random_formula(seed: u64, s: &FiniteStructure, pool: &[String], depth: usize) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Formula::random(&mut rng, s.signature().symbols(), pool, depth)
}

/// Replace free occurrences of `from` by `to`.
fn substitute(f: &Formula, from: &str, to: &str) -> Formula {
    let v = |x: &String| if x == from { to.to_string() } else { x.clone() };
    let b = |g: &Formula| Box::new(substitute(g, from, to));
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(v).collect()),
        Formula::Eq(x, y) => Formula::Eq(v(x), v(y)),
        Formula::Not(g) => Formula::Not(b(g)),
        Formula::And(g, h) => Formula::And(b(g), b(h)),
        Formula::Or(g, h) => Formula::Or(b(g), b(h)),
        Formula::Implies(g, h) => Formula::Implies(b(g), b(h)),
        Formula::Iff(g, h) => Formula::Iff(b(g), b(h)),
        Formula::Exists(x, _) | Formula::Forall(x, _) if x == from => f.clone(),
        Formula::Exists(x, g) => Formula::Exists(x.clone(), b(g)),
        Formula::Forall(x, g) => Formula::Forall(x.clone(), b(g)),
    }
}

/// Rename every bound variable to a fresh one, innermost first.
fn rename_bound(f: &Formula, fresh: &mut usize) -> Formula {
    let mut r = |g: &Formula| Box::new(rename_bound(g, fresh));
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::Not(r(g)),
        Formula::And(g, h) => Formula::And(r(g), r(h)),
        Formula::Or(g, h) => Formula::Or(r(g), r(h)),
        Formula::Implies(g, h) => Formula::Implies(r(g), r(h)),
        Formula::Iff(g, h) => Formula::Iff(r(g), r(h)),
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let body = rename_bound(g, fresh);
            *fresh += 1;
            let w = format!("w{fresh}");
            let body = Box::new(substitute(&body, x, &w));
            match f {
                Formula::Exists(..) => Formula::Exists(w, body),
                _ => Formula::Forall(w, body),
            }
        }
    }
}

fn arity_of(s: &FiniteStructure) -> usize {
    Symmetry::new(s).unwrap().theory_arity(None).unwrap().arity
}

fn small_corpus() -> Vec<FiniteStructure> {
    corpus().into_iter().filter(|s| s.universe() <= 5).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(m in 1usize..=8, k in 1usize..=3, seed: u64) {
        let s = FiniteStructure::new("r", m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Relation::from_fn(m, k, |_| rand::Rng::gen_bool(&mut rng, 0.3)).unwrap();
        let s = s.with_relation("X", x).unwrap();
        for fmt in [Format::Json, Format::Dsl] {
            prop_assert_eq!(&load_structure(&save_structure(&s, fmt), fmt).unwrap(), &s);
        }
    }

    #[test]
    fn evaluate_distributes_over_connectives(s in arb_graph(3), a: u64, b: u64) {
        let pool = vars(&["x", "y", "z"]);
        let ctx = VarContext::new(pool.clone()).unwrap();
        let f = random_formula(a, &s, &pool, 3);
        let g = random_formula(b, &s, &pool, 3);
        let ef = evaluate(&f, &s, &ctx).unwrap();
        let eg = evaluate(&g, &s, &ctx).unwrap();
        let and = evaluate(&Formula::and(f.clone(), g.clone()), &s, &ctx).unwrap();
        prop_assert_eq!(and, ef.intersection(&eg).unwrap());
        let or = evaluate(&Formula::or(f.clone(), g.clone()), &s, &ctx).unwrap();
        prop_assert_eq!(or, ef.union(&eg).unwrap());
        prop_assert_eq!(evaluate(&Formula::not(f.clone()), &s, &ctx).unwrap(), ef.complement());
        for (i, v) in pool.iter().enumerate() {
            let keep: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let expected = cylindrify(&project(&ef, &keep).unwrap(), &CoordinateMap::new(3, keep).unwrap()).unwrap();
            prop_assert_eq!(evaluate(&Formula::exists(v, f.clone()), &s, &ctx).unwrap(), expected);
        }
    }

    #[test]
    fn bound_variable_renaming_is_invisible(s in arb_graph(3), seed: u64) {
        let pool = vars(&["x", "y", "z"]);
        let ctx = VarContext::new(pool.clone()).unwrap();
        let f = random_formula(seed, &s, &pool, 4);
        let g = rename_bound(&f, &mut 0);
        prop_assert_eq!(evaluate(&f, &s, &ctx).unwrap(), evaluate(&g, &s, &ctx).unwrap());
    }

    #[test]
    fn definable_sets_are_invariant(s in arb_graph(4), seed: u64) {
        let pool = vars(&["x", "y"]);
        let ctx = VarContext::new(pool.clone()).unwrap();
        let x = evaluate(&random_formula(seed, &s, &pool, 4), &s, &ctx).unwrap();
        let sym = Symmetry::new(&s).unwrap();
        for g in sym.group().elements() {
            prop_assert_eq!(&x.map_elements(g.images()), &x);
        }
    }

    #[test]
    fn nary_is_monotone_and_boolean_closed(idx in 0usize..14, k in 1usize..=3, a: u64, b: u64) {
        let all = corpus();
        let s = &all[idx % all.len()];
        let sym = Symmetry::new(s).unwrap();
        let x = random_invariant_relation(&sym, k, a).unwrap();
        let y = random_invariant_relation(&sym, k, b).unwrap();
        for n in 1..=k {
            let xn = sym.is_nary(&x, n).unwrap().holds();
            if xn {
                for n2 in n..=k + 1 {
                    prop_assert!(sym.is_nary(&x, n2).unwrap().holds());
                }
                prop_assert!(sym.is_nary(&x.complement(), n).unwrap().holds());
            }
            if xn && sym.is_nary(&y, n).unwrap().holds() {
                prop_assert!(sym.is_nary(&x.union(&y).unwrap(), n).unwrap().holds());
                prop_assert!(sym.is_nary(&x.intersection(&y).unwrap(), n).unwrap().holds());
            }
        }
    }

    #[test]
    fn arity_survives_relabeling(idx in 0usize..14, perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let all = corpus();
        let s = &all[idx % all.len()];
        let m = s.universe();
        let p: Vec<usize> = perm.into_iter().filter(|&i| i < m).collect();
        let copy = s.relabel(&p).unwrap();
        prop_assert_eq!(arity_of(&copy), arity_of(s));
    }

    #[test]
    fn mixed_operations_match_formulas(
        m in 1usize..=3,
        left in prop::sample::subsequence(vec!["a", "b", "c"], 1..=2).prop_shuffle(),
        right in prop::sample::subsequence(vec!["a", "b", "c"], 1..=2).prop_shuffle(),
        seed: u64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_rel = |k| Relation::from_fn(m, k, |_| rand::Rng::gen_bool(&mut rng, 0.5)).unwrap();
        let x = rand_rel(left.len());
        let y = rand_rel(right.len());
        let (spec, ctx) = OverlapSpec::from_vars(&left, &right).unwrap();
        let s = FiniteStructure::new("xy", m).unwrap()
            .with_relation("X", x.clone()).unwrap()
            .with_relation("Y", y.clone()).unwrap();
        let fx = Formula::atom("X", left.iter().copied());
        let fy = Formula::atom("Y", right.iter().copied());
        prop_assert_eq!(
            mixed_product(&x, &y, &spec).unwrap(),
            evaluate(&Formula::and(fx.clone(), fy.clone()), &s, &ctx).unwrap()
        );
        prop_assert_eq!(
            mixed_sum(&x, &y, &spec).unwrap(),
            evaluate(&Formula::or(fx, fy), &s, &ctx).unwrap()
        );
    }

    #[test]
    fn cylinder_then_projection_is_identity(m in 1usize..=4, k in 1usize..=3, extra in 0usize..=2, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Relation::from_fn(m, k, |_| rand::Rng::gen_bool(&mut rng, 0.5)).unwrap();
        let target = k + extra;
        let mut positions: Vec<usize> = rand::seq::index::sample(&mut rng, target, k).into_vec();
        positions.sort_unstable();
        let cyl = cylindrify(&x, &CoordinateMap::new(target, positions.clone()).unwrap()).unwrap();
        prop_assert_eq!(project(&cyl, &positions).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nary_agrees_with_closure_oracle_at_four(idx in 0usize..14, k in 1usize..=3, n in 1usize..=2, seed: u64) {
        let four: Vec<FiniteStructure> = corpus().into_iter().filter(|s| s.universe() == 4).collect();
        let s = &four[idx % four.len()];
        let sym = Symmetry::new(s).unwrap();
        let x = random_invariant_relation(&sym, k, seed).unwrap();
        let oracle = closure_oracle(&sym, &x, n, OracleLimits::default()).unwrap();
        prop_assert_eq!(sym.is_nary(&x, n).unwrap().holds(), oracle);
    }

    #[test]
    fn mixed_operations_match_formulas_many(m in 1usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Relation::from_fn(m, 2, |_| rand::Rng::gen_bool(&mut rng, 0.5)).unwrap();
        let y = Relation::from_fn(m, 2, |_| rand::Rng::gen_bool(&mut rng, 0.5)).unwrap();
        let (spec, ctx) = OverlapSpec::from_vars(&["u", "v"], &["v", "w"]).unwrap();
        let s = FiniteStructure::new("xy", m).unwrap()
            .with_relation("X", x.clone()).unwrap()
            .with_relation("Y", y.clone()).unwrap();
        let f = arity_core::parse("X(u,v) & Y(v,w)").unwrap();
        let g = arity_core::parse("X(u,v) | Y(v,w)").unwrap();
        prop_assert_eq!(mixed_product(&x, &y, &spec).unwrap(), evaluate(&f, &s, &ctx).unwrap());
        prop_assert_eq!(mixed_sum(&x, &y, &spec).unwrap(), evaluate(&g, &s, &ctx).unwrap());
    }
}

#[test]
fn de_morgan_for_products_and_sums() {
    for m in 1..=3usize {
        for kx in 1..=2usize {
            for ky in 1..=2usize {
                let nx = 1usize << m.pow(kx as u32);
                let ny = 1usize << m.pow(ky as u32);
                for a in 0..nx {
                    let x = Relation::from_fn(m, kx, {
                        let mut i = 0;
                        move |_| {
                            i += 1;
                            a >> (i - 1) & 1 == 1
                        }
                    })
                    .unwrap();
                    // Sample y sparsely once the family gets large.
                    let step = (ny / 64).max(1);
                    for b in (0..ny).step_by(step) {
                        let y = Relation::from_fn(m, ky, {
                            let mut i = 0;
                            move |_| {
                                i += 1;
                                b >> (i - 1) & 1 == 1
                            }
                        })
                        .unwrap();
                        let lhs = cartesian_product(&x, &y).unwrap().complement();
                        let rhs = cartesian_sum(&x.complement(), &y.complement()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}

#[test]
fn cylinder_projection_identity_exhaustive() {
    for m in 1..=3usize {
        for k in 1..=2usize {
            let count = 1usize << m.pow(k as u32);
            for code in 0..count {
                let x = Relation::from_fn(m, k, {
                    let mut i = 0;
                    move |_| {
                        i += 1;
                        code >> (i - 1) & 1 == 1
                    }
                })
                .unwrap();
                for target in k..=3 {
                    for positions in arity_core::arity::increasing_subsets(target, k) {
                        let map = CoordinateMap::new(target, positions.clone()).unwrap();
                        assert_eq!(project(&cylindrify(&x, &map).unwrap(), &positions).unwrap(), x);
                    }
                }
            }
        }
    }
}

#[test]
fn transitivity_and_arity_bounds_on_corpus() {
    for s in corpus() {
        let sym = Symmetry::new(&s).unwrap();
        let m = s.universe();
        let arity = sym.theory_arity(None).unwrap().arity;
        assert!(arity <= m.max(1), "{}", s.name());
        let profile = sym.transitivity_profile().unwrap();
        for w in profile.flags.windows(2) {
            assert!(!w[1].transitive || w[0].transitive, "{}", s.name());
        }
        assert!(arity >= profile.arity_lower_bound(), "{}", s.name());
    }
}

#[test]
fn ba_atoms_bridge_on_corpus() {
    for s in small_corpus() {
        let sym = Symmetry::new(&s).unwrap();
        let m = s.universe();
        let arity = sym.theory_arity(None).unwrap().arity;
        for n in 1..m {
            let complete = (n + 1..=m).all(|k| sym.ba_atoms(k, n).unwrap().is_complete());
            assert_eq!(arity <= n, complete, "{} at n = {n}", s.name());
        }
    }
}

#[test]
fn disjoint_union_arity_is_the_maximum() {
    let parts: Vec<FiniteStructure> = corpus().into_iter().filter(|s| s.universe() <= 5).collect();
    let mut checked = 0;
    for a in &parts {
        for b in &parts {
            if a.universe() + b.universe() > 6 {
                continue;
            }
            let (u, _) = disjoint_union(&[a.clone(), b.clone()]).unwrap();
            let expected = arity_of(a).max(arity_of(b));
            assert_eq!(arity_of(&u), expected, "{} + {}", a.name(), b.name());
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn composition_arity_law_when_fibers_are_definable() {
    let parts: Vec<FiniteStructure> = corpus().into_iter().filter(|s| (2..=4).contains(&s.universe())).collect();
    let mut checked = 0;
    for a in &parts {
        for b in &parts {
            if a.universe() * b.universe() > 6 {
                continue;
            }
            let (c, report) = compose(a, b).unwrap();
            assert_eq!(c.universe(), a.universe() * b.universe());
            if !e_definable_check(&c, report.fiber_size).unwrap() {
                continue;
            }
            let expected = arity_of(a).max(arity_of(b));
            assert_eq!(arity_of(&c), expected, "{}[{}]", a.name(), b.name());
            checked += 1;
        }
    }
    assert!(checked >= 3, "{checked}");
}

#[test]
fn singleton_expansions_lower_arity() {
    for s in corpus().into_iter().filter(|s| s.universe() <= 4) {
        let (_, u) = unarize(&s).unwrap();
        assert_eq!(u.semantic_arity, Some(1), "{}", s.name());
        let (_, b) = binarize(&s).unwrap();
        assert!(b.semantic_arity.unwrap() <= 2, "{}", s.name());
        assert!(u.rewrites.iter().chain(&b.rewrites).all(|r| r.verified));
    }
    assert_eq!(arity_of(&pure_set(1).unwrap()), 1);
}

//! The acceptance suite: each check replays one claim at desk scale and
//! reports what it computed.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arity::{closure_oracle, ClosureOracle, OracleLimits};
use crate::combinators::{
    binarize, compose, cylindrify, disjoint_union, e_definable_check, expand_with, project,
    unarize, CoordinateMap,
};
use crate::error::{Error, Result};
use crate::format::{load_structure, save_structure, Format};
use crate::formula::{parse, Formula};
use crate::generators::{
    check_axioms, corpus, cyclic_order, n_ball_order, example_r, pure_set,
    random_invariant_relation, successor_cycle, AxiomFamily,
};
use crate::relation::{all_tuples, Relation};
use crate::structure::FiniteStructure;
use crate::symmetry::Symmetry;

const BUNDLED: [(&str, &str); 6] = [
    ("example_R", include_str!("../fixtures/example_R.json")),
    ("pure3", include_str!("../fixtures/pure3.json")),
    ("pure4", include_str!("../fixtures/pure4.json")),
    ("c5", include_str!("../fixtures/c5.json")),
    ("succ4", include_str!("../fixtures/succ4.json")),
    ("big", include_str!("../fixtures/big.json")),
];

/// Named input structures for the suite.
#[derive(Debug, Clone)]
pub struct Fixtures {
    structures: BTreeMap<String, FiniteStructure>,
}

impl Fixtures {
    pub fn bundled() -> Self {
        let structures = BUNDLED
            .iter()
            .map(|(name, text)| {
                let s = load_structure(text, Format::Json).expect("bundled fixture is valid");
                (name.to_string(), s)
            })
            .collect();
        Fixtures { structures }
    }

    /// Bundled fixtures, overridden by any `<name>.json` found in `dir`.
    pub fn with_overrides(dir: &Path) -> Result<Self> {
        let mut out = Fixtures::bundled();
        for (name, _) in BUNDLED {
            let path = dir.join(format!("{name}.json"));
            if path.exists() {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
                out.structures.insert(name.to_string(), load_structure(&text, Format::Json)?);
            }
        }
        Ok(out)
    }

    pub fn get(&self, name: &str) -> &FiniteStructure {
        &self.structures[name]
    }
}

/// What one check found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Default)]
struct Tally {
    passed: bool,
    details: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            passed: true,
            details: Vec::new(),
        }
    }

    /// Record an expectation; `ok` decides pass/fail of the whole check.
    fn expect(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details.push(format!("[{}] {line}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("[info] {line}"));
    }

    fn done(self) -> Result<CheckOutcome> {
        Ok(CheckOutcome {
            passed: self.passed,
            details: self.details,
        })
    }
}

pub struct Check {
    pub id: &'static str,
    pub claim: &'static str,
    pub budget: Duration,
    run: fn(&Fixtures) -> Result<CheckOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub claim: String,
    pub passed: bool,
    pub within_budget: bool,
    pub budget_ms: u128,
    #[serde(skip)]
    pub elapsed: Duration,
    pub details: Vec<String>,
}

impl Check {
    pub fn run(&self, fixtures: &Fixtures) -> CheckResult {
        let start = Instant::now();
        let outcome = (self.run)(fixtures).unwrap_or_else(|e| CheckOutcome {
            passed: false,
            details: vec![format!("[FAIL] error: {e}")],
        });
        let elapsed = start.elapsed();
        CheckResult {
            id: self.id.to_string(),
            claim: self.claim.to_string(),
            passed: outcome.passed,
            within_budget: elapsed <= self.budget,
            budget_ms: self.budget.as_millis(),
            elapsed,
            details: outcome.details,
        }
    }
}

pub fn checks() -> Vec<Check> {
    let secs = Duration::from_secs;
    vec![
        Check {
            id: "C1",
            claim: "four-point ternary example: arity 3, 2-transitive, not 3-transitive, eliminates quantifiers",
            budget: secs(1),
            run: c1_example,
        },
        Check {
            id: "C2",
            claim: "cyclic orders satisfy co1-co4 for m in 3..=6 and K3 has arity 3 for m in 3..=5",
            budget: secs(5),
            run: c2_circular,
        },
        Check {
            id: "C3",
            claim: "n-ball candidates (5,4) and (6,4) get an axiom report; K4 has arity 4 if all axioms hold",
            budget: secs(30),
            run: c3_nball,
        },
        Check {
            id: "C4",
            claim: "unarized expansions have arity 1 and binarized ones arity at most 2 (corpus, m <= 5)",
            budget: secs(10),
            run: c4_expansions,
        },
        Check {
            id: "C5",
            claim: "disjoint union has the maximum arity of its parts; pure_set(2) + cyclic_order(3) has arity 3",
            budget: secs(20),
            run: c5_union,
        },
        Check {
            id: "C6",
            claim: "cyclic_order(3)[pure_set(2)] is E-definable with arity 3; cyclic_order(3)[pure_set(1)] has arity 3; pure_set(2)[pure_set(2)] is flagged",
            budget: secs(20),
            run: c6_composition,
        },
        Check {
            id: "C7",
            claim: "fingerprint n-arity agrees with the Boolean-closure oracle",
            budget: secs(30),
            run: c7_oracle,
        },
        Check {
            id: "C8",
            claim: "n-transitive but not (n+1)-transitive implies arity at least n+1",
            budget: secs(5),
            run: c8_transitivity,
        },
        Check {
            id: "C9",
            claim: "arity <= n iff BA_kn atoms equal orbits for every k in (n, m]",
            budget: secs(10),
            run: c9_ba_bridge,
        },
        Check {
            id: "C10",
            claim: "arity rises 1 -> 3 when pure_set(4) gains a cyclic K3 and falls 3 -> 1 when the example is unarized",
            budget: secs(5),
            run: c10_dynamics,
        },
        Check {
            id: "C11",
            claim: "serialization, printing, cylinder and report determinism round trips",
            budget: secs(20),
            run: c11_infrastructure,
        },
    ]
}

pub fn run_all(fixtures: &Fixtures) -> Vec<CheckResult> {
    checks().iter().map(|c| c.run(fixtures)).collect()
}

fn arity(s: &FiniteStructure) -> Result<usize> {
    Ok(Symmetry::new(s)?.theory_arity(None)?.arity)
}

fn c1_example(fx: &Fixtures) -> Result<CheckOutcome> {
    let s = fx.get("example_R");
    let sym = Symmetry::new(s)?;
    let mut t = Tally::new();
    t.note(format!("|R| = {}, |Aut| = {}", s.relation("R").map_or(0, Relation::count), sym.group().order()));
    let ar = sym.theory_arity(None)?.arity;
    t.expect(ar == 3, format!("theory arity = {ar} (expected 3)"));
    let two = sym.n_transitive(2)?;
    t.expect(two, format!("2-transitive = {two} (expected true)"));
    let three = sym.n_transitive(3)?;
    t.expect(!three, format!("3-transitive = {three} (expected false)"));
    let qe = sym.qe_check()?;
    t.expect(qe.holds, format!("quantifier elimination = {} (expected true)", qe.holds));
    t.done()
}

fn c2_circular(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for m in 3..=6 {
        let s = cyclic_order(m)?;
        let report = check_axioms(&s, AxiomFamily::Circular)?;
        let failed: Vec<&str> = report.failed().map(|r| r.axiom.as_str()).collect();
        t.expect(failed.is_empty(), format!("m = {m}: co1-co4 failures {failed:?}"));
    }
    for m in 3..=5 {
        let s = cyclic_order(m)?;
        let sym = Symmetry::new(&s)?;
        let ar = sym.formula_arity(s.relation("K3").expect("generated"))?;
        t.expect(ar == 3, format!("m = {m}: formula arity of K3 = {ar} (expected 3)"));
    }
    t.done()
}

fn c3_nball(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for m in [5, 6] {
        let (s, report) = n_ball_order(m, 4)?;
        let failed: Vec<&str> = report.failed().map(|r| r.axiom.as_str()).collect();
        t.expect(
            report.results.len() == 8,
            format!("m = {m}: report covers {} axiom instances, failing {failed:?}", report.results.len()),
        );
        let sym = Symmetry::new(&s)?;
        let ar = sym.formula_arity(s.relation("K4").expect("generated"))?;
        if report.all_pass() {
            t.expect(ar == 4, format!("m = {m}: axioms hold, formula arity of K4 = {ar} (expected 4)"));
        } else {
            t.note(format!("m = {m}: candidate is not an n-ball order; formula arity of K4 = {ar}"));
        }
    }
    t.done()
}

fn c4_expansions(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for s in corpus().into_iter().filter(|s| s.universe() <= 5) {
        let (_, un) = unarize(&s)?;
        let (_, bin) = binarize(&s)?;
        let verified = un.rewrites.iter().chain(&bin.rewrites).all(|r| r.verified);
        t.expect(
            un.semantic_arity == Some(1) && bin.semantic_arity.is_some_and(|a| a <= 2) && verified,
            format!(
                "{}: unarized {:?}, binarized {:?}, rewrites verified {verified}",
                s.name(),
                un.semantic_arity,
                bin.semantic_arity
            ),
        );
    }
    t.done()
}

fn c5_union(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let pairs = [
        (pure_set(2)?, cyclic_order(3)?),
        (pure_set(2)?, pure_set(3)?),
        (pure_set(3)?, successor_cycle(3)?),
        (pure_set(2)?, successor_cycle(4)?),
        (successor_cycle(3)?, cyclic_order(3)?),
        (pure_set(2)?, example_r()),
        (pure_set(1)?, cyclic_order(4)?),
    ];
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (u, _) = disjoint_union(&[a.clone(), b.clone()])?;
        let (ra, rb, ru) = (arity(a)?, arity(b)?, arity(&u)?);
        t.expect(
            ru == ra.max(rb),
            format!("{} + {}: {ru} vs max({ra}, {rb})", a.name(), b.name()),
        );
        if i == 0 {
            t.expect(ru == 3, format!("pure_set(2) + cyclic_order(3) arity = {ru} (expected 3)"));
        }
    }
    t.done()
}

fn c6_composition(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let c3 = cyclic_order(3)?;
    let ar_c3 = arity(&c3)?;
    let (c, rep) = compose(&c3, &pure_set(2)?)?;
    let edef = e_definable_check(&c, rep.fiber_size)?;
    let ar = arity(&c)?;
    t.expect(edef, format!("cyclic_order(3)[pure_set(2)] E-definable = {edef}"));
    t.expect(ar == 3, format!("cyclic_order(3)[pure_set(2)] arity = {ar} (expected 3)"));
    let ar_p2 = arity(&pure_set(2)?)?;
    t.note(format!("max of factor arities = {}", ar_c3.max(ar_p2)));
    let (c, rep) = compose(&c3, &pure_set(1)?)?;
    let ar = arity(&c)?;
    let formula = ar_c3.max(arity(&pure_set(1)?)?).max(2);
    t.note(format!(
        "cyclic_order(3)[pure_set(1)] E-definable = {}",
        e_definable_check(&c, rep.fiber_size)?
    ));
    t.expect(ar == 3, format!("cyclic_order(3)[pure_set(1)] arity = {ar} (expected 3)"));
    t.expect(ar == formula, format!("singleton formula max(ar, ar, 2) = {formula}, computed {ar}"));
    let (c, rep) = compose(&pure_set(2)?, &pure_set(2)?)?;
    let edef = e_definable_check(&c, rep.fiber_size)?;
    t.expect(!edef, format!("pure_set(2)[pure_set(2)] E-definable = {edef}; flagged, arity not asserted"));
    t.done()
}

/// Every single-binary-relation structure on two points.
fn binary_relations_on_two() -> Vec<FiniteStructure> {
    (0u32..16)
        .map(|mask| {
            let r = Relation::from_fn(2, 2, |t| mask >> (2 * t[0] + t[1]) & 1 == 1).expect("tiny");
            FiniteStructure::new(&format!("bin{mask}"), 2)
                .and_then(|s| s.with_relation("E", r))
                .expect("valid")
        })
        .collect()
}

fn c7_oracle(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let limits = OracleLimits::default();
    let mut small: Vec<FiniteStructure> = corpus().into_iter().filter(|s| s.universe() <= 3).collect();
    small.extend(binary_relations_on_two());
    let (mut cases, mut disagreements) = (0usize, 0usize);
    for s in &small {
        let sym = Symmetry::new(s)?;
        for k in 1..=3 {
            let orbits = sym.orbits(k)?;
            for n in 1..=2 {
                let oracle = ClosureOracle::build(&sym, k, n, limits)?;
                for mask in 0u64..1 << orbits.count() {
                    let pick: Vec<bool> = (0..orbits.count()).map(|i| mask >> i & 1 == 1).collect();
                    let x = orbits.union_of(&pick);
                    cases += 1;
                    if sym.is_nary(&x, n)?.holds() != oracle.contains(&x)? {
                        disagreements += 1;
                    }
                }
            }
        }
    }
    t.expect(
        disagreements == 0,
        format!("exhaustive m <= 3: {cases} cases over {} structures, {disagreements} disagreements", small.len()),
    );
    let (mut cases, mut disagreements) = (0usize, 0usize);
    let seeded = [example_r(), pure_set(4)?, cyclic_order(4)?, successor_cycle(4)?];
    for s in &seeded {
        let sym = Symmetry::new(s)?;
        for seed in 0..13u64 {
            for k in 2..=3 {
                let x = random_invariant_relation(&sym, k, seed)?;
                for n in 1..=2 {
                    cases += 1;
                    if sym.is_nary(&x, n)?.holds() != closure_oracle(&sym, &x, n, limits)? {
                        disagreements += 1;
                    }
                }
            }
        }
    }
    t.expect(
        disagreements == 0 && cases >= 100,
        format!("seeded m = 4: {cases} cases, {disagreements} disagreements"),
    );
    t.done()
}

fn c8_transitivity(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for s in corpus() {
        let sym = Symmetry::new(&s)?;
        let profile = sym.transitivity_profile()?;
        let ar = sym.theory_arity(None)?.arity;
        let bound = profile.arity_lower_bound();
        t.expect(ar >= bound, format!("{}: arity {ar}, transitivity bound {bound}", s.name()));
    }
    t.done()
}

fn c9_ba_bridge(_: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for s in corpus() {
        let sym = Symmetry::new(&s)?;
        let m = s.universe();
        let ar = sym.theory_arity(None)?.arity;
        let mut agree = true;
        for n in 1..m {
            let mut saturated = true;
            for k in (n + 1)..=m {
                saturated &= sym.ba_atoms(k, n)?.is_complete();
            }
            agree &= (ar <= n) == saturated;
        }
        t.expect(agree, format!("{}: arity {ar}, bridge holds for every n < {m}", s.name()));
    }
    t.done()
}

fn c10_dynamics(fx: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let p4 = pure_set(4)?;
    let before = arity(&p4)?;
    let k3 = cyclic_order(4)?.relation("K3").expect("generated").clone();
    let after = arity(&expand_with(&p4, "K3", k3)?)?;
    t.expect(before == 1 && after == 3, format!("pure_set(4): {before} -> {after} (expected 1 -> 3)"));
    let r = fx.get("example_R");
    let before = arity(r)?;
    let (u, _) = unarize(r)?;
    let after = arity(&u)?;
    t.expect(before == 3 && after == 1, format!("example: {before} -> {after} (expected 3 -> 1)"));
    t.done()
}

fn c11_infrastructure(fx: &Fixtures) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let mut structures = corpus();
    structures.extend(binary_relations_on_two());
    structures.push(fx.get("example_R").clone());
    let mut round_trips = true;
    for s in &structures {
        for format in [Format::Json, Format::Dsl] {
            let text = save_structure(s, format);
            let back = load_structure(&text, format)?;
            round_trips &= back == *s && save_structure(&back, format) == text;
        }
    }
    t.expect(round_trips, format!("{} structures round-trip through JSON and DSL", structures.len()));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let symbols = vec![("R".to_string(), 3), ("E".to_string(), 2), ("P".to_string(), 1)];
    let vars: Vec<String> = ["x", "y", "z", "w"].map(String::from).to_vec();
    let mut printed_ok = 0;
    for _ in 0..1000 {
        let f = Formula::random(&mut rng, &symbols, &vars, 6);
        printed_ok += (parse(&f.to_string()).ok() == Some(f)) as usize;
    }
    t.expect(printed_ok == 1000, format!("{printed_ok}/1000 random formulas survive print/parse"));

    let mut cylinders = 0;
    let mut cylinder_ok = true;
    for m in 1usize..=3 {
        for k in 1..=3 {
            let space = m.pow(k as u32);
            let relations: Vec<Relation> = if space <= 9 {
                (0u64..1 << space)
                    .map(|mask| Relation::from_fn(m, k, |tu| mask >> crate::relation::encode(m, tu) & 1 == 1))
                    .collect::<Result<_>>()?
            } else {
                let sym_s = pure_set(m)?;
                let sym = Symmetry::new(&sym_s)?;
                (0..64)
                    .map(|seed| {
                        let base = random_invariant_relation(&sym, k, seed)?;
                        let mut r = base;
                        r.insert(&vec![(seed as usize) % m; k])?;
                        Ok(r)
                    })
                    .collect::<Result<_>>()?
            };
            for x in &relations {
                for target in k..=3 {
                    for positions in all_tuples(target, k).filter(|p| p.windows(2).all(|w| w[0] < w[1])) {
                        let map = CoordinateMap::new(target, positions.clone())?;
                        let back = project(&cylindrify(x, &map)?, &positions)?;
                        cylinders += 1;
                        cylinder_ok &= back == *x;
                    }
                }
            }
        }
    }
    t.expect(cylinder_ok, format!("project(cylindrify(x, p), p) = x on {cylinders} cases"));

    let s = fx.get("example_R");
    let report = |s: &FiniteStructure| -> Result<String> {
        let sym = Symmetry::new(s)?;
        Ok(serde_json::to_string(&sym.theory_arity(None)?).expect("serializable"))
    };
    let (a, b) = (report(s)?, report(&s.clone())?);
    t.expect(a == b, "arity report JSON is byte-identical across runs".to_string());
    t.done()
}

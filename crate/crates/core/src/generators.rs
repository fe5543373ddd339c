//! Concrete structures and axiom checkers for circular and `n`-ball orders.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arity::increasing_subsets;
use crate::error::{Error, Result};
use crate::formula::{evaluate, parse, satisfies, Formula};
use crate::relation::{all_tuples, Relation};
use crate::structure::{FiniteStructure, VarContext};
use crate::symmetry::Symmetry;

pub const MAX_GENERATED_UNIVERSE: usize = 8;

fn check_range(what: &str, m: usize, min: usize) -> Result<()> {
    if m < min || m > MAX_GENERATED_UNIVERSE {
        return Err(Error::Precondition(format!(
            "{what} needs {min} <= m <= {MAX_GENERATED_UNIVERSE}, got {m}"
        )));
    }
    Ok(())
}

fn gap(m: usize, x: usize, y: usize) -> usize {
    (y + m - x) % m
}

/// Number of times the closed walk `a_1 -> a_2 -> ... -> a_n -> a_1` winds
/// around the cycle, times `m`.
fn closed_walk(m: usize, t: &[usize]) -> usize {
    (0..t.len()).map(|i| gap(m, t[i], t[(i + 1) % t.len()])).sum()
}

pub fn pure_set(m: usize) -> Result<FiniteStructure> {
    check_range("pure_set", m, 1)?;
    FiniteStructure::new(&format!("pure{m}"), m)
}

/// `S = {(i, i+1 mod m)}`, the graph of the successor function.
pub fn successor_cycle(m: usize) -> Result<FiniteStructure> {
    check_range("successor_cycle", m, 3)?;
    let s = Relation::from_tuples(m, 2, (0..m).map(|i| [i, (i + 1) % m]))?;
    FiniteStructure::new(&format!("succ{m}"), m)?.with_relation("S", s)
}

/// `K3(a, b, c)` iff the walk `a -> b -> c -> a` goes around the cycle at
/// most once. Tuples with a repeated element always qualify.
pub fn cyclic_order(m: usize) -> Result<FiniteStructure> {
    check_range("cyclic_order", m, 3)?;
    let k = Relation::from_fn(m, 3, |t| closed_walk(m, t) <= m)?;
    FiniteStructure::new(&format!("cyclic{m}"), m)?.with_relation("K3", k)
}

/// Candidate `n`-ball order on `m` points, same winding rule as
/// [`cyclic_order`]. The returned report says whether it is one.
pub fn n_ball_order(m: usize, n: usize) -> Result<(FiniteStructure, AxiomReport)> {
    if n < 4 || m < n {
        return Err(Error::Precondition(format!(
            "n_ball_order needs m >= n >= 4, got m = {m}, n = {n}"
        )));
    }
    check_range("n_ball_order", m, n)?;
    crate::relation::tuple_count(m, n + 1)?;
    let k = Relation::from_fn(m, n, |t| closed_walk(m, t) <= m)?;
    let s = FiniteStructure::new(&format!("ball{m}_{n}"), m)?.with_relation(&format!("K{n}"), k)?;
    let report = check_axioms(&s, AxiomFamily::NBall(n))?;
    Ok((s, report))
}

/// Four points `a, b, c, d` (indices 0..3) with a ternary `R` of 12 triples.
pub fn example_r() -> FiniteStructure {
    const TRIPLES: [&str; 12] = [
        "abc", "bad", "bcd", "cba", "acd", "cab", "cda", "dcb", "dab", "adc", "bda", "dbc",
    ];
    let r = Relation::from_tuples(
        4,
        3,
        TRIPLES
            .iter()
            .map(|t| t.bytes().map(|b| (b - b'a') as usize).collect::<Vec<_>>()),
    )
    .expect("valid triples");
    FiniteStructure::new("example_R", 4)
        .and_then(|s| s.with_element_names(["a", "b", "c", "d"].map(String::from).to_vec()))
        .and_then(|s| s.with_relation("R", r))
        .expect("valid structure")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomFamily {
    /// (co1)-(co4) on `K3`.
    Circular,
    /// (nbo1)-(nbo4) on `K{n}`; (nbo2) and (nbo4) are checked per index.
    NBall(usize),
}

impl AxiomFamily {
    pub fn relation_name(&self) -> String {
        match self {
            AxiomFamily::Circular => "K3".into(),
            AxiomFamily::NBall(n) => format!("K{n}"),
        }
    }

    fn arity(&self) -> usize {
        match self {
            AxiomFamily::Circular => 3,
            AxiomFamily::NBall(n) => *n,
        }
    }

    /// `(name, variables, matrix)`; each axiom is the universal closure of
    /// its matrix over the listed variables.
    fn axioms(&self, rel: &str) -> Vec<(String, Vec<String>, String)> {
        let n = self.arity();
        let tag = if matches!(self, AxiomFamily::Circular) { "co" } else { "nbo" };
        let xs: Vec<String> = if n == 3 {
            ["x", "y", "z"].map(String::from).to_vec()
        } else {
            (1..=n).map(|i| format!("x{i}")).collect()
        };
        let atom = |args: &[String]| format!("{rel}({})", args.join(", "));
        let swapped = |i: usize| {
            let mut v = xs.clone();
            v.swap(i, i + 1);
            v
        };
        let mut rotated = xs.clone();
        rotated.rotate_left(1);
        let mut last_t = xs.clone();
        last_t[n - 1] = "t".into();
        let mut first_t = xs.clone();
        first_t[0] = "t".into();
        let collisions = if n == 3 {
            "x = y | y = z | z = x".to_string()
        } else {
            (0..n - 1)
                .map(|j| format!("{} = {}", xs[j], xs[j + 1]))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        let mut out = vec![(format!("{tag}1"), xs.clone(), format!("{} -> {}", atom(&xs), atom(&rotated)))];
        if n == 3 {
            out.push((
                "co2".into(),
                xs.clone(),
                format!("{} & {} <-> {collisions}", atom(&xs), atom(&["y", "x", "z"].map(String::from))),
            ));
        } else {
            for i in 0..n - 1 {
                out.push((
                    format!("nbo2[i={}]", i + 1),
                    xs.clone(),
                    format!("{} & {} <-> {collisions}", atom(&xs), atom(&swapped(i))),
                ));
            }
        }
        out.push((
            format!("{tag}3"),
            xs.clone(),
            format!("{} -> forall t . ({} | {})", atom(&xs), atom(&last_t), atom(&first_t)),
        ));
        if n == 3 {
            out.push((
                "co4".into(),
                xs.clone(),
                format!("{} | {}", atom(&xs), atom(&["y", "x", "z"].map(String::from))),
            ));
        } else {
            for i in 0..n - 1 {
                out.push((
                    format!("nbo4[i={}]", i + 1),
                    xs.clone(),
                    format!("{} | {}", atom(&xs), atom(&swapped(i))),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub formula: String,
    pub holds: bool,
    /// First falsifying assignment in lexicographic order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<(String, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub structure: String,
    pub relation: String,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.holds)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom == axiom)
    }

    pub fn failed(&self) -> impl Iterator<Item = &AxiomResult> {
        self.results.iter().filter(|r| !r.holds)
    }
}

pub fn check_axioms(s: &FiniteStructure, family: AxiomFamily) -> Result<AxiomReport> {
    check_axioms_on(s, family, &family.relation_name())
}

/// Like [`check_axioms`] but reads the order from relation `name`.
pub fn check_axioms_on(s: &FiniteStructure, family: AxiomFamily, name: &str) -> Result<AxiomReport> {
    let rel = s
        .relation(name)
        .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
    if rel.arity() != family.arity() {
        return Err(Error::ArityMismatch {
            name: name.to_string(),
            expected: family.arity(),
            found: rel.arity(),
        });
    }
    let mut results = Vec::new();
    for (axiom, vars, text) in family.axioms(name) {
        let matrix: Formula = parse(&text)?;
        let ctx = VarContext::new(vars.clone())?;
        let table = evaluate(&matrix, s, &ctx)?;
        let counterexample = table.complement().tuples().next().map(|t| {
            let env: Vec<(String, usize)> = vars.iter().cloned().zip(t).collect();
            assert!(
                !satisfies(&matrix, s, &env).expect("evaluable"),
                "counterexample does not falsify {axiom}"
            );
            env
        });
        let sentence = Formula::forall_all(&vars, matrix);
        results.push(AxiomResult {
            axiom,
            formula: sentence.to_string(),
            holds: counterexample.is_none(),
            counterexample,
        });
    }
    Ok(AxiomReport {
        structure: s.name().to_string(),
        relation: name.to_string(),
        results,
    })
}

/// A union of orbits of `M^k`, each orbit kept with probability 1/2.
pub fn random_invariant_relation(sym: &Symmetry<'_>, k: usize, seed: u64) -> Result<Relation> {
    let orbits = sym.orbits(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick: Vec<bool> = (0..orbits.count()).map(|_| rng.gen_bool(0.5)).collect();
    Ok(orbits.union_of(&pick))
}

/// Largest orbit count searched exhaustively by [`full_projection_witness`].
pub const MAX_WITNESS_ORBITS: usize = 20;

/// First proper orbit union of `M^k` (by bitmask over orbit ids) whose every
/// projection onto `n` coordinates is all of `M^n` yet which is not `n`-ary.
pub fn full_projection_witness(sym: &Symmetry<'_>, k: usize, n: usize) -> Result<Option<Relation>> {
    if n == 0 {
        return Err(Error::Precondition("level n must be at least 1".into()));
    }
    if k <= n {
        return Ok(None);
    }
    let orbits = sym.orbits(k)?;
    let count = orbits.count();
    if count > MAX_WITNESS_ORBITS {
        return Err(Error::cap("number of orbit unions", 1u128 << count, 1u128 << MAX_WITNESS_ORBITS));
    }
    let subsets = increasing_subsets(k, n);
    let full = Relation::full(sym.universe(), n)?;
    for mask in 1u64..(1u64 << count) - 1 {
        let pick: Vec<bool> = (0..count).map(|i| mask >> i & 1 == 1).collect();
        let x = orbits.union_of(&pick);
        let projections_full = subsets
            .iter()
            .all(|p| x.project_onto(p).map(|r| r == full).unwrap_or(false));
        if projections_full && !sym.is_nary(&x, n)?.holds() {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Bundled structures used by the property suites.
pub fn corpus() -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for m in 1..=4 {
        out.push(pure_set(m).expect("in range"));
    }
    out.push(example_r());
    for m in 3..=6 {
        out.push(successor_cycle(m).expect("in range"));
    }
    for m in 3..=5 {
        out.push(cyclic_order(m).expect("in range"));
    }
    out.push(n_ball_order(5, 4).expect("in range").0);
    out
}

/// Every tuple of `M^k` that satisfies `f` under `vars`, by brute force.
pub fn solutions(f: &Formula, s: &FiniteStructure, vars: &[String]) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for t in all_tuples(s.universe(), vars.len()) {
        let env: Vec<(String, usize)> = vars.iter().cloned().zip(t.iter().copied()).collect();
        if satisfies(f, s, &env)? {
            out.push(t);
        }
    }
    Ok(out)
}

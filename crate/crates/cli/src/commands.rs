use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde_json::{json, Value};

use arity_core::combinators::{binarize, compose, disjoint_union, e_definable_check, unarize, ExpansionReport};
use arity_core::generators::{cyclic_order, n_ball_order, example_r, pure_set, successor_cycle};
use arity_core::verify::{checks, Fixtures};
use arity_core::{
    evaluate, load_structure, parse, save_structure, FiniteStructure, Format, Relation, Symmetry,
    VarContext,
};

use crate::report::{Failure, Output, EXIT_VERIFY};
use crate::Command;

#[derive(Subcommand)]
pub enum GenKind {
    /// Universe of size M, no relations.
    PureSet { m: usize },
    /// Successor relation S on Z_M.
    SuccessorCycle { m: usize },
    /// Cyclic order K3 on M points.
    CyclicOrder { m: usize },
    /// Candidate n-ball order K{N} on M points.
    NBallOrder {
        m: usize,
        n: usize,
        /// Print the axiom report instead of the structure.
        #[arg(long)]
        report: bool,
    },
    /// The four-point ternary example.
    ExampleR,
}

type Res = Result<Output, Failure>;

fn load(path: &Path) -> Result<FiniteStructure, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    load_structure(&text, Format::from_path(path))
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn tuple_text(t: &[usize], s: &FiniteStructure) -> String {
    let labels: Vec<String> = t.iter().map(|&a| s.element_label(a)).collect();
    format!("({})", labels.join(", "))
}

fn structure_json(s: &FiniteStructure) -> Value {
    serde_json::from_str(&save_structure(s, Format::Json)).expect("own output parses")
}

/// Write to `output` when given; the JSON result always embeds the structure.
fn emit_structure(s: &FiniteStructure, output: Option<&PathBuf>) -> Result<Value, Failure> {
    if let Some(path) = output {
        std::fs::write(path, save_structure(s, Format::from_path(path)))
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(structure_json(s))
}

pub fn run(command: Command) -> Res {
    match command {
        Command::Arity { path, max_k } => arity(&path, max_k),
        Command::Eval { formula, structure, vars } => eval(&formula, &structure, &vars),
        Command::VerifyPaper { list, fixtures, only } => verify(list, fixtures.as_deref(), &only),
        Command::Orbits { path, k } => orbits(&path, k),
        Command::Aut { path, all } => aut(&path, all),
        Command::Transitive { path, n } => transitive(&path, n),
        Command::QeCheck { path } => qe(&path),
        Command::Ba { path, k, n } => ba(&path, k, n),
        Command::FormulaArity { path, formula, vars, relation } => {
            formula_arity(&path, formula.as_deref(), &vars, relation.as_deref())
        }
        Command::Binarize { path, output } => expansion(&path, output.as_ref(), true),
        Command::Unarize { path, output } => expansion(&path, output.as_ref(), false),
        Command::Djunion { paths, output } => djunion(&paths, output.as_ref()),
        Command::Compose { outer, inner, output } => compose_cmd(&outer, &inner, output.as_ref()),
        Command::EdefCheck { path, fiber_size } => edef(&path, fiber_size),
        Command::Gen { kind, output } => gen(kind, output.as_ref()),
    }
}

fn arity(path: &Path, max_k: Option<usize>) -> Res {
    let s = load(path)?;
    let sym = Symmetry::new(&s)?;
    let report = sym.theory_arity(max_k)?;
    let mut h = String::new();
    writeln!(h, "structure: {}", report.structure).unwrap();
    writeln!(h, "arity: {}", report.arity).unwrap();
    writeln!(h, "{:>3} {:>8} {:>3} {:>8}", "k", "orbits", "n", "classes").unwrap();
    for d in &report.per_k {
        writeln!(h, "{:>3} {:>8} {:>3} {:>8}", d.k, d.orbits, d.fingerprint_classes.n, d.fingerprint_classes.classes).unwrap();
    }
    for w in &report.witnesses {
        writeln!(
            h,
            "witness (n = {}): {} in, {} out",
            w.n,
            tuple_text(&w.inside, &s),
            tuple_text(&w.outside, &s)
        )
        .unwrap();
    }
    Ok(Output::new(serde_json::to_value(&report).unwrap(), h).about(&s))
}

fn eval(formula: &str, path: &Path, vars: &str) -> Res {
    let s = load(path)?;
    let f = parse(formula)?;
    let ctx = VarContext::parse(vars)?;
    let r = evaluate(&f, &s, &ctx)?;
    let tuples: Vec<Vec<usize>> = r.tuples().collect();
    let mut h = String::new();
    for t in &tuples {
        writeln!(h, "{}", tuple_text(t, &s)).unwrap();
    }
    writeln!(h, "{} tuples", tuples.len()).unwrap();
    let result = json!({
        "formula": f.to_string(),
        "vars": ctx.vars(),
        "count": tuples.len(),
        "tuples": tuples,
    });
    Ok(Output::new(result, h).about(&s))
}

fn verify(list: bool, fixtures: Option<&Path>, only: &[String]) -> Res {
    let selected: Vec<_> = checks()
        .into_iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == c.id))
        .collect();
    if list {
        let mut h = String::new();
        for c in &selected {
            writeln!(h, "{:<4} {:>3}s  {}", c.id, c.budget.as_secs(), c.claim).unwrap();
        }
        let result: Vec<Value> = selected
            .iter()
            .map(|c| json!({"id": c.id, "claim": c.claim, "budget_ms": c.budget.as_millis() as u64}))
            .collect();
        return Ok(Output::new(json!(result), h));
    }
    let fx = match fixtures {
        Some(dir) => Fixtures::with_overrides(dir)?,
        None => Fixtures::bundled(),
    };
    let mut h = String::new();
    let mut results = Vec::new();
    let mut passed = 0;
    for c in &selected {
        let r = c.run(&fx);
        let ok = r.passed && r.within_budget;
        passed += ok as usize;
        let status = if ok { "PASS" } else if r.passed { "SLOW" } else { "FAIL" };
        writeln!(h, "{:<4} {status}  {}", r.id, r.claim).unwrap();
        for d in &r.details {
            writeln!(h, "       {d}").unwrap();
        }
        results.push(r);
    }
    writeln!(h, "{passed}/{} checks passed", selected.len()).unwrap();
    let code = if passed == selected.len() { 0 } else { EXIT_VERIFY };
    let result = json!({
        "passed": passed,
        "total": selected.len(),
        "checks": results,
    });
    Ok(Output::new(result, h).with_code(code))
}

fn orbits(path: &Path, k: usize) -> Res {
    let s = load(path)?;
    let sym = Symmetry::new(&s)?;
    let p = sym.orbits(k)?;
    let mut h = String::new();
    writeln!(h, "k = {k}: {} orbits", p.count()).unwrap();
    let mut list = Vec::new();
    for id in 0..p.count() as u32 {
        let rep = p.representative(id);
        let size = p.orbit(id).count();
        writeln!(h, "{id:>4}  size {size:>6}  {}", tuple_text(&rep, &s)).unwrap();
        list.push(json!({"id": id, "size": size, "representative": rep}));
    }
    Ok(Output::new(json!({"k": k, "count": p.count(), "orbits": list}), h).about(&s))
}

fn aut(path: &Path, all: bool) -> Res {
    let s = load(path)?;
    let sym = Symmetry::new(&s)?;
    let g = sym.group();
    let mut h = String::new();
    writeln!(h, "order: {}", g.order()).unwrap();
    for p in g.generators() {
        writeln!(h, "generator: {:?}", p.images()).unwrap();
    }
    let mut result = json!({"order": g.order(), "generators": g.generators()});
    if all {
        for p in g.elements() {
            writeln!(h, "element: {:?}", p.images()).unwrap();
        }
        result["elements"] = json!(g.elements());
    }
    Ok(Output::new(result, h).about(&s))
}

fn transitive(path: &Path, n: Option<usize>) -> Res {
    let s = load(path)?;
    let sym = Symmetry::new(&s)?;
    match n {
        Some(n) => {
            let t = sym.n_transitive(n)?;
            Ok(Output::new(json!({"n": n, "transitive": t}), format!("{n}-transitive: {t}\n")).about(&s))
        }
        None => {
            let p = sym.transitivity_profile()?;
            let mut h = String::new();
            for f in &p.flags {
                writeln!(h, "{}-transitive: {}", f.n, f.transitive).unwrap();
            }
            writeln!(h, "largest: {}", p.largest).unwrap();
            Ok(Output::new(serde_json::to_value(&p).unwrap(), h).about(&s))
        }
    }
}

fn qe(path: &Path) -> Res {
    let s = load(path)?;
    let r = Symmetry::new(&s)?.qe_check()?;
    let mut h = format!("quantifier elimination: {}\n", r.holds);
    if let Some(f) = &r.failure {
        writeln!(
            h,
            "k = {}: {} and {} share an atomic type but lie in orbits {} and {}",
            f.k,
            tuple_text(&f.tuples[0], &s),
            tuple_text(&f.tuples[1], &s),
            f.orbits[0],
            f.orbits[1]
        )
        .unwrap();
    }
    Ok(Output::new(serde_json::to_value(&r).unwrap(), h).about(&s))
}

fn ba(path: &Path, k: usize, n: usize) -> Res {
    let s = load(path)?;
    let b = Symmetry::new(&s)?.ba_atoms(k, n)?;
    let size = b.algebra_size().map(|v| v.to_string()).unwrap_or_else(|| "overflow".into());
    let h = format!(
        "BA_{k}{n}: {} atoms (algebra size {size}), {} orbits, complete: {}\n",
        b.atoms,
        b.orbits,
        b.is_complete()
    );
    let mut v = serde_json::to_value(&b).unwrap();
    v["complete"] = json!(b.is_complete());
    v["algebra_size"] = json!(size);
    Ok(Output::new(v, h).about(&s))
}

fn formula_arity(path: &Path, formula: Option<&str>, vars: &str, relation: Option<&str>) -> Res {
    let s = load(path)?;
    let (label, x): (String, Relation) = match (formula, relation) {
        (Some(f), _) => {
            let f = parse(f)?;
            (f.to_string(), evaluate(&f, &s, &VarContext::parse(vars)?)?)
        }
        (None, Some(r)) => (
            r.to_string(),
            s.relation(r)
                .ok_or_else(|| Failure::input(format!("unknown relation `{r}`")))?
                .clone(),
        ),
        (None, None) => return Err(Failure::input("give --formula or --relation")),
    };
    let sym = Symmetry::new(&s)?;
    let a = sym.formula_arity(&x)?;
    let mut h = format!("{label}: arity {a}\n");
    let mut witness = Value::Null;
    if a >= 2 {
        if let Some(w) = sym.is_nary(&x, a - 1)?.witness() {
            writeln!(
                h,
                "not {}-ary: {} in, {} out",
                a - 1,
                tuple_text(&w.inside, &s),
                tuple_text(&w.outside, &s)
            )
            .unwrap();
            witness = serde_json::to_value(w).unwrap();
        }
    }
    let result = json!({"relation": label, "k": x.arity(), "arity": a, "witness": witness});
    Ok(Output::new(result, h).about(&s))
}

fn expansion(path: &Path, output: Option<&PathBuf>, binary: bool) -> Res {
    let s = load(path)?;
    let (t, report): (FiniteStructure, ExpansionReport) = if binary { binarize(&s)? } else { unarize(&s)? };
    let semantic = report.semantic_arity.map_or("over cap".to_string(), |a| a.to_string());
    let h = format!(
        "added {} predicates; basis bound {}; semantic arity {semantic}; rewrites verified: {}\n",
        report.added,
        report.basis_bound,
        report.rewrites.iter().all(|r| r.verified)
    );
    let structure = emit_structure(&t, output)?;
    Ok(Output::new(json!({"report": report, "structure": structure}), h).about(&s))
}

fn djunion(paths: &[PathBuf], output: Option<&PathBuf>) -> Res {
    let parts = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let (u, report) = disjoint_union(&parts)?;
    let mut h = format!("universe {}\n", u.universe());
    for p in &report.parts {
        writeln!(h, "{}: {} elements at offset {}, sort {}", p.structure, p.size, p.offset, p.predicate).unwrap();
    }
    for r in &report.renames {
        writeln!(h, "renamed {} -> {} (part {})", r.from, r.to, r.part + 1).unwrap();
    }
    let structure = emit_structure(&u, output)?;
    Ok(Output::new(json!({"report": report, "structure": structure}), h).about(&u))
}

fn compose_cmd(outer: &Path, inner: &Path, output: Option<&PathBuf>) -> Res {
    let (a, b) = (load(outer)?, load(inner)?);
    let (c, report) = compose(&a, &b)?;
    let h = format!(
        "universe {} = {} x {}; element (a, b) is a * {} + b\n",
        c.universe(),
        a.universe(),
        b.universe(),
        report.fiber_size
    );
    let structure = emit_structure(&c, output)?;
    Ok(Output::new(json!({"report": report, "structure": structure}), h).about(&c))
}

fn edef(path: &Path, fiber_size: usize) -> Res {
    let s = load(path)?;
    let e = e_definable_check(&s, fiber_size)?;
    Ok(Output::new(
        json!({"fiber_size": fiber_size, "e_definable": e}),
        format!("E-definable: {e}\n"),
    )
    .about(&s))
}

fn gen(kind: GenKind, output: Option<&PathBuf>) -> Res {
    let s = match kind {
        GenKind::PureSet { m } => pure_set(m)?,
        GenKind::SuccessorCycle { m } => successor_cycle(m)?,
        GenKind::CyclicOrder { m } => cyclic_order(m)?,
        GenKind::ExampleR => example_r(),
        GenKind::NBallOrder { m, n, report } => {
            let (s, rep) = n_ball_order(m, n)?;
            if report {
                let mut h = String::new();
                for r in &rep.results {
                    write!(h, "{:<10} {}", r.axiom, if r.holds { "holds" } else { "fails" }).unwrap();
                    if let Some(c) = &r.counterexample {
                        let env: Vec<String> = c.iter().map(|(v, a)| format!("{v}={a}")).collect();
                        write!(h, "  at {}", env.join(" ")).unwrap();
                    }
                    h.push('\n');
                }
                return Ok(Output::new(serde_json::to_value(&rep).unwrap(), h).about(&s));
            }
            s
        }
    };
    let structure = emit_structure(&s, output)?;
    Ok(Output::new(structure, save_structure(&s, Format::Json)).about(&s))
}

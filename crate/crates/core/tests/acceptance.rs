//! Acceptance criteria, one line each. Exits non-zero if any criterion
//! fails or overruns its time budget.

use arity_core::verify::{checks, Fixtures};

fn main() {
    let fixtures = Fixtures::bundled();
    let mut failures = Vec::new();
    for check in checks() {
        let r = check.run(&fixtures);
        let status = match (r.passed, r.within_budget) {
            (true, true) => "PASS",
            (true, false) => "FAIL (over budget)",
            _ => "FAIL",
        };
        println!(
            "{:<4} {status:<18} {:>9.3}s / {:>3}s  {}",
            r.id,
            r.elapsed.as_secs_f64(),
            r.budget_ms / 1000,
            r.claim
        );
        for line in &r.details {
            println!("         {line}");
        }
        if !(r.passed && r.within_budget) {
            failures.push(r.id);
        }
    }
    if failures.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failures:?}");
        std::process::exit(1);
    }
}

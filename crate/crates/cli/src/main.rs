mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::{envelope, Failure};

#[derive(Parser)]
#[command(name = "arity", version, about = "Arity of first-order theories of finite structures")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
pub struct Common {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timings in JSON reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Theory arity with per-k diagnostics and witnesses.
    Arity {
        path: PathBuf,
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Evaluate a formula; prints satisfying tuples in lexicographic order.
    Eval {
        #[arg(short, long)]
        formula: String,
        #[arg(short, long)]
        structure: PathBuf,
        /// Comma-separated variable context, e.g. `x,y`.
        #[arg(long, default_value = "")]
        vars: String,
    },
    /// Replay the acceptance checks.
    #[command(alias = "verify")]
    VerifyPaper {
        /// List checks without running them.
        #[arg(long)]
        list: bool,
        /// Directory whose `<name>.json` files replace bundled fixtures.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Run only these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Orbit partition of M^k.
    Orbits {
        path: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// Automorphism group.
    Aut {
        path: PathBuf,
        /// List every element, not just generators.
        #[arg(long)]
        all: bool,
    },
    /// Transitivity profile, or a single level with `-n`.
    Transitive {
        path: PathBuf,
        #[arg(short)]
        n: Option<usize>,
    },
    /// Compare atomic types with orbits up to k = m.
    QeCheck { path: PathBuf },
    /// Atoms of the algebra of n-ary definable subsets of M^k.
    Ba {
        path: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        n: usize,
    },
    /// Arity of a definable relation, named or given by a formula.
    FormulaArity {
        path: PathBuf,
        #[arg(short, long, conflicts_with = "relation")]
        formula: Option<String>,
        #[arg(long, default_value = "")]
        vars: String,
        #[arg(short, long)]
        relation: Option<String>,
    },
    /// Add singleton binary predicates B_i_j.
    Binarize {
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add singleton unary predicates U_i.
    Unarize {
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Disjoint union with sort predicates P1, P2, ...
    Djunion {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Composition OUTER[INNER].
    Compose {
        outer: PathBuf,
        inner: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Whether the fiber equivalence of a composition is definable.
    EdefCheck {
        path: PathBuf,
        #[arg(long)]
        fiber_size: usize,
    },
    /// Generate a bundled structure as JSON.
    Gen {
        #[command(subcommand)]
        kind: commands::GenKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common;
    let argv: Vec<String> = std::env::args().skip(1).filter(|a| a != "--timings").collect();
    let start = Instant::now();
    match commands::run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let written = if common.json {
                let ms = common.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
                let v = envelope(&argv, &out, ms);
                writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
            } else {
                write!(stdout, "{}", out.human)
            };
            if written.is_err() {
                return ExitCode::from(report::EXIT_INPUT);
            }
            ExitCode::from(out.code)
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

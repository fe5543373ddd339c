//! First-order formulas: syntax tree, parser, printer and evaluators.

mod ast;
mod eval;
mod parser;

pub use ast::Formula;
pub use eval::{check_sentence, evaluate, satisfies};
pub use parser::parse;

//! JSON report envelope and exit codes.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use arity_core::{save_structure, Error, FiniteStructure, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_cap() { EXIT_CAP } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

/// What a command produced: a JSON result, its human rendering, and the
/// exit code to use on success.
pub struct Output {
    pub result: Value,
    pub human: String,
    pub code: u8,
    pub structure: Option<FiniteStructure>,
}

impl Output {
    pub fn new(result: Value, human: String) -> Self {
        Output {
            result,
            human,
            code: EXIT_OK,
            structure: None,
        }
    }

    pub fn about(mut self, s: &FiniteStructure) -> Self {
        self.structure = Some(s.clone());
        self
    }

    pub fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

/// SHA-256 of the canonical JSON serialization, hex encoded.
pub fn digest(s: &FiniteStructure) -> String {
    Sha256::digest(save_structure(s, Format::Json).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn envelope(command: &[String], out: &Output, elapsed_ms: Option<f64>) -> Value {
    let mut v = json!({
        "command": command,
        "result": out.result,
        "tool_version": env!("CARGO_PKG_VERSION"),
    });
    if let Some(s) = &out.structure {
        v["structure_digest"] = json!(digest(s));
        v["elements"] = json!((0..s.universe()).map(|i| s.element_label(i)).collect::<Vec<_>>());
    }
    if let Some(ms) = elapsed_ms {
        v["timings"] = json!({ "total_ms": ms });
    }
    v
}

//! Arity of first-order theories of finite relational structures.
//!
//! Definability over the empty set is read semantically: a relation on a
//! finite structure is definable iff it is invariant under every
//! automorphism. Everything else is built on that.

pub mod arity;
pub mod combinators;
pub mod error;
pub mod format;
pub mod formula;
pub mod generators;
pub mod relation;
pub mod structure;
pub mod symmetry;
pub mod verify;

pub use arity::{
    ba_atoms, closure_oracle, constantizable_within, formula_arity, is_nary, n_transitive,
    qe_check, theory_arity, transitivity_profile, ArityReport, BaAtoms, NaryCheck, OracleLimits,
    QeReport, TransitivityProfile, Witness,
};
pub use error::{Error, Result};
pub use format::{load_structure, save_structure, Format};
pub use formula::{check_sentence, evaluate, parse, satisfies, Formula};
pub use relation::Relation;
pub use structure::{FiniteStructure, Signature, VarContext};
pub use symmetry::{automorphisms, is_definable, orbit_partition, AutomorphismGroup, OrbitPartition, Permutation, Symmetry};

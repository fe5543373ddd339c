//! Brute-force membership in the Boolean closure of cylinder generators.
//!
//! Shares nothing with the fingerprint code except the orbit partition:
//! generators are built as explicit relations by pulling orbits back along
//! coordinate subsets, then closed under complement and intersection.

use std::collections::HashSet;

use super::increasing_subsets;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::symmetry::Symmetry;

/// Size bounds for [`closure_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_universe: usize,
    pub max_arity: usize,
    /// Largest family kept by the explicit fixpoint before switching to
    /// atom refinement.
    pub max_family: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_universe: 4,
            max_arity: 3,
            max_family: 256,
        }
    }
}

fn generators(sym: &Symmetry<'_>, k: usize, n: usize) -> Result<Vec<Relation>> {
    let m = sym.universe();
    let size = n.min(k);
    let orbits = sym.orbits(size)?;
    let mut out = vec![Relation::full(m, k)?];
    for subset in increasing_subsets(k, size) {
        for id in 0..orbits.count() as u32 {
            out.push(orbits.orbit(id).pullback(k, &subset)?);
        }
    }
    if n == 1 {
        for i in 0..k {
            for j in (i + 1)..k {
                out.push(Relation::coordinate_equality(m, k, i, j)?);
            }
        }
    }
    Ok(out)
}

/// Explicit closure; `None` once the family outgrows `limit`.
fn fixpoint(gens: Vec<Relation>, limit: usize) -> Option<HashSet<Relation>> {
    let mut family: Vec<Relation> = Vec::new();
    let mut seen: HashSet<Relation> = HashSet::new();
    let mut work = gens;
    while let Some(r) = work.pop() {
        if !seen.insert(r.clone()) {
            continue;
        }
        if seen.len() > limit {
            return None;
        }
        work.push(r.complement());
        for other in &family {
            work.push(r.intersection(other).expect("same shape"));
        }
        family.push(r);
    }
    Some(seen)
}

/// Atoms of the generated algebra: tuples grouped by their membership
/// vector across all generators.
fn in_atom_closure(gens: &[Relation], x: &Relation) -> bool {
    let mut atoms: std::collections::HashMap<Vec<bool>, bool> = std::collections::HashMap::new();
    for i in 0..x.space_len() {
        let key: Vec<bool> = gens.iter().map(|g| g.contains_index(i)).collect();
        let member = x.contains_index(i);
        if *atoms.entry(key).or_insert(member) != member {
            return false;
        }
    }
    true
}

/// The Boolean algebra generated by level-`n` cylinders of `M^k` (plus
/// coordinate diagonals when `n = 1`). Held explicitly while small, as its
/// generators otherwise.
pub struct ClosureOracle {
    universe: usize,
    arity: usize,
    generators: Vec<Relation>,
    family: Option<HashSet<Relation>>,
}

impl ClosureOracle {
    pub fn build(sym: &Symmetry<'_>, k: usize, n: usize, limits: OracleLimits) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("level n must be at least 1".into()));
        }
        if sym.universe() > limits.max_universe || k > limits.max_arity {
            return Err(Error::InstanceTooLarge(format!(
                "oracle limited to m <= {} and k <= {}, got m = {} and k = {k}",
                limits.max_universe,
                limits.max_arity,
                sym.universe(),
            )));
        }
        let generators = generators(sym, k, n)?;
        let family = fixpoint(generators.clone(), limits.max_family);
        Ok(ClosureOracle {
            universe: sym.universe(),
            arity: k,
            generators,
            family,
        })
    }

    /// Size of the closure when it was enumerated.
    pub fn explicit_size(&self) -> Option<usize> {
        self.family.as_ref().map(HashSet::len)
    }

    pub fn contains(&self, x: &Relation) -> Result<bool> {
        if x.universe() != self.universe {
            return Err(Error::UniverseMismatch {
                left: self.universe,
                right: x.universe(),
            });
        }
        if x.arity() != self.arity {
            return Err(Error::TupleLength {
                expected: self.arity,
                found: x.arity(),
            });
        }
        Ok(match &self.family {
            Some(family) => family.contains(x),
            None => in_atom_closure(&self.generators, x),
        })
    }
}

/// Whether `x` lies in the Boolean algebra generated by level-`n`
/// cylinders (plus coordinate diagonals when `n = 1`).
pub fn closure_oracle(sym: &Symmetry<'_>, x: &Relation, n: usize, limits: OracleLimits) -> Result<bool> {
    ClosureOracle::build(sym, x.arity(), n, limits)?.contains(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::FiniteStructure;

    #[test]
    fn diagonal_is_unary_in_pure_set() {
        let s = FiniteStructure::new("p", 3).unwrap();
        let sym = Symmetry::new(&s).unwrap();
        let d = Relation::diagonal(3).unwrap();
        assert!(closure_oracle(&sym, &d, 1, OracleLimits::default()).unwrap());
    }

    #[test]
    fn fixpoint_and_atoms_agree() {
        let s = FiniteStructure::new("p", 2).unwrap();
        let sym = Symmetry::new(&s).unwrap();
        let gens = generators(&sym, 2, 1).unwrap();
        let family = fixpoint(gens.clone(), 1 << 12).unwrap();
        // two atoms on M^2: diagonal and off-diagonal
        assert_eq!(family.len(), 4);
        for r in &family {
            assert!(in_atom_closure(&gens, r));
        }
    }

    #[test]
    fn too_large() {
        let s = FiniteStructure::new("p", 5).unwrap();
        let sym = Symmetry::new(&s).unwrap();
        let x = Relation::full(5, 2).unwrap();
        assert!(closure_oracle(&sym, &x, 1, OracleLimits::default())
            .unwrap_err()
            .is_cap());
    }
}

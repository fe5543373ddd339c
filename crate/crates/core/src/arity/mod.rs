//! Arity of definable relations and of the theory of a finite structure.
//!
//! A definable `X ⊆ M^k` is `n`-ary when it is a Boolean combination of
//! definable sets in at most `n` free variables (plus equalities at level 1).
//! Reading "n free variables" as "at most n" costs nothing: padding with
//! `x = x` turns one reading into the other.
//!
//! Every check here reduces to comparing partitions of `M^k`: the orbit
//! partition (all definable sets) against the level-`n` fingerprint
//! partition (the atoms of the algebra of `n`-ary sets).

mod fingerprint;
mod oracle;

use std::collections::HashMap;

use serde::Serialize;

pub use fingerprint::{
    equality_pattern, equality_pattern_classes, fingerprint, increasing_subsets, Fingerprint,
    FingerprintPartition,
};
pub use oracle::{closure_oracle, ClosureOracle, OracleLimits};

use crate::error::{Error, Result};
use crate::relation::{decode, Relation};
use crate::structure::FiniteStructure;
use crate::symmetry::Symmetry;

/// Two `k`-tuples with equal level-`n` fingerprints, one inside and one
/// outside the relation under test. Serializes as `[a, b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: usize,
    pub inside: Vec<usize>,
    pub outside: Vec<usize>,
}

impl Witness {
    /// Panics unless the pair really is a witness.
    fn checked(sym: &Symmetry<'_>, x: &Relation, n: usize, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        assert_eq!(
            fingerprint(sym, &a, n)?,
            fingerprint(sym, &b, n)?,
            "witness fingerprints differ"
        );
        let (inside, outside) = match (x.contains(&a), x.contains(&b)) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => panic!("witness tuples agree on membership"),
        };
        Ok(Witness { n, inside, outside })
    }
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (first, second) = if self.inside < self.outside {
            (&self.inside, &self.outside)
        } else {
            (&self.outside, &self.inside)
        };
        (first, second).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaryCheck {
    Nary,
    Refuted(Witness),
}

impl NaryCheck {
    pub fn holds(&self) -> bool {
        matches!(self, NaryCheck::Nary)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            NaryCheck::Nary => None,
            NaryCheck::Refuted(w) => Some(w),
        }
    }
}

fn require_definable(sym: &Symmetry<'_>, x: &Relation) -> Result<()> {
    if sym.is_definable(x)? {
        Ok(())
    } else {
        Err(Error::NotDefinable)
    }
}

/// First pair of indices that share a class of `coarse` but differ on
/// `member` (a predicate over indices), in index order.
fn first_split(coarse: &[u32], count: usize, member: impl Fn(usize) -> u32) -> Option<(usize, usize)> {
    let mut first: Vec<Option<(usize, u32)>> = vec![None; count];
    for (i, &c) in coarse.iter().enumerate() {
        let v = member(i);
        match first[c as usize] {
            None => first[c as usize] = Some((i, v)),
            Some((j, w)) if w != v => return Some((j, i)),
            Some(_) => {}
        }
    }
    None
}

fn tuple_at(m: usize, k: usize, index: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    decode(m, index, &mut t);
    t
}

impl<'s> Symmetry<'s> {
    /// Whether the definable relation `x` is `n`-ary; a witness pair on
    /// failure. `n` must be at least 1.
    pub fn is_nary(&self, x: &Relation, n: usize) -> Result<NaryCheck> {
        if n == 0 {
            return Err(Error::Precondition("level n must be at least 1".into()));
        }
        require_definable(self, x)?;
        let k = x.arity();
        if k <= n {
            return Ok(NaryCheck::Nary);
        }
        let fp = FingerprintPartition::compute(self, k, n)?;
        match first_split(fp.classes(), fp.count(), |i| x.contains_index(i) as u32) {
            None => Ok(NaryCheck::Nary),
            Some((a, b)) => {
                let m = self.universe();
                Ok(NaryCheck::Refuted(Witness::checked(
                    self,
                    x,
                    n,
                    tuple_at(m, k, a),
                    tuple_at(m, k, b),
                )?))
            }
        }
    }

    /// Least `n` such that `x` is `n`-ary; 0 when `x` is empty or all of
    /// `M^k` (equivalent to a sentence).
    pub fn formula_arity(&self, x: &Relation) -> Result<usize> {
        require_definable(self, x)?;
        if x.is_empty() || x.is_full() {
            return Ok(0);
        }
        for n in 1..x.arity() {
            if self.is_nary(x, n)?.holds() {
                return Ok(n);
            }
        }
        Ok(x.arity())
    }

    /// Arity of the theory, scanning tuple arities up to `max_k` (default
    /// `m`, which gives the exact value).
    pub fn theory_arity(&self, max_k: Option<usize>) -> Result<ArityReport> {
        let m = self.universe();
        let max_k = max_k.unwrap_or(m).max(1);
        let mut cache: HashMap<(usize, usize), FingerprintPartition> = HashMap::new();
        let mut partition = |k: usize, n: usize| -> Result<(usize, Vec<u32>)> {
            if let Some(p) = cache.get(&(k, n)) {
                return Ok((p.count(), p.classes().to_vec()));
            }
            let p = FingerprintPartition::compute(self, k, n)?;
            let out = (p.count(), p.classes().to_vec());
            cache.insert((k, n), p);
            Ok(out)
        };
        let mut witnesses = Vec::new();
        let mut arity = max_k;
        'candidates: for n in 1..max_k {
            for k in (n + 1)..=max_k {
                let orbits = self.orbits(k)?;
                let (count, classes) = partition(k, n)?;
                if count != orbits.count() {
                    let (a, b) = first_split(&classes, count, |i| orbits.orbit_of_index(i))
                        .expect("fingerprint classes are unions of orbits");
                    let target = orbits.orbit(orbits.orbit_of_index(a));
                    witnesses.push(Witness::checked(
                        self,
                        &target,
                        n,
                        tuple_at(m, k, a),
                        tuple_at(m, k, b),
                    )?);
                    continue 'candidates;
                }
            }
            arity = n;
            break;
        }
        let mut per_k = Vec::new();
        for k in 1..=max_k {
            let orbits = self.orbits(k)?.count();
            for n in 1..=arity.min(k) {
                let (classes, _) = partition(k, n)?;
                per_k.push(KDiagnostic {
                    k,
                    orbits,
                    fingerprint_classes: ClassCount { n, classes },
                });
            }
        }
        Ok(ArityReport {
            structure: self.structure().name().to_string(),
            arity,
            max_k,
            per_k,
            witnesses,
        })
    }

    /// Orbits of `M^n` coincide with equality patterns.
    pub fn n_transitive(&self, n: usize) -> Result<bool> {
        let orbits = self.orbits(n)?;
        let (_, patterns) = equality_pattern_classes(self.universe(), n)?;
        Ok(orbits.count() == patterns)
    }

    pub fn transitivity_profile(&self) -> Result<TransitivityProfile> {
        let mut flags = Vec::new();
        for n in 1..=self.universe() {
            flags.push(TransitivityFlag {
                n,
                transitive: self.n_transitive(n)?,
            });
        }
        let largest = flags
            .iter()
            .take_while(|f| f.transitive)
            .last()
            .map_or(0, |f| f.n);
        Ok(TransitivityProfile { flags, largest })
    }

    /// Atomic types against orbits on `M^k` for every `k <= m`.
    pub fn qe_check(&self) -> Result<QeReport> {
        let m = self.universe();
        let relations: Vec<(&str, &Relation)> = self.structure().relations().collect();
        for k in 1..=m {
            let orbits = self.orbits(k)?;
            let (mut classes, mut count) = equality_pattern_classes(m, k)?;
            let mut refiner = fingerprint::Refiner::new();
            for (_, rel) in &relations {
                for selection in crate::relation::all_tuples(k, rel.arity()) {
                    let pulled = rel.pullback(k, &selection)?;
                    count = refiner.refine(&mut classes, |i| pulled.contains_index(i) as u32);
                }
            }
            if count != orbits.count() {
                let (a, b) = first_split(&classes, count, |i| orbits.orbit_of_index(i))
                    .expect("atomic types are unions of orbits");
                return Ok(QeReport {
                    holds: false,
                    failure: Some(QeFailure {
                        k,
                        orbits: [orbits.orbit_of_index(a), orbits.orbit_of_index(b)],
                        tuples: [tuple_at(m, k, a), tuple_at(m, k, b)],
                    }),
                });
            }
        }
        Ok(QeReport {
            holds: true,
            failure: None,
        })
    }

    /// Atoms of the algebra of `n`-ary definable subsets of `M^k`.
    pub fn ba_atoms(&self, k: usize, n: usize) -> Result<BaAtoms> {
        if n == 0 {
            return Err(Error::Precondition("level n must be at least 1".into()));
        }
        let fp = FingerprintPartition::compute(self, k, n)?;
        Ok(BaAtoms {
            universe: self.universe(),
            k,
            n,
            atoms: fp.count(),
            orbits: self.orbits(k)?.count(),
            classes: fp.classes().to_vec(),
        })
    }

    /// Smallest symmetric difference between `x` and a Boolean combination
    /// of coordinate equalities.
    pub fn distance_to_equalities(&self, x: &Relation) -> Result<usize> {
        let (classes, count) = equality_pattern_classes(self.universe(), x.arity())?;
        let mut inside = vec![0usize; count];
        let mut size = vec![0usize; count];
        for (i, &c) in classes.iter().enumerate() {
            size[c as usize] += 1;
            inside[c as usize] += x.contains_index(i) as usize;
        }
        Ok(inside
            .iter()
            .zip(&size)
            .map(|(&a, &s)| a.min(s - a))
            .sum())
    }

    /// Whether `x` is within `budget` tuples of a Boolean combination of
    /// coordinate equalities; the finite stand-in for "differs by a set
    /// with finitely many solutions".
    pub fn constantizable_within(&self, x: &Relation, budget: usize) -> Result<bool> {
        require_definable(self, x)?;
        Ok(self.distance_to_equalities(x)? <= budget)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCount {
    pub n: usize,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KDiagnostic {
    pub k: usize,
    pub orbits: usize,
    pub fingerprint_classes: ClassCount,
}

/// Result of [`Symmetry::theory_arity`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArityReport {
    pub structure: String,
    pub arity: usize,
    #[serde(skip)]
    pub max_k: usize,
    pub per_k: Vec<KDiagnostic>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityFlag {
    pub n: usize,
    pub transitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityProfile {
    pub flags: Vec<TransitivityFlag>,
    /// Largest `n` such that the structure is `j`-transitive for all `j <= n`.
    pub largest: usize,
}

impl TransitivityProfile {
    pub fn is_transitive(&self, n: usize) -> Option<bool> {
        self.flags.iter().find(|f| f.n == n).map(|f| f.transitive)
    }

    /// Lower bound on the theory arity implied by an `n`-transitive but not
    /// `(n+1)`-transitive level.
    pub fn arity_lower_bound(&self) -> usize {
        self.flags
            .windows(2)
            .filter(|w| w[0].transitive && !w[1].transitive)
            .map(|w| w[1].n)
            .max()
            .unwrap_or(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QeFailure {
    pub k: usize,
    pub orbits: [u32; 2],
    pub tuples: [Vec<usize>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QeReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<QeFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaAtoms {
    #[serde(skip)]
    universe: usize,
    pub k: usize,
    pub n: usize,
    pub atoms: usize,
    pub orbits: usize,
    #[serde(skip)]
    classes: Vec<u32>,
}

impl BaAtoms {
    pub fn atom_of(&self, tuple: &[usize]) -> u32 {
        self.classes[crate::relation::encode(self.universe, tuple)]
    }

    pub fn atom(&self, id: u32) -> Relation {
        Relation::from_fn(self.universe, self.k, |t| self.atom_of(t) == id).expect("fits")
    }

    /// `2^atoms`, when it fits.
    pub fn algebra_size(&self) -> Option<u128> {
        1u128.checked_shl(self.atoms as u32)
    }

    /// Every definable subset of `M^k` is `n`-ary.
    pub fn is_complete(&self) -> bool {
        self.atoms == self.orbits
    }
}

// Convenience wrappers that build the automorphism group on the fly.

pub fn is_nary(s: &FiniteStructure, x: &Relation, n: usize) -> Result<NaryCheck> {
    Symmetry::new(s)?.is_nary(x, n)
}

pub fn formula_arity(s: &FiniteStructure, x: &Relation) -> Result<usize> {
    Symmetry::new(s)?.formula_arity(x)
}

pub fn theory_arity(s: &FiniteStructure, max_k: Option<usize>) -> Result<ArityReport> {
    Symmetry::new(s)?.theory_arity(max_k)
}

pub fn n_transitive(s: &FiniteStructure, n: usize) -> Result<bool> {
    Symmetry::new(s)?.n_transitive(n)
}

pub fn transitivity_profile(s: &FiniteStructure) -> Result<TransitivityProfile> {
    Symmetry::new(s)?.transitivity_profile()
}

pub fn qe_check(s: &FiniteStructure) -> Result<QeReport> {
    Symmetry::new(s)?.qe_check()
}

pub fn ba_atoms(s: &FiniteStructure, k: usize, n: usize) -> Result<BaAtoms> {
    Symmetry::new(s)?.ba_atoms(k, n)
}

pub fn constantizable_within(s: &FiniteStructure, x: &Relation, budget: usize) -> Result<bool> {
    Symmetry::new(s)?.constantizable_within(x, budget)
}

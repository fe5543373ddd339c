//! Level-`n` fingerprints of tuples.
//!
//! The level-`n` fingerprint of `t in M^k` (`k > n`) is the list of orbit ids
//! of the projections of `t` onto every increasing `n`-subset of coordinates.
//! For `n = 1` the equality pattern of `t` is added, since the unary level
//! admits `x = y` as a basic formula. For `k <= n` the fingerprint is the
//! orbit of `t` itself.
//!
//! Two tuples share a fingerprint iff no Boolean combination of formulas in
//! at most `n` free variables separates them, so a definable relation is
//! `n`-ary iff it is a union of fingerprint classes.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::Result;
use crate::relation::{decode, encode, Odometer};
use crate::symmetry::Symmetry;

/// Increasing `size`-subsets of `0..k`, in lexicographic order.
pub fn increasing_subsets(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= k {
        rec(0, k, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

/// Canonical equality pattern: each coordinate replaced by the rank of its
/// first occurrence, e.g. `(5, 3, 5) -> (0, 1, 0)`.
pub fn equality_pattern(tuple: &[usize]) -> Vec<usize> {
    let mut firsts: Vec<usize> = Vec::new();
    tuple
        .iter()
        .map(|a| match firsts.iter().position(|b| b == a) {
            Some(p) => p,
            None => {
                firsts.push(*a);
                firsts.len() - 1
            }
        })
        .collect()
}

/// Explicit fingerprint of one tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Fingerprint {
    pub orbits: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_pattern: Option<Vec<usize>>,
}

pub fn fingerprint(sym: &Symmetry<'_>, tuple: &[usize], n: usize) -> Result<Fingerprint> {
    let k = tuple.len();
    if k <= n {
        return Ok(Fingerprint {
            orbits: vec![sym.orbits(k)?.orbit_of(tuple)],
            equality_pattern: None,
        });
    }
    let orbits = sym.orbits(n)?;
    let mut proj = vec![0; n];
    let ids = increasing_subsets(k, n)
        .iter()
        .map(|s| {
            for (slot, &p) in proj.iter_mut().zip(s) {
                *slot = tuple[p];
            }
            orbits.orbit_of(&proj)
        })
        .collect();
    Ok(Fingerprint {
        orbits: ids,
        equality_pattern: (n == 1).then(|| equality_pattern(tuple)),
    })
}

/// Interns `(class, extra)` pairs into dense ids numbered by first
/// occurrence.
pub(crate) struct Refiner {
    map: HashMap<(u32, u32), u32>,
}

impl Refiner {
    pub(crate) fn new() -> Self {
        Refiner { map: HashMap::new() }
    }

    pub(crate) fn refine(&mut self, classes: &mut [u32], mut extra: impl FnMut(usize) -> u32) -> usize {
        self.map.clear();
        for (i, c) in classes.iter_mut().enumerate() {
            let next = self.map.len() as u32;
            *c = *self.map.entry((*c, extra(i))).or_insert(next);
        }
        self.map.len()
    }
}

/// Equality-pattern class of every tuple of `M^k`, numbered by first
/// occurrence.
pub fn equality_pattern_classes(universe: usize, k: usize) -> Result<(Vec<u32>, usize)> {
    let len = crate::relation::tuple_count(universe, k)?;
    let mut ids = HashMap::new();
    let mut classes = Vec::with_capacity(len);
    let mut odo = Odometer::new(universe, k);
    while let Some(t) = odo.next_tuple() {
        let next = ids.len() as u32;
        classes.push(*ids.entry(equality_pattern(t)).or_insert(next));
    }
    Ok((classes, ids.len()))
}

/// Fingerprint classes of all of `M^k` at level `n`.
#[derive(Debug, Clone)]
pub struct FingerprintPartition {
    pub k: usize,
    pub n: usize,
    classes: Vec<u32>,
    count: usize,
}

impl FingerprintPartition {
    pub fn compute(sym: &Symmetry<'_>, k: usize, n: usize) -> Result<Self> {
        let m = sym.universe();
        if k <= n {
            let orbits = sym.orbits(k)?;
            return Ok(FingerprintPartition {
                k,
                n,
                classes: orbits.ids().to_vec(),
                count: orbits.count(),
            });
        }
        let (mut classes, mut count) = if n == 1 {
            equality_pattern_classes(m, k)?
        } else {
            (vec![0; crate::relation::tuple_count(m, k)?], 1)
        };
        let orbits = sym.orbits(n)?;
        let mut refiner = Refiner::new();
        let mut scratch = vec![0; k];
        for subset in increasing_subsets(k, n) {
            let weights: Vec<usize> = (0..n).map(|j| m.pow((n - 1 - j) as u32)).collect();
            count = refiner.refine(&mut classes, |i| {
                decode(m, i, &mut scratch);
                let proj: usize = subset.iter().zip(&weights).map(|(&p, w)| scratch[p] * w).sum();
                orbits.orbit_of_index(proj)
            });
        }
        Ok(FingerprintPartition { k, n, classes, count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn class_of(&self, universe: usize, tuple: &[usize]) -> u32 {
        self.classes[encode(universe, tuple)]
    }
}

//! Automorphism groups and orbit partitions.
//!
//! Over a finite structure a relation is definable without parameters exactly
//! when it is invariant under every automorphism, i.e. when it is a union of
//! orbits. Everything downstream (arities, transitivity, the quantifier
//! elimination check) works through that equivalence.

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relation::{decode, encode, tuple_count, Relation, MAX_TUPLES};
use crate::structure::FiniteStructure;

/// Default cap on the universe size for automorphism enumeration.
pub const DEFAULT_MAX_UNIVERSE: usize = 8;

/// A bijection of `{0..m-1}`; element `i` maps to `images[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation((0..m).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Precondition(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.0[a]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &a)| i == a)
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn after(&self, first: &Permutation) -> Permutation {
        Permutation(first.0.iter().map(|&a| self.0[a]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &a) in self.0.iter().enumerate() {
            inv[a] = i;
        }
        Permutation(inv)
    }

    /// Image of a tuple index of `M^k`.
    pub fn apply_index(&self, index: usize, scratch: &mut [usize]) -> usize {
        let m = self.0.len();
        decode(m, index, scratch);
        for a in scratch.iter_mut() {
            *a = self.0[*a];
        }
        encode(m, scratch)
    }
}

/// Whether `p` preserves every relation of `s` in both directions.
pub fn is_automorphism(s: &FiniteStructure, p: &Permutation) -> bool {
    p.len() == s.universe() && s.relations().all(|(_, r)| &r.map_elements(p.images()) == r)
}

/// The full automorphism group, enumerated explicitly.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    universe: usize,
    elements: Vec<Permutation>,
    generators: Vec<Permutation>,
}

impl AutomorphismGroup {
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// All elements in lexicographic order of their image arrays.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// A small generating set, chosen greedily in lexicographic order.
    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Identity, inverses and closure. Closure is checked on all pairs when
    /// the group is small, and on generator-by-element products otherwise
    /// (enough, since the generators generate the listed set).
    pub fn check_group_axioms(&self) -> bool {
        if !self.contains(&Permutation::identity(self.universe)) {
            return false;
        }
        if !self.elements.iter().all(|g| self.contains(&g.inverse())) {
            return false;
        }
        if self.elements.len().pow(2) <= 1 << 20 {
            self.elements
                .iter()
                .all(|g| self.elements.iter().all(|h| self.contains(&g.after(h))))
        } else {
            self.generators
                .iter()
                .all(|g| self.elements.iter().all(|h| self.contains(&g.after(h))))
                && closure(&self.generators, self.universe).len() == self.elements.len()
        }
    }
}

fn closure(gens: &[Permutation], m: usize) -> HashSet<Permutation> {
    let id = Permutation::identity(m);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(h) = queue.pop_front() {
        for g in gens {
            let p = g.after(&h);
            if seen.insert(p.clone()) {
                queue.push_back(p);
            }
        }
    }
    seen
}

fn pick_generators(elements: &[Permutation], m: usize) -> Vec<Permutation> {
    let mut gens = Vec::new();
    let mut span = closure(&gens, m);
    for g in elements {
        if !span.contains(g) {
            gens.push(g.clone());
            span = closure(&gens, m);
            if span.len() == elements.len() {
                break;
            }
        }
    }
    gens
}

struct Search<'a> {
    m: usize,
    relations: Vec<&'a Relation>,
    /// new_tuples[r][i]: tuples of relation r's arity over {0..i} that use i
    new_tuples: Vec<Vec<Vec<Vec<usize>>>>,
    colour: Vec<Vec<usize>>,
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Permutation>,
}

impl Search<'_> {
    fn consistent(&self, i: usize) -> bool {
        let mut mapped = Vec::new();
        for (r, rel) in self.relations.iter().enumerate() {
            for t in &self.new_tuples[r][i] {
                mapped.clear();
                mapped.extend(t.iter().map(|&a| self.image[a]));
                if rel.contains(t) != rel.contains(&mapped) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, i: usize) {
        if i == self.m {
            self.found.push(Permutation(self.image.clone()));
            return;
        }
        for b in 0..self.m {
            if self.used[b] || self.colour[i] != self.colour[b] {
                continue;
            }
            self.image[i] = b;
            self.used[b] = true;
            if self.consistent(i) {
                self.run(i + 1);
            }
            self.used[b] = false;
        }
    }
}

/// Per-element counts of occurrences in each relation coordinate; preserved
/// by every automorphism.
fn element_colours(s: &FiniteStructure) -> Vec<Vec<usize>> {
    let m = s.universe();
    let mut colour = vec![Vec::new(); m];
    for (_, rel) in s.relations() {
        let k = rel.arity();
        let mut counts = vec![vec![0usize; k + 1]; m];
        for t in rel.tuples() {
            for (p, &a) in t.iter().enumerate() {
                counts[a][p] += 1;
            }
            if t.iter().all(|&a| a == t[0]) {
                counts[t[0]][k] += 1;
            }
        }
        for (a, c) in counts.into_iter().enumerate() {
            colour[a].extend(c);
        }
    }
    colour
}

/// Enumerate `Aut(s)` by depth-first search over partial images.
pub fn automorphisms_capped(s: &FiniteStructure, max_universe: usize) -> Result<AutomorphismGroup> {
    let m = s.universe();
    if m > max_universe {
        return Err(Error::cap(
            "universe size for automorphism search".to_string(),
            m as u128,
            max_universe as u128,
        ));
    }
    let relations: Vec<&Relation> = s.relations().map(|(_, r)| r).collect();
    let new_tuples = relations
        .iter()
        .map(|rel| {
            let k = rel.arity();
            (0..m)
                .map(|i| {
                    crate::relation::all_tuples(i + 1, k)
                        .filter(|t| t.contains(&i))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut search = Search {
        m,
        relations,
        new_tuples,
        colour: element_colours(s),
        image: vec![0; m],
        used: vec![false; m],
        found: Vec::new(),
    };
    search.run(0);
    let elements = search.found;
    let generators = pick_generators(&elements, m);
    Ok(AutomorphismGroup {
        universe: m,
        elements,
        generators,
    })
}

pub fn automorphisms(s: &FiniteStructure) -> Result<AutomorphismGroup> {
    automorphisms_capped(s, DEFAULT_MAX_UNIVERSE)
}

/// Partition of `M^k` into orbits of the automorphism group.
///
/// Orbit ids are `0..count`, numbered by their lexicographically least
/// tuple, which is also the stored representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    universe: usize,
    arity: usize,
    ids: Vec<u32>,
    representatives: Vec<usize>,
}

impl OrbitPartition {
    pub fn compute(group: &AutomorphismGroup, arity: usize) -> Result<Self> {
        let m = group.universe();
        let len = tuple_count(m, arity)?;
        let mut ids = vec![u32::MAX; len];
        let mut representatives = Vec::new();
        let mut scratch = vec![0; arity];
        let mut stack = Vec::new();
        for start in 0..len {
            if ids[start] != u32::MAX {
                continue;
            }
            let id = representatives.len() as u32;
            representatives.push(start);
            ids[start] = id;
            stack.push(start);
            while let Some(t) = stack.pop() {
                for g in group.generators() {
                    let u = g.apply_index(t, &mut scratch);
                    if ids[u] == u32::MAX {
                        ids[u] = id;
                        stack.push(u);
                    }
                }
            }
        }
        Ok(OrbitPartition {
            universe: m,
            arity,
            ids,
            representatives,
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// Orbit id of every tuple, indexed by tuple index.
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    #[inline]
    pub fn orbit_of_index(&self, index: usize) -> u32 {
        self.ids[index]
    }

    pub fn orbit_of(&self, tuple: &[usize]) -> u32 {
        self.ids[encode(self.universe, tuple)]
    }

    pub fn representative(&self, id: u32) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        decode(self.universe, self.representatives[id as usize], &mut t);
        t
    }

    /// The orbit as a relation.
    pub fn orbit(&self, id: u32) -> Relation {
        let mut r = Relation::empty(self.universe, self.arity).expect("checked on construction");
        for (i, &o) in self.ids.iter().enumerate() {
            if o == id {
                r.set_index(i, true);
            }
        }
        r
    }

    /// Union of the selected orbits.
    pub fn union_of(&self, selected: &[bool]) -> Relation {
        let mut r = Relation::empty(self.universe, self.arity).expect("checked on construction");
        for (i, &o) in self.ids.iter().enumerate() {
            if selected[o as usize] {
                r.set_index(i, true);
            }
        }
        r
    }

    /// Whether `x` is a union of orbits.
    pub fn is_union_of_orbits(&self, x: &Relation) -> bool {
        let mut first: Vec<Option<bool>> = vec![None; self.count()];
        self.ids.iter().enumerate().all(|(i, &o)| {
            let member = x.contains_index(i);
            *first[o as usize].get_or_insert(member) == member
        })
    }
}

/// A structure with its automorphism group and lazily computed orbit
/// partitions. Immutable once built; orbit partitions are cached per arity.
#[derive(Debug)]
pub struct Symmetry<'s> {
    structure: &'s FiniteStructure,
    group: AutomorphismGroup,
    orbits: Vec<OnceLock<OrbitPartition>>,
}

impl<'s> Symmetry<'s> {
    pub fn new(structure: &'s FiniteStructure) -> Result<Self> {
        Self::with_cap(structure, DEFAULT_MAX_UNIVERSE)
    }

    pub fn with_cap(structure: &'s FiniteStructure, max_universe: usize) -> Result<Self> {
        let group = automorphisms_capped(structure, max_universe)?;
        let m = structure.universe();
        let mut max_k = 0;
        while max_k < 32 && (m as u128).pow(max_k as u32 + 1) <= MAX_TUPLES as u128 {
            max_k += 1;
        }
        Ok(Symmetry {
            structure,
            group,
            orbits: (0..=max_k).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn structure(&self) -> &'s FiniteStructure {
        self.structure
    }

    pub fn universe(&self) -> usize {
        self.structure.universe()
    }

    pub fn group(&self) -> &AutomorphismGroup {
        &self.group
    }

    pub fn orbits(&self, arity: usize) -> Result<&OrbitPartition> {
        let slot = match self.orbits.get(arity) {
            Some(slot) => slot,
            None => {
                tuple_count(self.universe(), arity)?;
                return Err(Error::cap(
                    "orbit partition arity".to_string(),
                    arity as u128,
                    (self.orbits.len() - 1) as u128,
                ));
            }
        };
        if let Some(p) = slot.get() {
            return Ok(p);
        }
        let p = OrbitPartition::compute(&self.group, arity)?;
        Ok(slot.get_or_init(|| p))
    }

    /// Invariance of `x` under every automorphism.
    pub fn is_definable(&self, x: &Relation) -> Result<bool> {
        if x.universe() != self.universe() {
            return Err(Error::UniverseMismatch {
                left: self.universe(),
                right: x.universe(),
            });
        }
        let mut scratch = vec![0; x.arity()];
        Ok(self.group.generators().iter().all(|g| {
            x.indices()
                .all(|i| x.contains_index(g.apply_index(i, &mut scratch)))
        }))
    }
}

pub fn orbit_partition(s: &FiniteStructure, arity: usize) -> Result<OrbitPartition> {
    tuple_count(s.universe(), arity)?;
    OrbitPartition::compute(&automorphisms(s)?, arity)
}

pub fn is_definable(s: &FiniteStructure, x: &Relation) -> Result<bool> {
    Symmetry::new(s)?.is_definable(x)
}

//! Dense relations over a finite universe.
//!
//! A [`Relation`] of arity `k` over a universe of size `m` stores one bit per
//! tuple of `M^k`. Tuples are encoded as base-`m` integers with the first
//! coordinate most significant, so index order is lexicographic tuple order.

use std::fmt;

use crate::error::{Error, Result};

/// Largest number of tuples a single relation may span.
pub const MAX_TUPLES: usize = 1 << 27;

/// Number of tuples in `M^k`, rejecting anything above [`MAX_TUPLES`].
pub fn tuple_count(universe: usize, arity: usize) -> Result<usize> {
    let mut count: u128 = 1;
    for _ in 0..arity {
        count = count.saturating_mul(universe as u128);
        if count > MAX_TUPLES as u128 {
            return Err(Error::cap(
                format!("tuple count of M^{arity} with |M| = {universe}"),
                (universe as u128).saturating_pow(arity as u32),
                MAX_TUPLES as u128,
            ));
        }
    }
    Ok(count as usize)
}

/// Encode a tuple as its lexicographic index in `M^k`.
#[inline]
pub fn encode(universe: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * universe + a)
}

/// Decode a lexicographic index into `out` (whose length fixes the arity).
#[inline]
pub fn decode(universe: usize, mut index: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % universe;
        index /= universe;
    }
}

/// Lexicographic enumeration of `M^k` that reuses one buffer.
#[derive(Debug, Clone)]
pub struct Odometer {
    universe: usize,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(universe: usize, arity: usize) -> Self {
        Odometer {
            universe,
            digits: vec![0; arity],
            started: false,
            done: universe == 0 && arity > 0,
        }
    }

    /// Advance to the next tuple; returns `None` once `M^k` is exhausted.
    pub fn next_tuple(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for slot in self.digits.iter_mut().rev() {
            *slot += 1;
            if *slot < self.universe {
                return Some(&self.digits);
            }
            *slot = 0;
        }
        self.done = true;
        None
    }
}

/// All tuples of `M^k` in lexicographic order.
pub fn all_tuples(universe: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut odo = Odometer::new(universe, arity);
    std::iter::from_fn(move || odo.next_tuple().map(<[usize]>::to_vec))
}

/// A `k`-ary relation over `{0..m-1}`, stored as a dense bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    universe: usize,
    arity: usize,
    len: usize,
    words: Vec<u64>,
}

impl Relation {
    /// The empty relation of arity `k`.
    pub fn empty(universe: usize, arity: usize) -> Result<Self> {
        let len = tuple_count(universe, arity)?;
        Ok(Relation {
            universe,
            arity,
            len,
            words: vec![0; len.div_ceil(64)],
        })
    }

    /// `M^k` itself.
    pub fn full(universe: usize, arity: usize) -> Result<Self> {
        Ok(Self::empty(universe, arity)?.complement())
    }

    /// Build a relation from an explicit tuple list; duplicates collapse.
    pub fn from_tuples<I, T>(universe: usize, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut rel = Self::empty(universe, arity)?;
        for t in tuples {
            rel.insert(t.as_ref())?;
        }
        Ok(rel)
    }

    /// Build a relation from its characteristic function.
    pub fn from_fn(universe: usize, arity: usize, mut f: impl FnMut(&[usize]) -> bool) -> Result<Self> {
        let mut rel = Self::empty(universe, arity)?;
        let mut odo = Odometer::new(universe, arity);
        let mut index = 0;
        while let Some(t) = odo.next_tuple() {
            if f(t) {
                rel.set_index(index, true);
            }
            index += 1;
        }
        Ok(rel)
    }

    /// The diagonal `{(a, a)}` of `M^2`.
    pub fn diagonal(universe: usize) -> Result<Self> {
        Self::from_fn(universe, 2, |t| t[0] == t[1])
    }

    /// `{t in M^k : t_i = t_j}`.
    pub fn coordinate_equality(universe: usize, arity: usize, i: usize, j: usize) -> Result<Self> {
        if i >= arity || j >= arity {
            return Err(Error::InvalidCoordinates(format!(
                "positions {i}, {j} outside arity {arity}"
            )));
        }
        Self::from_fn(universe, arity, |t| t[i] == t[j])
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of tuples in `M^k`.
    pub fn space_len(&self) -> usize {
        self.len
    }

    /// Number of tuples in the relation.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::TupleLength {
                expected: self.arity,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&a| a >= self.universe) {
            return Err(Error::ElementOutOfRange {
                element: bad,
                universe: self.universe,
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, tuple: &[usize]) -> Result<()> {
        self.check_tuple(tuple)?;
        let index = encode(self.universe, tuple);
        self.set_index(index, true);
        Ok(())
    }

    /// Membership test. Panics if the tuple has the wrong length or an
    /// out-of-range element.
    pub fn contains(&self, tuple: &[usize]) -> bool {
        assert_eq!(tuple.len(), self.arity, "tuple length");
        debug_assert!(tuple.iter().all(|&a| a < self.universe));
        self.contains_index(encode(self.universe, tuple))
    }

    /// Fallible membership test.
    pub fn try_contains(&self, tuple: &[usize]) -> Result<bool> {
        self.check_tuple(tuple)?;
        Ok(self.contains_index(encode(self.universe, tuple)))
    }

    #[inline]
    pub fn contains_index(&self, index: usize) -> bool {
        self.words[index / 64] >> (index % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_index(&mut self, index: usize, value: bool) {
        let (w, b) = (index / 64, index % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    /// Indices of member tuples, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// Member tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.indices().map(move |i| {
            let mut t = vec![0; self.arity];
            decode(self.universe, i, &mut t);
            t
        })
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn complement(&self) -> Relation {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    fn same_space(&self, other: &Relation) -> Result<()> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch {
                left: self.universe,
                right: other.universe,
            });
        }
        if self.arity != other.arity {
            return Err(Error::TupleLength {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    fn zip_words(&self, other: &Relation, op: impl Fn(u64, u64) -> u64) -> Result<Relation> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a = op(*a, *b);
        }
        out.mask_tail();
        Ok(out)
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &Relation) -> Result<Relation> {
        self.zip_words(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &Relation) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    pub fn is_disjoint(&self, other: &Relation) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0))
    }

    /// Substitution along a coordinate selection: the result has arity
    /// `target_arity` and contains `t` iff `(t[p_0], .., t[p_{k-1}])` is in
    /// `self`. Positions may repeat and need not cover the target.
    pub fn pullback(&self, target_arity: usize, positions: &[usize]) -> Result<Relation> {
        if positions.len() != self.arity {
            return Err(Error::InvalidCoordinates(format!(
                "{} positions for a relation of arity {}",
                positions.len(),
                self.arity
            )));
        }
        if let Some(&p) = positions.iter().find(|&&p| p >= target_arity) {
            return Err(Error::InvalidCoordinates(format!(
                "position {p} outside target arity {target_arity}"
            )));
        }
        let mut out = Relation::empty(self.universe, target_arity)?;
        let m = self.universe;
        // weights[j] = contribution of target coordinate j to the source index
        let mut weights = vec![0usize; target_arity];
        for (i, &p) in positions.iter().enumerate() {
            weights[p] += m.pow((self.arity - 1 - i) as u32);
        }
        let mut odo = Odometer::new(m, target_arity);
        let mut index = 0;
        while let Some(t) = odo.next_tuple() {
            let src: usize = t.iter().zip(&weights).map(|(a, w)| a * w).sum();
            if self.contains_index(src) {
                out.set_index(index, true);
            }
            index += 1;
        }
        Ok(out)
    }

    /// Existential projection onto the given positions, in the given order.
    pub(crate) fn project_onto(&self, positions: &[usize]) -> Result<Relation> {
        if let Some(&p) = positions.iter().find(|&&p| p >= self.arity) {
            return Err(Error::InvalidCoordinates(format!(
                "position {p} outside arity {}",
                self.arity
            )));
        }
        let mut out = Relation::empty(self.universe, positions.len())?;
        let mut t = vec![0; self.arity];
        let mut image = vec![0; positions.len()];
        for i in self.indices() {
            decode(self.universe, i, &mut t);
            for (slot, &p) in image.iter_mut().zip(positions) {
                *slot = t[p];
            }
            out.set_index(encode(self.universe, &image), true);
        }
        Ok(out)
    }

    /// Apply an element map pointwise to every tuple.
    pub fn map_elements(&self, map: &[usize]) -> Relation {
        assert_eq!(map.len(), self.universe, "element map length");
        let mut out = Relation::empty(self.universe, self.arity).expect("same space");
        let mut t = vec![0; self.arity];
        for i in self.indices() {
            decode(self.universe, i, &mut t);
            for a in t.iter_mut() {
                *a = map[*a];
            }
            out.set_index(encode(self.universe, &t), true);
        }
        out
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation(m={}, k={}) ", self.universe, self.arity)?;
        f.debug_set().entries(self.tuples()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_relations(m: usize, k: usize) -> Vec<Relation> {
        let n = m.pow(k as u32);
        (0u64..1 << n)
            .map(|mask| {
                let mut r = Relation::empty(m, k).unwrap();
                for i in 0..n {
                    r.set_index(i, mask >> i & 1 == 1);
                }
                r
            })
            .collect()
    }

    #[test]
    fn from_tuples_collapses_duplicates() {
        let r = Relation::from_tuples(2, 2, [[0, 1], [1, 0]]).unwrap();
        assert_eq!(r.count(), 2);
        let r = Relation::from_tuples(2, 2, [[0, 1], [0, 1]]).unwrap();
        assert_eq!(r.count(), 1);
        assert!(r.contains(&[0, 1]));
        assert!(!r.contains(&[1, 0]));
    }

    #[test]
    fn from_tuples_rejects_bad_input() {
        assert_eq!(
            Relation::from_tuples(3, 2, [vec![0, 5]]).unwrap_err(),
            Error::ElementOutOfRange { element: 5, universe: 3 }
        );
        assert_eq!(
            Relation::from_tuples(3, 2, [vec![0, 1, 2]]).unwrap_err(),
            Error::TupleLength { expected: 2, found: 3 }
        );
    }

    #[test]
    fn nullary_relations() {
        let e = Relation::empty(3, 0).unwrap();
        assert_eq!(e.space_len(), 1);
        assert!(e.is_empty());
        let f = e.complement();
        assert!(f.contains(&[]));
        assert_eq!(f.count(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(Relation::empty(2, 27).is_ok());
        let err = Relation::empty(2, 28).unwrap_err();
        assert!(err.is_cap());
        assert!(tuple_count(20, 20).unwrap_err().is_cap());
    }

    #[test]
    fn tuples_come_out_in_lex_order() {
        let r = Relation::from_tuples(3, 2, [[2, 0], [0, 2], [1, 1]]).unwrap();
        let ts: Vec<_> = r.tuples().collect();
        assert_eq!(ts, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn membership_is_total() {
        let r = Relation::from_tuples(3, 2, [[2, 0], [1, 1]]).unwrap();
        let c = r.complement();
        for t in all_tuples(3, 2) {
            assert!(r.contains(&t) ^ c.contains(&t));
        }
    }

    #[test]
    fn boolean_algebra_laws_exhaustive() {
        for (m, k) in [(1, 3), (2, 1), (2, 2), (3, 1), (3, 2), (2, 3)] {
            let rels = all_relations(m, k);
            // sample pairs and triples deterministically to keep this fast
            let step = (rels.len() / 16).max(1);
            let picks: Vec<_> = rels.iter().step_by(step).collect();
            let full = Relation::full(m, k).unwrap();
            let empty = Relation::empty(m, k).unwrap();
            for a in &picks {
                assert_eq!(&a.complement().complement(), *a);
                assert_eq!(a.union(&a.complement()).unwrap(), full);
                assert_eq!(a.intersection(&a.complement()).unwrap(), empty);
                for b in &picks {
                    let lhs = a.union(b).unwrap().complement();
                    let rhs = a.complement().intersection(&b.complement()).unwrap();
                    assert_eq!(lhs, rhs, "De Morgan");
                    assert_eq!(a.union(b).unwrap(), b.union(a).unwrap());
                    for c in &picks {
                        let l = a.intersection(&b.union(c).unwrap()).unwrap();
                        let r = a
                            .intersection(b)
                            .unwrap()
                            .union(&a.intersection(c).unwrap())
                            .unwrap();
                        assert_eq!(l, r, "distributivity");
                    }
                }
            }
        }
    }

    #[test]
    fn pullback_with_repeated_positions() {
        let r = Relation::from_tuples(3, 2, [[0, 1], [2, 2]]).unwrap();
        // R(x, x) over context (x, y)
        let p = r.pullback(2, &[0, 0]).unwrap();
        let expected = Relation::from_fn(3, 2, |t| t[0] == 2).unwrap();
        assert_eq!(p, expected);
        // R(y, x)
        let p = r.pullback(2, &[1, 0]).unwrap();
        assert_eq!(p, Relation::from_tuples(3, 2, [[1, 0], [2, 2]]).unwrap());
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let a = Relation::empty(2, 1).unwrap();
        let b = Relation::empty(3, 1).unwrap();
        assert!(matches!(a.union(&b), Err(Error::UniverseMismatch { .. })));
    }
}

//! Computable codings shared by the rest of the crate: Cantor pairing, the
//! bit-vector numbering of finite sets, finite sequences and their
//! length-lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cantor pairing `(x + y)(x + y + 1)/2 + y`.
pub fn pair(x: u64, y: u64) -> Result<u64> {
    let sum = x as u128 + y as u128;
    let value = sum.checked_mul(sum + 1).map(|t| t / 2 + y as u128);
    value.and_then(|v| u64::try_from(v).ok()).ok_or(Error::Overflow("pair"))
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    // w is the largest integer with w(w+1)/2 <= z.
    let z = z as u128;
    let mut w = isqrt(8 * z + 1).saturating_sub(1) / 2;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    let x = w - y;
    (x as u64, y as u64)
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// A finite set of naturals.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteSet(BTreeSet<u64>);

impl FiniteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: u64) -> Self {
        Self(BTreeSet::from([x]))
    }

    pub fn insert(&mut self, x: u64) -> bool {
        self.0.insert(x)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn least(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn greatest(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        Self(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &FiniteSet) -> FiniteSet {
        Self(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &FiniteSet) -> FiniteSet {
        Self(self.0.difference(&other.0).copied().collect())
    }

    pub fn symmetric_difference(&self, other: &FiniteSet) -> FiniteSet {
        Self(self.0.symmetric_difference(&other.0).copied().collect())
    }

    /// Elements in `[lo, hi)`.
    pub fn restrict(&self, lo: u64, hi: u64) -> FiniteSet {
        if lo >= hi {
            return FiniteSet::new();
        }
        Self(self.0.range(lo..hi).copied().collect())
    }

    /// Elements strictly below `bound`.
    pub fn below(&self, bound: u64) -> FiniteSet {
        self.restrict(0, bound)
    }

    /// Elements at or above `lo`.
    pub fn at_least(&self, lo: u64) -> FiniteSet {
        Self(self.0.range(lo..).copied().collect())
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// The `n` with `D_n = self` under the bit-vector numbering.
    pub fn canonical_index(&self) -> Result<u64> {
        finite_set_encode(self)
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<u64> for FiniteSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Extend<u64> for FiniteSet {
    fn extend<I: IntoIterator<Item = u64>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl<const N: usize> From<[u64; N]> for FiniteSet {
    fn from(items: [u64; N]) -> Self {
        items.into_iter().collect()
    }
}

/// `D_n`: the positions of the one-bits of `n`.
pub fn finite_set_decode(n: u64) -> FiniteSet {
    (0..64).filter(|bit| n >> bit & 1 == 1).collect()
}

/// Inverse of [`finite_set_decode`]; sets containing an element >= 64 have
/// no machine-word index.
pub fn finite_set_encode(set: &FiniteSet) -> Result<u64> {
    set.iter().try_fold(0u64, |acc, x| {
        if x >= 64 {
            Err(Error::Overflow("finite set index"))
        } else {
            Ok(acc | 1 << x)
        }
    })
}

/// A finite string of naturals. Ordered length-first, then lexicographically.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence(Vec<u64>);

impl Sequence {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[u64] {
        &self.0
    }

    pub fn push(&mut self, x: u64) {
        self.0.push(x)
    }

    pub fn pop(&mut self) -> Option<u64> {
        self.0.pop()
    }

    /// Appends `count` copies of `x`.
    pub fn extend_with(&mut self, x: u64, count: usize) {
        self.0.extend(std::iter::repeat_n(x, count))
    }

    pub fn pushed(&self, x: u64) -> Sequence {
        let mut next = self.clone();
        next.push(x);
        next
    }

    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut items = self.0.clone();
        items.extend_from_slice(&other.0);
        Sequence(items)
    }

    /// The initial segment of length `n` (the whole sequence if shorter).
    pub fn prefix(&self, n: usize) -> Sequence {
        Sequence(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `self ⪯ other`.
    pub fn is_prefix_of(&self, other: &Sequence) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn content(&self) -> FiniteSet {
        content(self)
    }

    pub fn max_item(&self) -> Option<u64> {
        self.0.iter().copied().max()
    }

    pub fn min_item(&self) -> Option<u64> {
        self.0.iter().copied().min()
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u64>> for Sequence {
    fn from(items: Vec<u64>) -> Self {
        Self(items)
    }
}

impl<const N: usize> From<[u64; N]> for Sequence {
    fn from(items: [u64; N]) -> Self {
        Self(items.to_vec())
    }
}

impl FromIterator<u64> for Sequence {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Ord for Sequence {
    fn cmp(&self, other: &Self) -> Ordering {
        seq_compare(self, other)
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn content(sigma: &Sequence) -> FiniteSet {
    sigma.0.iter().copied().collect()
}

/// Length-lexicographic order.
pub fn seq_compare(a: &Sequence, b: &Sequence) -> Ordering {
    a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        assert_eq!(pair(0, 0).unwrap(), 0);
        assert_eq!(pair(1, 2).unwrap(), 8);
        assert_eq!(unpair(pair(7, 3).unwrap()), (7, 3));
        assert_eq!(unpair(0), (0, 0));
        assert_eq!(unpair(8), (1, 2));
    }

    #[test]
    fn pair_is_a_bijection_on_an_initial_square() {
        for x in 0..50 {
            for y in 0..50 {
                assert_eq!(unpair(pair(x, y).unwrap()), (x, y));
            }
        }
        // every code below pair(50, 0) is hit exactly once by the triangle x + y < 50
        let mut hit = vec![false; pair(50, 0).unwrap() as usize];
        for x in 0..50u64 {
            for y in 0..50 - x {
                let z = pair(x, y).unwrap() as usize;
                assert!(!hit[z]);
                hit[z] = true;
            }
        }
        assert!(hit.into_iter().all(|h| h));
    }

    #[test]
    fn pair_is_strictly_monotone() {
        for x in 0..40 {
            for y in 0..40 {
                assert!(pair(x, y).unwrap() < pair(x + 1, y).unwrap());
                assert!(pair(x, y).unwrap() < pair(x, y + 1).unwrap());
            }
        }
    }

    #[test]
    fn pair_reports_overflow() {
        assert_eq!(pair(u64::MAX, 1), Err(Error::Overflow("pair")));
        let big = 1u64 << 33;
        assert!(pair(big, big).is_err());
        let (x, y) = unpair(u64::MAX);
        assert_eq!(pair(x, y).unwrap(), u64::MAX);
    }

    #[test]
    fn finite_set_examples() {
        assert!(finite_set_decode(0).is_empty());
        assert_eq!(finite_set_decode(5), FiniteSet::from([0, 2]));
        assert_eq!(finite_set_decode(6), FiniteSet::from([1, 2]));
        assert_eq!(finite_set_encode(&FiniteSet::from([1, 2])).unwrap(), 6);
        assert!(finite_set_encode(&FiniteSet::from([64])).is_err());
    }

    #[test]
    fn content_examples() {
        assert_eq!(content(&Sequence::from([3, 1, 3])), FiniteSet::from([1, 3]));
        assert!(content(&Sequence::empty()).is_empty());
        assert_eq!(content(&Sequence::from([4, 5, 7])), FiniteSet::from([4, 5, 7]));
    }

    #[test]
    fn length_lex_examples() {
        let cmp = |a: &[u64], b: &[u64]| seq_compare(&Sequence::from(a.to_vec()), &Sequence::from(b.to_vec()));
        assert_eq!(cmp(&[], &[0]), Ordering::Less);
        assert_eq!(cmp(&[2], &[1, 0]), Ordering::Less);
        assert_eq!(cmp(&[1, 3], &[1, 4]), Ordering::Less);
        assert_eq!(cmp(&[1, 3], &[1, 3]), Ordering::Equal);
    }

    #[test]
    fn prefix_relation() {
        let a = Sequence::from([1, 2]);
        let b = Sequence::from([1, 2, 3]);
        assert!(a.is_prefix_of(&b));
        assert!(a.is_prefix_of(&a));
        assert!(!b.is_prefix_of(&a));
        assert!(Sequence::empty().is_prefix_of(&a));
        assert_eq!(b.prefix(2), a);
    }
}

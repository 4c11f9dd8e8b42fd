//! Multi-indices and the `(k2, I, J)` term key of the graded algebras.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use smallvec::SmallVec;

use crate::scalar::{factorial, falling_factorial};

/// Exponent vector `I = (i_1, ..., i_n)` of a monomial `y^I`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zeros(n);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(entries: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: u32) {
        self.0[i] = v;
    }

    /// `|I|`
    pub fn abs(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `I!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e)).product()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `self - other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// Componentwise maximum.
    pub fn componentwise_max(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Componentwise minimum.
    pub fn componentwise_min(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    /// `Π_i i_i (i_i - 1) ... (i_i - a_i + 1)`, the coefficient produced by `∂^α y^I`.
    pub fn falling(&self, alpha: &MultiIndex) -> BigInt {
        self.0
            .iter()
            .zip(alpha.0.iter())
            .map(|(&i, &a)| falling_factorial(i, a))
            .fold(BigInt::one(), |acc, x| acc * x)
    }

    /// All `α` with `0 ≤ α ≤ self` componentwise, in lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zeros(self.len())];
        for (pos, &bound) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (bound as usize + 1));
            for base in &out {
                for v in 0..=bound {
                    let mut m = base.clone();
                    m.0[pos] = v;
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of length `n` with `|I| = total`.
    pub fn of_total(n: usize, total: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, pos: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
            if pos + 1 == n {
                cur.0[pos] = left;
                out.push(cur.clone());
                return;
            }
            for v in (0..=left).rev() {
                cur.0[pos] = v;
                rec(n, pos + 1, left - v, cur, out);
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if total == 0 {
                out.push(MultiIndex::zeros(0));
            }
            return out;
        }
        rec(n, 0, total, &mut MultiIndex::zeros(n), &mut out);
        out.sort();
        out
    }

    /// All multi-indices of length `n` with `|I| ≤ max_total`.
    pub fn up_to(n: usize, max_total: u32) -> Vec<MultiIndex> {
        (0..=max_total).flat_map(|t| Self::of_total(n, t)).collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Key of a term `ℏ^{k2/2} y^I ȳ^J`. The derived order (k2, then I, then J)
/// is the canonical iteration order of every series.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TermKey {
    pub k2: i32,
    pub i: MultiIndex,
    pub j: MultiIndex,
}

impl TermKey {
    pub fn new(k2: i32, i: MultiIndex, j: MultiIndex) -> Self {
        TermKey { k2, i, j }
    }

    pub fn constant(n: usize) -> Self {
        TermKey::new(0, MultiIndex::zeros(n), MultiIndex::zeros(n))
    }

    /// Filtration degree `2k + |I| + |J|`.
    pub fn degree(&self) -> i32 {
        self.k2 + self.i.abs() as i32 + self.j.abs() as i32
    }

    pub fn is_constant_in_y(&self) -> bool {
        self.i.is_zero() && self.j.is_zero()
    }

    pub fn conjugate(&self) -> TermKey {
        TermKey::new(self.k2, self.j.clone(), self.i.clone())
    }
}

/// Filtration degree of `ℏ^k y^I ȳ^J` given `k2 = 2k`.
pub fn total_degree(k2: i32, i: &MultiIndex, j: &MultiIndex) -> i32 {
    k2 + i.abs() as i32 + j.abs() as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::from_slice(v)
    }

    #[test]
    fn total_degree_examples() {
        assert_eq!(total_degree(0, &mi(&[]), &mi(&[])), 0);
        assert_eq!(total_degree(2, &mi(&[1]), &mi(&[1])), 4);
        assert_eq!(total_degree(-2, &mi(&[3]), &mi(&[0])), 1);
    }

    #[test]
    fn sub_indices_enumerates_box() {
        let subs = mi(&[2, 1]).sub_indices();
        assert_eq!(subs.len(), 6);
        assert!(subs.iter().all(|a| a.le(&mi(&[2, 1]))));
    }

    #[test]
    fn of_total_counts() {
        assert_eq!(MultiIndex::of_total(3, 2).len(), 6);
        assert_eq!(MultiIndex::up_to(2, 2).len(), 6);
    }

    #[test]
    fn falling_and_factorial() {
        assert_eq!(mi(&[3, 2]).factorial(), BigInt::from(12));
        assert_eq!(mi(&[3, 2]).falling(&mi(&[2, 1])), BigInt::from(12));
        assert_eq!(mi(&[1]).falling(&mi(&[2])), BigInt::from(0));
    }
}

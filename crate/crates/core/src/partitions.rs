//! Partition combinatorics: half-integer index sets, Frobenius coordinates,
//! hooks and contents, rim hooks, and deterministic enumeration.
//!
//! A partition `λ` is encoded as the point configuration
//! `S(λ) = {λ_i - i + 1/2 : i ≥ 1} ⊂ ℤ + 1/2`, which agrees with
//! `{-1/2, -3/2, ...}` far enough down.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` that [`enumerate_partitions`] materializes by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 80;

/// An element of `ℤ + 1/2`, stored as its (odd) doubled value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    /// Builds `twice / 2`; `twice` must be odd.
    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice.rem_euclid(2) == 1 {
            Ok(HalfInt { twice })
        } else {
            Err(Error::parse(format!(
                "{twice} is even; half-integers are passed as odd doubled values"
            )))
        }
    }

    /// `n + 1/2`.
    pub const fn plus_half(n: i64) -> Self {
        HalfInt { twice: 2 * n + 1 }
    }

    /// `n - 1/2`.
    pub const fn minus_half(n: i64) -> Self {
        HalfInt { twice: 2 * n - 1 }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_positive(self) -> bool {
        self.twice > 0
    }

    /// `self + n` for an integer `n`.
    pub const fn shift(self, n: i64) -> Self {
        HalfInt { twice: self.twice + 2 * n }
    }

    /// `self + other`, which is an integer.
    pub const fn add_half(self, other: HalfInt) -> i64 {
        (self.twice + other.twice) / 2
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl Ord for HalfInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.twice.cmp(&other.twice)
    }
}

impl PartialOrd for HalfInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<i64> for HalfInt {
    type Error = Error;
    fn try_from(twice: i64) -> Result<Self> {
        HalfInt::from_twice(twice)
    }
}

impl From<HalfInt> for i64 {
    fn from(h: HalfInt) -> i64 {
        h.twice
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.twice)
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::parse("partition parts must be positive"));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::parse("partition parts must be weakly decreasing"));
        }
        Ok(Partition { parts })
    }

    /// Drops zero parts and sorts; never fails.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `λ_i` with 1-based `i`; zero past the last part.
    pub fn part(&self, i: usize) -> usize {
        debug_assert!(i >= 1, "rows are 1-based");
        i.checked_sub(1)
            .and_then(|j| self.parts.get(j))
            .copied()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }

    /// Diagram containment `μ ⊆ λ` (with `self = λ`).
    pub fn contains_diagram(&self, mu: &Partition) -> bool {
        mu.len() <= self.len() && mu.parts.iter().zip(&self.parts).all(|(m, l)| m <= l)
    }

    /// Length of the main diagonal (the Durfee square side).
    pub fn diagonal(&self) -> usize {
        self.parts
            .iter()
            .enumerate()
            .take_while(|(i, &p)| p > *i)
            .count()
    }

    /// The element `λ_i - i + 1/2` of `S(λ)` for 1-based `i`.
    pub fn s_element(&self, i: usize) -> HalfInt {
        HalfInt::plus_half(self.part(i) as i64 - i as i64)
    }

    /// The first `depth` elements of `S(λ)`, strictly decreasing.
    pub fn s_set_prefix(&self, depth: usize) -> Vec<HalfInt> {
        (1..=depth).map(|i| self.s_element(i)).collect()
    }

    /// Membership `x ∈ S(λ)`.
    pub fn contains(&self, x: HalfInt) -> bool {
        // x = -i + 1/2 for this row index i; rows past the last part are in the tail.
        let tail_row = (1 - x.twice()) / 2;
        if tail_row > self.len() as i64 {
            return true;
        }
        self.parts
            .iter()
            .enumerate()
            .any(|(i, &p)| HalfInt::plus_half(p as i64 - i as i64 - 1) == x)
    }

    /// Modified Frobenius coordinates: `S(λ)₊` and the negative holes `S(λ)₋`.
    pub fn frobenius(&self) -> FrobeniusCoords {
        let d = self.diagonal();
        let conj = self.conjugate();
        let plus = (1..=d).map(|i| self.s_element(i)).collect();
        let minus = (1..=d).map(|j| -conj.s_element(j)).collect();
        FrobeniusCoords { plus, minus }
    }

    /// `(hook, content)` per cell, row by row.
    pub fn hooks_and_contents(&self) -> Vec<(usize, i64)> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.size());
        for (r, &len) in self.parts.iter().enumerate() {
            for c in 0..len {
                let arm = len - c - 1;
                let leg = conj.parts[c] - r - 1;
                out.push((arm + leg + 1, c as i64 - r as i64));
            }
        }
        out
    }

    /// `dim λ = |λ|! / Π h(□)`, the number of standard Young tableaux.
    pub fn dimension(&self) -> BigUint {
        let mut num = BigUint::one();
        for k in 2..=self.size() {
            num *= k;
        }
        let den = self
            .hooks_and_contents()
            .iter()
            .fold(BigUint::one(), |acc, &(h, _)| acc * h);
        num / den
    }

    fn from_s_set(set: &[HalfInt]) -> Partition {
        let mut sorted = set.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let parts = sorted
            .iter()
            .enumerate()
            .map(|(i, x)| (x.twice() - 1) / 2 + i as i64 + 1)
            .take_while(|&p| p > 0)
            .map(|p| p as usize)
            .collect();
        Partition { parts }
    }

    /// All `λ ⊃ self` with `λ/self` a rim hook of size `n`, paired with the
    /// hook height (rows occupied minus one). Ordered by decreasing `λ₁`.
    pub fn rim_hooks(&self, n: usize) -> Vec<(Partition, usize)> {
        assert!(n >= 1, "rim hook size must be positive");
        let s = self.s_set_prefix(self.len() + n);
        let n = n as i64;
        let mut out = Vec::new();
        for (idx, &x) in s.iter().enumerate() {
            let target = x.shift(n);
            if self.contains(target) {
                continue;
            }
            // Elements strictly between x and x+n all sit before idx in `s`.
            let height = s[..idx].iter().filter(|&&y| y < target).count();
            let mut moved = s.clone();
            moved[idx] = target;
            out.push((Partition::from_s_set(&moved), height));
        }
        out
    }

    /// All `μ ⊂ self` with `self/μ` a rim hook of size `n`, with heights.
    pub fn removable_rim_hooks(&self, n: usize) -> Vec<(Partition, usize)> {
        assert!(n >= 1, "rim hook size must be positive");
        let s = self.s_set_prefix(self.len());
        let n = n as i64;
        let mut out = Vec::new();
        for (idx, &x) in s.iter().enumerate() {
            let target = x.shift(-n);
            if self.contains(target) {
                continue;
            }
            let between = s[idx + 1..].iter().filter(|&&y| y > target).count();
            let mut moved = s.clone();
            moved[idx] = target;
            out.push((Partition::from_s_set(&moved), between));
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Positive coordinates `a_i = λ_i - i + 1/2` and negated leg coordinates
/// `-(λ'_j - j + 1/2)`, both listed from the diagonal outward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusCoords {
    pub plus: Vec<HalfInt>,
    pub minus: Vec<HalfInt>,
}

impl FrobeniusCoords {
    pub fn contains(&self, x: HalfInt) -> bool {
        if x.is_positive() {
            self.plus.contains(&x)
        } else {
            self.minus.contains(&x)
        }
    }

    pub fn contains_all(&self, xs: &[HalfInt]) -> bool {
        xs.iter().all(|&x| self.contains(x))
    }
}

/// Streams the partitions of `n` in decreasing lexicographic order,
/// starting from `(n)` and ending at `(1, ..., 1)`.
#[derive(Clone, Debug)]
pub struct PartitionIter {
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl PartitionIter {
    pub fn new(n: usize) -> Self {
        let current = if n == 0 { Vec::new() } else { vec![n] };
        PartitionIter { current, started: false, done: false }
    }

    /// Partitions of `n` whose largest part is exactly `k`; one chunk of the
    /// deterministic split used by parallel oracle sums.
    pub fn with_largest_part(n: usize, k: usize) -> impl Iterator<Item = Partition> {
        let valid = (n == 0 && k == 0) || (k >= 1 && k <= n);
        let rest = n.saturating_sub(k);
        PartitionIter::new(rest)
            .filter(move |p| valid && p.part(1) <= k)
            .map(move |p| {
                let mut parts = Vec::with_capacity(p.len() + 1);
                if k > 0 {
                    parts.push(k);
                }
                parts.extend_from_slice(p.parts());
                Partition { parts }
            })
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Partition { parts: self.current.clone() });
        }
        // Rightmost part greater than one.
        let Some(pos) = self.current.iter().rposition(|&p| p > 1) else {
            self.done = true;
            return None;
        };
        let ones = self.current.len() - pos - 1;
        let value = self.current[pos] - 1;
        self.current.truncate(pos);
        let mut remaining = value + 1 + ones;
        while remaining > 0 {
            let take = remaining.min(value);
            self.current.push(take);
            remaining -= take;
        }
        Some(Partition { parts: self.current.clone() })
    }
}

/// Every partition of `n` exactly once, in decreasing lexicographic order.
///
/// Panics if `n` exceeds [`DEFAULT_ENUMERATION_LIMIT`]; use
/// [`PartitionIter`] directly to stream larger sizes.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    assert!(
        n <= DEFAULT_ENUMERATION_LIMIT,
        "enumeration of partitions of {n} exceeds the limit {DEFAULT_ENUMERATION_LIMIT}"
    );
    PartitionIter::new(n).collect()
}

/// All partitions of size `0..=n`, by size then decreasing lexicographic order.
pub fn partitions_up_to(n: usize) -> impl Iterator<Item = Partition> {
    (0..=n).flat_map(PartitionIter::new)
}

/// `p(n)` for `n ≤ nmax` by Euler's pentagonal recurrence.
pub fn partition_counts(nmax: usize) -> Vec<u128> {
    let mut p = vec![0u128; nmax + 1];
    p[0] = 1;
    for n in 1..=nmax {
        let mut acc: i128 = 0;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[n - g1] as i128;
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                acc += sign * p[n - g2] as i128;
            }
        }
        p[n] = acc as u128;
    }
    p
}

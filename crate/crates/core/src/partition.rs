//! Integer partitions and multiplicity vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
///
/// Constructors sort their input, so two partitions compare equal exactly
/// when they have the same multiset of parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition from parts in any order. Zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero part in {parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    /// Like [`Partition::new`] but silently drops zero parts.
    pub fn from_parts_dropping_zeros(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// The partition `(1, …, 1)` of `n`.
    pub fn ones(n: usize) -> Self {
        Partition(vec![1; n])
    }

    /// The one-part partition `(n)`; empty when `n == 0`.
    pub fn single(n: usize) -> Self {
        if n == 0 {
            Partition(Vec::new())
        } else {
            Partition(vec![n])
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// `k`-th part (0-based), or 0 past the end.
    pub fn part(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    /// The conjugate partition: its `k`-th part counts the parts `>= k`.
    pub fn dual(&self) -> Partition {
        let largest = self.largest();
        let mut out = Vec::with_capacity(largest);
        for k in 1..=largest {
            out.push(self.0.iter().take_while(|&&p| p >= k).count());
        }
        Partition(out)
    }

    /// Number of parts equal to `size`.
    pub fn count_of(&self, size: usize) -> usize {
        self.0.iter().filter(|&&p| p == size).count()
    }

    /// All partitions of `n` in reverse lexicographic order.
    pub fn all_of(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(remaining: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition(current.clone()));
                return;
            }
            for part in (1..=max.min(remaining)).rev() {
                current.push(part);
                rec(remaining - part, part, current, out);
                current.pop();
            }
        }
        rec(n, n, &mut current, &mut out);
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
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Dual (conjugate) of a partition.
pub fn dual_partition(p: &Partition) -> Partition {
    p.dual()
}

/// Eigenvalue multiplicities of a diagonalizable class, sorted weakly
/// decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiplicityVector(Partition);

impl MultiplicityVector {
    pub fn new(components: Vec<usize>) -> Result<Self> {
        Partition::new(components).map(MultiplicityVector)
    }

    pub fn components(&self) -> &[usize] {
        self.0.parts()
    }

    /// Total multiplicity, i.e. the matrix size.
    pub fn length(&self) -> usize {
        self.0.size()
    }

    pub fn largest(&self) -> usize {
        self.0.largest()
    }

    pub fn as_partition(&self) -> &Partition {
        &self.0
    }
}

impl From<Partition> for MultiplicityVector {
    fn from(p: Partition) -> Self {
        MultiplicityVector(p)
    }
}

impl fmt::Display for MultiplicityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dual_examples() {
        assert_eq!(p(&[4, 3, 2]).dual(), p(&[3, 3, 2, 1]));
        assert_eq!(p(&[3, 1]).dual(), p(&[2, 1, 1]));
        assert_eq!(p(&[1]).dual(), p(&[1]));
        assert_eq!(p(&[5]).dual(), Partition::ones(5));
        assert_eq!(Partition::default().dual(), Partition::default());
    }

    #[test]
    fn constructor_normalizes_and_rejects_zero() {
        assert_eq!(p(&[1, 3, 2]).parts(), &[3, 2, 1]);
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(Partition::from_parts_dropping_zeros(vec![0, 2, 0, 3]).parts(), &[3, 2]);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10).map(|n| Partition::all_of(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn dual_is_involution_exhaustive_to_20() {
        for n in 0..=20 {
            for q in Partition::all_of(n) {
                assert_eq!(q.dual().dual(), q);
                assert_eq!(q.dual().size(), n);
            }
        }
    }

    #[test]
    fn serde_rejects_zero_parts() {
        assert!(serde_json::from_str::<Partition>("[2,0,1]").is_err());
        let q: Partition = serde_json::from_str("[1,2,2]").unwrap();
        assert_eq!(q.parts(), &[2, 2, 1]);
    }
}

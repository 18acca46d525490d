//! Closure order on nilpotent orbits, the operation `(s, l)` and chains of
//! such operations.
//!
//! Partitions here may carry explicit zero blocks, so that bumping the
//! smallest blocks can create new ones.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Weakly decreasing block sizes, zeros allowed at the tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaddedPartition {
    parts: Vec<usize>,
}

impl PaddedPartition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        PaddedPartition { parts }
    }

    /// `p` followed by zero blocks up to `block_count` entries.
    pub fn padded(p: &Partition, block_count: usize) -> Self {
        let mut parts = p.parts().to_vec();
        parts.resize(block_count.max(parts.len()), 0);
        PaddedPartition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn block_count(&self) -> usize {
        self.parts.len()
    }

    pub fn pad_to(&self, block_count: usize) -> Self {
        let mut parts = self.parts.clone();
        parts.resize(block_count.max(parts.len()), 0);
        PaddedPartition { parts }
    }

    pub fn without_zeros(&self) -> Partition {
        Partition::from_parts_dropping_zeros(self.parts.clone())
    }
}

impl From<Partition> for PaddedPartition {
    fn from(p: Partition) -> Self {
        PaddedPartition { parts: p.into_parts() }
    }
}

impl From<&Partition> for PaddedPartition {
    fn from(p: &Partition) -> Self {
        PaddedPartition { parts: p.parts().to_vec() }
    }
}

impl fmt::Display for PaddedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Replace blocks `s` and `l` by `s + 1` and `l − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SLOperation {
    pub s: usize,
    pub l: usize,
}

impl fmt::Display for SLOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.l)
    }
}

/// Ranks of the powers `N, N², …` of a nilpotent matrix with these blocks,
/// up to and including the first zero.
pub fn rank_sequence(p: &PaddedPartition) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 1.. {
        let rho: usize = p.parts.iter().map(|&b| b.saturating_sub(i)).sum();
        out.push(rho);
        if rho == 0 {
            break;
        }
    }
    out
}

/// Whether the orbit of `p1` lies in the closure of the orbit of `p2`.
pub fn closure_leq(p1: &PaddedPartition, p2: &PaddedPartition) -> Result<bool> {
    if p1.size() != p2.size() {
        return Err(Error::SizeMismatch(p1.size(), p2.size()));
    }
    let (a, b) = (rank_sequence(p1), rank_sequence(p2));
    Ok((0..a.len().max(b.len())).all(|i| a.get(i).copied().unwrap_or(0) <= b.get(i).copied().unwrap_or(0)))
}

fn apply_raw(p: &PaddedPartition, op: SLOperation, keep_zero: bool) -> Result<PaddedPartition> {
    let absent = || Error::PartsAbsent { s: op.s, l: op.l };
    if op.l == 0 || op.s < op.l {
        return Err(absent());
    }
    let mut parts = p.parts.clone();
    let is = parts.iter().position(|&b| b == op.s).ok_or_else(absent)?;
    let il = parts.iter().enumerate().rposition(|(i, &b)| b == op.l && i != is).ok_or_else(absent)?;
    parts[is] += 1;
    parts[il] -= 1;
    if parts[il] == 0 && !keep_zero {
        parts.remove(il);
    }
    Ok(PaddedPartition::new(parts))
}

/// Applies `(s, l)`; a block that drops to zero is removed.
pub fn apply_sl(p: &PaddedPartition, op: SLOperation) -> Result<PaddedPartition> {
    apply_raw(p, op, false)
}

/// Applies `(s, l)` and keeps a resulting zero block.
pub fn apply_sl_padded(p: &PaddedPartition, op: SLOperation) -> Result<PaddedPartition> {
    apply_raw(p, op, true)
}

/// Operations leading from `p1` up to `p2` in the closure order.
///
/// Common leading blocks are set aside; then the largest remaining block
/// `h₁` and the next one `h` undergo `(h₁, h)`. Every intermediate partition
/// stays below `p2`.
pub fn adjacency_chain(p1: &PaddedPartition, p2: &PaddedPartition) -> Result<Vec<SLOperation>> {
    if !closure_leq(p1, p2)? {
        return Err(Error::NotComparable);
    }
    let target = PaddedPartition::from(p2.without_zeros());
    let mut current = PaddedPartition::from(p1.without_zeros());
    let mut chain = Vec::new();
    while current != target {
        let common = current.parts.iter().zip(&target.parts).take_while(|(a, b)| a == b).count();
        let rest = &current.parts[common..];
        let op = SLOperation { s: rest[0], l: rest[1] };
        current = apply_sl(&current, op)?;
        debug_assert!(closure_leq(&current, &target)?);
        chain.push(op);
    }
    Ok(chain)
}

/// Increases by one the `k` smallest blocks, zero blocks included.
pub fn bump_smallest(p: &PaddedPartition, k: usize) -> Result<PaddedPartition> {
    let blocks = p.block_count();
    if k > blocks {
        return Err(Error::KTooLarge { k, blocks });
    }
    let mut parts = p.parts.clone();
    for b in &mut parts[blocks - k..] {
        *b += 1;
    }
    Ok(PaddedPartition::new(parts))
}

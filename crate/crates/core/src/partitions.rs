//! Set partitions of `[n]` as restricted growth strings, tuples in `[k]^n`,
//! and the orbit map between them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `n` for which partitions are ever enumerated.
pub const ENUMERATION_CAP: usize = 14;

/// A set partition of `[n]` in canonical restricted-growth-string form.
///
/// `rgs[i]` is the block of element `i + 1`; blocks are numbered by first
/// appearance, so `rgs[0] = 0` and every entry is at most one more than the
/// maximum of the entries before it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    rgs: Vec<u8>,
    blocks: usize,
}

impl SetPartition {
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self> {
        if rgs.is_empty() {
            return Err(Error::InvalidPartition("empty string".into()));
        }
        let mut max: Option<u8> = None;
        for (i, &b) in rgs.iter().enumerate() {
            let limit = max.map_or(0, |m| m + 1);
            if b > limit {
                return Err(Error::InvalidPartition(format!(
                    "entry {b} at position {i} exceeds {limit}"
                )));
            }
            max = Some(max.map_or(b, |m| m.max(b)));
        }
        let blocks = max.unwrap() as usize + 1;
        Ok(Self { rgs, blocks })
    }

    pub fn one_block(n: usize) -> Self {
        assert!(n >= 1);
        Self { rgs: vec![0; n], blocks: 1 }
    }

    pub fn singletons(n: usize) -> Self {
        assert!(n >= 1 && n <= u8::MAX as usize + 1);
        Self { rgs: (0..n).map(|i| i as u8).collect(), blocks: n }
    }

    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    /// Blocks as sorted lists of 1-based elements.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            out[b as usize].push(i + 1);
        }
        out
    }

    /// The partition of coordinates induced by equal values of `u`.
    pub fn from_tuple(u: &Tuple) -> Self {
        Self::from_labels(u.coords())
    }

    /// Canonicalizes any labelling of `[n]` into restricted growth form.
    pub fn from_labels<T: PartialEq + Copy>(labels: &[T]) -> Self {
        assert!(!labels.is_empty());
        let mut seen: Vec<T> = Vec::new();
        let rgs = labels
            .iter()
            .map(|v| match seen.iter().position(|s| s == v) {
                Some(p) => p as u8,
                None => {
                    seen.push(*v);
                    (seen.len() - 1) as u8
                }
            })
            .collect();
        Self { rgs, blocks: seen.len() }
    }

    /// Orbit representative: `coords[i] = rgs[i] + 1`.
    pub fn canonical_tuple(&self, k: usize) -> Result<Tuple> {
        if k < self.blocks {
            return Err(Error::AlphabetTooSmall { k, blocks: self.blocks });
        }
        Tuple::new(self.rgs.iter().map(|&b| b as usize + 1).collect(), k)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.rgs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rgs = s
            .split(',')
            .map(|t| t.trim().parse::<u8>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidPartition(format!("{s:?}: {e}")))?;
        Self::from_rgs(rgs)
    }
}

/// A state `u ∈ [k]^n`; coordinates take values in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    coords: Vec<usize>,
    k: usize,
}

impl Tuple {
    pub fn new(coords: Vec<usize>, k: usize) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidTuple("no coordinates".into()));
        }
        if let Some(bad) = coords.iter().find(|&&c| c == 0 || c > k) {
            return Err(Error::InvalidTuple(format!("value {bad} outside 1..={k}")));
        }
        Ok(Self { coords, k })
    }

    pub(crate) fn from_raw(coords: Vec<usize>, k: usize) -> Self {
        debug_assert!(coords.iter().all(|&c| c >= 1 && c <= k));
        Self { coords, k }
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sorted distinct values `J_u`.
    pub fn distinct_values(&self) -> Vec<usize> {
        let mut v = self.coords.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn distinct_count(&self) -> usize {
        self.distinct_values().len()
    }

    /// Relabels values through `sigma`, given as an image table indexed by
    /// value (`sigma[v]` for `v` in `1..=k`; index 0 unused).
    pub fn act(&self, sigma: &[usize]) -> Tuple {
        Tuple::from_raw(self.coords.iter().map(|&c| sigma[c]).collect(), self.k)
    }
}

/// All partitions of `[n]`, ordered by block count and then
/// lexicographically by restricted growth string.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    enumerate_partitions_with_max_blocks(n, n)
}

/// Same ordering as [`enumerate_partitions`], restricted to partitions with
/// at most `max_blocks` blocks.
pub fn enumerate_partitions_with_max_blocks(n: usize, max_blocks: usize) -> Result<Vec<SetPartition>> {
    if n == 0 {
        return Err(Error::Infeasible("n must be at least 1".into()));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded { n, cap: ENUMERATION_CAP });
    }
    let mut by_blocks: Vec<Vec<SetPartition>> = vec![Vec::new(); n + 1];
    let mut rgs = vec![0u8; n];
    // Lexicographic generation of restricted growth strings.
    fn walk(pos: usize, max: u8, rgs: &mut Vec<u8>, cap: usize, out: &mut Vec<Vec<SetPartition>>) {
        if pos == rgs.len() {
            let blocks = max as usize + 1;
            out[blocks].push(SetPartition { rgs: rgs.clone(), blocks });
            return;
        }
        let limit = (max as usize + 1).min(cap - 1) as u8;
        for b in 0..=limit {
            rgs[pos] = b;
            walk(pos + 1, max.max(b), rgs, cap, out);
        }
    }
    let cap = max_blocks.clamp(1, n);
    walk(1, 0, &mut rgs, cap, &mut by_blocks);
    Ok(by_blocks.into_iter().flatten().collect())
}

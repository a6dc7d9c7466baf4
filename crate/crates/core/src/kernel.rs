//! Exact transition probabilities for the Burnside process on `[k]^n`, its
//! lumped chain on set partitions, and the block-count projection.
//!
//! Every probability here depends on states only through block counts (or,
//! for the full chain, through `(j_u, j_v, j)`), so lumped matrices are
//! stored as a block-count class table plus an index-to-class map. Entry
//! access, row sums and symmetry checks still run over every state pair.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::combinatorics::{
    factorial, parse_rational, rational_string, stirling2_row, MomentTable, Rational,
};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions_with_max_blocks, SetPartition};

pub const ORDER_NAME: &str = "block-count-then-lex-rgs";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Lumped,
    BlockCount,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Lumped => "lumped",
            KernelKind::BlockCount => "block-count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Partition(SetPartition),
    BlockCount(usize),
}

impl Label {
    fn to_json(&self) -> Value {
        match self {
            Label::Partition(x) => Value::String(x.to_string()),
            Label::BlockCount(j) => json!(j),
        }
    }
}

fn check_class(n: usize, k: usize, j: usize, what: &str) -> Result<()> {
    let top = n.min(k);
    if j == 0 || j > top {
        return Err(Error::Infeasible(format!("{what} = {j} outside 1..={top}")));
    }
    Ok(())
}

/// `K(u, v)` for any `u, v ∈ [k]^n` with `j_u`, `j_v` distinct values each
/// and `j` distinct values combined.
pub fn full_transition(n: usize, k: usize, j_u: usize, j_v: usize, j: usize) -> Result<Rational> {
    let table = MomentTable::new(n, k)?;
    full_transition_with(&table, j_u, j_v, j)
}

pub fn full_transition_with(table: &MomentTable, j_u: usize, j_v: usize, j: usize) -> Result<Rational> {
    let (n, k) = (table.n(), table.k());
    check_class(n, k, j_u, "j_u")?;
    check_class(n, k, j_v, "j_v")?;
    if j < j_u.max(j_v) || j > (j_u + j_v).min(k) {
        return Err(Error::Infeasible(format!(
            "combined count j = {j} infeasible for j_u = {j_u}, j_v = {j_v}, k = {k}"
        )));
    }
    let ratio = Rational::new(factorial(k - j), factorial(k - j_u));
    Ok(ratio * table.get(j).expect("j checked against k"))
}

/// `K̄(x, y)` for partitions with `j_x` and `j_y` blocks.
pub fn lumped_transition(n: usize, k: usize, j_x: usize, j_y: usize) -> Result<Rational> {
    let table = MomentTable::new(n, k)?;
    lumped_transition_with(&table, j_x, j_y)
}

pub fn lumped_transition_with(table: &MomentTable, j_x: usize, j_y: usize) -> Result<Rational> {
    let (n, k) = (table.n(), table.k());
    check_class(n, k, j_x, "j_x")?;
    check_class(n, k, j_y, "j_y")?;
    let (a, b) = if j_x <= j_y { (j_x, j_y) } else { (j_y, j_x) };
    let top = (a + b).min(k);
    let numer = factorial(a) * factorial(b);
    let mut total = Rational::zero();
    for j in b..=top {
        let denom = factorial(j - a) * factorial(j - b) * factorial(a + b - j);
        total += Rational::new(numer.clone(), denom) * table.get(j).expect("j ≤ k");
    }
    Ok(total)
}

/// The `m × m` table `K̄(i, j)` over block counts `1..=m`, `m = min(n, k)`.
pub fn lumped_class_table(n: usize, k: usize) -> Result<Vec<Vec<Rational>>> {
    let table = MomentTable::new(n, k)?;
    let m = n.min(k);
    (1..=m)
        .into_par_iter()
        .map(|a| (1..=m).map(|b| lumped_transition_with(&table, a, b)).collect())
        .collect()
}

/// Stirling counts `S(n, j)` for `j = 1..=min(n, k)`: the number of lumped
/// states with each block count.
pub fn class_sizes(n: usize, k: usize) -> Vec<BigInt> {
    let row = stirling2_row(n);
    row.into_iter().skip(1).take(n.min(k)).collect()
}

#[derive(Debug, Clone)]
enum Storage {
    /// `values[class_of[x]][class_of[y]]`.
    Blocked { class_of: Vec<usize>, values: Vec<Vec<Rational>> },
    Dense(Vec<Vec<Rational>>),
}

/// Square exact-rational transition matrix with labelled states.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    n: usize,
    k: usize,
    kind: KernelKind,
    labels: Vec<Label>,
    class_sizes: Vec<BigInt>,
    storage: Storage,
}

/// A chain over block-count classes (or over states, for dense matrices)
/// together with its stationary law.
#[derive(Debug, Clone)]
pub struct ClassChain {
    pub transition: Vec<Vec<Rational>>,
    pub stationary: Vec<Rational>,
}

impl KernelMatrix {
    /// Builds a matrix from explicit entries. No stochasticity check is made.
    pub fn from_dense(
        n: usize,
        k: usize,
        kind: KernelKind,
        labels: Vec<Label>,
        entries: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let d = labels.len();
        if entries.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: entries.len() });
        }
        if let Some(row) = entries.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: row.len() });
        }
        Ok(Self { n, k, kind, labels, class_sizes: class_sizes(n, k), storage: Storage::Dense(entries) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, x: usize, y: usize) -> &Rational {
        match &self.storage {
            Storage::Blocked { class_of, values } => &values[class_of[x]][class_of[y]],
            Storage::Dense(e) => &e[x][y],
        }
    }

    pub fn row(&self, x: usize) -> impl Iterator<Item = &Rational> + '_ {
        (0..self.dim()).map(move |y| self.get(x, y))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|x| self.row(x).cloned().collect()).collect()
    }

    /// Exact sum of row `x`.
    pub fn row_sum(&self, x: usize) -> Rational {
        match &self.storage {
            Storage::Blocked { class_of, values } => {
                // Tally every entry of the row by its class, then sum exactly.
                let mut tally = vec![0u64; values.len()];
                for &c in class_of {
                    tally[c] += 1;
                }
                let row = &values[class_of[x]];
                tally
                    .iter()
                    .zip(row)
                    .map(|(&t, v)| v * Rational::from_integer(t.into()))
                    .sum()
            }
            Storage::Dense(e) => e[x].iter().sum(),
        }
    }

    pub fn is_row_stochastic(&self) -> bool {
        let one = Rational::one();
        (0..self.dim()).into_par_iter().all(|x| self.row_sum(x) == one)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim())
            .into_par_iter()
            .all(|x| {
                (x + 1..self.dim()).all(|y| {
                    let (a, b) = (self.get(x, y), self.get(y, x));
                    std::ptr::eq(a, b) || a == b
                })
            })
    }

    pub fn is_strictly_positive(&self) -> bool {
        (0..self.dim()).all(|x| self.row(x).all(|v| v > &Rational::zero()))
    }

    pub fn min_entry(&self) -> Rational {
        match &self.storage {
            Storage::Blocked { values, .. } => values.iter().flatten().min().cloned().unwrap(),
            Storage::Dense(e) => e.iter().flatten().min().cloned().unwrap(),
        }
    }

    /// Number of states per block count (`S(n, j)`, `j = 1..=min(n, k)`).
    pub fn class_sizes(&self) -> &[BigInt] {
        &self.class_sizes
    }

    /// Reduces the matrix to the chain that the distance and spectral
    /// computations operate on.
    ///
    /// Blocked lumped matrices reduce to the block-count projection with
    /// `π_L(j) ∝ S(n, j)`; dense lumped matrices keep every state with the
    /// uniform law; block-count matrices are returned as they are.
    pub fn class_chain(&self) -> ClassChain {
        let total: BigInt = self.class_sizes.iter().sum();
        let projected_pi = || {
            self.class_sizes
                .iter()
                .map(|c| Rational::new(c.clone(), total.clone()))
                .collect::<Vec<_>>()
        };
        match (&self.storage, self.kind) {
            (Storage::Blocked { values, .. }, _) => {
                let transition = values
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&self.class_sizes)
                            .map(|(v, c)| v * Rational::from_integer(c.clone()))
                            .collect()
                    })
                    .collect();
                ClassChain { transition, stationary: projected_pi() }
            }
            (Storage::Dense(e), KernelKind::Lumped) => {
                let d = e.len();
                let u = Rational::new(BigInt::one(), BigInt::from(d));
                ClassChain { transition: e.clone(), stationary: vec![u; d] }
            }
            (Storage::Dense(e), KernelKind::BlockCount) => {
                ClassChain { transition: e.clone(), stationary: projected_pi() }
            }
        }
    }

    pub fn stationary(&self) -> StationaryVector {
        let weights = match self.kind {
            KernelKind::Lumped => {
                let d = self.dim();
                vec![Rational::new(BigInt::one(), BigInt::from(d)); d]
            }
            KernelKind::BlockCount => self.class_chain().stationary,
        };
        StationaryVector { labels: self.labels.clone(), weights }
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Vec<String>> = (0..self.dim())
            .map(|x| self.row(x).map(rational_string).collect())
            .collect();
        json!({
            "n": self.n,
            "k": self.k,
            "kind": self.kind.as_str(),
            "order": ORDER_NAME,
            "labels": self.labels.iter().map(Label::to_json).collect::<Vec<_>>(),
            "entries": entries,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Infeasible(format!("malformed kernel JSON: {what}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("n"))? as usize;
        let k = v["k"].as_u64().ok_or_else(|| bad("k"))? as usize;
        let kind = match v["kind"].as_str() {
            Some("lumped") => KernelKind::Lumped,
            Some("block-count") => KernelKind::BlockCount,
            _ => return Err(bad("kind")),
        };
        let labels = v["labels"]
            .as_array()
            .ok_or_else(|| bad("labels"))?
            .iter()
            .map(|l| match (kind, l) {
                (KernelKind::Lumped, Value::String(s)) => s.parse().map(Label::Partition),
                (KernelKind::BlockCount, Value::Number(j)) => {
                    j.as_u64().map(|j| Label::BlockCount(j as usize)).ok_or_else(|| bad("label"))
                }
                _ => Err(bad("label")),
            })
            .collect::<Result<Vec<_>>>()?;
        let entries = v["entries"]
            .as_array()
            .ok_or_else(|| bad("entries"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("row"))?
                    .iter()
                    .map(|e| e.as_str().and_then(parse_rational).ok_or_else(|| bad("entry")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_dense(n, k, kind, labels, entries)
    }
}

/// The lumped kernel `K̄` over partitions of `[n]` with at most `min(n, k)`
/// blocks, in block-count-then-lexicographic order.
pub fn lumped_matrix(n: usize, k: usize) -> Result<KernelMatrix> {
    if k == 0 {
        return Err(Error::Infeasible("k must be at least 1".into()));
    }
    let states = enumerate_partitions_with_max_blocks(n, k)?;
    let values = lumped_class_table(n, k)?;
    let class_of = states.iter().map(|x| x.block_count() - 1).collect();
    Ok(KernelMatrix {
        n,
        k,
        kind: KernelKind::Lumped,
        labels: states.into_iter().map(Label::Partition).collect(),
        class_sizes: class_sizes(n, k),
        storage: Storage::Blocked { class_of, values },
    })
}

/// The block-count projection `L(i, j) = S(n, j) · K̄(i, j)`.
pub fn block_count_matrix(n: usize, k: usize) -> Result<KernelMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::Infeasible("n and k must be at least 1".into()));
    }
    if n > crate::partitions::ENUMERATION_CAP {
        return Err(Error::CapExceeded { n, cap: crate::partitions::ENUMERATION_CAP });
    }
    let values = lumped_class_table(n, k)?;
    let sizes = class_sizes(n, k);
    let entries = values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&sizes)
                .map(|(v, c)| v * Rational::from_integer(c.clone()))
                .collect()
        })
        .collect();
    let labels = (1..=n.min(k)).map(Label::BlockCount).collect();
    KernelMatrix::from_dense(n, k, KernelKind::BlockCount, labels, entries)
}

/// Number of lumped states: partitions of `[n]` with at most `k` blocks.
pub fn state_count(n: usize, k: usize) -> BigInt {
    class_sizes(n, k).into_iter().sum()
}

/// Stationary mass `π(u)` of a single `u ∈ [k]^n` with `j_u` distinct values.
///
/// For `k ≥ n` this is `(k − j_u)! / (B_n k!)`; for `k < n` the Bell number is
/// replaced by the number of partitions with at most `k` blocks.
pub fn stationary_full_class(n: usize, k: usize, j_u: usize) -> Result<Rational> {
    check_class(n, k, j_u, "j_u")?;
    Ok(Rational::new(factorial(k - j_u), factorial(k) * state_count(n, k)))
}

/// Size of the orbit of any `u` with `j_u` distinct values: `k!/(k − j_u)!`.
pub fn orbit_size(k: usize, j_u: usize) -> BigInt {
    factorial(k) / factorial(k - j_u)
}

#[derive(Debug, Clone)]
pub struct StationaryVector {
    pub labels: Vec<Label>,
    pub weights: Vec<Rational>,
}

impl StationaryVector {
    pub fn sum(&self) -> Rational {
        self.weights.iter().sum()
    }
}

/// Exact detailed-balance check `s(x) m(x, y) = s(y) m(y, x)`.
pub fn verify_reversibility(m: &KernelMatrix, s: &StationaryVector) -> Result<bool> {
    let d = m.dim();
    if s.weights.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: s.weights.len() });
    }
    Ok((0..d).into_par_iter().all(|x| {
        (x + 1..d).all(|y| &s.weights[x] * m.get(x, y) == &s.weights[y] * m.get(y, x))
    }))
}

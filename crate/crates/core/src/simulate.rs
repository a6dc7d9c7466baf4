//! Monte Carlo simulation of the two-substep Burnside process on `[k]^n`.
//!
//! One step from `u`: draw `σ` uniformly from the stabilizer of `u` (identity
//! on the values `J_u` of `u`, uniform on the rest of `[k]`), then set every
//! coordinate independently and uniformly in `FP(σ)`. Only `FP(σ)` is ever
//! needed, so `σ` itself is never stored.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partitions::{SetPartition, Tuple};
use crate::rng::RngStream;

/// Draws per parallel work item; each batch owns one RNG stream.
pub const BATCH_SIZE: usize = 1024;

/// `FP(σ)` for `σ` uniform on permutations of `[k]` fixing every value in
/// `fixed`. The result is sorted and always contains `fixed`.
pub fn sample_stabilizer_fixed_points<R: Rng + ?Sized>(
    fixed: &[usize],
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if fixed.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut mask = vec![false; k + 1];
    for &v in fixed {
        if v == 0 || v > k {
            return Err(Error::Infeasible(format!("value {v} outside 1..={k}")));
        }
        mask[v] = true;
    }
    let mut scratch = Vec::with_capacity(k);
    Ok(fixed_points_from_mask(&mask, rng, &mut scratch))
}

fn fixed_points_from_mask<R: Rng + ?Sized>(mask: &[bool], rng: &mut R, scratch: &mut Vec<usize>) -> Vec<usize> {
    scratch.clear();
    scratch.extend((1..mask.len()).filter(|&v| !mask[v]));
    let free: Vec<usize> = scratch.clone();
    // scratch[p] is the image of free[p] under the complement permutation.
    scratch.shuffle(rng);
    let mut out: Vec<usize> = (1..mask.len()).filter(|&v| mask[v]).collect();
    out.extend(free.iter().zip(scratch.iter()).filter(|(a, b)| a == b).map(|(a, _)| *a));
    out.sort_unstable();
    out
}

/// One Burnside step from `u`.
pub fn burnside_step<R: Rng + ?Sized>(u: &Tuple, rng: &mut R) -> Tuple {
    let k = u.k();
    let mut mask = vec![false; k + 1];
    for &c in u.coords() {
        mask[c] = true;
    }
    let mut scratch = Vec::with_capacity(k);
    step_with_mask(u.n(), k, &mask, rng, &mut scratch)
}

fn step_with_mask<R: Rng + ?Sized>(n: usize, k: usize, mask: &[bool], rng: &mut R, scratch: &mut Vec<usize>) -> Tuple {
    let fp = fixed_points_from_mask(mask, rng, scratch);
    let coords = (0..n).map(|_| fp[rng.random_range(0..fp.len())]).collect();
    Tuple::from_raw(coords, k)
}

/// Runs `steps` Burnside steps from `u` and returns the final tuple.
pub fn run_chain<R: Rng + ?Sized>(u: &Tuple, steps: usize, rng: &mut R) -> Tuple {
    let k = u.k();
    let mut scratch = Vec::with_capacity(k);
    let mut mask = vec![false; k + 1];
    let mut cur = u.clone();
    for _ in 0..steps {
        mask.iter_mut().for_each(|m| *m = false);
        for &c in cur.coords() {
            mask[c] = true;
        }
        cur = step_with_mask(cur.n(), k, &mask, rng, &mut scratch);
    }
    cur
}

/// A lumped trajectory: the partition of the chain's state after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<SetPartition>,
    pub n: usize,
    pub k: usize,
    pub stream: RngStream,
}

impl Trajectory {
    /// CSV with `# key: value` metadata lines and columns `t,rgs,block_count`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# n: {}\n# k: {}\n# seed: {}\n# stream: {}\n# generator: {}\nt,rgs,block_count\n",
            self.n,
            self.k,
            self.stream.master_seed,
            self.stream.stream_index,
            crate::rng::GENERATOR
        );
        for (t, x) in self.states.iter().enumerate() {
            out.push_str(&format!("{t},\"{x}\",{}\n", x.block_count()));
        }
        out
    }
}

/// Simulates `steps` steps from the canonical representative of `x0`.
pub fn lumped_trajectory(x0: &SetPartition, k: usize, steps: usize, stream: RngStream) -> Result<Trajectory> {
    let mut cur = x0.canonical_tuple(k)?;
    let mut rng = stream.rng();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.clone());
    for _ in 0..steps {
        cur = burnside_step(&cur, &mut rng);
        states.push(SetPartition::from_tuple(&cur));
    }
    Ok(Trajectory { states, n: x0.n(), k, stream })
}

/// Final lumped state of a `steps`-step run started at the one-block partition.
pub fn sample_partition<R: Rng + ?Sized>(n: usize, k: usize, steps: usize, rng: &mut R) -> Result<SetPartition> {
    if n == 0 || k == 0 {
        return Err(Error::Infeasible("n and k must be at least 1".into()));
    }
    let start = SetPartition::one_block(n).canonical_tuple(k)?;
    Ok(SetPartition::from_tuple(&run_chain(&start, steps, rng)))
}

/// `count` independent samples, batched across threads. Batch `b` uses
/// stream `b` of `seed`, so the output depends only on the arguments.
pub fn sample_partitions(n: usize, k: usize, steps: usize, count: usize, seed: u64) -> Result<Vec<SetPartition>> {
    if n == 0 || k == 0 {
        return Err(Error::Infeasible("n and k must be at least 1".into()));
    }
    let batches = count.div_ceil(BATCH_SIZE);
    let nested: Vec<Vec<SetPartition>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(seed, b as u64).rng();
            let len = BATCH_SIZE.min(count - b * BATCH_SIZE);
            (0..len)
                .map(|_| sample_partition(n, k, steps, &mut rng).expect("arguments validated"))
                .collect()
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

/// Steps sufficient for TV distance `eps` from any start.
///
/// For `k ≥ n` this is `⌈2k ln(n/ε)⌉` from the coupling bound; for `k < n`
/// it is `⌈(k−1)! ln(1/ε)⌉` from the minorization bound.
pub fn default_steps(n: usize, k: usize, eps: f64) -> usize {
    if k >= n {
        (2.0 * k as f64 * (n as f64 / eps).ln()).ceil().max(0.0) as usize
    } else {
        let fact: f64 = (1..k).map(|i| i as f64).product();
        (fact * (1.0 / eps).ln()).ceil().max(0.0) as usize
    }
}

/// Draws `u` from the stationary law of the full chain: a uniform lumped
/// state from `states`, labelled by uniformly chosen distinct values.
pub fn sample_stationary_tuple<R: Rng + ?Sized>(states: &[SetPartition], k: usize, rng: &mut R) -> Result<Tuple> {
    let x = states.get(rng.random_range(0..states.len())).ok_or(Error::EmptySet)?;
    if x.block_count() > k {
        return Err(Error::AlphabetTooSmall { k, blocks: x.block_count() });
    }
    let mut values: Vec<usize> = (1..=k).collect();
    let (chosen, _) = values.partial_shuffle(rng, x.block_count());
    let coords = x.rgs().iter().map(|&b| chosen[b as usize]).collect();
    Ok(Tuple::from_raw(coords, k))
}

//! A coupling of two Burnside chains and coalescence experiments.
//!
//! One coupled step from `(u, v)`: shuffle `A ∪ B` once, where
//! `A = [k] \ J_u` and `B = [k] \ J_v`, restrict that permutation to `A` and to
//! `B` by deleting elements from its cycles, and extend each restriction by
//! the identity on `J_u` (resp. `J_v`). Each coordinate is then drawn from a
//! maximal coupling of the uniform laws on the two fixed-point sets.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::combinatorics::Rational;
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions_with_max_blocks, SetPartition, Tuple};
use crate::rng::RngStream;
use crate::simulate::sample_stationary_tuple;

/// A bijection of a finite set of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: BTreeMap<usize, usize>,
}

impl Permutation {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let map: BTreeMap<usize, usize> = pairs.into_iter().collect();
        let mut images: Vec<usize> = map.values().copied().collect();
        images.sort_unstable();
        images.dedup();
        if images.len() != map.len() || images.iter().any(|v| !map.contains_key(v)) {
            return Err(Error::Infeasible("not a bijection of its domain".into()));
        }
        Ok(Self { map })
    }

    /// Builds the permutation from cycles; points not listed are fixed only
    /// if they appear as 1-cycles.
    pub fn from_cycles(cycles: &[&[usize]]) -> Result<Self> {
        let mut pairs = Vec::new();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                pairs.push((x, c[(i + 1) % c.len()]));
            }
        }
        Self::new(pairs)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        self.map.iter().filter(|(a, b)| a == b).map(|(a, _)| *a).collect()
    }
}

/// The permutation of `subset` obtained by deleting every other element from
/// the cycles of `sigma`.
pub fn induced_permutation(sigma: &Permutation, subset: &[usize]) -> Result<Permutation> {
    if subset.iter().any(|x| !sigma.map.contains_key(x)) {
        return Err(Error::NotASubset);
    }
    let keep: std::collections::BTreeSet<usize> = subset.iter().copied().collect();
    let pairs = keep.iter().map(|&x| {
        let mut y = sigma.map[&x];
        while !keep.contains(&y) {
            y = sigma.map[&y];
        }
        (x, y)
    });
    Permutation::new(pairs.collect::<Vec<_>>())
}

/// A coupling of Uniform(A) and Uniform(B) that makes the two draws equal
/// with probability `|A ∩ B| / max(|A|, |B|)`.
#[derive(Debug, Clone)]
pub struct MaximalCoupling {
    /// The larger set (the left one on ties).
    big: Vec<usize>,
    small_contains: Vec<bool>,
    common: Vec<usize>,
    small_only: Vec<usize>,
    big_only_len: usize,
    small_len: usize,
    /// Whether `big` is the caller's second set.
    swapped: bool,
}

impl MaximalCoupling {
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let norm = |s: &[usize]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let (a, b) = (norm(a), norm(b));
        let swapped = b.len() > a.len();
        let (big, small) = if swapped { (b, a) } else { (a, b) };
        let top = big.iter().chain(&small).copied().max().unwrap();
        let mut small_contains = vec![false; top + 1];
        small.iter().for_each(|&x| small_contains[x] = true);
        let mut big_contains = vec![false; top + 1];
        big.iter().for_each(|&x| big_contains[x] = true);
        let common: Vec<usize> = big.iter().copied().filter(|&x| small_contains[x]).collect();
        let small_only: Vec<usize> = small.iter().copied().filter(|&x| !big_contains[x]).collect();
        let big_only_len = big.len() - common.len();
        Ok(Self { small_len: small.len(), big, small_contains, common, small_only, big_only_len, swapped })
    }

    /// `(z_a, z_b)` with `z_a` uniform on the first set and `z_b` on the second.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let x = self.big[rng.random_range(0..self.big.len())];
        let y = if self.small_contains[x] {
            x
        } else {
            // Given x outside the smaller set, y lands in the intersection with
            // probability |A∩B|(|A|−|B|) / (|B| |A\B|), otherwise in B\A.
            let big = self.big.len() as u128;
            let small = self.small_len as u128;
            let to_common = self.common.len() as u128 * (big - small);
            let total = small * self.big_only_len as u128;
            let r = rng.random_range(0..total);
            if r < to_common {
                self.common[rng.random_range(0..self.common.len())]
            } else {
                self.small_only[rng.random_range(0..self.small_only.len())]
            }
        };
        if self.swapped {
            (y, x)
        } else {
            (x, y)
        }
    }

    /// Exact joint law as `((z_a, z_b), probability)` over its support.
    pub fn joint_distribution(&self) -> Vec<((usize, usize), Rational)> {
        let big = BigInt::from(self.big.len());
        let small = BigInt::from(self.small_len);
        let big_only = BigInt::from(self.big_only_len);
        let mut out = Vec::new();
        for &x in &self.big {
            if self.small_contains[x] {
                out.push(((x, x), Rational::new(1.into(), big.clone())));
                continue;
            }
            let to_common = Rational::new(&big - &small, &big * &small * &big_only);
            if !to_common.is_zero() {
                for &y in &self.common {
                    out.push(((x, y), to_common.clone()));
                }
            }
            for &y in &self.small_only {
                out.push(((x, y), Rational::new(1.into(), &small * &big_only)));
            }
        }
        if self.swapped {
            out.iter_mut().for_each(|((a, b), _)| std::mem::swap(a, b));
        }
        out
    }

    /// `|A ∩ B| / max(|A|, |B|)`.
    pub fn agreement_probability(&self) -> Rational {
        Rational::new(self.common.len().into(), self.big.len().into())
    }
}

pub fn maximal_coupling_uniform<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Result<(usize, usize)> {
    Ok(MaximalCoupling::new(a, b)?.sample(rng))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledPair {
    pub left: Tuple,
    pub right: Tuple,
    pub coalesced: bool,
}

impl CoupledPair {
    pub fn new(left: Tuple, right: Tuple) -> Result<Self> {
        if left.k() != right.k() {
            return Err(Error::Infeasible(format!("alphabets differ: {} vs {}", left.k(), right.k())));
        }
        if left.n() != right.n() {
            return Err(Error::DimensionMismatch { expected: left.n(), found: right.n() });
        }
        let coalesced = left == right;
        Ok(Self { left, right, coalesced })
    }
}

/// Fixed points of the restriction of `sigma` (given by `domain[p] ↦
/// image[p]`) to the values marked free in `free`.
fn induced_fixed_points(domain: &[usize], image: &[usize], free: &[bool], pos: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &x in domain {
        if !free[x] {
            continue;
        }
        let mut y = image[pos[x]];
        while !free[y] {
            y = image[pos[y]];
        }
        if y == x {
            out.push(x);
        }
    }
    out
}

/// One coupled step. Each side alone is distributed as one Burnside step.
pub fn coupled_step<R: Rng + ?Sized>(pair: &CoupledPair, rng: &mut R) -> CoupledPair {
    let k = pair.left.k();
    let n = pair.left.n();
    let mut in_u = vec![false; k + 1];
    let mut in_v = vec![false; k + 1];
    pair.left.coords().iter().for_each(|&c| in_u[c] = true);
    pair.right.coords().iter().for_each(|&c| in_v[c] = true);
    let free_u: Vec<bool> = (0..=k).map(|x| x > 0 && !in_u[x]).collect();
    let free_v: Vec<bool> = (0..=k).map(|x| x > 0 && !in_v[x]).collect();

    let domain: Vec<usize> = (1..=k).filter(|&x| free_u[x] || free_v[x]).collect();
    let mut image = domain.clone();
    image.shuffle(rng);
    let mut pos = vec![usize::MAX; k + 1];
    domain.iter().enumerate().for_each(|(p, &x)| pos[x] = p);

    let mut fp_u = induced_fixed_points(&domain, &image, &free_u, &pos);
    fp_u.extend((1..=k).filter(|&x| in_u[x]));
    let mut fp_v = induced_fixed_points(&domain, &image, &free_v, &pos);
    fp_v.extend((1..=k).filter(|&x| in_v[x]));

    let coupling = MaximalCoupling::new(&fp_u, &fp_v).expect("fixed-point sets contain J_u, J_v");
    let (mut left, mut right) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let (a, b) = coupling.sample(rng);
        left.push(a);
        right.push(b);
    }
    let coalesced = left == right;
    CoupledPair { left: Tuple::from_raw(left, k), right: Tuple::from_raw(right, k), coalesced }
}

/// How the two chains of a coalescence experiment are started.
#[derive(Debug, Clone)]
pub enum StartPair {
    /// Left at the constant tuple `(1, …, 1)`; right at the partition with
    /// the most blocks allowed, labelled by the largest values of `[k]`.
    /// The supports are disjoint when `k > min(n, k)` and overlap otherwise.
    Extremes,
    Fixed(Tuple, Tuple),
    /// Left fixed; right drawn from the stationary law for every trial.
    StationaryRight(Tuple),
}

impl StartPair {
    pub fn extremes(n: usize, k: usize) -> (Tuple, Tuple) {
        let m = n.min(k);
        let left = Tuple::from_raw(vec![1; n], k);
        let top = enumerate_partitions_with_max_blocks(n.min(crate::partitions::ENUMERATION_CAP), m)
            .ok()
            .and_then(|v| v.last().cloned())
            .filter(|x| x.n() == n)
            .unwrap_or_else(|| {
                // Beyond the enumeration cap: blocks 0..m−1 then the last block repeated.
                let rgs = (0..n).map(|i| i.min(m - 1) as u8).collect();
                SetPartition::from_rgs(rgs).expect("valid growth string")
            });
        let right = top.rgs().iter().map(|&b| k - m + 1 + b as usize).collect();
        (left, Tuple::from_raw(right, k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoalescenceCurve {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// `survival[t]` = fraction of trials not coalesced at time `t`.
    pub survival: Vec<f64>,
}

impl CoalescenceCurve {
    pub fn t_values(&self) -> impl Iterator<Item = usize> {
        0..self.survival.len()
    }

    /// `n (1 − 1/(2k))^t`.
    pub fn bound(&self, t: usize) -> f64 {
        coupling_bound(self.n, self.k, t)
    }

    /// Binomial standard error of a survival estimate at probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# n: {}\n# k: {}\n# trials: {}\n# seed: {}\nt,survival,bound\n",
            self.n, self.k, self.trials, self.seed
        );
        for (t, s) in self.survival.iter().enumerate() {
            out.push_str(&format!("{t},{},{}\n", crate::fmt_f64(*s), crate::fmt_f64(self.bound(t))));
        }
        out
    }
}

pub fn coupling_bound(n: usize, k: usize, t: usize) -> f64 {
    n as f64 * (1.0 - 1.0 / (2.0 * k as f64)).powi(t as i32)
}

/// Runs `trials` independent coupled chains for up to `t_max` steps; trial
/// `i` uses stream `i` of `seed`.
pub fn coalescence_experiment(
    n: usize,
    k: usize,
    t_max: usize,
    trials: usize,
    seed: u64,
    start: &StartPair,
) -> Result<CoalescenceCurve> {
    if trials == 0 {
        return Err(Error::Infeasible("trials must be at least 1".into()));
    }
    if n == 0 || k == 0 {
        return Err(Error::Infeasible("n and k must be at least 1".into()));
    }
    let stationary_states = match start {
        StartPair::StationaryRight(_) => Some(enumerate_partitions_with_max_blocks(n, k)?),
        _ => None,
    };
    let fixed = match start {
        StartPair::Extremes => Some(StartPair::extremes(n, k)),
        StartPair::Fixed(a, b) => Some((a.clone(), b.clone())),
        StartPair::StationaryRight(_) => None,
    };
    let given = match start {
        StartPair::Extremes => vec![],
        StartPair::Fixed(a, b) => vec![a, b],
        StartPair::StationaryRight(a) => vec![a],
    };
    for u in given {
        if u.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: u.n() });
        }
        if u.k() != k {
            return Err(Error::Infeasible(format!("start tuple has alphabet {}, expected {k}", u.k())));
        }
    }

    // Coalescence time of each trial, or None if still apart at t_max.
    let times: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i as u64).rng();
            let (left, right) = match (&fixed, start) {
                (Some(pair), _) => pair.clone(),
                (None, StartPair::StationaryRight(left)) => {
                    let states = stationary_states.as_ref().unwrap();
                    (left.clone(), sample_stationary_tuple(states, k, &mut rng).expect("states fit k"))
                }
                _ => unreachable!(),
            };
            let mut pair = CoupledPair::new(left, right).expect("validated");
            // Coalesced pairs stay coalesced, so each trial stops at its first meeting.
            for t in 0..=t_max {
                if pair.coalesced {
                    return Some(t);
                }
                if t < t_max {
                    pair = coupled_step(&pair, &mut rng);
                }
            }
            None
        })
        .collect();

    let mut met_at = vec![0usize; t_max + 1];
    for t in times.iter().flatten() {
        met_at[*t] += 1;
    }
    let mut alive = trials;
    let survival = met_at
        .iter()
        .map(|&m| {
            alive -= m;
            alive as f64 / trials as f64
        })
        .collect();
    Ok(CoalescenceCurve { n, k, trials, seed, survival })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::lumped_matrix;
    use crate::oracle::{chi_square_gof, tally};
    use crate::partitions::enumerate_partitions;
    use crate::simulate::burnside_step;
    use num_traits::One;

    fn tuple(c: &[usize], k: usize) -> Tuple {
        Tuple::new(c.to_vec(), k).unwrap()
    }

    #[test]
    fn induced_permutation_examples() {
        let sigma = Permutation::from_cycles(&[&[1, 2, 3]]).unwrap();
        assert_eq!(induced_permutation(&sigma, &[1, 2, 3]).unwrap(), sigma);
        let single = induced_permutation(&sigma, &[2]).unwrap();
        assert_eq!(single.fixed_points(), vec![2]);
        let two = induced_permutation(&sigma, &[1, 3]).unwrap();
        assert_eq!(two, Permutation::from_cycles(&[&[1, 3]]).unwrap());
        assert_eq!(induced_permutation(&sigma, &[1, 4]), Err(Error::NotASubset));
        assert!(Permutation::new([(1, 2), (2, 2)]).is_err());
    }

    #[test]
    fn induced_permutation_is_uniform() {
        // Restricting uniform permutations of {1..5} to {1,2,3} hits each of
        // the 6 permutations of {1,2,3} equally often: 120 / 6 = 20 times.
        let all = {
            let mut out = vec![vec![]];
            for _ in 0..5 {
                out = out
                    .into_iter()
                    .flat_map(|p: Vec<usize>| {
                        (1..=5usize)
                            .filter(|v| !p.contains(v))
                            .map(|v| {
                                let mut q = p.clone();
                                q.push(v);
                                q
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
            out
        };
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for img in all {
            let sigma = Permutation::new((1..=5).zip(img)).unwrap();
            let r = induced_permutation(&sigma, &[1, 2, 3]).unwrap();
            *counts.entry((1..=3).map(|x| r.apply(x).unwrap()).collect()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        assert!(counts.values().all(|&c| c == 20));
    }

    #[test]
    fn maximal_coupling_edge_cases() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..200 {
            let (a, b) = maximal_coupling_uniform(&[2, 4, 6], &[2, 4, 6], &mut rng).unwrap();
            assert_eq!(a, b);
            let (a, b) = maximal_coupling_uniform(&[1, 2], &[3, 4, 5], &mut rng).unwrap();
            assert_ne!(a, b);
            assert!([1, 2].contains(&a) && [3, 4, 5].contains(&b));
        }
        assert_eq!(maximal_coupling_uniform(&[], &[1], &mut rng), Err(Error::EmptySet));
        let draws = 100_000;
        let equal = (0..draws)
            .filter(|_| {
                let (a, b) = maximal_coupling_uniform(&[1, 2], &[1], &mut rng).unwrap();
                a == b
            })
            .count();
        let se = (0.25f64 / draws as f64).sqrt();
        assert!((equal as f64 / draws as f64 - 0.5).abs() <= 3.0 * se);
    }

    fn set_shapes() -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        // Every pair of nonempty subsets of {1..4}.
        for ma in 1u32..16 {
            for mb in 1u32..16 {
                let s = |m: u32| (1..=4).filter(|i| m & (1 << (i - 1)) != 0).collect::<Vec<usize>>();
                out.push((s(ma), s(mb)));
            }
        }
        out
    }

    #[test]
    fn maximal_coupling_exact_law() {
        for (a, b) in set_shapes() {
            let c = MaximalCoupling::new(&a, &b).unwrap();
            let joint = c.joint_distribution();
            let total: Rational = joint.iter().map(|(_, p)| p).sum();
            assert_eq!(total, Rational::one());
            for &x in &a {
                let m: Rational = joint.iter().filter(|((p, _), _)| *p == x).map(|(_, p)| p).sum();
                assert_eq!(m, Rational::new(1.into(), a.len().into()));
            }
            for &y in &b {
                let m: Rational = joint.iter().filter(|((_, q), _)| *q == y).map(|(_, p)| p).sum();
                assert_eq!(m, Rational::new(1.into(), b.len().into()));
            }
            let agree: Rational = joint.iter().filter(|((p, q), _)| p == q).map(|(_, p)| p).sum();
            let common = a.iter().filter(|x| b.contains(x)).count();
            assert_eq!(agree, Rational::new(common.into(), a.len().max(b.len()).into()));
            assert_eq!(agree, c.agreement_probability());
        }
    }

    #[test]
    fn maximal_coupling_sampler_matches_law() {
        let mut rng = RngStream::new(2, 0).rng();
        for (a, b) in [(vec![1, 2, 3, 4], vec![3, 4, 5]), (vec![1], vec![1, 2, 3]), (vec![1, 2], vec![3, 4])] {
            let c = MaximalCoupling::new(&a, &b).unwrap();
            let joint = c.joint_distribution();
            let index: BTreeMap<(usize, usize), usize> =
                joint.iter().enumerate().map(|(i, (xy, _))| (*xy, i)).collect();
            let mut counts = vec![0u64; joint.len()];
            for _ in 0..50_000 {
                counts[index[&c.sample(&mut rng)]] += 1;
            }
            let probs: Vec<f64> = joint.iter().map(|(_, p)| crate::combinatorics::rational_to_f64(p)).collect();
            let (_, p) = chi_square_gof(&counts, &probs).unwrap();
            assert!(p > 0.001, "a={a:?} b={b:?} p={p}");
        }
    }

    #[test]
    fn coalesced_pairs_stay_together() {
        let mut rng = RngStream::new(3, 0).rng();
        let mut pair = CoupledPair::new(tuple(&[1, 2, 2], 5), tuple(&[1, 2, 2], 5)).unwrap();
        assert!(pair.coalesced);
        for _ in 0..100 {
            pair = coupled_step(&pair, &mut rng);
            assert!(pair.coalesced);
            assert_eq!(pair.left, pair.right);
        }
    }

    #[test]
    fn coupled_marginals_match_kernel() {
        let m = lumped_matrix(3, 3).unwrap();
        let states = enumerate_partitions(3).unwrap();
        let pair = CoupledPair::new(tuple(&[1, 1, 1], 3), tuple(&[1, 2, 3], 3)).unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for _ in 0..100_000 {
            let next = coupled_step(&pair, &mut rng);
            left.push(SetPartition::from_tuple(&next.left));
            right.push(SetPartition::from_tuple(&next.right));
        }
        for (side, row) in [(&left, 0usize), (&right, 4)] {
            let probs: Vec<f64> = m.row(row).map(crate::combinatorics::rational_to_f64).collect();
            let (_, p) = chi_square_gof(&tally(side, &states), &probs).unwrap();
            assert!(p > 0.001, "row {row}: p = {p}");
        }
    }

    #[test]
    fn coupled_marginals_match_single_chain_on_tuples() {
        // Compare the full-tuple law of one side with the uncoupled step.
        let u = tuple(&[1, 2], 4);
        let v = tuple(&[3, 3], 4);
        let pair = CoupledPair::new(u.clone(), v).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        let mut coupled = BTreeMap::<Vec<usize>, u64>::new();
        let mut single = BTreeMap::<Vec<usize>, u64>::new();
        for _ in 0..80_000 {
            *coupled.entry(coupled_step(&pair, &mut rng).left.coords().to_vec()).or_default() += 1;
            *single.entry(burnside_step(&u, &mut rng).coords().to_vec()).or_default() += 1;
        }
        let keys: Vec<_> = coupled.keys().chain(single.keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let a: Vec<u64> = keys.iter().map(|k| *coupled.get(k).unwrap_or(&0)).collect();
        let b: Vec<u64> = keys.iter().map(|k| *single.get(k).unwrap_or(&0)).collect();
        let (_, p) = crate::oracle::chi_square_two_sample(&a, &b).unwrap();
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn disjoint_support_match_rate() {
        let (n, k) = (2usize, 4usize);
        let pair = CoupledPair::new(tuple(&[1, 1], k), tuple(&[2, 2], k)).unwrap();
        let mut rng = RngStream::new(6, 0).rng();
        let draws = 100_000;
        let matches: usize = (0..draws)
            .map(|_| {
                let next = coupled_step(&pair, &mut rng);
                (0..n).filter(|&i| next.left.coords()[i] == next.right.coords()[i]).count()
            })
            .sum();
        let rate = matches as f64 / (draws * n) as f64;
        let floor = 1.0 / (2.0 * k as f64);
        let se = (floor * (1.0 - floor) / (draws * n) as f64).sqrt();
        assert!(rate >= floor - 3.0 * se, "rate = {rate}");
    }

    #[test]
    fn experiment_basics() {
        let c = coalescence_experiment(3, 3, 0, 100, 1, &StartPair::Extremes).unwrap();
        assert_eq!(c.survival, vec![1.0]);
        let c = coalescence_experiment(3, 5, 40, 2000, 2, &StartPair::Extremes).unwrap();
        assert!(c.survival.windows(2).all(|w| w[1] <= w[0]));
        let again = coalescence_experiment(3, 5, 40, 2000, 2, &StartPair::Extremes).unwrap();
        assert_eq!(c, again);
        assert!(coalescence_experiment(3, 3, 5, 0, 1, &StartPair::Extremes).is_err());
        let csv = c.to_csv();
        assert!(csv.contains("t,survival,bound\n0,"));
    }

    #[test]
    fn extremes_cover_both_cases() {
        let (l, r) = StartPair::extremes(4, 4);
        assert_eq!(l.coords(), &[1, 1, 1, 1]);
        assert_eq!(r.coords(), &[1, 2, 3, 4]);
        let (_, r) = StartPair::extremes(4, 8);
        assert_eq!(r.coords(), &[5, 6, 7, 8]);
        let (_, r) = StartPair::extremes(5, 3);
        assert_eq!(SetPartition::from_tuple(&r).block_count(), 3);
    }
}

//! Independent samplers and goodness-of-fit tests used to check the chain.
//!
//! Stam's sampler draws an urn count `N` with `P(N = m) = m^n / (e B_n m!)`,
//! drops `n` labelled balls uniformly into `N` urns and reads off the
//! partition of the balls. The result is exactly uniform on partitions of
//! `[n]`, and the number of empty urns is independent of the partition.

use std::collections::HashMap;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::factorial::ln_factorial;

use crate::combinatorics::bell;
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, SetPartition};

/// Tail mass below which the urn-count distribution is truncated.
pub const STAM_TAIL: f64 = 1.0 / (1u64 << 60) as f64;

fn ln_bigint(x: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `ln(m^n / m!)`, with `0^0 = 1`.
fn ln_term(n: usize, m: usize) -> f64 {
    if m == 0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * (m as f64).ln() - ln_factorial(m as u64)
}

/// Ratio of consecutive terms `a(m+1)/a(m)` for `a(m) = m^n/m!`, `m ≥ 1`.
/// It decreases in `m`, so a geometric series bounds every tail past `m`.
fn term_ratio(n: usize, m: usize) -> f64 {
    (n as f64 * (1.0 + 1.0 / m as f64).ln()).exp() / (m as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DobinskiEstimate {
    pub value: f64,
    /// Upper bound on the omitted tail (infinite if the terms have not yet
    /// started decreasing geometrically).
    pub tail_bound: f64,
}

/// Truncated Dobinski series `(1/e) Σ_{m < terms} m^n / m!`.
pub fn dobinski_bell(n: usize, terms: usize) -> Result<DobinskiEstimate> {
    if terms == 0 {
        return Err(Error::Infeasible("at least one term is required".into()));
    }
    let value: f64 = (0..terms).map(|m| (ln_term(n, m) - 1.0).exp()).sum();
    let last = terms - 1;
    let tail_bound = if last == 0 {
        f64::INFINITY
    } else {
        let r = term_ratio(n, last);
        if r < 1.0 {
            (ln_term(n, last) - 1.0).exp() * r / (1.0 - r)
        } else {
            f64::INFINITY
        }
    };
    Ok(DobinskiEstimate { value, tail_bound })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StamDraw {
    pub partition: SetPartition,
    pub urn_count: usize,
    pub empty_urns: usize,
}

/// Stam's exact uniform sampler with a precomputed urn-count table.
#[derive(Debug, Clone)]
pub struct StamSampler {
    n: usize,
    cdf: Vec<f64>,
    truncated_mass: f64,
    tail_bound: f64,
}

impl StamSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Infeasible("n must be at least 1".into()));
        }
        let ln_norm = 1.0 + ln_bigint(&bell(n));
        let mut probs = vec![0.0];
        let mut m = 1usize;
        let tail_bound = loop {
            let p = (ln_term(n, m) - ln_norm).exp();
            probs.push(p);
            let r = term_ratio(n, m);
            if r < 1.0 {
                let tail = p * r / (1.0 - r);
                if tail < STAM_TAIL {
                    break tail;
                }
            }
            m += 1;
        };
        let mut acc = 0.0;
        let cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { n, truncated_mass: acc, cdf, tail_bound })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest urn count with nonzero mass in the table.
    pub fn max_urns(&self) -> usize {
        self.cdf.len() - 1
    }

    /// Mass of the table before normalization; `1 − tail ≤ mass ≤ 1` up to
    /// rounding.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `P(N = m)` from the table.
    pub fn urn_probability(&self, m: usize) -> f64 {
        match m {
            0 => self.cdf[0],
            _ if m < self.cdf.len() => self.cdf[m] - self.cdf[m - 1],
            _ => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> StamDraw {
        let target = rng.random::<f64>() * self.truncated_mass;
        let urn_count = self.cdf.partition_point(|&c| c <= target).clamp(1, self.max_urns());
        let labels: Vec<usize> = (0..self.n).map(|_| rng.random_range(0..urn_count)).collect();
        let partition = SetPartition::from_labels(&labels);
        let empty_urns = urn_count - partition.block_count();
        StamDraw { partition, urn_count, empty_urns }
    }
}

/// One draw from a freshly built sampler. Prefer [`StamSampler`] for many draws.
pub fn stam_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StamDraw> {
    Ok(StamSampler::new(n)?.sample(rng))
}

/// CSV draw log with columns `draw_index,urn_count,block_count,empty_urns,rgs`.
pub fn draw_log_csv(draws: &[StamDraw]) -> String {
    let mut out = String::from("draw_index,urn_count,block_count,empty_urns,rgs\n");
    for (i, d) in draws.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},\"{}\"\n",
            d.urn_count,
            d.partition.block_count(),
            d.empty_urns,
            d.partition
        ));
    }
    out
}

/// Uniform sampler by index into the full enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationSampler {
    states: Vec<SetPartition>,
}

impl EnumerationSampler {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { states: enumerate_partitions(n)? })
    }

    pub fn states(&self) -> &[SetPartition] {
        &self.states
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SetPartition {
        self.states[rng.random_range(0..self.states.len())].clone()
    }
}

pub fn enumeration_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SetPartition> {
    Ok(EnumerationSampler::new(n)?.sample(rng))
}

/// Counts of each state of `states` among `samples`. Samples outside
/// `states` are ignored.
pub fn tally(samples: &[SetPartition], states: &[SetPartition]) -> Vec<u64> {
    let index: HashMap<&SetPartition, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut counts = vec![0u64; states.len()];
    for s in samples {
        if let Some(&i) = index.get(s) {
            counts[i] += 1;
        }
    }
    counts
}

fn upper_tail(stat: f64, df: usize) -> Result<f64> {
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(dist.sf(stat))
}

/// Pearson statistic against equal cell probabilities, with its upper-tail
/// p-value.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    let cells = counts.len();
    if cells < 2 {
        return Err(Error::Degenerate("need at least two cells".into()));
    }
    chi_square_gof(counts, &vec![1.0 / cells as f64; cells])
}

/// Pearson goodness-of-fit statistic against `probs`, with p-value.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<(f64, f64)> {
    if counts.len() != probs.len() {
        return Err(Error::DimensionMismatch { expected: probs.len(), found: counts.len() });
    }
    let total: u64 = counts.iter().sum();
    if total == 0 || counts.len() < 2 {
        return Err(Error::Degenerate("need a positive total over at least two cells".into()));
    }
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        let expected = p * total as f64;
        if expected > 0.0 {
            stat += (c as f64 - expected).powi(2) / expected;
            cells += 1;
        } else if c > 0 {
            return Ok((f64::INFINITY, 0.0));
        }
    }
    if cells < 2 {
        return Err(Error::Degenerate("fewer than two cells with positive probability".into()));
    }
    Ok((stat, upper_tail(stat, cells - 1)?))
}

/// Pearson test of independence on a contingency table (rows × columns).
/// Empty rows and columns are dropped.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<(f64, f64)> {
    let cols = table.first().map_or(0, |r| r.len());
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::Degenerate("ragged contingency table".into()));
    }
    let row_tot: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_tot: Vec<u64> = (0..cols).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    let total: u64 = row_tot.iter().sum();
    let live_rows = row_tot.iter().filter(|&&t| t > 0).count();
    let live_cols = col_tot.iter().filter(|&&t| t > 0).count();
    if live_rows < 2 || live_cols < 2 {
        return Err(Error::Degenerate("need two nonempty rows and columns".into()));
    }
    let mut stat = 0.0;
    for (r, row) in table.iter().enumerate() {
        for (c, &obs) in row.iter().enumerate() {
            let expected = row_tot[r] as f64 * col_tot[c] as f64 / total as f64;
            if expected > 0.0 {
                stat += (obs as f64 - expected).powi(2) / expected;
            }
        }
    }
    Ok((stat, upper_tail(stat, (live_rows - 1) * (live_cols - 1))?))
}

/// Two-sample chi-square test that two count vectors share a distribution.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let table: Vec<Vec<u64>> = vec![a.to_vec(), b.to_vec()];
    chi_square_independence(&table)
}

/// Kolmogorov–Smirnov statistic of `samples` against Uniform(0, 1), with the
/// asymptotic p-value.
pub fn ks_uniform(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let m = s.len() as f64;
    let d = s
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / m - x).max(x - i as f64 / m))
        .fold(0.0f64, f64::max);
    let lambda = (m.sqrt() + 0.12 + 0.11 / m.sqrt()) * d;
    let p: f64 = (1..=100)
        .map(|j| {
            let j = j as f64;
            let sign = if j as i64 % 2 == 1 { 1.0 } else { -1.0 };
            2.0 * sign * (-2.0 * j * j * lambda * lambda).exp()
        })
        .sum();
    Ok((d, p.clamp(0.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmptyUrnReport {
    pub n: usize,
    pub draws: usize,
    pub min_empty: usize,
    pub mean: f64,
    pub variance: f64,
    /// Variance over mean; 1 for a Poisson law.
    pub dispersion: f64,
    /// Approximate standard error of the dispersion index under a Poisson
    /// law, `sqrt(2/(draws − 1))`.
    pub dispersion_se: f64,
    /// `histogram[e]` = number of draws with `e` empty urns.
    pub histogram: Vec<u64>,
    pub independence_stat: f64,
    pub independence_p: f64,
}

/// Empirical law of the empty-urn count and a test of its independence from
/// the block count.
pub fn empty_urn_diagnostics<R: Rng + ?Sized>(n: usize, draws: usize, rng: &mut R) -> Result<EmptyUrnReport> {
    if draws < 2 {
        return Err(Error::Degenerate("need at least two draws".into()));
    }
    let sampler = StamSampler::new(n)?;
    let all: Vec<StamDraw> = (0..draws).map(|_| sampler.sample(rng)).collect();
    let mut histogram = Vec::new();
    for d in &all {
        if d.empty_urns >= histogram.len() {
            histogram.resize(d.empty_urns + 1, 0);
        }
        histogram[d.empty_urns] += 1;
    }
    let m = draws as f64;
    let mean = all.iter().map(|d| d.empty_urns as f64).sum::<f64>() / m;
    let variance = all.iter().map(|d| (d.empty_urns as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0);

    // Empty urns binned as 0, 1, 2, 3+ against block count.
    const BINS: usize = 4;
    let mut table = vec![vec![0u64; BINS]; n];
    for d in &all {
        table[d.partition.block_count() - 1][d.empty_urns.min(BINS - 1)] += 1;
    }
    let (independence_stat, independence_p) = match chi_square_independence(&table) {
        Ok(r) => r,
        // n = 1 has a single block-count row; nothing to test.
        Err(Error::Degenerate(_)) => (0.0, 1.0),
        Err(e) => return Err(e),
    };
    Ok(EmptyUrnReport {
        n,
        draws,
        min_empty: all.iter().map(|d| d.empty_urns).min().unwrap_or(0),
        mean,
        variance,
        dispersion: if mean > 0.0 { variance / mean } else { f64::NAN },
        dispersion_se: (2.0 / (m - 1.0)).sqrt(),
        histogram,
        independence_stat,
        independence_p,
    })
}

//! Distance to stationarity, spectra and bound calculators for the lumped
//! chain.
//!
//! Rows of the lumped kernel coincide within a block-count class, so both
//! distances and eigenvalues are computed on the block-count projection `L`
//! and transferred back to partitions.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::{bell, factorial, rational_string, rational_to_f64, stirling2_row, MomentTable, Rational};
use crate::error::{Error, Result};
use crate::kernel::{block_count_matrix, class_sizes, full_transition_with, lumped_class_table, state_count, KernelMatrix};

/// Once the common denominator of an exact distance computation passes this
/// many bits, the curve continues in `f64`.
pub const EXACT_BIT_BUDGET: u64 = 1 << 14;

/// Padded spectra longer than this are reported only by their nonzero part
/// and the multiplicity of zero.
pub const PADDED_SPECTRUM_LIMIT: usize = 200_000;

/// Largest allowed eigen-residual `‖A v − λ v‖`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// `½ Σ |p − q|`.
pub fn tv_distance(p: &[Rational], q: &[Rational]) -> Result<Rational> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    let sum: Rational = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / Rational::from_integer(2.into()))
}

#[derive(Debug, Clone)]
pub struct DistanceCurve {
    pub n: usize,
    pub k: usize,
    /// `d(t)` for `t = 0..=t_max`.
    pub d: Vec<f64>,
    /// Exact `d(t)` for the leading `t` values computed in rational arithmetic.
    pub d_exact: Vec<Rational>,
    pub coupling_bound: Vec<f64>,
    /// `(1 − c)^t` when `k < n`.
    pub minorization_bound: Option<Vec<f64>>,
    /// Declared absolute error of the floating-point tail (0 when fully exact).
    pub float_error_bound: f64,
}

impl DistanceCurve {
    pub fn t_values(&self) -> std::ops::Range<usize> {
        0..self.d.len()
    }

    pub fn t_max(&self) -> usize {
        self.d.len() - 1
    }

    pub fn exact(&self, t: usize) -> Option<&Rational> {
        self.d_exact.get(t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,d,coupling_bound");
        if self.minorization_bound.is_some() {
            out.push_str(",minorization_bound");
        }
        out.push_str(",d_exact\n");
        for t in self.t_values() {
            out.push_str(&format!("{t},{},{}", crate::fmt_f64(self.d[t]), crate::fmt_f64(self.coupling_bound[t])));
            if let Some(m) = &self.minorization_bound {
                out.push_str(&format!(",{}", crate::fmt_f64(m[t])));
            }
            let exact = self.d_exact.get(t).map(rational_string).unwrap_or_default();
            out.push_str(&format!(",{exact}\n"));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "t_values": self.t_values().collect::<Vec<_>>(),
            "d_values": self.d,
            "d_exact": self.d_exact.iter().map(rational_string).collect::<Vec<_>>(),
            "bound_values": self.coupling_bound,
            "minorization_bound": self.minorization_bound,
            "exact_through": self.d_exact.len() as i64 - 1,
            "float_error_bound": self.float_error_bound,
        })
    }
}

fn lcm_of_denominators<'a>(xs: impl Iterator<Item = &'a Rational>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Curve from one start: exact prefix, then floats.
fn curve_from_start(
    start: usize,
    m_int: &[Vec<BigInt>],
    denom: &BigInt,
    l_float: &[Vec<f64>],
    pi_num: &[BigInt],
    pi_den: &BigInt,
    pi_float: &[f64],
    t_max: usize,
) -> (Vec<Rational>, Vec<f64>) {
    let dim = m_int.len();
    let mut v: Vec<BigInt> = (0..dim).map(|j| if j == start { BigInt::one() } else { BigInt::zero() }).collect();
    let mut scale = BigInt::one();
    let mut exact = Vec::new();
    let mut floats = Vec::new();
    let mut p: Option<Vec<f64>> = None;
    for t in 0..=t_max {
        match &p {
            None => {
                let num: BigInt = v.iter().zip(pi_num).map(|(vj, aj)| (vj * pi_den - aj * &scale).abs()).sum();
                let d = Rational::new(num, BigInt::from(2) * pi_den * &scale);
                floats.push(rational_to_f64(&d));
                exact.push(d);
            }
            Some(p) => {
                floats.push(0.5 * p.iter().zip(pi_float).map(|(a, b)| (a - b).abs()).sum::<f64>());
            }
        }
        if t == t_max {
            break;
        }
        match &mut p {
            None => {
                v = (0..dim).map(|j| v.iter().zip(m_int).map(|(vi, row)| vi * &row[j]).sum()).collect();
                scale *= denom;
                if scale.bits() > EXACT_BIT_BUDGET {
                    p = Some(v.iter().map(|vj| rational_to_f64(&Rational::new(vj.clone(), scale.clone()))).collect());
                }
            }
            Some(q) => {
                *q = (0..dim).map(|j| q.iter().zip(l_float).map(|(qi, row)| qi * row[j]).sum()).collect();
            }
        }
    }
    (exact, floats)
}

/// `d(t) = max_x ‖K^t(x, ·) − π‖_TV` for `t = 0..=t_max`.
///
/// The maximum runs over one representative of each distinct row, which for
/// lumped matrices means one partition per block count.
pub fn distance_curve(m: &KernelMatrix, t_max: usize) -> Result<DistanceCurve> {
    let chain = m.class_chain();
    let one = Rational::one();
    if chain.transition.iter().any(|row| row.iter().sum::<Rational>() != one) {
        return Err(Error::Infeasible("matrix is not row-stochastic".into()));
    }
    let (n, k) = (m.n(), m.k());
    let denom = lcm_of_denominators(chain.transition.iter().flatten());
    let m_int: Vec<Vec<BigInt>> = chain
        .transition
        .iter()
        .map(|row| row.iter().map(|x| (x * Rational::from_integer(denom.clone())).to_integer()).collect())
        .collect();
    let l_float: Vec<Vec<f64>> = chain.transition.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
    let pi_den = lcm_of_denominators(chain.stationary.iter());
    let pi_num: Vec<BigInt> = chain
        .stationary
        .iter()
        .map(|x| (x * Rational::from_integer(pi_den.clone())).to_integer())
        .collect();
    let pi_float: Vec<f64> = chain.stationary.iter().map(rational_to_f64).collect();

    // Starts with the same row and the same stationary mass give the same curve.
    let mut starts: Vec<usize> = Vec::new();
    for x in 0..chain.transition.len() {
        let dup = starts
            .iter()
            .any(|&y| chain.transition[y] == chain.transition[x] && chain.stationary[y] == chain.stationary[x]);
        if !dup {
            starts.push(x);
        }
    }
    let per_start: Vec<(Vec<Rational>, Vec<f64>)> = starts
        .par_iter()
        .map(|&s| curve_from_start(s, &m_int, &denom, &l_float, &pi_num, &pi_den, &pi_float, t_max))
        .collect();

    let exact_len = per_start.iter().map(|(e, _)| e.len()).min().unwrap_or(0);
    let d_exact: Vec<Rational> = (0..exact_len)
        .map(|t| per_start.iter().map(|(e, _)| e[t].clone()).max().unwrap())
        .collect();
    let d: Vec<f64> = (0..=t_max)
        .map(|t| match d_exact.get(t) {
            Some(x) => rational_to_f64(x),
            None => per_start.iter().map(|(_, f)| f[t]).fold(0.0, f64::max),
        })
        .collect();
    let float_steps = (t_max + 1 - exact_len) as f64;
    let float_error_bound = if float_steps == 0.0 {
        0.0
    } else {
        (float_steps + 1.0) * (chain.transition.len() as f64 + 2.0) * f64::EPSILON
    };
    let minorization_bound = if k < n {
        let c = rational_to_f64(&minorization_report(n, k)?.c);
        Some((0..=t_max).map(|t| (1.0 - c).powi(t as i32)).collect())
    } else {
        None
    };
    Ok(DistanceCurve {
        n,
        k,
        d,
        d_exact,
        coupling_bound: (0..=t_max).map(|t| crate::coupling::coupling_bound(n, k, t)).collect(),
        minorization_bound,
        float_error_bound,
    })
}

/// First `t` with `d(t) ≤ eps`, or `None` if the horizon is reached first.
pub fn mixing_time(curve: &DistanceCurve, eps: f64) -> Option<usize> {
    let eps_exact = Rational::from_float(eps);
    curve.t_values().find(|&t| match (curve.exact(t), &eps_exact) {
        (Some(d), Some(e)) => d <= e,
        _ => curve.d[t] <= eps,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub k: usize,
    /// Number of lumped states.
    pub state_count: String,
    /// Full spectrum in decreasing order, or empty when longer than
    /// [`PADDED_SPECTRUM_LIMIT`].
    pub eigenvalues: Vec<f64>,
    /// Spectrum of the block-count projection, decreasing.
    pub block_eigenvalues: Vec<f64>,
    /// Extra zeros carried by the lumped matrix beyond the block spectrum.
    pub zero_multiplicity: String,
    pub max_residual: f64,
    pub lambda_1: f64,
    pub lambda_star: f64,
    pub relaxation_time: f64,
    /// `1 − 1/κ̄` with `κ̄ = 1/(N · min K̄)`.
    pub poincare_upper: f64,
    /// `1 − B_n/(n+1)^{n−1}`, defined for `k ≥ n`.
    pub poincare_closed_form: Option<f64>,
    /// Undefined when there is a single lumped state.
    pub cheeger_lower: Option<f64>,
    pub poincare_holds: bool,
    pub cheeger_holds: bool,
    /// `1 − ln(n)/n`, reported for comparison only.
    pub conjectured_upper: Option<f64>,
    pub conjecture_holds: Option<bool>,
}

impl SpectralReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data")
    }
}

/// Eigenvalues (decreasing) and unit eigenvectors of the symmetrized
/// block-count matrix `sqrt(c_i c_j) K̄(i, j)`, where `c_i = S(n, i)`.
pub fn block_eigensystem(n: usize, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>, f64)> {
    let table = lumped_class_table(n, k)?;
    let sizes: Vec<f64> = class_sizes(n, k).iter().map(|c| c.to_f64().unwrap()).collect();
    let m = table.len();
    let a = DMatrix::from_fn(m, m, |i, j| (sizes[i] * sizes[j]).sqrt() * rational_to_f64(&table[i][j]));
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Solver(format!("eigensolver did not converge for n = {n}, k = {k}")))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let mut max_residual: f64 = 0.0;
    let mut values = Vec::with_capacity(m);
    let mut vectors = Vec::with_capacity(m);
    for &i in &order {
        let v = eig.eigenvectors.column(i);
        let lambda = eig.eigenvalues[i];
        max_residual = max_residual.max((&a * v - v * lambda).norm());
        values.push(lambda);
        vectors.push(v.iter().copied().collect());
    }
    if max_residual > RESIDUAL_TOLERANCE {
        return Err(Error::Solver(format!("eigen-residual {max_residual:e} above tolerance")));
    }
    Ok((values, vectors, max_residual))
}

pub fn spectrum(n: usize, k: usize) -> Result<SpectralReport> {
    if n == 0 || k == 0 {
        return Err(Error::Infeasible("n and k must be at least 1".into()));
    }
    if n > crate::partitions::ENUMERATION_CAP {
        return Err(Error::CapExceeded { n, cap: crate::partitions::ENUMERATION_CAP });
    }
    let (block, _, max_residual) = block_eigensystem(n, k)?;
    let total = state_count(n, k);
    let zeros = &total - BigInt::from(block.len());
    let full_len = total.to_usize().unwrap_or(usize::MAX);

    // The full spectrum is the block spectrum plus `zeros` zero eigenvalues.
    let mut merged: Vec<f64> = block.clone();
    if zeros > BigInt::zero() {
        merged.push(0.0);
    }
    merged.sort_by(|a, b| b.total_cmp(a));
    let lambda_1 = merged.get(1).copied().unwrap_or(0.0);
    let lambda_min = *merged.last().unwrap();
    let lambda_star = lambda_1.max(lambda_min.abs());
    let eigenvalues = if full_len <= PADDED_SPECTRUM_LIMIT {
        let mut all = block.clone();
        all.extend(std::iter::repeat_n(0.0, full_len - block.len()));
        all.sort_by(|a, b| b.total_cmp(a));
        all
    } else {
        Vec::new()
    };

    let poincare = poincare_upper_bound(n, k)?;
    let cheeger_lower = if total > BigInt::one() { Some(cheeger_lower_bound(n, k, None)?) } else { None };
    let conjectured_upper = (n >= 2).then(|| 1.0 - (n as f64).ln() / n as f64);
    Ok(SpectralReport {
        n,
        k,
        state_count: total.to_string(),
        eigenvalues,
        block_eigenvalues: block,
        zero_multiplicity: zeros.to_string(),
        max_residual,
        lambda_1,
        lambda_star,
        relaxation_time: 1.0 / (1.0 - lambda_1),
        poincare_upper: poincare.matrix,
        poincare_closed_form: poincare.closed_form,
        cheeger_lower,
        poincare_holds: lambda_1 <= poincare.matrix + 1e-12,
        cheeger_holds: cheeger_lower.is_none_or(|c| c <= lambda_1 + 1e-12),
        conjectured_upper,
        conjecture_holds: conjectured_upper.map(|c| lambda_1 <= c),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareBound {
    /// `1 − N · min K̄` from the geodesic (single-edge) canonical paths.
    pub matrix: f64,
    /// `1 − B_n/(n+1)^{n−1}`; only for `k ≥ n`.
    pub closed_form: Option<f64>,
}

pub fn poincare_upper_bound(n: usize, k: usize) -> Result<PoincareBound> {
    let table = lumped_class_table(n, k)?;
    let min = table.iter().flatten().min().cloned().ok_or(Error::EmptySet)?;
    let matrix = 1.0 - rational_to_f64(&(min * Rational::from_integer(state_count(n, k))));
    let closed_form = (k >= n).then(|| {
        let ratio = Rational::new(bell(n), BigInt::from(n + 1).pow(n.saturating_sub(1) as u32));
        1.0 - rational_to_f64(&ratio)
    });
    Ok(PoincareBound { matrix, closed_form })
}

/// Members of each block-count class in the set `S`, given as lumped-state
/// indices (block-count-then-lex order), or the first `⌊N/2⌋` states.
fn class_counts(n: usize, k: usize, subset: Option<&[usize]>) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let sizes = class_sizes(n, k);
    let total: BigInt = sizes.iter().sum();
    let mut counts = vec![BigInt::zero(); sizes.len()];
    match subset {
        None => {
            let mut left: BigInt = &total / 2;
            for (c, size) in counts.iter_mut().zip(&sizes) {
                let take = if &left < size { left.clone() } else { size.clone() };
                left -= &take;
                *c = take;
            }
        }
        Some(s) => {
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::Infeasible("subset has repeated states".into()));
            }
            let bounds: Vec<BigInt> = sizes
                .iter()
                .scan(BigInt::zero(), |acc, c| {
                    *acc += c;
                    Some(acc.clone())
                })
                .collect();
            for &x in &sorted {
                let x = BigInt::from(x);
                let class = bounds.iter().position(|b| &x < b).ok_or_else(|| {
                    Error::Infeasible(format!("state index {x} outside 0..{total}"))
                })?;
                counts[class] += 1;
            }
        }
    }
    let size: BigInt = counts.iter().sum();
    if size.is_zero() || size == total {
        return Err(Error::Infeasible("S must be a proper nonempty subset".into()));
    }
    Ok((counts, sizes))
}

/// `Σ_{x ∈ S} Σ_{y ∉ S} K̄(x, y)`.
pub fn cut_sum(n: usize, k: usize, subset: Option<&[usize]>) -> Result<Rational> {
    let (counts, sizes) = class_counts(n, k, subset)?;
    let table = lumped_class_table(n, k)?;
    let mut sum = Rational::zero();
    for (i, s_i) in counts.iter().enumerate() {
        for (j, (s_j, c_j)) in counts.iter().zip(&sizes).enumerate() {
            sum += &table[i][j] * Rational::from_integer(s_i * (c_j - s_j));
        }
    }
    Ok(sum)
}

/// `1 − Q(S, Sᶜ) / (π(S) π(Sᶜ))` under the uniform law on lumped states.
pub fn cheeger_lower_bound(n: usize, k: usize, subset: Option<&[usize]>) -> Result<f64> {
    let (counts, sizes) = class_counts(n, k, subset)?;
    let total: BigInt = sizes.iter().sum();
    let s: BigInt = counts.iter().sum();
    let cut = cut_sum(n, k, subset)?;
    let ratio = cut * Rational::new(total.clone(), s.clone() * (&total - &s));
    Ok(1.0 - rational_to_f64(&ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationBounds {
    pub relaxation_time: f64,
    pub lower: f64,
    pub upper: u64,
}

/// `(t_rel − 1) ln(1/(2ε)) ≤ t_mix(ε) ≤ ⌈t_rel ln(1/(ε π_min))⌉`.
pub fn relaxation_mixing_bounds(lambda_1: f64, pi_min: f64, eps: f64) -> Result<RelaxationBounds> {
    if !(0.0..1.0).contains(&lambda_1) {
        return Err(Error::Infeasible(format!("lambda_1 = {lambda_1} outside [0, 1)")));
    }
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(Error::Infeasible(format!("pi_min = {pi_min} outside (0, 1]")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Infeasible(format!("eps = {eps} outside (0, 1)")));
    }
    let t_rel = 1.0 / (1.0 - lambda_1);
    Ok(RelaxationBounds {
        relaxation_time: t_rel,
        lower: (t_rel - 1.0) * (1.0 / (2.0 * eps)).ln(),
        upper: (t_rel * (1.0 / (eps * pi_min)).ln()).ceil() as u64,
    })
}

#[derive(Debug, Clone)]
pub struct MinorizationReport {
    pub n: usize,
    pub k: usize,
    /// `Σ_v min_u K(u, v)`.
    pub c: Rational,
    /// `1/(k − 1)!`.
    pub floor: Rational,
}

impl MinorizationReport {
    /// Smallest `t` with `(1 − c)^t ≤ eps`.
    pub fn t_mix_upper(&self, eps: f64) -> u64 {
        let c = rational_to_f64(&self.c);
        if c >= 1.0 {
            return if eps >= 1.0 { 0 } else { 1 };
        }
        ((eps.ln() / (1.0 - c).ln()).ceil()).max(0.0) as u64
    }

    /// `⌈(k − 1)! ln(1/ε)⌉`.
    pub fn floor_t_mix_upper(&self, eps: f64) -> u64 {
        (rational_to_f64(&factorial(self.k - 1).into()) * (1.0 / eps).ln()).ceil().max(0.0) as u64
    }

    pub fn to_json(&self, eps: f64) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "c": rational_string(&self.c),
            "c_float": rational_to_f64(&self.c),
            "floor": rational_string(&self.floor),
            "c_at_least_floor": self.c >= self.floor,
            "eps": eps,
            "t_mix_upper": self.t_mix_upper(eps),
            "floor_t_mix_upper": self.floor_t_mix_upper(eps),
        })
    }
}

/// Exact `c = Σ_v min_u K(u, v)` for `k < n`, summed over classes of `v` by
/// distinct-value count and minimized over the feasible `(j_u, overlap)`.
pub fn minorization_report(n: usize, k: usize) -> Result<MinorizationReport> {
    if k == 0 || k >= n {
        return Err(Error::Regime(format!("minorization needs 1 ≤ k < n, got n = {n}, k = {k}")));
    }
    let table = MomentTable::new(n, k)?;
    let stirling = stirling2_row(n);
    let mut c = Rational::zero();
    for j_v in 1..=k {
        let mut best: Option<Rational> = None;
        for j_u in 1..=k {
            let lo = (j_u + j_v).saturating_sub(k);
            for overlap in lo..=j_u.min(j_v) {
                let p = full_transition_with(&table, j_u, j_v, j_u + j_v - overlap)?;
                if best.as_ref().is_none_or(|b| &p < b) {
                    best = Some(p);
                }
            }
        }
        let count = &stirling[j_v] * factorial(k) / factorial(k - j_v);
        c += best.expect("j_u = j_v is always feasible") * Rational::from_integer(count);
    }
    Ok(MinorizationReport { n, k, c, floor: Rational::new(BigInt::one(), factorial(k - 1)) })
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingCheck {
    pub n: usize,
    pub k: usize,
    pub holds: bool,
    /// `bound − d(t)` per `t`.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub first_violation: Option<usize>,
    pub exact_through: usize,
}

/// Compares the exact curve with `n (1 − 1/(2k))^t`; exact rational
/// comparison where available, tolerance `1e-12` beyond.
pub fn verify_coupling_bound(n: usize, k: usize, t_max: usize) -> Result<CouplingCheck> {
    if k < n {
        return Err(Error::Regime(format!("coupling bound needs k ≥ n, got n = {n}, k = {k}")));
    }
    let curve = distance_curve(&block_count_matrix(n, k)?, t_max)?;
    let ratio = Rational::new(BigInt::from(2 * k - 1), BigInt::from(2 * k));
    let mut bound = Rational::from_integer(n.into());
    let mut first_violation = None;
    let mut margins = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let ok = match curve.exact(t) {
            Some(d) => d <= &bound,
            None => curve.d[t] <= curve.coupling_bound[t] + 1e-12,
        };
        if !ok && first_violation.is_none() {
            first_violation = Some(t);
        }
        margins.push(curve.coupling_bound[t] - curve.d[t]);
        bound *= &ratio;
    }
    Ok(CouplingCheck {
        n,
        k,
        holds: first_violation.is_none(),
        min_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        margins,
        first_violation,
        exact_through: curve.d_exact.len().saturating_sub(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::subfactorial;
    use crate::kernel::lumped_matrix;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn tv_examples() {
        let u = vec![r(1, 5); 5];
        assert_eq!(tv_distance(&u, &u).unwrap(), Rational::zero());
        let point = vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1), r(0, 1)];
        assert_eq!(tv_distance(&point, &u).unwrap(), r(4, 5));
        assert_eq!(tv_distance(&[r(1, 2), r(1, 2), r(0, 1)], &[r(0, 1), r(0, 1), r(1, 1)]).unwrap(), r(1, 1));
        assert!(tv_distance(&u, &point[..2]).is_err());
    }

    #[test]
    fn curve_n3_k3() {
        let curve = distance_curve(&lumped_matrix(3, 3).unwrap(), 40).unwrap();
        assert_eq!(curve.exact(0).unwrap(), &r(4, 5));
        // Rows (5/9, 1/9 ×4) and (1/9, 2/9 ×4) against 1/5:
        // ½(16/45 + 4·4/45) = 16/45 and ½(4/45 + 4·1/45) = 4/45.
        assert_eq!(curve.exact(1).unwrap(), &r(16, 45));
        assert!(curve.d.windows(2).all(|w| w[1] <= w[0]));
        let bound = Rational::new(5.into(), 6.into());
        let mut b = Rational::from_integer(3.into());
        for t in 0..=40 {
            assert!(curve.exact(t).unwrap() <= &b, "t = {t}");
            b *= &bound;
        }
        assert_eq!(curve.d_exact.len(), 41);
        assert_eq!(curve.float_error_bound, 0.0);
    }

    #[test]
    fn lumped_and_projected_curves_agree() {
        for (n, k) in [(3, 3), (4, 4), (4, 6), (5, 3)] {
            let a = distance_curve(&lumped_matrix(n, k).unwrap(), 12).unwrap();
            let b = distance_curve(&block_count_matrix(n, k).unwrap(), 12).unwrap();
            assert_eq!(a.d_exact, b.d_exact);
        }
        // A dense lumped matrix goes through the per-state path.
        let m = lumped_matrix(3, 3).unwrap();
        let dense = KernelMatrix::from_json(&m.to_json()).unwrap();
        let a = distance_curve(&m, 10).unwrap();
        let b = distance_curve(&dense, 10).unwrap();
        assert_eq!(a.d_exact, b.d_exact);
    }

    #[test]
    fn curve_against_direct_powers() {
        // Repeated rational vector-matrix products over all B_4 states.
        let m = lumped_matrix(4, 4).unwrap();
        let dense = m.to_dense();
        let d = dense.len();
        let uniform = vec![r(1, d as i64); d];
        let curve = distance_curve(&m, 6).unwrap();
        for t in 0..=6 {
            let worst = (0..d)
                .map(|x| {
                    let mut p: Vec<Rational> = (0..d).map(|y| if y == x { r(1, 1) } else { r(0, 1) }).collect();
                    for _ in 0..t {
                        p = (0..d).map(|y| (0..d).map(|z| &p[z] * &dense[z][y]).sum()).collect();
                    }
                    tv_distance(&p, &uniform).unwrap()
                })
                .max()
                .unwrap();
            assert_eq!(curve.exact(t).unwrap(), &worst);
        }
    }

    #[test]
    fn float_tail_continues_curve() {
        let m = block_count_matrix(9, 9).unwrap();
        let exact = distance_curve(&m, 400).unwrap();
        assert!(exact.d_exact.len() >= 65 && exact.d_exact.len() < 401);
        assert!(exact.float_error_bound > 0.0);
        let t = exact.d_exact.len() - 1;
        // Past the exact prefix the curve sits at the declared float floor.
        assert!(exact.d[t + 1] <= exact.d[t] + exact.float_error_bound);
        assert!(exact.d[t..].iter().all(|&d| d <= exact.d[t] + exact.float_error_bound));
    }

    #[test]
    fn mixing_time_examples() {
        let curve = distance_curve(&lumped_matrix(3, 3).unwrap(), 60).unwrap();
        assert_eq!(mixing_time(&curve, 0.9), Some(0));
        let t = mixing_time(&curve, 0.01).unwrap();
        assert!(t <= 35);
        // d(t) = (16/45)(4/9)^{t−1}: the first t with d ≤ 0.01 is 6.
        assert_eq!(t, 6);
        assert_eq!(mixing_time(&curve, 1e-300), None);
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(3, 3).unwrap();
        let want = [1.0, 4.0 / 9.0, 0.0, 0.0, 0.0];
        assert_eq!(s.eigenvalues.len(), 5);
        for (a, b) in s.eigenvalues.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((s.lambda_1 - 4.0 / 9.0).abs() < 1e-12);
        for k in 2..=8 {
            let s = spectrum(2, k).unwrap();
            let want = 1.0 - 2.0 * subfactorial(k).to_f64().unwrap() / factorial(k).to_f64().unwrap();
            assert!((s.block_eigenvalues[0] - 1.0).abs() < 1e-10);
            assert!((s.block_eigenvalues[1] - want).abs() < 1e-10);
        }
        let s = spectrum(1, 4).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert_eq!(s.lambda_1, 0.0);
    }

    #[test]
    fn spectrum_sanity() {
        for n in 1..=8 {
            for k in [n, n + 2, (n + 1) / 2] {
                let s = spectrum(n, k.max(1)).unwrap();
                assert!(s.block_eigenvalues.iter().all(|&l| (-1.0 - 1e-10..=1.0 + 1e-10).contains(&l)));
                let ones = s.block_eigenvalues.iter().filter(|&&l| (l - 1.0).abs() < 1e-10).count();
                assert_eq!(ones, 1, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn projection_spectrum_matches_lumped() {
        for n in 1usize..=5 {
            for k in [n, n + 1, n.saturating_sub(1).max(1)] {
                let m = lumped_matrix(n, k).unwrap();
                let d = m.dim();
                let a = DMatrix::from_fn(d, d, |x, y| rational_to_f64(m.get(x, y)));
                let mut full: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
                full.sort_by(|a, b| b.total_cmp(a));
                let s = spectrum(n, k).unwrap();
                assert_eq!(full.len(), s.eigenvalues.len());
                for (a, b) in full.iter().zip(&s.eigenvalues) {
                    assert!((a - b).abs() < 1e-10, "n = {n}, k = {k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn bound_sandwich() {
        for n in 2..=8 {
            for k in [n, n + 2] {
                let s = spectrum(n, k).unwrap();
                assert!(s.cheeger_lower.unwrap() <= s.lambda_1 + 1e-12, "n = {n}, k = {k}");
                assert!(s.lambda_1 <= s.poincare_upper + 1e-12, "n = {n}, k = {k}");
            }
        }
        for n in 4..=8 {
            let p = poincare_upper_bound(n, n).unwrap();
            assert!(p.matrix <= p.closed_form.unwrap() + 1e-15);
        }
        assert!(spectrum(2, 2).unwrap().lambda_1.abs() < 1e-12);
    }

    #[test]
    fn cheeger_singleton() {
        // S = {one-block partition}: Q = (1/5)(4/9), π(S)π(Sᶜ) = 4/25.
        let b = cheeger_lower_bound(3, 3, Some(&[0])).unwrap();
        assert!((b - 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(cut_sum(3, 3, Some(&[0])).unwrap(), r(4, 9));
        assert!(cheeger_lower_bound(3, 3, Some(&[])).is_err());
        assert!(cheeger_lower_bound(3, 3, Some(&[0, 1, 2, 3, 4])).is_err());
        assert!(cheeger_lower_bound(3, 3, Some(&[7])).is_err());
        assert!(cheeger_lower_bound(3, 3, Some(&[1, 1])).is_err());
    }

    #[test]
    fn default_cut_matches_explicit_indices() {
        for n in 3..=6 {
            let half = bell(n).to_usize().unwrap() / 2;
            let explicit: Vec<usize> = (0..half).collect();
            assert_eq!(cut_sum(n, n, None).unwrap(), cut_sum(n, n, Some(&explicit)).unwrap());
        }
    }

    #[test]
    fn closed_form_lower_branch() {
        for n in 6..=10 {
            let s = spectrum(n, n).unwrap();
            assert!(1.0 - 5.0 * (n as f64).ln() / n as f64 <= s.lambda_1);
        }
    }

    #[test]
    fn cut_sum_below_previous_bell() {
        for n in 6..=9 {
            let cut = cut_sum(n, n, None).unwrap();
            assert!(cut < Rational::from_integer(bell(n - 1)), "n = {n}: {}", rational_to_f64(&cut));
        }
    }

    #[test]
    fn harper_ratio() {
        for n in 4..=14 {
            let ratio = rational_to_f64(&Rational::new(bell(n), bell(n - 1)));
            assert!(ratio >= n as f64 / (n as f64).ln());
        }
    }

    #[test]
    fn lambda_1_trend() {
        // λ_1(3,3) = 4/9 exceeds λ_1(4,4) = 7/16; from n = 4 on the gap shrinks.
        let l: Vec<f64> = (3..=9).map(|n| spectrum(n, n).unwrap().lambda_1).collect();
        assert!((l[0] - 4.0 / 9.0).abs() < 1e-12 && (l[1] - 7.0 / 16.0).abs() < 1e-12);
        assert!(l[1..].windows(2).all(|w| w[1] >= w[0] - 1e-12), "{l:?}");
    }

    #[test]
    fn relaxation_examples() {
        let b = relaxation_mixing_bounds(0.0, 0.2, 0.25).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, (1.0f64 / 0.05).ln().ceil() as u64);
        assert!(relaxation_mixing_bounds(1.0, 0.2, 0.25).is_err());
        let curve = distance_curve(&lumped_matrix(3, 3).unwrap(), 40).unwrap();
        let t = mixing_time(&curve, 0.25).unwrap() as f64;
        let b = relaxation_mixing_bounds(4.0 / 9.0, 0.2, 0.25).unwrap();
        assert!(b.lower <= t && t <= b.upper as f64);
    }

    #[test]
    fn gap_lower_bound_on_mixing_time() {
        for n in 6..=9 {
            let eps = 0.25;
            let curve = distance_curve(&lumped_matrix(n, n).unwrap(), 100).unwrap();
            let t = mixing_time(&curve, eps).unwrap() as f64;
            let nf = n as f64;
            assert!((nf / (5.0 * nf.ln()) - 1.0) * (1.0 / (2.0 * eps)).ln() <= t);
        }
    }

    #[test]
    fn spectral_chi_square_dominates_tv() {
        // χ²_x(t) = Σ_{l ≥ 1} λ_l^{2t} φ_l(x)², φ_l normalized in L²(π_L).
        let (n, k) = (3, 3);
        let (vals, vecs, _) = block_eigensystem(n, k).unwrap();
        let chain = block_count_matrix(n, k).unwrap().class_chain();
        let pi: Vec<f64> = chain.stationary.iter().map(rational_to_f64).collect();
        let l: Vec<Vec<f64>> = chain.transition.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
        let curve = distance_curve(&lumped_matrix(n, k).unwrap(), 20).unwrap();
        for t in 1..=20 {
            let mut worst_chi: f64 = 0.0;
            for x in 0..pi.len() {
                let chi: f64 = (1..vals.len())
                    .map(|i| vals[i].powi(2 * t as i32) * vecs[i][x].powi(2) / pi[x])
                    .sum();
                // Direct χ² from powers of L.
                let mut p: Vec<f64> = (0..pi.len()).map(|y| if y == x { 1.0 } else { 0.0 }).collect();
                for _ in 0..t {
                    p = (0..pi.len()).map(|y| (0..pi.len()).map(|z| p[z] * l[z][y]).sum()).collect();
                }
                let direct: f64 = p.iter().zip(&pi).map(|(a, b)| (a - b).powi(2) / b).sum();
                assert!((chi - direct).abs() < 1e-12);
                worst_chi = worst_chi.max(chi);
            }
            assert!(4.0 * curve.d[t].powi(2) <= worst_chi + 1e-15, "t = {t}");
        }
    }

    /// `Σ_v min_u K(u, v)` over every `u, v ∈ [k]^n` using class formulas
    /// for single entries.
    fn brute_minorization(n: usize, k: usize) -> Rational {
        let table = MomentTable::new(n, k).unwrap();
        let tuples: Vec<Vec<usize>> = (0..k.pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let c = code % k + 1;
                        code /= k;
                        c
                    })
                    .collect()
            })
            .collect();
        let distinct = |u: &[usize]| {
            let mut v = u.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        tuples
            .iter()
            .map(|v| {
                tuples
                    .iter()
                    .map(|u| {
                        let (du, dv) = (distinct(u), distinct(v));
                        let joint = distinct(&[u.as_slice(), v.as_slice()].concat()).len();
                        full_transition_with(&table, du.len(), dv.len(), joint).unwrap()
                    })
                    .min()
                    .unwrap()
            })
            .sum()
    }

    #[test]
    fn minorization_examples() {
        for (k, n) in [(2, 3), (3, 5), (4, 6), (2, 4)] {
            let rep = minorization_report(n, k).unwrap();
            assert!(rep.c >= rep.floor, "k = {k}, n = {n}");
            assert!(rep.c <= Rational::one() && rep.c > Rational::zero());
        }
        for (k, n) in [(2, 3), (2, 4), (3, 4)] {
            assert_eq!(minorization_report(n, k).unwrap().c, brute_minorization(n, k));
        }
        assert!(matches!(minorization_report(3, 3), Err(Error::Regime(_))));
        let rep = minorization_report(3, 2).unwrap();
        let curve = distance_curve(&lumped_matrix(3, 2).unwrap(), 30).unwrap();
        let step = Rational::one() - &rep.c;
        let mut b = Rational::one();
        for t in 0..=30 {
            assert!(curve.exact(t).unwrap() <= &b);
            b *= &step;
        }
        assert!(curve.minorization_bound.is_some());
    }

    #[test]
    fn coupling_bound_checks() {
        for (n, k, t) in [(3, 3, 40), (4, 4, 60), (4, 8, 60)] {
            let c = verify_coupling_bound(n, k, t).unwrap();
            assert!(c.holds, "n = {n}, k = {k}");
            assert!(c.min_margin >= 0.0);
        }
        let s = spectrum(4, 8).unwrap();
        assert!(s.lambda_1 <= 1.0 - 1.0 / 16.0);
        assert!(verify_coupling_bound(4, 3, 5).is_err());
    }

    #[test]
    fn csv_layout() {
        let c = distance_curve(&lumped_matrix(3, 3).unwrap(), 0).unwrap();
        assert_eq!(c.to_csv().lines().nth(1).unwrap().split(',').last().unwrap(), "4/5");
        let c = distance_curve(&lumped_matrix(3, 2).unwrap(), 2).unwrap();
        assert!(c.to_csv().starts_with("t,d,coupling_bound,minorization_bound,d_exact\n"));
    }
}

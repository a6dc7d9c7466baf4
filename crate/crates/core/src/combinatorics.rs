//! Exact integer and rational primitives.
//!
//! Everything here is computed with arbitrary-precision integers by
//! recurrence. No floating point is involved.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Formats a rational as `"num/den"`, including integers (`"1/1"`).
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the `"num/den"` form produced by [`rational_string`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = s.split_once('/')?;
    let num: BigInt = num.trim().parse().ok()?;
    let den: BigInt = den.trim().parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    // Keep the top 64 bits of each part so huge values do not overflow.
    fn top_bits(x: &BigInt) -> (f64, i64) {
        let bits = x.bits();
        if bits <= 64 {
            (x.to_f64().unwrap_or(f64::NAN), 0)
        } else {
            let shift = bits - 64;
            ((x >> shift).to_f64().unwrap_or(f64::NAN), shift as i64)
        }
    }
    let (num, num_shift) = top_bits(r.numer());
    let (den, den_shift) = top_bits(r.denom());
    let exp = (num_shift - den_shift).clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    num / den * 2f64.powi(exp)
}

pub fn factorial(m: usize) -> BigInt {
    (2..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// The `n`th Bell number, computed with the Bell triangle.
pub fn bell(n: usize) -> BigInt {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().cloned().unwrap_or_else(BigInt::one));
        for v in &row {
            let last = next.last().unwrap().clone();
            next.push(last + v);
        }
        row = next;
    }
    row[0].clone()
}

/// Row `n` of the Stirling triangle of the second kind: entries `0..=n`.
pub fn stirling2_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m + 1];
        for j in 1..=m {
            let carry = if j < row.len() { &row[j] * BigInt::from(j) } else { BigInt::zero() };
            next[j] = carry + &row[j - 1];
        }
        row = next;
    }
    row
}

pub fn stirling2(n: usize, j: usize) -> BigInt {
    if j > n {
        return BigInt::zero();
    }
    stirling2_row(n).swap_remove(j)
}

/// Number of derangements of `m` points, via `!m = m·!(m−1) + (−1)^m`.
pub fn subfactorial(m: usize) -> BigInt {
    let mut d = BigInt::one();
    for i in 1..=m {
        d = d * BigInt::from(i);
        if i % 2 == 0 {
            d += 1;
        } else {
            d -= 1;
        }
    }
    d
}

/// Number of permutations of `k` points with exactly `i` fixed points.
pub fn fixed_point_count(k: usize, i: usize) -> Result<BigInt> {
    if i > k {
        return Err(Error::Infeasible(format!("fixed point count {i} exceeds k = {k}")));
    }
    Ok(binomial(k, i) * subfactorial(k - i))
}

/// `E[1/(Y+j)^n]` where `Y` is the number of fixed points of a uniform
/// permutation of `k − j` points.
pub fn fixed_point_moment(n: usize, k: usize, j: usize) -> Result<Rational> {
    if j < 1 || j > k {
        return Err(Error::Infeasible(format!("moment index j = {j} outside 1..={k}")));
    }
    let m = k - j;
    let mut num = Rational::zero();
    for i in 0..=m {
        let weight = binomial(m, i) * subfactorial(m - i);
        let power = BigInt::from(i + j).pow(n as u32);
        num += Rational::new(weight, power);
    }
    Ok(num / Rational::from_integer(factorial(m)))
}

/// All moments `S_{n,k,j}` for `1 ≤ j ≤ k`, computed once.
#[derive(Debug, Clone)]
pub struct MomentTable {
    n: usize,
    k: usize,
    entries: Vec<Rational>,
}

impl MomentTable {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Infeasible("moment table needs n, k ≥ 1".into()));
        }
        let entries = (1..=k)
            .map(|j| fixed_point_moment(n, k, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, k, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `S_{n,k,j}`; `None` outside `1..=k`.
    pub fn get(&self, j: usize) -> Option<&Rational> {
        if j == 0 {
            None
        } else {
            self.entries.get(j - 1)
        }
    }
}

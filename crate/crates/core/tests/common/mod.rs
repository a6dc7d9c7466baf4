//! Brute-force oracles built directly from the two-substep definition of the
//! chain: pick σ uniformly from the stabilizer of `u`, then `v` uniformly
//! from the tuples fixed by σ.

#![allow(dead_code)]

use burnside::combinatorics::Rational;
use burnside::partitions::{enumerate_partitions_with_max_blocks, SetPartition};
use num_bigint::BigInt;

pub fn r(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// All permutations of `0..k` as image tables.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..k)
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
}

/// Every tuple in `[k]^n`, values `1..=k`.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..k.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let c = code % k + 1;
                    code /= k;
                    c
                })
                .collect()
        })
        .collect()
}

/// The full transition matrix on `[k]^n`, indexed like [`all_tuples`].
pub fn brute_full_kernel(n: usize, k: usize) -> (Vec<Vec<usize>>, Vec<Vec<Rational>>) {
    let tuples = all_tuples(n, k);
    let index = |v: &[usize]| v.iter().rev().fold(0, |acc, &c| acc * k + (c - 1));
    let perms = permutations(k);
    let rows = tuples
        .iter()
        .map(|u| {
            let stab: Vec<&Vec<usize>> = perms.iter().filter(|s| u.iter().all(|&x| s[x - 1] == x - 1)).collect();
            let mut row = vec![Rational::from_integer(0.into()); tuples.len()];
            for s in &stab {
                let fixed: Vec<usize> = (1..=k).filter(|&x| s[x - 1] == x - 1).collect();
                let weight = Rational::new(
                    BigInt::from(1),
                    BigInt::from(stab.len()) * BigInt::from(fixed.len()).pow(n as u32),
                );
                for v in all_tuples(n, fixed.len()) {
                    let v: Vec<usize> = v.iter().map(|&i| fixed[i - 1]).collect();
                    row[index(&v)] += &weight;
                }
            }
            row
        })
        .collect();
    (tuples, rows)
}

/// Lumped kernel by summing the full kernel over orbits, in the library's
/// state order (partitions with at most `k` blocks).
pub fn brute_lumped_kernel(n: usize, k: usize) -> (Vec<SetPartition>, Vec<Vec<Rational>>) {
    let states = enumerate_partitions_with_max_blocks(n, k).unwrap();
    let (tuples, full) = brute_full_kernel(n, k);
    let class: Vec<usize> = tuples
        .iter()
        .map(|u| {
            let x = SetPartition::from_labels(u);
            states.iter().position(|s| *s == x).unwrap()
        })
        .collect();
    let rows = states
        .iter()
        .map(|x| {
            let rep = tuples.iter().position(|u| SetPartition::from_labels(u) == *x).unwrap();
            let mut row = vec![Rational::from_integer(0.into()); states.len()];
            for (v, p) in full[rep].iter().enumerate() {
                row[class[v]] += p;
            }
            row
        })
        .collect();
    (states, rows)
}

/// `Σ_v min_u K(u, v)` from the brute-force full kernel.
pub fn brute_minorization(n: usize, k: usize) -> Rational {
    let (tuples, full) = brute_full_kernel(n, k);
    (0..tuples.len()).map(|v| full.iter().map(|row| row[v].clone()).min().unwrap()).sum()
}

//! Exact kernels against the brute-force two-substep construction.

mod common;

use burnside::analysis::minorization_report;
use burnside::combinatorics::Rational;
use burnside::kernel::{full_transition, lumped_matrix, stationary_full_class};
use common::{brute_full_kernel, brute_lumped_kernel, brute_minorization};
use num_traits::{One, Zero};

fn distinct(u: &[usize]) -> usize {
    let mut v = u.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

#[test]
fn full_transition_matches_definition() {
    for n in 1..=3 {
        for k in 1..=4 {
            let (tuples, full) = brute_full_kernel(n, k);
            for (i, u) in tuples.iter().enumerate() {
                for (j, v) in tuples.iter().enumerate() {
                    let joint = distinct(&[u.as_slice(), v.as_slice()].concat());
                    let p = full_transition(n, k, distinct(u), distinct(v), joint).unwrap();
                    assert_eq!(p, full[i][j], "n={n} k={k} u={u:?} v={v:?}");
                }
            }
        }
    }
}

#[test]
fn full_chain_stationary_law() {
    for (n, k) in [(2, 2), (2, 3), (3, 2), (3, 3), (3, 4)] {
        let (tuples, full) = brute_full_kernel(n, k);
        let pi: Vec<Rational> = tuples.iter().map(|u| stationary_full_class(n, k, distinct(u)).unwrap()).collect();
        assert_eq!(pi.iter().sum::<Rational>(), Rational::one());
        for v in 0..tuples.len() {
            let mass: Rational = (0..tuples.len()).map(|u| &pi[u] * &full[u][v]).sum();
            assert_eq!(mass, pi[v], "n={n} k={k}");
        }
        // Detailed balance.
        for u in 0..tuples.len() {
            for v in 0..tuples.len() {
                assert_eq!(&pi[u] * &full[u][v], &pi[v] * &full[v][u]);
            }
        }
    }
}

#[test]
fn lumped_matrix_matches_orbit_sums() {
    for (n, k) in [(4, 2), (4, 3), (4, 4), (3, 5)] {
        let (_, brute) = brute_lumped_kernel(n, k);
        assert_eq!(lumped_matrix(n, k).unwrap().to_dense(), brute, "n={n} k={k}");
    }
}

#[test]
fn minorization_matches_brute_force() {
    for (k, n) in [(2, 3), (3, 4), (2, 5)] {
        let c = minorization_report(n, k).unwrap().c;
        assert_eq!(c, brute_minorization(n, k));
        assert!(c > Rational::zero());
    }
}

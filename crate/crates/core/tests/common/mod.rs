//! Brute-force oracles shared by the integration tests. None of them call
//! into the elimination code they are used to check.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torsionlab::Hypergraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dense(rng: &mut impl Rng, max_dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let r = rng.gen_range(1..=max_dim);
    let c = rng.gen_range(1..=max_dim);
    (0..r)
        .map(|_| (0..c).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det_laplace(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * det_laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `d_j`: gcd of all `j x j` minors, for `j = 1..=min(rows, cols)`.
pub fn determinantal_divisors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    (1..=rows.min(cols))
        .map(|j| {
            let mut g = BigInt::zero();
            for rs in (0..rows).combinations(j) {
                for cs in (0..cols).combinations(j) {
                    let sub: Vec<Vec<BigInt>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| BigInt::from(a[r][c])).collect())
                        .collect();
                    g = g.gcd(&det_laplace(&sub));
                }
            }
            g
        })
        .collect()
}

/// Invariant factors `d_j / d_{j-1}` for every `j` with `d_j != 0`.
pub fn invariant_factors_by_minors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let d = determinantal_divisors(a);
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for dj in d {
        if dj.is_zero() {
            break;
        }
        out.push(&dj / &prev);
        prev = dj;
    }
    out
}

/// Torsion factors (invariant factors above one) from the minors oracle.
pub fn torsion_by_minors(a: &[Vec<i64>]) -> Vec<BigInt> {
    invariant_factors_by_minors(a)
        .into_iter()
        .filter(|f| f.abs() > BigInt::from(1))
        .collect()
}

/// Peels vertices of degree at most one in a random order. Returns the
/// surviving vertices, the surviving edge positions and the number of
/// vertices that were deleted with degree zero.
pub fn naive_two_core(
    h: &Hypergraph,
    rng: &mut impl Rng,
) -> (BTreeSet<u32>, BTreeSet<usize>, usize) {
    let mut alive_v: BTreeSet<u32> = (1..=h.n() as u32).collect();
    let mut alive_e: BTreeSet<usize> = (0..h.m()).collect();
    let mut isolated = 0;
    loop {
        let deg = |v: u32, alive_e: &BTreeSet<usize>| {
            alive_e
                .iter()
                .filter(|&&e| h.edges()[e].contains(&v))
                .count()
        };
        let mut low: Vec<u32> = alive_v
            .iter()
            .copied()
            .filter(|&v| deg(v, &alive_e) <= 1)
            .collect();
        if low.is_empty() {
            break;
        }
        low.shuffle(rng);
        let v = low[0];
        if deg(v, &alive_e) == 0 {
            isolated += 1;
        }
        alive_v.remove(&v);
        alive_e.retain(|&e| !h.edges()[e].contains(&v));
    }
    (alive_v, alive_e, isolated)
}

/// `|B_q(v)|` by listing supports and signs explicitly.
pub fn bad_count_oracle(v: &[u64], k: usize, q: u64) -> u64 {
    (0..v.len())
        .combinations(k)
        .filter(|s| {
            let dot: i128 = s
                .iter()
                .enumerate()
                .map(|(i, &j)| {
                    if i % 2 == 0 {
                        v[j] as i128
                    } else {
                        -(v[j] as i128)
                    }
                })
                .sum();
            dot.rem_euclid(q as i128) != 0
        })
        .count() as u64
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

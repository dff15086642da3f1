mod common;

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use torsionlab::exactla::kernel_basis_mod_q;
use torsionlab::torsion::{
    check_small_obstruction, count_bad_vectors, detect_torsion_cocycle, epsilon_balanced,
    epsilon_cap, find_minimal_torsion_cocycles, gamma_bound, kernel_support_profile,
    smallest_prime_factor, Witness,
};
use torsionlab::{rank_mod_q, rank_rational, Hypergraph, SparseIntMatrix};

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

#[test]
fn cocycle_verdict_matches_minors_oracle() {
    let mut rng = common::rng(41);
    let mut torsion_seen = 0;
    for _ in 0..150 {
        let a = common::random_dense(&mut rng, 6, 3);
        let m = SparseIntMatrix::from_dense(&a).unwrap();
        let all: Vec<usize> = (0..m.n_cols()).collect();
        let rep = detect_torsion_cocycle(&m, &all).unwrap();
        let oracle = !common::torsion_by_minors(&a).is_empty();
        assert_eq!(rep.is_torsion_cocycle, oracle, "{a:?}");
        if let Some(q) = rep.witness_prime() {
            torsion_seen += 1;
            let top = common::determinantal_divisors(&a)[rep.rank_rational - 1].abs();
            assert!((top % BigInt::from(q.clone())) == BigInt::from(0));
            assert!(rank_mod_q(&m, q).unwrap() < rank_rational(&m));
        }
    }
    assert!(torsion_seen > 10);
}

#[test]
fn minimal_cocycles_are_minimal() {
    let mut rng = common::rng(42);
    for _ in 0..40 {
        let a = common::random_dense(&mut rng, 5, 3);
        let m = SparseIntMatrix::from_dense(&a).unwrap();
        let found = find_minimal_torsion_cocycles(&m, m.n_cols(), 1_000_000).unwrap();
        let sets: BTreeSet<Vec<usize>> = found.iter().map(|c| c.subset.clone()).collect();
        for c in &found {
            for drop in 0..c.subset.len() {
                let mut smaller = c.subset.clone();
                smaller.remove(drop);
                let sub: Vec<Vec<i64>> = a
                    .iter()
                    .map(|r| smaller.iter().map(|&j| r[j]).collect())
                    .collect();
                assert!(smaller.is_empty() || common::torsion_by_minors(&sub).is_empty());
            }
        }
        // every torsion subset contains a reported one
        for size in 1..=m.n_cols() {
            for s in (0..m.n_cols()).combinations(size) {
                let sub: Vec<Vec<i64>> = a
                    .iter()
                    .map(|r| s.iter().map(|&j| r[j]).collect())
                    .collect();
                if !common::torsion_by_minors(&sub).is_empty() {
                    assert!(
                        sets.iter().any(|t| t.iter().all(|x| s.contains(x))),
                        "{a:?} {s:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn search_budget_reports_completed_sizes() {
    let m =
        SparseIntMatrix::from_dense(&[vec![1, 1, 1, 1, 1, 1], vec![1, -1, 2, 3, 0, 1]]).unwrap();
    match find_minimal_torsion_cocycles(&m, 6, 10) {
        Err(torsionlab::Error::SearchBudget {
            completed_sizes, ..
        }) => assert_eq!(completed_sizes, vec![1]),
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn prime_witnesses() {
    assert_eq!(
        smallest_prime_factor(&BigUint::from(894u32)),
        Witness::Prime(BigUint::from(2u8))
    );
    assert_eq!(
        smallest_prime_factor(&BigUint::from(1_000_003u32)),
        Witness::Prime(BigUint::from(1_000_003u32))
    );
    // (2^61 - 1)(2^89 - 1): both factors prime and above the trial-division range
    let a = (BigUint::one() << 61u32) - 1u8;
    let b = (BigUint::one() << 89u32) - 1u8;
    assert_eq!(
        smallest_prime_factor(&(&a * &b)),
        Witness::Composite(&a * &b)
    );
    let p = (BigUint::one() << 127u32) - 1u8;
    assert_eq!(smallest_prime_factor(&p), Witness::Prime(p.clone()));
}

#[test]
fn bad_vector_counts_match_brute_force() {
    let mut rng = common::rng(43);
    for _ in 0..300 {
        use rand::Rng;
        let n = rng.gen_range(3..=9);
        let k = rng.gen_range(3..=n.min(5));
        let q = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        assert_eq!(
            count_bad_vectors(&v, k, q, 1 << 20).unwrap(),
            common::bad_count_oracle(&v, k, q)
        );
    }
    assert!(count_bad_vectors(&[1; 40], 5, 3, 1000).is_err());
}

#[test]
fn degenerate_length_has_a_zero_count() {
    // the only alternating 3-sparse vector of length 3 is (1, -1, 1)
    assert_eq!(count_bad_vectors(&[1, 2, 1], 3, 3, 100).unwrap(), 0);
    assert_eq!(count_bad_vectors(&[1, 1, 0], 3, 2, 100).unwrap(), 0);
}

#[test]
fn gamma_values() {
    assert_eq!(epsilon_cap(3), ratio(2, 27));
    assert_eq!(epsilon_cap(4), ratio(6, 256));
    assert_eq!(gamma_bound(3, &ratio(1, 27)).unwrap(), ratio(1, 531_441));
    // 1/256 - 1/258 = 1/33024 against (1/43)^4 / 256
    assert_eq!(
        gamma_bound(4, &ratio(1, 43)).unwrap(),
        ratio(1, 875_213_056)
    );
    assert_eq!(gamma_bound(3, &ratio(1, 20)).unwrap(), ratio(1, 216_000));
    // close to the cap the linear term is the smaller one
    assert_eq!(
        gamma_bound(3, &ratio(1481, 20_000)).unwrap(),
        ratio(1, 27) - ratio(1481, 40_000)
    );
    assert!(gamma_bound(3, &ratio(2, 27)).is_err());
    assert!(gamma_bound(2, &ratio(1, 100)).is_err());
}

#[test]
fn balance_verdicts() {
    let eps = ratio(1, 3);
    assert!(
        epsilon_balanced(&[1, 2, 3, 4, 0, 0], 5, &eps)
            .unwrap()
            .balanced
    );
    assert!(!epsilon_balanced(&[1, 1, 2], 5, &eps).unwrap().balanced);
    let p = epsilon_balanced(&[6, 1, 0, 2], 5, &eps).unwrap();
    assert_eq!((p.support_size, p.max_multiplicity), (3, 2));
}

#[test]
fn kernel_support_matches_exhaustive_search() {
    let mut rng = common::rng(44);
    for _ in 0..60 {
        let a = common::random_dense(&mut rng, 4, 3);
        let m = SparseIntMatrix::from_dense(&a).unwrap();
        let q = 3u64;
        let cols = m.n_cols();
        let mut best = 0;
        for x in (0..cols).map(|_| 0..q).multi_cartesian_product() {
            let zero = a.iter().all(|row| {
                row.iter()
                    .zip(&x)
                    .map(|(&r, &xi)| r * xi as i64)
                    .sum::<i64>()
                    .rem_euclid(q as i64)
                    == 0
            });
            if zero {
                best = best.max(x.iter().filter(|&&xi| xi != 0).count());
            }
        }
        let p = kernel_support_profile(&m, q, 1 << 20).unwrap();
        assert_eq!(p.max_support, best, "{a:?}");
        assert_eq!(p.kernel_dim, kernel_basis_mod_q(&m, q).unwrap().len());
    }
}

#[test]
fn small_obstruction_cases() {
    let h: Hypergraph = "6 3 4\n1 2 3\n1 2 4\n3 4 5\n3 4 6\n".parse().unwrap();
    // {1, 2}: two edges each meeting it twice
    assert!(check_small_obstruction(&h, &[1, 2]));
    // {1}: an edge meets it once
    assert!(!check_small_obstruction(&h, &[1]));
    // {1, 2, 3, 4}: edge {3, 4, 5} meets it twice, fine; four touching edges
    assert!(check_small_obstruction(&h, &[1, 2, 3, 4]));
    // {5, 6}: each meeting edge meets it once
    assert!(!check_small_obstruction(&h, &[5, 6]));
}

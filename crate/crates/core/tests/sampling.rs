use num_bigint::BigInt;
use num_rational::BigRational;
use torsionlab::model::{colex_rank, colex_unrank};
use torsionlab::{sample_gnm, sample_gnp, Hypergraph};

#[test]
fn gnp_edge_count_has_the_binomial_mean() {
    // C(20, 3) = 1140 triples at p = 1/10
    let p = BigRational::new(BigInt::from(1), BigInt::from(10));
    let trials = 10_000;
    let total: usize = (0..trials)
        .map(|t| sample_gnp(20, 3, &p, 5, t).unwrap().m())
        .sum();
    let mean = total as f64 / trials as f64;
    let sd_of_mean = (1140.0 * 0.1 * 0.9 / trials as f64).sqrt();
    assert!((mean - 114.0).abs() < 3.0 * sd_of_mean, "mean {mean}");
}

#[test]
fn gnm_pairs_are_uniform() {
    // all C(20, 2) = 190 unordered pairs of triples on 6 vertices
    let trials = 38_000u64;
    let mut counts = std::collections::HashMap::new();
    for t in 0..trials {
        let h = sample_gnm(6, 3, 2, 9, t).unwrap();
        let mut r: Vec<u64> = h.edges().iter().map(|e| colex_rank(e)).collect();
        r.sort_unstable();
        *counts.entry(r).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 190);
    let expected = trials as f64 / 190.0;
    let chi2: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 189 degrees of freedom; the 0.999 quantile is about 259
    assert!(chi2 < 259.0, "chi-square {chi2}");
}

#[test]
fn samplers_are_deterministic_and_trial_keyed() {
    let a = sample_gnm(30, 4, 50, 1, 0).unwrap();
    assert_eq!(a, sample_gnm(30, 4, 50, 1, 0).unwrap());
    assert_ne!(a, sample_gnm(30, 4, 50, 1, 1).unwrap());
    assert_ne!(a, sample_gnm(30, 4, 50, 2, 0).unwrap());
}

#[test]
fn edges_are_distinct_sorted_and_in_range() {
    let h = sample_gnm(12, 4, 200, 3, 0).unwrap();
    let mut seen = std::collections::HashSet::new();
    for e in h.edges() {
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.iter().all(|&v| (1..=12).contains(&v)));
        assert!(seen.insert(e.clone()));
    }
    assert_eq!(h.m(), 200);
}

#[test]
fn edge_probability_extremes() {
    let zero = BigRational::from_integer(BigInt::from(0));
    let one = BigRational::from_integer(BigInt::from(1));
    assert_eq!(sample_gnp(10, 3, &zero, 0, 0).unwrap().m(), 0);
    assert_eq!(sample_gnp(10, 3, &one, 0, 0).unwrap().m(), 120);
    assert!(sample_gnm(5, 3, 11, 0, 0).is_err());
}

#[test]
fn colex_round_trip() {
    for r in 0..2000u64 {
        let e = colex_unrank(r, 4);
        assert_eq!(colex_rank(&e), r);
    }
    assert_eq!(Hypergraph::complete(7, 3).unwrap().m(), 35);
}

#[test]
fn text_format_round_trip() {
    let h = sample_gnm(9, 3, 7, 4, 2).unwrap();
    let back: Hypergraph = h.to_string().parse().unwrap();
    assert_eq!(back, h);
    assert!("3 3 1\n1 2\n".parse::<Hypergraph>().is_err());
    assert!("3 3 1\n1 1 2\n".parse::<Hypergraph>().is_err());
}

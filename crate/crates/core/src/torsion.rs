//! Torsion cocycles and the quantities used to bound them.
//!
//! A column subset `S` of an integer matrix `M` is a torsion cocycle when
//! some prime `q` has `rank_Q(M_S) > rank_{Z/q}(M_S)`; equivalently, some
//! invariant factor of `M_S` exceeds one, and the witnessing primes are
//! exactly the primes dividing those factors.

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{
    self, is_probable_prime, kernel_basis_mod_q, rank_mod_q, rank_rational, SmithForm,
};
use crate::matrix::SparseIntMatrix;
use crate::model::{binomial, Hypergraph};

/// Source of Smith normal forms for the cocycle search.
pub type SnfKernel = fn(&SparseIntMatrix) -> Result<SmithForm>;

/// Trial division bound used before falling back to a primality test.
pub const TRIAL_DIVISION_LIMIT: u32 = 1_000_000;

/// What certifies torsion in `M_S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Witness {
    /// Smallest prime factor of the largest invariant factor.
    Prime(#[serde(serialize_with = "as_decimal")] BigUint),
    /// The factor has no prime below the trial-division limit and its
    /// cofactor is composite; torsion is certain but no prime is named.
    Composite(#[serde(serialize_with = "as_decimal")] BigUint),
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub subset: Vec<usize>,
    pub is_torsion_cocycle: bool,
    pub witness: Option<Witness>,
    pub rank_rational: usize,
    /// Rank of `M_S` modulo the witnessing prime, when one is known.
    pub rank_mod_q: Option<usize>,
}

impl CocycleReport {
    pub fn witness_prime(&self) -> Option<&BigUint> {
        match &self.witness {
            Some(Witness::Prime(q)) => Some(q),
            _ => None,
        }
    }
}

pub fn detect_torsion_cocycle(m: &SparseIntMatrix, s: &[usize]) -> Result<CocycleReport> {
    detect_torsion_cocycle_with(m, s, exactla::smith_normal_form)
}

/// Decides whether the columns `s` form a torsion cocycle of `m`.
pub fn detect_torsion_cocycle_with(
    m: &SparseIntMatrix,
    s: &[usize],
    snf: SnfKernel,
) -> Result<CocycleReport> {
    let sub = m.restrict_columns(s)?;
    let form = snf(&sub)?;
    let rank_q = rank_rational(&sub);
    let witness = form
        .invariant_factors()
        .last()
        .filter(|d| !d.is_one())
        .map(|d| smallest_prime_factor(d.magnitude()));
    let rank_mod = match &witness {
        Some(Witness::Prime(q)) => Some(rank_mod_q(&sub, q)?),
        _ => None,
    };
    Ok(CocycleReport {
        subset: s.to_vec(),
        is_torsion_cocycle: witness.is_some(),
        witness,
        rank_rational: rank_q,
        rank_mod_q: rank_mod,
    })
}

/// Smallest prime factor of `d > 1`, or a composite witness when none is
/// found by trial division and the cofactor fails the primality test.
pub fn smallest_prime_factor(d: &BigUint) -> Witness {
    debug_assert!(*d > BigUint::one());
    if let Some(small) = d.to_u128() {
        let p = num_prime::nt_funcs::factorize128(small)
            .into_keys()
            .next()
            .expect("d > 1 has a prime factor");
        return Witness::Prime(BigUint::from(p));
    }
    for p in 2..TRIAL_DIVISION_LIMIT {
        if (d % p).is_zero() {
            return Witness::Prime(BigUint::from(p));
        }
    }
    if is_probable_prime(d) {
        Witness::Prime(d.clone())
    } else {
        Witness::Composite(d.clone())
    }
}

/// The two necessary conditions every minimal torsion cocycle satisfies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityCheck {
    /// `rank_Q(M_S) == |S|`.
    pub full_column_rank: bool,
    /// A row of `M_S` whose only nonzero entry is `1` or `-1`, if any.
    pub unit_singleton_row: Option<usize>,
}

impl MinimalityCheck {
    pub fn holds(&self) -> bool {
        self.full_column_rank && self.unit_singleton_row.is_none()
    }
}

pub fn check_minimality_conditions(
    m: &SparseIntMatrix,
    report: &CocycleReport,
) -> Result<MinimalityCheck> {
    let sub = m.restrict_columns(&report.subset)?;
    let t = sub.transpose();
    let unit_singleton_row = (0..t.n_cols()).find(|&i| {
        let row = t.column(i).entries();
        row.len() == 1 && row[0].1.magnitude().is_one()
    });
    Ok(MinimalityCheck {
        full_column_rank: rank_rational(&sub) == report.subset.len(),
        unit_singleton_row,
    })
}

pub fn find_minimal_torsion_cocycles(
    m: &SparseIntMatrix,
    max_subset_size: usize,
    budget: u64,
) -> Result<Vec<CocycleReport>> {
    find_minimal_torsion_cocycles_with(m, max_subset_size, budget, exactla::smith_normal_form)
}

/// All inclusion-minimal torsion cocycles with at most `max_subset_size`
/// columns, in (size, lexicographic) order.
///
/// Subsets are visited by increasing size and supersets of cocycles already
/// found are skipped, so every reported subset is minimal. Each size is
/// evaluated in parallel and merged in enumeration order. `budget` caps the
/// number of subsets evaluated; when the next size would exceed it the
/// search stops with [`Error::SearchBudget`].
pub fn find_minimal_torsion_cocycles_with(
    m: &SparseIntMatrix,
    max_subset_size: usize,
    budget: u64,
    snf: SnfKernel,
) -> Result<Vec<CocycleReport>> {
    if max_subset_size > m.n_cols() {
        return Err(Error::param(format!(
            "subset size {max_subset_size} exceeds the {} columns",
            m.n_cols()
        )));
    }
    let mut found: Vec<CocycleReport> = Vec::new();
    let mut evaluated = 0u64;
    let mut completed = Vec::new();
    for size in 1..=max_subset_size {
        let candidates: Vec<Vec<usize>> = (0..m.n_cols())
            .combinations(size)
            .filter(|s| !found.iter().any(|f| is_subset(&f.subset, s)))
            .collect();
        if evaluated + candidates.len() as u64 > budget {
            return Err(Error::SearchBudget {
                budget,
                completed_sizes: completed,
            });
        }
        evaluated += candidates.len() as u64;
        let reports = candidates
            .par_iter()
            .map(|s| detect_torsion_cocycle_with(m, s, snf))
            .collect::<Result<Vec<_>>>()?;
        found.extend(reports.into_iter().filter(|r| r.is_torsion_cocycle));
        completed.push(size);
    }
    Ok(found)
}

/// Both sorted ascending.
fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// True iff no edge of `h` meets `w` in exactly one vertex and at least
/// `|w|` edges meet `w`. The empty set passes.
pub fn check_small_obstruction(h: &Hypergraph, w: &[u32]) -> bool {
    let mut in_w = vec![false; h.n() + 1];
    for &v in w {
        if let Some(slot) = in_w.get_mut(v as usize) {
            *slot = true;
        }
    }
    let mut touching = 0usize;
    for e in h.edges() {
        match e.iter().filter(|&&v| in_w[v as usize]).count() {
            0 => {}
            1 => return false,
            _ => touching += 1,
        }
    }
    touching >= w.iter().unique().count()
}

/// Default cap on enumerated items for the brute-force oracles.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 50_000_000;

/// `|B_q(v)|`: alternating-sign k-sparse vectors `w` with `w . v != 0 (mod q)`,
/// counted by enumerating all `C(n, k)` supports.
pub fn count_bad_vectors(v: &[u64], k: usize, q: u64, budget: u64) -> Result<u64> {
    let n = v.len();
    if k == 0 || k > n {
        return Err(Error::param(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if q < 2 {
        return Err(Error::param(format!("modulus {q} is not a prime")));
    }
    let total = binomial(n as u64, k as u64).unwrap_or(u64::MAX);
    if total > budget {
        return Err(Error::EnumerationBudget {
            required: format!("C({n}, {k}) = {total}"),
            budget,
            context: Some("V_{k,n}".into()),
        });
    }
    let v: Vec<u64> = v.iter().map(|x| x % q).collect();
    if v.iter().all(|&x| x == 0) {
        return Ok(0);
    }
    let mut count = 0u64;
    for support in (0..n).combinations(k) {
        let (plus, minus) = support
            .iter()
            .enumerate()
            .fold((0u64, 0u64), |(p, m), (i, &j)| {
                if i % 2 == 0 {
                    ((p + v[j]) % q, m)
                } else {
                    (p, (m + v[j]) % q)
                }
            });
        if plus != minus {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancedProfile {
    pub support_size: usize,
    /// Largest number of positions sharing one nonzero residue.
    pub max_multiplicity: usize,
    #[serde(serialize_with = "ratio_string")]
    pub epsilon: BigRational,
    pub balanced: bool,
}

fn ratio_string<S: serde::Serializer>(
    v: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Balance verdict for `v` over `Z/qZ`: no nonzero residue may occupy more
/// than `epsilon * |supp(v)|` positions.
pub fn epsilon_balanced(v: &[u64], q: u64, epsilon: &BigRational) -> Result<BalancedProfile> {
    if !epsilon.is_positive() || *epsilon >= BigRational::one() {
        return Err(Error::param(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if q < 2 {
        return Err(Error::param(format!("modulus {q} is not a prime")));
    }
    let residues: Vec<u64> = v
        .iter()
        .map(|x| x % q)
        .filter(|&x| x != 0)
        .sorted_unstable()
        .collect();
    let support_size = residues.len();
    let max_multiplicity = residues
        .iter()
        .dedup_with_count()
        .map(|(c, _)| c)
        .max()
        .unwrap_or(0);
    let bound = epsilon * BigRational::from_integer(BigInt::from(support_size));
    let balanced = BigRational::from_integer(BigInt::from(max_multiplicity)) <= bound;
    Ok(BalancedProfile {
        support_size,
        max_multiplicity,
        epsilon: epsilon.clone(),
        balanced,
    })
}

/// `(k-1)! / k^k`, the exclusive upper end of admissible epsilon.
pub fn epsilon_cap(k: usize) -> BigRational {
    let fact: BigInt = (1..k).map(BigInt::from).product();
    BigRational::new(fact, BigInt::from(k).pow(k as u32))
}

/// `gamma(k, eps) = min(1/k^k - eps/(k-1)!, eps^k / k^k)` as an exact rational.
pub fn gamma_bound(k: usize, epsilon: &BigRational) -> Result<BigRational> {
    if k < 3 {
        return Err(Error::param(format!("k = {k} must be at least 3")));
    }
    if !epsilon.is_positive() || *epsilon >= epsilon_cap(k) {
        return Err(Error::param(format!(
            "epsilon {epsilon} outside the admissible range (0, {})",
            epsilon_cap(k)
        )));
    }
    let kk = BigRational::from_integer(BigInt::from(k).pow(k as u32));
    let fact: BigInt = (1..k).map(BigInt::from).product();
    let first = kk.recip() - epsilon / BigRational::from_integer(fact);
    let second = epsilon.pow(k as i32) / kk;
    Ok(first.min(second))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelProfile {
    pub kernel_dim: usize,
    /// Largest support over nonzero vectors of the kernel; 0 if trivial.
    pub max_support: usize,
}

/// Exact largest support among nonzero `x` with `m x = 0 (mod q)`, by
/// enumerating every combination of a kernel basis.
pub fn kernel_support_profile(m: &SparseIntMatrix, q: u64, budget: u64) -> Result<KernelProfile> {
    let basis = kernel_basis_mod_q(m, q)?;
    let dim = basis.len();
    let count = (q as u128).checked_pow(dim as u32);
    if count.is_none_or(|c| c > budget as u128) {
        return Err(Error::EnumerationBudget {
            required: format!("{q}^{dim}"),
            budget,
            context: Some(format!("kernel of dimension {dim}")),
        });
    }
    let n = m.n_cols();
    let mut best = 0;
    let mut coeffs = vec![0u64; dim];
    let mut x = vec![0u64; n];
    // odometer over coefficient vectors, updating x incrementally
    'outer: loop {
        let mut pos = 0;
        loop {
            if pos == dim {
                break 'outer;
            }
            coeffs[pos] += 1;
            for (xi, bi) in x.iter_mut().zip(&basis[pos]) {
                *xi = (*xi + bi) % q;
            }
            if coeffs[pos] < q {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
        best = best.max(x.iter().filter(|&&xi| xi != 0).count());
    }
    Ok(KernelProfile {
        kernel_dim: dim,
        max_support: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{incidence_matrix, SignPattern};
    use crate::model::sample_gnm;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn unimodular_subset_is_not_a_cocycle() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 0], vec![0, 1]]).unwrap();
        let rep = detect_torsion_cocycle(&m, &[0, 1]).unwrap();
        assert!(!rep.is_torsion_cocycle);
        assert_eq!(rep.witness, None);
        assert_eq!(rep.rank_rational, 2);
    }

    #[test]
    fn two_is_a_cocycle_at_two() {
        let m = SparseIntMatrix::from_dense(&[vec![2]]).unwrap();
        let rep = detect_torsion_cocycle(&m, &[0]).unwrap();
        assert!(rep.is_torsion_cocycle);
        assert_eq!(rep.witness_prime(), Some(&BigUint::from(2u32)));
        assert_eq!((rep.rank_rational, rep.rank_mod_q), (1, Some(0)));
        assert!(detect_torsion_cocycle(&m, &[1]).is_err());
    }

    #[test]
    fn witness_uses_smallest_prime_of_largest_factor() {
        let m = SparseIntMatrix::from_dense(&[vec![15, 0], vec![0, 5]]).unwrap();
        // factors (5, 15)
        let rep = detect_torsion_cocycle(&m, &[0, 1]).unwrap();
        assert_eq!(rep.witness_prime(), Some(&BigUint::from(3u32)));
        assert_eq!(rep.rank_mod_q, Some(1));
    }

    #[test]
    fn large_factors() {
        let p = (BigUint::one() << 127u32) - 1u32;
        assert_eq!(smallest_prime_factor(&p), Witness::Prime(p.clone()));
        let q = (BigUint::one() << 89u32) - 1u32;
        let pq = &p * &q;
        // above 128 bits, no factor below the trial limit, composite
        assert_eq!(smallest_prime_factor(&pq), Witness::Composite(pq.clone()));
        let even = &pq * 2u32;
        assert_eq!(
            smallest_prime_factor(&even),
            Witness::Prime(BigUint::from(2u32))
        );
    }

    #[test]
    fn torsion_free_matrix_has_no_cocycles() {
        let m =
            SparseIntMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        assert!(find_minimal_torsion_cocycles(&m, 3, 1000)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn minimal_cocycles_skip_supersets() {
        // column 0 alone is a cocycle; {1, 2} is one too
        let m = SparseIntMatrix::from_dense(&[vec![2, 1, 1], vec![0, 1, -1]]).unwrap();
        let found = find_minimal_torsion_cocycles(&m, 3, 1000).unwrap();
        let subsets: Vec<_> = found.iter().map(|r| r.subset.clone()).collect();
        assert_eq!(subsets, vec![vec![0], vec![1, 2]]);
        for rep in &found {
            assert!(check_minimality_conditions(&m, rep).unwrap().holds());
        }
    }

    #[test]
    fn search_budget_reports_completed_sizes() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, 1, 1]]).unwrap();
        match find_minimal_torsion_cocycles(&m, 3, 5) {
            Err(Error::SearchBudget {
                completed_sizes,
                budget,
            }) => {
                assert_eq!(budget, 5);
                assert_eq!(completed_sizes, vec![1]);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(find_minimal_torsion_cocycles(&m, 5, 100).is_err());
    }

    #[test]
    fn obstruction_examples() {
        let h = Hypergraph::new(3, 3, vec![vec![1, 2, 3]]).unwrap();
        assert!(check_small_obstruction(&h, &[]));
        assert!(!check_small_obstruction(&h, &[1]));
        // the edge meets {1, 2} twice but one edge < |W| = 2
        assert!(!check_small_obstruction(&h, &[1, 2]));
        let tet = Hypergraph::new(
            4,
            3,
            vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]],
        )
        .unwrap();
        assert!(check_small_obstruction(&tet, &[1, 2, 3, 4]));
        assert!(!check_small_obstruction(&tet, &[1, 2]));
    }

    #[test]
    fn bad_vector_counts() {
        // V_{3,3} = {(1,-1,1)}
        assert_eq!(count_bad_vectors(&[1, 1, 1], 3, 2, 1000).unwrap(), 1);
        assert_eq!(count_bad_vectors(&[1, 0, 0, 1], 3, 3, 1000).unwrap(), 4);
        assert_eq!(count_bad_vectors(&[0, 0, 0, 0, 0], 3, 5, 1000).unwrap(), 0);
        assert_eq!(count_bad_vectors(&[3, 6, 9], 3, 3, 1000).unwrap(), 0);
        // (1,2,1) is orthogonal to the only member of V_{3,3} mod 3
        assert_eq!(count_bad_vectors(&[1, 2, 1], 3, 3, 1000).unwrap(), 0);
        assert!(count_bad_vectors(&[1; 30], 10, 3, 1000).is_err());
        assert!(count_bad_vectors(&[1, 1], 3, 3, 1000).is_err());
    }

    #[test]
    fn balance_examples() {
        let p = epsilon_balanced(&[1, 1, 2, 0], 3, &r(1, 2)).unwrap();
        assert_eq!(
            (p.support_size, p.max_multiplicity, p.balanced),
            (3, 2, false)
        );
        let p = epsilon_balanced(&[1, 2, 3, 4, 0], 5, &r(1, 4)).unwrap();
        assert!(p.balanced);
        assert!(epsilon_balanced(&[1], 3, &r(0, 1)).is_err());
        assert!(epsilon_balanced(&[1], 3, &r(1, 1)).is_err());
        // the zero vector is vacuously balanced
        assert!(epsilon_balanced(&[0, 3], 3, &r(1, 3)).unwrap().balanced);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_bound(3, &r(1, 27)).unwrap(), r(1, 531_441));
        assert_eq!(epsilon_cap(3), r(2, 27));
        assert!(gamma_bound(3, &r(2, 27)).is_err());
        assert!(gamma_bound(3, &r(0, 1)).is_err());
        assert!(gamma_bound(2, &r(1, 100)).is_err());
        // approaching the cap drives the first term to zero
        let near = r(2, 27) - r(1, 1_000_000_000);
        let g = gamma_bound(3, &near).unwrap();
        assert!(g.is_positive() && g < r(1, 10_000_000));
        for k in [3usize, 4, 5, 6] {
            for frac in 1..10 {
                let eps = epsilon_cap(k) * r(frac, 10);
                assert!(gamma_bound(k, &eps).unwrap().is_positive());
            }
        }
    }

    #[test]
    fn kernel_profile_examples() {
        let id = SparseIntMatrix::from_dense(&[vec![1, 0], vec![0, 1]]).unwrap();
        let p = kernel_support_profile(&id, 3, 1000).unwrap();
        assert_eq!((p.kernel_dim, p.max_support), (0, 0));
        for seed in 0..5 {
            let h = sample_gnm(8, 4, 12, seed, 0).unwrap();
            let mt = incidence_matrix(&h, SignPattern::Alternating).transpose();
            for q in [2, 3, 5] {
                let p = kernel_support_profile(&mt, q, 1 << 20).unwrap();
                assert!(p.kernel_dim >= 1);
                assert_eq!(p.max_support, 8);
            }
        }
        let wide = SparseIntMatrix::zeros(1, 30);
        assert!(matches!(
            kernel_support_profile(&wide, 2, 1000),
            Err(Error::EnumerationBudget { .. })
        ));
    }
}

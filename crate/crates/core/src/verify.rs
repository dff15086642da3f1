//! Property suites behind the `verify` command: minimality conditions of
//! torsion cocycles, the small-set obstruction on hypergraphs, and the
//! `|B_q(v)| >= gamma |supp v|^k` lower bounds.
//!
//! Every suite takes the Smith normal form routine as a parameter so a
//! deliberately broken kernel can be plugged in to check that the suites
//! notice.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{rank_mod_q, rank_rational, smith_normal_form, SmithForm};
use crate::matrix::{incidence_matrix, SignPattern, SparseIntMatrix};
use crate::model::{binomial, sample_gnm, trial_rng};
use crate::torsion::{
    check_minimality_conditions, check_small_obstruction, count_bad_vectors, epsilon_balanced,
    epsilon_cap, find_minimal_torsion_cocycles_with, gamma_bound, SnfKernel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Claim6,
    Lemma7,
    Lemma8,
    Lemma10,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Claim6, Suite::Lemma7, Suite::Lemma8, Suite::Lemma10];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Claim6 => "claim6",
            Suite::Lemma7 => "lemma7",
            Suite::Lemma8 => "lemma8",
            Suite::Lemma10 => "lemma10",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',')
            .map(|name| {
                Suite::ALL
                    .into_iter()
                    .find(|x| x.name() == name.trim())
                    .ok_or_else(|| Error::param(format!("unknown suite {name:?}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Largest vertex count (or row count) used by the suites.
    pub n: usize,
    /// Uniformity for the hypergraph-based suites.
    pub k: usize,
    pub seed: u64,
    /// Random instances per cell.
    pub samples: usize,
    pub budget: u64,
    pub snf: SnfKernel,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n: 8,
            k: 3,
            seed: 1,
            samples: 200,
            budget: crate::torsion::DEFAULT_ENUMERATION_BUDGET,
            snf: smith_normal_form,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    /// Matrices, hypergraphs or vectors examined.
    pub instances: u64,
    /// Individual property checks performed.
    pub checked: u64,
    pub violation_count: u64,
    /// The first few violations, human readable.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name(),
            passed: true,
            instances: 0,
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn violation(&mut self, msg: String) {
        self.passed = false;
        self.violation_count += 1;
        if self.violations.len() < 20 {
            self.violations.push(msg);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let reports = suites
        .iter()
        .map(|&s| match s {
            Suite::Claim6 => claim6(cfg),
            Suite::Lemma7 => lemma7(cfg),
            Suite::Lemma8 => lemma8(cfg),
            Suite::Lemma10 => lemma10(cfg),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    })
}

/// Sparse random integer matrix with entries in `[-3, 3]`.
pub fn random_int_matrix(rows: usize, cols: usize, seed: u64, trial: u64) -> SparseIntMatrix {
    let mut rng = trial_rng(seed, trial);
    let dense: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_bool(0.4) {
                        rng.gen_range(-3..=3)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    SparseIntMatrix::from_dense(&dense).expect("rectangular")
}

/// Every minimal torsion cocycle has full column rank over `Q`, no row with
/// a lone `+-1`, and a witnessing prime at which the rank really drops.
fn check_cocycles_of(
    m: &SparseIntMatrix,
    label: &str,
    cfg: &VerifyConfig,
    rep: &mut SuiteReport,
) -> Result<()> {
    let max_size = m.n_cols().min(m.n_rows());
    let found = find_minimal_torsion_cocycles_with(m, max_size, cfg.budget, cfg.snf)?;
    rep.instances += 1;
    for c in &found {
        rep.checked += 1;
        let cond = check_minimality_conditions(m, c)?;
        if !cond.full_column_rank {
            rep.violation(format!(
                "{label}: S = {:?} has rational rank below |S|",
                c.subset
            ));
        }
        if let Some(row) = cond.unit_singleton_row {
            rep.violation(format!(
                "{label}: S = {:?} has a lone unit in row {row}",
                c.subset
            ));
        }
        let sub = m.restrict_columns(&c.subset)?;
        if let Some(q) = c.witness_prime() {
            let rq = rank_rational(&sub);
            let rp = rank_mod_q(&sub, q)?;
            if rp >= rq {
                rep.violation(format!(
                    "{label}: S = {:?} shows no rank drop at q = {q}",
                    c.subset
                ));
            }
        }
    }
    Ok(())
}

pub fn claim6(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Claim6);
    let rows = cfg.n.clamp(1, 6);
    let instances = (cfg.samples / 4).max(1) as u64;
    let mut cocycle_matrices = 0;
    for t in 0..instances {
        let cols = 2 + (t as usize % 9);
        let m = random_int_matrix(rows, cols, cfg.seed, t);
        let before = rep.checked;
        check_cocycles_of(&m, &format!("random {rows}x{cols} #{t}"), cfg, &mut rep)?;
        cocycle_matrices += (rep.checked > before) as u64;
    }
    if cfg.k <= cfg.n {
        let total = binomial(cfg.n as u64, cfg.k as u64).unwrap_or(u64::MAX);
        for t in 0..instances {
            let m_edges = (1 + t % 10).min(total);
            let h = sample_gnm(cfg.n, cfg.k, m_edges, cfg.seed, 1_000_000 + t)?;
            let m = incidence_matrix(&h, SignPattern::Alternating);
            check_cocycles_of(
                &m,
                &format!("M(H) n={} m={m_edges} #{t}", cfg.n),
                cfg,
                &mut rep,
            )?;
            check_cocycles_of(
                &m.transpose(),
                &format!("M(H)^T n={} m={m_edges} #{t}", cfg.n),
                cfg,
                &mut rep,
            )?;
        }
    }
    rep.notes.push(format!(
        "{} minimal cocycles checked; {cocycle_matrices} random matrices had at least one",
        rep.checked
    ));
    Ok(rep)
}

pub fn lemma7(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Lemma7);
    let k = cfg.k;
    let per_n = (cfg.samples / 2).max(1) as u64;
    let mut torsion_hypergraphs = 0;
    for n in (k + 1)..=cfg.n {
        let total = binomial(n as u64, k as u64).unwrap_or(u64::MAX);
        for t in 0..per_n {
            // densities from sparse up to beyond the number of vertices
            let m_edges = ((n as u64 / 2) + t % (2 * n as u64)).min(total);
            let h = sample_gnm(n, k, m_edges, cfg.seed, (n as u64) << 32 | t)?;
            let mt = incidence_matrix(&h, SignPattern::Alternating).transpose();
            let found = find_minimal_torsion_cocycles_with(&mt, n, cfg.budget, cfg.snf)?;
            rep.instances += 1;
            torsion_hypergraphs += (!found.is_empty()) as u64;
            for c in found {
                rep.checked += 1;
                let w: Vec<u32> = c.subset.iter().map(|&i| i as u32 + 1).collect();
                if !check_small_obstruction(&h, &w) {
                    rep.violation(format!(
                        "n={n} m={m_edges} trial {t}: W = {w:?} fails the obstruction"
                    ));
                }
            }
        }
    }
    rep.notes.push(format!(
        "{} cocycle supports from {torsion_hypergraphs} hypergraphs with torsion cocycles",
        rep.checked
    ));
    Ok(rep)
}

/// Fixed admissible epsilon per `k`: half the cap `(k-1)!/k^k`, except
/// `k = 4`, which uses `1/43` so balanced vectors exist from support 43 up.
pub fn suite_epsilon(k: usize) -> BigRational {
    if k == 4 {
        BigRational::new(BigInt::one(), BigInt::from(43))
    } else {
        epsilon_cap(k) / BigRational::from_integer(BigInt::from(2))
    }
}

pub const SUITE_PRIMES: [u64; 3] = [2, 3, 5];

fn bound_holds(bad: u64, gamma: &BigRational, support: usize, k: usize) -> bool {
    let rhs = gamma * BigRational::from_integer(num_traits::pow::pow(BigInt::from(support), k));
    BigRational::from_integer(BigInt::from(bad)) >= rhs
}

fn random_vector(n: usize, q: u64, rng: &mut impl Rng) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(0..q)).collect()
}

/// Checks the lower bound on all sampled vectors (or only the balanced ones).
fn bound_cells(
    rep: &mut SuiteReport,
    ks: &[usize],
    n_range: impl Fn(usize) -> std::ops::RangeInclusive<usize>,
    balanced_only: bool,
    cfg: &VerifyConfig,
) -> Result<()> {
    for &k in ks {
        let eps = suite_epsilon(k);
        let gamma = gamma_bound(k, &eps)?;
        let mut skipped = 0u64;
        let mut zero = 0u64;
        for n in n_range(k) {
            for q in SUITE_PRIMES {
                let mut rng = trial_rng(cfg.seed, (k as u64) << 40 | (n as u64) << 20 | q);
                for _ in 0..cfg.samples {
                    let v = random_vector(n, q, &mut rng);
                    rep.instances += 1;
                    if v.iter().all(|&x| x == 0) {
                        zero += 1;
                        continue;
                    }
                    if balanced_only && !epsilon_balanced(&v, q, &eps)?.balanced {
                        skipped += 1;
                        continue;
                    }
                    let support = v.iter().filter(|&&x| x != 0).count();
                    let bad = count_bad_vectors(&v, k, q, cfg.budget)?;
                    rep.checked += 1;
                    if !bound_holds(bad, &gamma, support, k) {
                        rep.violation(format!(
                            "k={k} n={n} q={q} v={v:?}: |B_q(v)| = {bad} below gamma*{support}^{k}"
                        ));
                    }
                }
            }
        }
        rep.notes.push(format!(
            "k={k}: epsilon = {eps}, gamma = {gamma}, {zero} zero vectors skipped"
        ));
        if balanced_only {
            rep.notes.push(format!(
                "k={k}: {skipped} sampled vectors were not balanced and were skipped"
            ));
        }
    }
    Ok(())
}

/// Odd `k`: every vector satisfies the bound. Lengths start at `k + 1`;
/// at `n = k` the bound fails, e.g. `(1, 2, 1)` mod 3 for `k = 3`.
pub fn lemma8(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Lemma8);
    let max_n = cfg.n.max(4);
    bound_cells(
        &mut rep,
        &[3, 5],
        |k| (k + 1)..=max_n.max(k + 1),
        false,
        cfg,
    )?;
    Ok(rep)
}

/// Even `k = 4`: the bound on balanced vectors. With `epsilon < 3/128` no
/// nonzero vector of support below 43 is balanced, so besides the small
/// lengths the suite also checks vectors with distinct residues at
/// `n = 44, q = 47`.
pub fn lemma10(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Lemma10);
    let max_n = cfg.n.max(5);
    bound_cells(&mut rep, &[4], |k| (k + 1)..=max_n, true, cfg)?;

    let (k, n, q) = (4usize, 44usize, 47u64);
    let eps = suite_epsilon(k);
    let gamma = gamma_bound(k, &eps)?;
    let mut rng = trial_rng(cfg.seed, 0x004c_3130);
    let large_samples = (cfg.samples / 10).max(1);
    for _ in 0..large_samples {
        // a random injective assignment of nonzero residues
        let mut residues: Vec<u64> = (1..q).collect();
        for i in 0..n {
            let j = rng.gen_range(i..residues.len());
            residues.swap(i, j);
        }
        let v = residues[..n].to_vec();
        rep.instances += 1;
        if !epsilon_balanced(&v, q, &eps)?.balanced {
            rep.violation(format!(
                "distinct-residue vector at n={n} reported unbalanced"
            ));
            continue;
        }
        let bad = count_bad_vectors(&v, k, q, cfg.budget)?;
        rep.checked += 1;
        if !bound_holds(bad, &gamma, n, k) {
            rep.violation(format!(
                "k={k} n={n} q={q}: |B_q(v)| = {bad} below the bound"
            ));
        }
    }
    rep.notes.push(format!(
        "large cell k={k} n={n} q={q}: {large_samples} balanced vectors"
    ));
    Ok(rep)
}

/// A deliberately wrong kernel: reports an extra factor 2 on the largest
/// invariant factor. Used to confirm the suites detect a broken kernel.
pub fn faulty_smith_normal_form(m: &SparseIntMatrix) -> Result<SmithForm> {
    let snf = smith_normal_form(m)?;
    let mut f = snf.invariant_factors().to_vec();
    if let Some(last) = f.last_mut() {
        *last *= 2;
    }
    SmithForm::from_factors(f)
}

/// Primes `q` among `candidates` where `rank_Q(m) > rank_{Z/q}(m)`.
pub fn rank_gap_primes(m: &SparseIntMatrix, candidates: &[BigUint]) -> Result<Vec<BigUint>> {
    let rq = rank_rational(m);
    let mut out = Vec::new();
    for q in candidates {
        if rank_mod_q(m, q)? < rq {
            out.push(q.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> VerifyConfig {
        VerifyConfig {
            n: 6,
            k: 3,
            samples: 20,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suites_pass_with_the_real_kernel() {
        let r = run_suites(&Suite::ALL, &small_cfg()).unwrap();
        for s in &r.suites {
            assert!(s.passed, "{}: {:?}", s.suite, s.violations);
        }
        assert!(r.passed);
    }

    #[test]
    fn faulty_kernel_is_caught() {
        let cfg = VerifyConfig {
            snf: faulty_smith_normal_form,
            ..small_cfg()
        };
        let r = run_suites(&[Suite::Claim6], &cfg).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 4);
        assert_eq!(
            Suite::parse_list("claim6,lemma8").unwrap(),
            vec![Suite::Claim6, Suite::Lemma8]
        );
        assert!(Suite::parse_list("lemma9").is_err());
    }

    #[test]
    fn k4_epsilon_is_admissible() {
        assert!(suite_epsilon(4) < epsilon_cap(4));
        assert!(suite_epsilon(4) * BigRational::from_integer(43.into()) >= BigRational::one());
    }
}

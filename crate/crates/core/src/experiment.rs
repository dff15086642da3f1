//! The add-one-edge-at-a-time cokernel process, torsion-burst detection and
//! Monte Carlo sweeps over `(n, k, density)` cells.
//!
//! A trial samples one random edge order and reads every prefix of it, so
//! the prefix with `m` columns is distributed as `H_k(n, m)`. Trials are keyed
//! by `(seed, trial_id)` and aggregated in trial order, so results do not
//! depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{cokernel_with, CokernelSummary, Limits};
use crate::matrix::{incidence_matrix, SignPattern, SparseIntMatrix};
use crate::model::{binomial, sample_gnm, sample_gnp, Hypergraph};

/// Maximum achievable rank of `M(H)`: `n` for odd `k`, `n - 1` for even `k`.
pub fn n_star(n: usize, k: usize) -> usize {
    if k.is_multiple_of(2) {
        n.saturating_sub(1)
    } else {
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessStep {
    /// Number of columns in the prefix.
    pub step: usize,
    pub coker: CokernelSummary,
}

/// One JSONL line of the `process` command.
#[derive(Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub torsion_order: String,
}

impl From<&ProcessStep> for StepRecord {
    fn from(s: &ProcessStep) -> Self {
        Self {
            step: s.step,
            free_rank: s.coker.free_rank,
            torsion: s.coker.torsion_strings(),
            torsion_order: s.coker.torsion_order.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessTrace {
    pub n: usize,
    pub k: usize,
    pub pattern: SignPattern,
    pub seed: u64,
    pub trial_id: u64,
    /// Recorded steps, strictly increasing in `step`.
    pub steps: Vec<ProcessStep>,
}

impl ProcessTrace {
    pub fn final_step(&self) -> Option<&ProcessStep> {
        self.steps.last()
    }

    pub fn step(&self, m: usize) -> Option<&ProcessStep> {
        self.steps
            .binary_search_by_key(&m, |s| s.step)
            .ok()
            .map(|i| &self.steps[i])
    }
}

/// Samples an edge order from `H_k(n, m_max)` and runs the process on it.
#[allow(clippy::too_many_arguments)]
pub fn run_process(
    n: usize,
    k: usize,
    m_max: u64,
    pattern: SignPattern,
    seed: u64,
    trial_id: u64,
    record_every: usize,
    limits: &Limits,
) -> Result<ProcessTrace> {
    let h = sample_gnm(n, k, m_max, seed, trial_id)?;
    let steps = process_steps(&h, pattern, record_every, limits)?;
    Ok(ProcessTrace {
        n,
        k,
        pattern,
        seed,
        trial_id,
        steps,
    })
}

/// Cokernels of the column prefixes of `M(h)`.
///
/// Steps `0, r, 2r, ...` and the final step are always computed. A recorded
/// step with torsion triggers refinement: the gap back to the previous grid
/// point is filled while torsion persists, and every following step is
/// computed until one is torsion-free.
pub fn process_steps(
    h: &Hypergraph,
    pattern: SignPattern,
    record_every: usize,
    limits: &Limits,
) -> Result<Vec<ProcessStep>> {
    if record_every == 0 {
        return Err(Error::param("record_every must be at least 1"));
    }
    let matrix = incidence_matrix(h, pattern);
    let m_max = h.m();
    let mut out: BTreeMap<usize, CokernelSummary> = BTreeMap::new();
    let compute = |s: usize| cokernel_with(&matrix.column_prefix(s), limits);

    let mut grid = (0..=m_max).step_by(record_every).collect::<Vec<_>>();
    if grid.last() != Some(&m_max) {
        grid.push(m_max);
    }
    let mut prev_grid = 0;
    for &g in &grid {
        if !out.contains_key(&g) {
            let c = compute(g)?;
            let torsion = c.has_torsion();
            out.insert(g, c);
            if torsion {
                let mut b = g;
                while b > prev_grid + 1 && !out.contains_key(&(b - 1)) {
                    b -= 1;
                    let cb = compute(b)?;
                    let done = !cb.has_torsion();
                    out.insert(b, cb);
                    if done {
                        break;
                    }
                }
                let mut f = g;
                while f < m_max {
                    f += 1;
                    let cf = compute(f)?;
                    let done = !cf.has_torsion();
                    out.insert(f, cf);
                    if done {
                        break;
                    }
                }
            }
        }
        prev_grid = g;
    }
    Ok(out
        .into_iter()
        .map(|(step, coker)| ProcessStep { step, coker })
        .collect())
}

/// Where torsion showed up in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BurstSummary {
    pub first: Option<usize>,
    pub last: Option<usize>,
    pub torsion_steps: usize,
    pub max_torsion_order: Option<BigInt>,
}

impl BurstSummary {
    pub fn is_empty(&self) -> bool {
        self.first.is_none()
    }
}

pub fn detect_burst(trace: &ProcessTrace) -> BurstSummary {
    let mut s = BurstSummary::default();
    for step in trace.steps.iter().filter(|s| s.coker.has_torsion()) {
        s.first.get_or_insert(step.step);
        s.last = Some(step.step);
        s.torsion_steps += 1;
        if s.max_torsion_order
            .as_ref()
            .is_none_or(|m| step.coker.torsion_order > *m)
        {
            s.max_torsion_order = Some(step.coker.torsion_order.clone());
        }
    }
    s
}

/// Density parameter of a sweep cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellParam {
    /// Edge probability.
    P(BigRational),
    /// Exact edge count.
    M(u64),
    /// `p = c log(n) / n^(k-1)`.
    C(BigRational),
}

impl CellParam {
    pub fn kind(&self) -> &'static str {
        match self {
            CellParam::P(_) => "p",
            CellParam::M(_) => "m",
            CellParam::C(_) => "c",
        }
    }

    pub fn value_string(&self) -> String {
        match self {
            CellParam::P(p) | CellParam::C(p) => p.to_string(),
            CellParam::M(m) => m.to_string(),
        }
    }
}

/// Converts `c` into the edge probability `c log(n) / n^(k-1)`, clamped to 1.
/// The logarithm makes this inexact; the rational is the exact value of the
/// nearest double.
pub fn c_to_probability(c: &BigRational, n: usize, k: usize) -> Result<BigRational> {
    let cf = c
        .to_f64()
        .ok_or_else(|| Error::param(format!("c = {c} is not representable")))?;
    if cf < 0.0 {
        return Err(Error::param(format!("c = {c} must be non-negative")));
    }
    let p = (cf * (n as f64).ln() / (n as f64).powi(k as i32 - 1)).min(1.0);
    BigRational::from_float(p)
        .ok_or_else(|| Error::param(format!("probability for c = {c} is not finite")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCell {
    pub n: usize,
    pub k: usize,
    pub param: CellParam,
    pub pattern: SignPattern,
}

impl SweepCell {
    fn sample(&self, seed: u64, trial_id: u64) -> Result<Hypergraph> {
        match &self.param {
            CellParam::P(p) => sample_gnp(self.n, self.k, p, seed, trial_id),
            CellParam::M(m) => sample_gnm(self.n, self.k, *m, seed, trial_id),
            CellParam::C(c) => sample_gnp(
                self.n,
                self.k,
                &c_to_probability(c, self.n, self.k)?,
                seed,
                trial_id,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub cell: SweepCell,
    pub trials: usize,
    /// Trials that ended in an error; they count towards nothing else.
    pub failed_trials: usize,
    pub errors: Vec<String>,
    pub count_with_torsion_final: usize,
    pub count_with_torsion_ever: usize,
    pub count_trivial_coker: usize,
    pub count_coker_z: usize,
    /// Count of final cokernels with free rank at least one.
    pub count_free_rank_positive: usize,
    pub mean_free_rank: f64,
    /// Smallest and largest step at which torsion was recorded.
    pub burst_window: Option<(usize, usize)>,
}

pub const SWEEP_CSV_HEADER: &str =
    "n,k,param_kind,param_value,pattern,trials,torsion_final,torsion_ever,trivial,coker_Z,mean_free_rank,burst_min,burst_max";

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        let (lo, hi) = self
            .burst_window
            .map_or((String::new(), String::new()), |(a, b)| {
                (a.to_string(), b.to_string())
            });
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.cell.n,
            self.cell.k,
            self.cell.param.kind(),
            self.cell.param.value_string(),
            self.cell.pattern,
            self.trials,
            self.count_with_torsion_final,
            self.count_with_torsion_ever,
            self.count_trivial_coker,
            self.count_coker_z,
            self.mean_free_rank,
            lo,
            hi
        )
    }
}

struct TrialOutcome {
    final_coker: CokernelSummary,
    torsion_ever: bool,
    window: Option<(usize, usize)>,
}

/// Seed of cell `index` derived from the sweep seed (splitmix64 finalizer),
/// so cells draw independent streams.
pub fn cell_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub trials: usize,
    pub seed: u64,
    pub parallelism: usize,
    /// Process resolution; `None` computes only the final cokernel.
    pub record_every: Option<usize>,
    pub limits: Limits,
}

/// Runs every cell for `trials` independent trials. Per-trial errors are
/// collected into the record rather than aborting the sweep.
pub fn sweep(cells: &[SweepCell], opts: &SweepOptions) -> Result<Vec<SweepRecord>> {
    if opts.trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if opts.record_every == Some(0) {
        return Err(Error::param("record_every must be at least 1"));
    }
    let pool = thread_pool(opts.parallelism)?;
    let records = cells
        .iter()
        .enumerate()
        .map(|(index, cell)| {
            let seed = cell_seed(opts.seed, index);
            let outcomes: Vec<Result<TrialOutcome>> = pool.install(|| {
                (0..opts.trials as u64)
                    .into_par_iter()
                    .map(|t| run_trial(cell, seed, t, opts))
                    .collect()
            });
            aggregate(cell.clone(), outcomes)
        })
        .collect();
    Ok(records)
}

fn run_trial(
    cell: &SweepCell,
    seed: u64,
    trial_id: u64,
    opts: &SweepOptions,
) -> Result<TrialOutcome> {
    let h = cell.sample(seed, trial_id)?;
    match opts.record_every {
        None => {
            let c = cokernel_with(&incidence_matrix(&h, cell.pattern), &opts.limits)?;
            let t = c.has_torsion();
            Ok(TrialOutcome {
                window: t.then_some((h.m(), h.m())),
                torsion_ever: t,
                final_coker: c,
            })
        }
        Some(r) => {
            let steps = process_steps(&h, cell.pattern, r, &opts.limits)?;
            let torsion: Vec<usize> = steps
                .iter()
                .filter(|s| s.coker.has_torsion())
                .map(|s| s.step)
                .collect();
            Ok(TrialOutcome {
                window: torsion
                    .first()
                    .map(|&a| (a, *torsion.last().expect("nonempty"))),
                torsion_ever: !torsion.is_empty(),
                final_coker: steps.into_iter().last().expect("final step recorded").coker,
            })
        }
    }
}

fn aggregate(cell: SweepCell, outcomes: Vec<Result<TrialOutcome>>) -> SweepRecord {
    let mut rec = SweepRecord {
        cell,
        trials: outcomes.len(),
        failed_trials: 0,
        errors: Vec::new(),
        count_with_torsion_final: 0,
        count_with_torsion_ever: 0,
        count_trivial_coker: 0,
        count_coker_z: 0,
        count_free_rank_positive: 0,
        mean_free_rank: 0.0,
        burst_window: None,
    };
    let mut free_sum = 0u64;
    for (trial, o) in outcomes.into_iter().enumerate() {
        let o = match o {
            Ok(o) => o,
            Err(e) => {
                rec.failed_trials += 1;
                rec.errors.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        let c = &o.final_coker;
        rec.count_with_torsion_final += c.has_torsion() as usize;
        rec.count_with_torsion_ever += o.torsion_ever as usize;
        rec.count_trivial_coker += c.is_trivial() as usize;
        rec.count_coker_z += c.is_integers() as usize;
        rec.count_free_rank_positive += (c.free_rank >= 1) as usize;
        free_sum += c.free_rank as u64;
        if let Some((a, b)) = o.window {
            rec.burst_window = Some(match rec.burst_window {
                None => (a, b),
                Some((x, y)) => (x.min(a), y.max(b)),
            });
        }
    }
    let ok = rec.trials - rec.failed_trials;
    if ok > 0 {
        rec.mean_free_rank = free_sum as f64 / ok as f64;
    }
    rec
}

fn thread_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::param(format!("cannot build thread pool: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub m: usize,
    pub trials: usize,
    pub torsion_trials: usize,
    pub torsion_fraction: f64,
}

pub const CURVE_CSV_HEADER: &str = "m,trials,torsion_fraction";

impl CurvePoint {
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.m, self.trials, self.torsion_fraction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveOptions {
    pub trials: usize,
    pub seed: u64,
    pub pattern: SignPattern,
    pub parallelism: usize,
    pub limits: Limits,
}

/// Fraction of trials whose prefix with exactly `m` columns has torsion, for
/// each `m` in the grid. One edge order per trial serves every grid point.
pub fn torsion_probability_curve(
    n: usize,
    k: usize,
    m_grid: &[usize],
    opts: &CurveOptions,
) -> Result<Vec<CurvePoint>> {
    if opts.trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let total = binomial(n as u64, k as u64).ok_or_else(|| Error::param("C(n, k) overflows"))?;
    let m_top = m_grid.iter().copied().max().unwrap_or(0);
    if m_top as u64 > total {
        return Err(Error::param(format!(
            "grid point {m_top} exceeds C({n}, {k}) = {total}"
        )));
    }
    let pool = thread_pool(opts.parallelism)?;
    let per_trial: Vec<Vec<bool>> = pool.install(|| {
        (0..opts.trials as u64)
            .into_par_iter()
            .map(|t| {
                let h = sample_gnm(n, k, m_top as u64, opts.seed, t)?;
                let matrix = incidence_matrix(&h, opts.pattern);
                m_grid
                    .iter()
                    .map(|&m| {
                        Ok(cokernel_with(&matrix.column_prefix(m), &opts.limits)?.has_torsion())
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(m_grid
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let hits = per_trial.iter().filter(|t| t[i]).count();
            CurvePoint {
                m,
                trials: opts.trials,
                torsion_trials: hits,
                torsion_fraction: hits as f64 / opts.trials as f64,
            }
        })
        .collect())
}

/// Cokernel of `M(h)` assembled from its 2-core: the core's cokernel plus
/// one free summand per isolated removal.
pub fn cokernel_via_core(
    h: &Hypergraph,
    pattern: SignPattern,
    limits: &Limits,
) -> Result<CokernelSummary> {
    let tc = h.two_core();
    let mut c = cokernel_with(&incidence_matrix(&tc.core, pattern), limits)?;
    c.free_rank += tc.isolated_removals;
    Ok(c)
}

/// Torsion order bound `t^n` with `t^2` the largest squared column norm,
/// compared exactly as `order^2 <= (t^2)^n`.
pub fn within_torsion_budget(m: &SparseIntMatrix, coker: &CokernelSummary) -> bool {
    let t2 = crate::matrix::max_column_norm_squared(m);
    let lhs = &coker.torsion_order * &coker.torsion_order;
    lhs <= num_traits::pow::pow(t2, m.n_rows())
}

impl fmt::Display for CellParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.kind(), self.value_string())
    }
}

impl FromStr for CellParam {
    type Err = Error;

    /// `p=1/40`, `m=120` or `c=12`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.split_once('=').ok_or_else(|| {
            Error::param(format!(
                "cell parameter {s:?} must look like p=.., m=.. or c=.."
            ))
        })?;
        match kind.trim() {
            "p" => Ok(CellParam::P(parse_rational(value)?)),
            "c" => Ok(CellParam::C(parse_rational(value)?)),
            "m" => {
                value.trim().parse().map(CellParam::M).map_err(|_| {
                    Error::param(format!("m = {value:?} is not a non-negative integer"))
                })
            }
            other => Err(Error::param(format!(
                "unknown cell parameter kind {other:?}"
            ))),
        }
    }
}

/// Parses `"num/den"`, an integer, or a decimal such as `"0.125"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::param(format!("{s:?} is not a rational number"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::param(format!("{s:?} has a zero denominator")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if frac_part.chars().any(|c| !c.is_ascii_digit())
        || (int_part.is_empty() && frac_part.is_empty())
    {
        return Err(bad());
    }
    let negative = int_part.starts_with('-');
    let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let den = num_traits::pow::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(num, den))
}

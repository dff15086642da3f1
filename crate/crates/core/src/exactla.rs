//! Exact linear algebra over `Z` and `Z/qZ`: Smith normal form, cokernels,
//! rational rank and rank modulo a prime.
//!
//! Every integer kernel first runs on checked `i64` arithmetic and restarts
//! on `BigInt` as soon as an intermediate value would overflow, so results
//! are always exact.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SparseIntMatrix;

/// Default ceiling on stored entries inside the elimination kernels.
pub const DEFAULT_MAX_ENTRIES: usize = 20_000_000;

/// Resource limits for the elimination kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_entries: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    /// Wraps a list of positive invariant factors; fails unless it is a
    /// divisibility chain.
    pub fn from_factors(invariant_factors: Vec<BigInt>) -> Result<Self> {
        if invariant_factors.iter().any(|d| !d.is_positive()) {
            return Err(Error::param("invariant factors must be positive"));
        }
        if invariant_factors
            .windows(2)
            .any(|w| !w[1].is_multiple_of(&w[0]))
        {
            return Err(Error::param(
                "invariant factors must form a divisibility chain",
            ));
        }
        Ok(Self { invariant_factors })
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Factors above one, in chain order.
    pub fn torsion(&self) -> &[BigInt] {
        let ones = self
            .invariant_factors
            .iter()
            .take_while(|d| d.is_one())
            .count();
        &self.invariant_factors[ones..]
    }

    pub fn cokernel(&self, n_rows: usize) -> CokernelSummary {
        let torsion_factors = self.torsion().to_vec();
        let torsion_order = torsion_factors.iter().product();
        CokernelSummary {
            free_rank: n_rows - self.rank(),
            torsion_factors,
            torsion_order,
        }
    }
}

/// `coker(M) = Z^free_rank + Z/d_1 + ... + Z/d_t` with every `d_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CokernelSummary {
    pub free_rank: usize,
    pub torsion_factors: Vec<BigInt>,
    pub torsion_order: BigInt,
}

impl CokernelSummary {
    pub fn free(n: usize) -> Self {
        Self {
            free_rank: n,
            torsion_factors: Vec::new(),
            torsion_order: BigInt::one(),
        }
    }

    pub fn has_torsion(&self) -> bool {
        !self.torsion_factors.is_empty()
    }

    /// The trivial group.
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && !self.has_torsion()
    }

    /// Exactly `Z`.
    pub fn is_integers(&self) -> bool {
        self.free_rank == 1 && !self.has_torsion()
    }

    pub fn torsion_strings(&self) -> Vec<String> {
        self.torsion_factors.iter().map(BigInt::to_string).collect()
    }
}

impl std::fmt::Display for CokernelSummary {
    /// Group notation such as `Z^3 x Z/6Z`; the trivial group prints as `0`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion_factors.iter().map(|d| format!("Z/{d}Z")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

/// JSON shape emitted by the `snf` and `coker` commands.
#[derive(Debug, Clone, Serialize)]
pub struct SnfReport {
    pub rank: usize,
    pub invariant_factors: Vec<String>,
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl SnfReport {
    pub fn new(snf: &SmithForm, n_rows: usize) -> Self {
        let coker = snf.cokernel(n_rows);
        Self {
            rank: snf.rank(),
            invariant_factors: snf
                .invariant_factors
                .iter()
                .map(BigInt::to_string)
                .collect(),
            free_rank: coker.free_rank,
            torsion: coker.torsion_strings(),
        }
    }
}

pub fn smith_normal_form(m: &SparseIntMatrix) -> Result<SmithForm> {
    smith_normal_form_with(m, &Limits::default())
}

/// Smith normal form by sparse gcd elimination.
///
/// Each round takes a nonzero entry of least absolute value as pivot (ties:
/// least Markowitz fill estimate, then position) and reduces its column by
/// row operations. Once the whole column is cleared, the pivot row is
/// reduced by column operations; a pivot that then stands alone is a
/// diagonal entry. Any nonzero remainder is strictly smaller than the pivot,
/// so the rounds terminate. The diagonal is finally normalized into a
/// divisibility chain.
pub fn smith_normal_form_with(m: &SparseIntMatrix, limits: &Limits) -> Result<SmithForm> {
    let diag = diagonalize(m, limits)?;
    Ok(SmithForm {
        invariant_factors: normalize_diagonal(diag),
    })
}

pub fn cokernel(m: &SparseIntMatrix) -> Result<CokernelSummary> {
    cokernel_with(m, &Limits::default())
}

pub fn cokernel_with(m: &SparseIntMatrix, limits: &Limits) -> Result<CokernelSummary> {
    Ok(smith_normal_form_with(m, limits)?.cokernel(m.n_rows()))
}

/// Absolute values of a diagonal form equivalent to `m` (unordered, not yet a chain).
pub(crate) fn diagonalize(m: &SparseIntMatrix, limits: &Limits) -> Result<Vec<BigInt>> {
    let nnz = m.nnz();
    if nnz > limits.max_entries {
        return Err(Error::SizeLimit {
            entries: nnz,
            limit: limits.max_entries,
        });
    }
    match Eliminator::<i64>::from_matrix(m).and_then(|e| e.run(limits)) {
        Ok(d) => Ok(d.iter().map(|&v| BigInt::from(v)).collect()),
        Err(Stop::Overflow) => Eliminator::<BigInt>::from_matrix(m)
            .and_then(|e| e.run(limits))
            .map_err(|s| s.into_error(limits)),
        Err(s) => Err(s.into_error(limits)),
    }
}

/// Turns diagonal entries into invariant factors via pairwise (gcd, lcm).
fn normalize_diagonal(diag: Vec<BigInt>) -> Vec<BigInt> {
    let mut ones = 0usize;
    let mut rest: Vec<BigInt> = Vec::new();
    for d in diag {
        debug_assert!(d.is_positive());
        if d.is_one() {
            ones += 1;
        } else {
            rest.push(d);
        }
    }
    rest.sort();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            if !rest[j].is_multiple_of(&rest[i]) {
                let g = rest[i].gcd(&rest[j]);
                let l = &rest[i] / &g * &rest[j];
                rest[i] = g;
                rest[j] = l;
            }
        }
    }
    let mut out = vec![BigInt::one(); ones];
    out.extend(rest);
    out.sort();
    out
}

#[derive(Debug)]
enum Stop {
    Overflow,
    Fill(usize),
}

impl Stop {
    fn into_error(self, limits: &Limits) -> Error {
        match self {
            Stop::Fill(entries) => Error::SizeLimit {
                entries,
                limit: limits.max_entries,
            },
            Stop::Overflow => unreachable!("BigInt arithmetic does not overflow"),
        }
    }
}

/// Integer scalars for the elimination kernels. `None` means overflow.
pub(crate) trait Scalar: Clone + PartialEq + Debug + Sized {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn abs(&self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    /// Exact quotient; the caller guarantees divisibility.
    fn div_exact(&self, other: &Self) -> Option<Self>;
    /// `q` with `|self - q * p| <= |p| / 2`.
    fn div_round(&self, p: &Self) -> Option<Self>;
}

impl Scalar for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn abs(&self) -> Option<Self> {
        self.checked_abs()
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        self.checked_div(*other)
    }
    fn div_round(&self, p: &Self) -> Option<Self> {
        let q = self.checked_div_euclid(*p)?;
        let r = self.rem_euclid(*p) as u64;
        if 2 * r > p.unsigned_abs() {
            q.checked_add(p.signum())
        } else {
            Some(q)
        }
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn abs(&self) -> Option<Self> {
        Some(Signed::abs(self))
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        Some(self / other)
    }
    fn div_round(&self, p: &Self) -> Option<Self> {
        let (q, r) = self.div_mod_floor(p);
        let twice: BigInt = Signed::abs(&r) << 1u32;
        if twice.magnitude() > p.magnitude() {
            Some(q + p.signum())
        } else {
            Some(q)
        }
    }
}

type Row<T> = Vec<(u32, T)>;

/// Working copy of a matrix for in-place gcd elimination, stored as sparse
/// rows along the shorter dimension (invariant factors are transpose
/// invariant).
struct Eliminator<T> {
    rows: Vec<Row<T>>,
    col_count: Vec<u32>,
    active: Vec<usize>,
    stored: usize,
}

impl<T: Scalar> Eliminator<T> {
    fn from_matrix(m: &SparseIntMatrix) -> Result<Self, Stop> {
        let transposed = m.n_rows() > m.n_cols();
        let (n_rows, n_cols) = if transposed {
            (m.n_cols(), m.n_rows())
        } else {
            (m.n_rows(), m.n_cols())
        };
        let mut rows: Vec<Row<T>> = vec![Vec::new(); n_rows];
        let mut col_count = vec![0u32; n_cols];
        // column-major traversal keeps every row sorted in both orientations
        for (i, j, v) in m.triplets() {
            let (r, c) = if transposed { (j, i) } else { (i, j) };
            rows[r].push((c as u32, T::from_big(v).ok_or(Stop::Overflow)?));
            col_count[c] += 1;
        }
        if transposed {
            for r in &mut rows {
                r.sort_unstable_by_key(|&(c, _)| c);
            }
        }
        let active = (0..n_rows).filter(|&r| !rows[r].is_empty()).collect();
        Ok(Self {
            rows,
            col_count,
            active,
            stored: m.nnz(),
        })
    }

    fn find_pivot(&self) -> Option<(usize, u32)> {
        let mut best: Option<(usize, u32, &T, u64)> = None;
        for &r in &self.active {
            let row = &self.rows[r];
            let row_fill = row.len() as u64 - 1;
            for (c, v) in row {
                let cost = row_fill * (self.col_count[*c as usize] as u64 - 1);
                let better = match &best {
                    None => true,
                    Some((br, bc, bv, bcost)) => match v.cmp_abs(bv) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => (cost, r, *c) < (*bcost, *br, *bc),
                    },
                };
                if better {
                    best = Some((r, *c, v, cost));
                    if cost == 0 && v.is_unit() {
                        return Some((r, *c));
                    }
                }
            }
        }
        best.map(|(r, c, _, _)| (r, c))
    }

    fn run(mut self, limits: &Limits) -> Result<Vec<T>, Stop> {
        let mut diag = Vec::new();
        while let Some((pr, pc)) = self.find_pivot() {
            let pos = self.rows[pr]
                .binary_search_by_key(&pc, |&(c, _)| c)
                .expect("pivot present");
            let p = self.rows[pr][pos].1.clone();
            let pivot_row = std::mem::take(&mut self.rows[pr]);

            let mut column_clear = true;
            for idx in 0..self.active.len() {
                let r = self.active[idx];
                if r == pr {
                    continue;
                }
                let Ok(at) = self.rows[r].binary_search_by_key(&pc, |&(c, _)| c) else {
                    continue;
                };
                let a = &self.rows[r][at].1;
                let q = a.div_round(&p).ok_or(Stop::Overflow)?;
                if q.is_zero() {
                    column_clear = false;
                    continue;
                }
                let remainder = a
                    .sub(&q.mul(&p).ok_or(Stop::Overflow)?)
                    .ok_or(Stop::Overflow)?;
                if !remainder.is_zero() {
                    column_clear = false;
                }
                let merged = self.axpy(r, &q, &pivot_row)?;
                self.rows[r] = merged;
            }
            if self.stored > limits.max_entries {
                return Err(Stop::Fill(self.stored));
            }

            if !column_clear {
                self.rows[pr] = pivot_row;
                self.prune_active();
                continue;
            }

            // Column pc now holds only the pivot, so column operations touch row pr alone.
            let mut reduced: Row<T> = Vec::with_capacity(pivot_row.len());
            for (c, v) in pivot_row {
                if c == pc {
                    reduced.push((c, v));
                    continue;
                }
                let q = v.div_round(&p).ok_or(Stop::Overflow)?;
                let rem = v
                    .sub(&q.mul(&p).ok_or(Stop::Overflow)?)
                    .ok_or(Stop::Overflow)?;
                if rem.is_zero() {
                    self.col_count[c as usize] -= 1;
                    self.stored -= 1;
                } else {
                    reduced.push((c, rem));
                }
            }
            if reduced.len() == 1 {
                self.col_count[pc as usize] -= 1;
                self.stored -= 1;
                diag.push(p.abs().ok_or(Stop::Overflow)?);
            } else {
                self.rows[pr] = reduced;
            }
            self.prune_active();
        }
        Ok(diag)
    }

    /// `rows[r] - q * pivot_row`, keeping column counts and the entry tally current.
    fn axpy(&mut self, r: usize, q: &T, pivot_row: &Row<T>) -> Result<Row<T>, Stop> {
        let row = std::mem::take(&mut self.rows[r]);
        let mut out = Vec::with_capacity(row.len() + pivot_row.len());
        let mut a = row.into_iter().peekable();
        let mut b = pivot_row.iter().peekable();
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (Some((ca, _)), Some((cb, _))) => ca.cmp(cb),
            };
            match next {
                Ordering::Less => out.push(a.next().expect("peeked")),
                Ordering::Greater => {
                    let (c, v) = b.next().expect("peeked");
                    let nv = T::zero()
                        .sub(&q.mul(v).ok_or(Stop::Overflow)?)
                        .ok_or(Stop::Overflow)?;
                    self.col_count[*c as usize] += 1;
                    self.stored += 1;
                    out.push((*c, nv));
                }
                Ordering::Equal => {
                    let (c, va) = a.next().expect("peeked");
                    let (_, vb) = b.next().expect("peeked");
                    let nv = va
                        .sub(&q.mul(vb).ok_or(Stop::Overflow)?)
                        .ok_or(Stop::Overflow)?;
                    if nv.is_zero() {
                        self.col_count[c as usize] -= 1;
                        self.stored -= 1;
                    } else {
                        out.push((c, nv));
                    }
                }
            }
        }
        Ok(out)
    }

    fn prune_active(&mut self) {
        let rows = &self.rows;
        self.active.retain(|&r| !rows[r].is_empty());
    }
}

/// Rank over `Q`, by fraction-free (Bareiss) elimination.
pub fn rank_rational(m: &SparseIntMatrix) -> usize {
    match bareiss_rank::<i64>(m) {
        Some(r) => r,
        None => bareiss_rank::<BigInt>(m).expect("BigInt arithmetic does not overflow"),
    }
}

fn bareiss_rank<T: Scalar>(m: &SparseIntMatrix) -> Option<usize> {
    let (n_rows, n_cols) = (m.n_rows(), m.n_cols());
    if n_rows == 0 || n_cols == 0 {
        return Some(0);
    }
    let mut a = vec![vec![T::zero(); n_cols]; n_rows];
    for (i, j, v) in m.triplets() {
        a[i][j] = T::from_big(v)?;
    }
    let mut prev = T::from_big(&BigInt::one())?;
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            for j in col + 1..n_cols {
                let lhs = pivot_row[col].mul(&row[j])?;
                let rhs = row[col].mul(&pivot_row[j])?;
                row[j] = lhs.sub(&rhs)?.div_exact(&prev)?;
            }
            row[col] = T::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    Some(rank)
}

/// Arithmetic in `Z/qZ` for a prime `q`.
pub(crate) trait PrimeField {
    type E: Clone + PartialEq + Debug;
    fn reduce(&self, v: &BigInt) -> Self::E;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
}

/// `Z/qZ` for `q < 2^63`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SmallField(pub u64);

impl PrimeField for SmallField {
    type E = u64;
    fn reduce(&self, v: &BigInt) -> u64 {
        let q = BigInt::from(self.0);
        v.mod_floor(&q).to_u64().expect("reduced below q")
    }
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.0 - b)
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        // Fermat; q is prime
        let mut base = *a;
        let mut e = self.0 - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// `Z/qZ` for arbitrary-precision `q`.
#[derive(Debug, Clone)]
pub(crate) struct BigField(pub BigUint);

impl PrimeField for BigField {
    type E = BigUint;
    fn reduce(&self, v: &BigInt) -> BigUint {
        let q = BigInt::from_biguint(Sign::Plus, self.0.clone());
        v.mod_floor(&q).to_biguint().expect("non-negative")
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.0 - b
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.0
    }
    fn inv(&self, a: &BigUint) -> BigUint {
        a.modpow(&(&self.0 - 2u32), &self.0)
    }
}

/// Reduced row echelon form of `m mod q`; returns the rows and pivot columns.
pub(crate) fn rref_mod<F: PrimeField>(f: &F, m: &SparseIntMatrix) -> (Vec<Vec<F::E>>, Vec<usize>) {
    let (n_rows, n_cols) = (m.n_rows(), m.n_cols());
    let mut a = vec![vec![f.zero(); n_cols]; n_rows];
    for (i, j, v) in m.triplets() {
        a[i][j] = f.reduce(v);
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&i| !f.is_zero(&a[i][col])) else {
            continue;
        };
        a.swap(rank, p);
        let inv = f.inv(&a[rank][col]);
        for x in &mut a[rank][col..n_cols] {
            *x = f.mul(x, &inv);
        }
        let pivot_row = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == rank || f.is_zero(&row[col]) {
                continue;
            }
            let factor = row[col].clone();
            for j in col..n_cols {
                if !f.is_zero(&pivot_row[j]) {
                    row[j] = f.sub(&row[j], &f.mul(&factor, &pivot_row[j]));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    a.truncate(rank);
    (a, pivots)
}

fn rank_mod<F: PrimeField>(f: &F, m: &SparseIntMatrix) -> usize {
    // the shorter side as rows keeps the dense work array small
    if m.n_rows() > m.n_cols() {
        rref_mod(f, &m.transpose()).1.len()
    } else {
        rref_mod(f, m).1.len()
    }
}

/// Rank of `m` reduced modulo the prime `q`. Primality is the caller's
/// responsibility; debug builds check it probabilistically.
pub fn rank_mod_q(m: &SparseIntMatrix, q: &BigUint) -> Result<usize> {
    if *q < BigUint::from(2u32) {
        return Err(Error::param(format!("modulus {q} is not a prime")));
    }
    debug_assert!(is_probable_prime(q), "modulus {q} is not prime");
    Ok(match q.to_u64() {
        Some(small) if small < 1 << 63 => rank_mod(&SmallField(small), m),
        _ => rank_mod(&BigField(q.clone()), m),
    })
}

pub fn is_probable_prime(q: &BigUint) -> bool {
    num_prime::nt_funcs::is_prime(q, None).probably()
}

/// Basis of `{x : m x = 0 (mod q)}` for a small prime `q`.
pub fn kernel_basis_mod_q(m: &SparseIntMatrix, q: u64) -> Result<Vec<Vec<u64>>> {
    if q < 2 || !is_probable_prime(&BigUint::from(q)) {
        return Err(Error::param(format!("modulus {q} is not a prime")));
    }
    let f = SmallField(q);
    let n = m.n_cols();
    let (rows, pivots) = rref_mod(&f, m);
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut x = vec![0u64; n];
        x[free] = 1;
        for (row, &p) in rows.iter().zip(&pivots) {
            x[p] = f.sub(&0, &row[free]);
        }
        basis.push(x);
    }
    Ok(basis)
}

//! Sparse integer matrices and the signed incidence matrix of a hypergraph.
//!
//! Storage is column-major: one sorted sparse vector per column, shared
//! behind an `Arc` so column restriction and appending never copy values.
//! Indices are 0-based here and 1-based in the text format.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::Hypergraph;

/// How the nonzero entries of an incidence column are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SignPattern {
    /// `(-1)^(i+1)` on the i-th smallest vertex of the edge.
    #[default]
    Alternating,
    /// `1` on every vertex of the edge.
    AllOnes,
}

impl SignPattern {
    pub fn name(self) -> &'static str {
        match self {
            SignPattern::Alternating => "alternating",
            SignPattern::AllOnes => "ones",
        }
    }

    /// Entry for the vertex at 0-based position `i` within its edge.
    fn entry(self, i: usize) -> i64 {
        match self {
            SignPattern::Alternating if i % 2 == 1 => -1,
            _ => 1,
        }
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alternating" | "alt" => Ok(SignPattern::Alternating),
            "ones" | "all_ones" | "all-ones" => Ok(SignPattern::AllOnes),
            _ => Err(Error::param(format!("unknown sign pattern {s:?}"))),
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sparse integer vector with strictly increasing indices and nonzero values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnVector {
    len: usize,
    entries: Vec<(usize, BigInt)>,
}

impl ColumnVector {
    /// Builds a vector from `(index, value)` pairs in any order. Zero values
    /// are dropped; repeated indices are rejected.
    pub fn new(len: usize, mut entries: Vec<(usize, BigInt)>) -> Result<Self> {
        entries.retain(|(_, v)| !v.is_zero());
        entries.sort_by_key(|&(i, _)| i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param("repeated index in sparse vector"));
        }
        if entries.last().is_some_and(|&(i, _)| i >= len) {
            return Err(Error::param(format!("index out of range for length {len}")));
        }
        Ok(Self { len, entries })
    }

    pub fn from_dense(values: &[BigInt]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        Self {
            len: values.len(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn entries(&self) -> &[(usize, BigInt)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn get(&self, i: usize) -> Option<&BigInt> {
        self.entries
            .binary_search_by_key(&i, |&(j, _)| j)
            .ok()
            .map(|p| &self.entries[p].1)
    }

    /// Squared Euclidean norm.
    pub fn norm_squared(&self) -> BigInt {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }
}

/// Sparse matrix over arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    n_rows: usize,
    cols: Vec<Arc<ColumnVector>>,
}

impl SparseIntMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let empty = Arc::new(ColumnVector {
            len: n_rows,
            entries: Vec::new(),
        });
        Self {
            n_rows,
            cols: vec![empty; n_cols],
        }
    }

    pub fn from_columns(n_rows: usize, cols: Vec<ColumnVector>) -> Result<Self> {
        if let Some(c) = cols.iter().find(|c| c.len != n_rows) {
            return Err(Error::param(format!(
                "column of length {} in a matrix with {n_rows} rows",
                c.len
            )));
        }
        Ok(Self {
            n_rows,
            cols: cols.into_iter().map(Arc::new).collect(),
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets; zeros are dropped
    /// and a repeated position is an error.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self> {
        let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); n_cols];
        for (i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::param(format!(
                    "entry ({i}, {j}) outside a {n_rows}x{n_cols} matrix"
                )));
            }
            cols[j].push((i, v));
        }
        let cols = cols
            .into_iter()
            .map(|c| ColumnVector::new(n_rows, c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(n_rows, cols)
    }

    /// Row-major dense input; handy for small literals and tests.
    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::param("ragged dense matrix"));
        }
        let triplets = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(move |(j, v)| (i, j, v.clone().into()))
        });
        Self::from_triplets(n_rows, n_cols, triplets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.entries.len()).sum()
    }

    pub fn column(&self, j: usize) -> &ColumnVector {
        &self.cols[j]
    }

    pub fn columns(&self) -> impl Iterator<Item = &ColumnVector> {
        self.cols.iter().map(|c| &**c)
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.cols[j].get(i).cloned().unwrap_or_default()
    }

    /// `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.entries.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.n_cols()]; self.n_rows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v.clone();
        }
        d
    }

    pub fn push_column(&mut self, col: ColumnVector) -> Result<()> {
        if col.len != self.n_rows {
            return Err(Error::param(format!(
                "column of length {} in a matrix with {} rows",
                col.len, self.n_rows
            )));
        }
        self.cols.push(Arc::new(col));
        Ok(())
    }

    /// `M_S`: the columns listed in `s`, in the order given.
    pub fn restrict_columns(&self, s: &[usize]) -> Result<Self> {
        if let Some(&j) = s.iter().find(|&&j| j >= self.n_cols()) {
            return Err(Error::param(format!(
                "column index {j} out of range 0..{}",
                self.n_cols()
            )));
        }
        Ok(Self {
            n_rows: self.n_rows,
            cols: s.iter().map(|&j| Arc::clone(&self.cols[j])).collect(),
        })
    }

    /// The first `m` columns.
    pub fn column_prefix(&self, m: usize) -> Self {
        Self {
            n_rows: self.n_rows,
            cols: self.cols[..m.min(self.cols.len())].to_vec(),
        }
    }

    /// Keeps the listed rows (strictly increasing) and renumbers them `0..`.
    pub fn restrict_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("row selection must be strictly increasing"));
        }
        if rows.last().is_some_and(|&r| r >= self.n_rows) {
            return Err(Error::param("row index out of range"));
        }
        let mut map = vec![usize::MAX; self.n_rows];
        for (new, &old) in rows.iter().enumerate() {
            map[old] = new;
        }
        let cols = self
            .cols
            .iter()
            .map(|c| {
                let entries = c
                    .entries
                    .iter()
                    .filter(|(i, _)| map[*i] != usize::MAX)
                    .map(|(i, v)| (map[*i], v.clone()))
                    .collect();
                Arc::new(ColumnVector {
                    len: rows.len(),
                    entries,
                })
            })
            .collect();
        Ok(Self {
            n_rows: rows.len(),
            cols,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.n_rows];
        // column-major traversal fills every new column in increasing order
        for (i, j, v) in self.triplets() {
            cols[i].push((j, v.clone()));
        }
        let len = self.n_cols();
        Self {
            n_rows: len,
            cols: cols
                .into_iter()
                .map(|entries| Arc::new(ColumnVector { len, entries }))
                .collect(),
        }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.triplets()
            .map(|(_, _, v)| v.abs())
            .max()
            .unwrap_or_default()
    }
}

/// `M(H)`: rows are vertices, columns are edges in process order.
pub fn incidence_matrix(h: &Hypergraph, pattern: SignPattern) -> SparseIntMatrix {
    let cols = h
        .edges()
        .iter()
        .map(|e| {
            let entries = e
                .iter()
                .enumerate()
                .map(|(i, &v)| (v as usize - 1, BigInt::from(pattern.entry(i))))
                .collect();
            Arc::new(ColumnVector {
                len: h.n(),
                entries,
            })
        })
        .collect();
    SparseIntMatrix {
        n_rows: h.n(),
        cols,
    }
}

/// One incidence column for a k-subset of `0..len` given in increasing order.
pub fn incidence_column(len: usize, support: &[usize], pattern: SignPattern) -> ColumnVector {
    let entries = support
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, BigInt::from(pattern.entry(i))))
        .collect();
    ColumnVector { len, entries }
}

impl fmt::Display for SparseIntMatrix {
    /// SMS text: `n_rows n_cols M`, then `i j v` row-major, then `0 0 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} M", self.n_rows, self.n_cols())?;
        let mut t: Vec<_> = self.triplets().collect();
        t.sort_by_key(|&(i, j, _)| (i, j));
        for (i, j, v) in t {
            writeln!(f, "{} {} {}", i + 1, j + 1, v)?;
        }
        writeln!(f, "0 0 0")
    }
}

impl FromStr for SparseIntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || Error::Parse {
            line: hline,
            msg: "header must be \"n_rows n_cols M\"".into(),
        };
        if h.len() != 3 {
            return Err(bad_header());
        }
        let n_rows: usize = h[0].parse().map_err(|_| bad_header())?;
        let n_cols: usize = h[1].parse().map_err(|_| bad_header())?;

        let mut triplets = Vec::new();
        let mut terminated = false;
        for (line, l) in lines.by_ref() {
            let f: Vec<&str> = l.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse {
                line,
                msg: msg.into(),
            };
            if f.len() != 3 {
                return Err(bad("entry must be \"i j v\""));
            }
            let i: usize = f[0].parse().map_err(|_| bad("bad row index"))?;
            let j: usize = f[1].parse().map_err(|_| bad("bad column index"))?;
            let v: BigInt = f[2].parse().map_err(|_| bad("bad value"))?;
            if i == 0 && j == 0 && v.is_zero() {
                terminated = true;
                break;
            }
            if i == 0 || j == 0 || i > n_rows || j > n_cols {
                return Err(bad("index out of range"));
            }
            if v.is_zero() {
                return Err(bad("explicit zero entry"));
            }
            triplets.push((i - 1, j - 1, v));
        }
        if !terminated {
            return Err(Error::Parse {
                line: hline,
                msg: "missing \"0 0 0\" terminator".into(),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: "content after terminator".into(),
            });
        }
        Self::from_triplets(n_rows, n_cols, triplets)
    }
}

/// Largest squared column norm; `t^2` in the bound `|torsion| <= t^n`.
pub fn max_column_norm_squared(m: &SparseIntMatrix) -> BigInt {
    m.columns()
        .map(ColumnVector::norm_squared)
        .max()
        .unwrap_or_else(BigInt::one)
}

//! k-uniform hypergraphs on `[n]`, random sampling from `H_k(n, p)` and
//! `H_k(n, m)`, and 2-core peeling.
//!
//! Edges are stored as strictly increasing 1-based vertex lists. The order of
//! the edge list is the process order: the stochastic process consumes
//! prefixes of it, and the text format preserves it.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// A k-uniform hypergraph on vertex set `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Validates and wraps an edge list. Each edge must be strictly
    /// increasing, have exactly `k` vertices in `1..=n`, and appear once.
    pub fn new(n: usize, k: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::param(format!(
                "uniformity k = {k} must be at least 2"
            )));
        }
        if n > u32::MAX as usize {
            return Err(Error::param(format!("vertex count {n} too large")));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for (j, e) in edges.iter().enumerate() {
            if e.len() != k {
                return Err(Error::param(format!(
                    "edge {} has {} vertices, expected {k}",
                    j + 1,
                    e.len()
                )));
            }
            if e[0] < 1 || e[k - 1] as usize > n {
                return Err(Error::param(format!(
                    "edge {} has a vertex outside [1, {n}]",
                    j + 1
                )));
            }
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::param(format!(
                    "edge {} is not strictly increasing",
                    j + 1
                )));
            }
            if !seen.insert(e.as_slice()) {
                return Err(Error::param(format!("edge {} is a duplicate", j + 1)));
            }
        }
        Ok(Self { n, k, edges })
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Vec::new())
    }

    /// The complete k-uniform hypergraph, edges in colexicographic order.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        let total = binomial(n as u64, k as u64)
            .ok_or_else(|| Error::param(format!("C({n}, {k}) does not fit in 64 bits")))?;
        let edges = (0..total).map(|r| colex_unrank(r, k)).collect();
        Ok(Self { n, k, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// The sub-hypergraph made of the first `m` edges in process order.
    pub fn prefix(&self, m: usize) -> Hypergraph {
        let m = m.min(self.edges.len());
        Hypergraph {
            n: self.n,
            k: self.k,
            edges: self.edges[..m].to_vec(),
        }
    }

    /// Incidence count of every vertex; index `v - 1` holds the degree of `v`.
    pub fn degree_profile(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v as usize - 1] += 1;
            }
        }
        deg
    }

    /// Peels the hypergraph down to its 2-core.
    ///
    /// Vertices of degree below two are removed smallest index first; a
    /// degree-one vertex takes its edge with it. The surviving vertices are
    /// relabeled `1..=n'` preserving their relative order, so the sign
    /// pattern of every surviving edge is unchanged.
    pub fn two_core(&self) -> TwoCore {
        let n = self.n;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (j, e) in self.edges.iter().enumerate() {
            for &v in e {
                incident[v as usize - 1].push(j);
            }
        }
        let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
        let mut vertex_alive = vec![true; n];
        let mut edge_alive = vec![true; self.edges.len()];
        let mut queue: BTreeSet<usize> = (0..n).filter(|&v| degree[v] < 2).collect();
        let mut isolated_removals = 0;

        while let Some(v) = queue.pop_first() {
            if !vertex_alive[v] {
                continue;
            }
            vertex_alive[v] = false;
            if degree[v] == 0 {
                isolated_removals += 1;
                continue;
            }
            let j = incident[v]
                .iter()
                .copied()
                .find(|&j| edge_alive[j])
                .expect("degree one vertex has a live edge");
            edge_alive[j] = false;
            for &u in &self.edges[j] {
                let u = u as usize - 1;
                degree[u] -= 1;
                if vertex_alive[u] && degree[u] < 2 {
                    queue.insert(u);
                }
            }
        }

        let mut relabel = vec![0u32; n];
        let mut kept_vertices = Vec::new();
        for v in 0..n {
            if vertex_alive[v] {
                kept_vertices.push(v as u32 + 1);
                relabel[v] = kept_vertices.len() as u32;
            }
        }
        let mut kept_edges = Vec::new();
        let mut edges = Vec::new();
        for (j, e) in self.edges.iter().enumerate() {
            if edge_alive[j] {
                kept_edges.push(j);
                edges.push(e.iter().map(|&v| relabel[v as usize - 1]).collect());
            }
        }
        TwoCore {
            core: Hypergraph {
                n: kept_vertices.len(),
                k: self.k,
                edges,
            },
            isolated_removals,
            kept_vertices,
            kept_edges,
        }
    }
}

/// Result of 2-core peeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCore {
    /// The core, relabeled onto `1..=kept_vertices.len()`.
    pub core: Hypergraph,
    /// Vertices that had no live edge when they were deleted. Each one
    /// accounts for a free `Z` summand of the cokernel.
    pub isolated_removals: usize,
    /// Original labels of the surviving vertices, increasing.
    pub kept_vertices: Vec<u32>,
    /// Original positions of the surviving edges, in process order.
    pub kept_edges: Vec<usize>,
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.n, self.k, self.edges.len())?;
        for e in &self.edges {
            let mut first = true;
            for v in e {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
                first = false;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Hypergraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header \"n k m\"".into(),
        })?;
        let nums = parse_fields(hline, header)?;
        let [n, k, m] = nums[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be \"n k m\"".into(),
            });
        };
        let k = k as usize;
        let mut edges = Vec::with_capacity(m as usize);
        for (line, l) in lines.by_ref().take(m as usize) {
            let e = parse_fields(line, l)?;
            if e.len() != k {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {k} vertices, found {}", e.len()),
                });
            }
            let e = e
                .into_iter()
                .map(|v| {
                    u32::try_from(v).map_err(|_| Error::Parse {
                        line,
                        msg: "vertex out of range".into(),
                    })
                })
                .collect::<Result<Vec<u32>>>()?;
            edges.push(e);
        }
        if edges.len() as u64 != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: "trailing content after the last edge".into(),
            });
        }
        Hypergraph::new(n as usize, k, edges)
    }
}

fn parse_fields(line: usize, l: &str) -> Result<Vec<u64>> {
    l.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not a non-negative integer: {t:?}"),
            })
        })
        .collect()
}

/// How many edges a random hypergraph gets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeMode {
    /// Every k-set independently with probability `p`.
    Probability(BigRational),
    /// Exactly `m` distinct edges, uniformly.
    Count(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSpec {
    pub mode: EdgeMode,
    pub seed: u64,
    pub trial_id: u64,
}

impl RandomSpec {
    pub fn sample(&self, n: usize, k: usize) -> Result<Hypergraph> {
        match &self.mode {
            EdgeMode::Probability(p) => sample_gnp(n, k, p, self.seed, self.trial_id),
            EdgeMode::Count(m) => sample_gnm(n, k, *m, self.seed, self.trial_id),
        }
    }
}

/// Generator for one trial. Distinct `trial_id`s select distinct ChaCha
/// streams under the same key, so trials are independent and reproducible in
/// any scheduling order.
pub fn trial_rng(seed: u64, trial_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_id);
    rng
}

/// Draws from `H_k(n, p)`: the edge count is Binomial(C(n,k), p), the edges
/// themselves uniform among all sets of that size, in uniformly random order.
pub fn sample_gnp(
    n: usize,
    k: usize,
    p: &BigRational,
    seed: u64,
    trial_id: u64,
) -> Result<Hypergraph> {
    check_nk(n, k)?;
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }
    let total = edge_universe(n, k)?;
    let mut rng = trial_rng(seed, trial_id);
    let m = if p.is_zero() {
        0
    } else if p.is_one() {
        total
    } else {
        let pf = p
            .to_f64()
            .ok_or_else(|| Error::param(format!("probability {p} is not representable")))?;
        Binomial::new(total, pf)
            .map_err(|e| Error::param(format!("binomial({total}, {pf}): {e}")))?
            .sample(&mut rng)
    };
    Ok(draw_edges(&mut rng, n, k, total, m))
}

/// Draws from `H_k(n, m)`: `m` distinct edges, uniform over all m-subsets,
/// in uniformly random order.
pub fn sample_gnm(n: usize, k: usize, m: u64, seed: u64, trial_id: u64) -> Result<Hypergraph> {
    check_nk(n, k)?;
    let total = edge_universe(n, k)?;
    if m > total {
        return Err(Error::param(format!(
            "m = {m} exceeds C({n}, {k}) = {total}"
        )));
    }
    let mut rng = trial_rng(seed, trial_id);
    Ok(draw_edges(&mut rng, n, k, total, m))
}

fn draw_edges(rng: &mut ChaCha8Rng, n: usize, k: usize, total: u64, m: u64) -> Hypergraph {
    let edges = index::sample(rng, total as usize, m as usize)
        .into_iter()
        .map(|r| colex_unrank(r as u64, k))
        .collect();
    Hypergraph { n, k, edges }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::param(format!(
            "need 2 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::param(format!("vertex count {n} too large")));
    }
    Ok(())
}

fn edge_universe(n: usize, k: usize) -> Result<u64> {
    binomial(n as u64, k as u64)
        .filter(|&t| t <= usize::MAX as u64 && t < 1 << 63)
        .ok_or_else(|| Error::param(format!("C({n}, {k}) is too large to index edges")))
}

/// `C(n, k)`, or `None` on 64-bit overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Colexicographic rank of a k-subset given as increasing 1-based vertices.
pub fn colex_rank(edge: &[u32]) -> u64 {
    edge.iter()
        .enumerate()
        .map(|(i, &v)| binomial(v as u64 - 1, i as u64 + 1).expect("rank fits"))
        .sum()
}

/// Inverse of [`colex_rank`].
pub fn colex_unrank(mut rank: u64, k: usize) -> Vec<u32> {
    let mut edge = vec![0u32; k];
    // upper bound for the largest element: C(c, k) <= rank
    let mut c = k as u64 - 1;
    while binomial(c + 1, k as u64).is_some_and(|b| b <= rank) {
        c += 1;
    }
    for i in (1..=k as u64).rev() {
        while binomial(c, i).expect("bounded by rank") > rank {
            c -= 1;
        }
        rank -= binomial(c, i).expect("bounded by rank");
        edge[i as usize - 1] = c as u32 + 1;
        c = c.saturating_sub(1);
    }
    edge
}

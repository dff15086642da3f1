//! Command-line front end.
//!
//! Settings come from flags, then an optional `--config` file of
//! `key = value` lines using the flag names, then built-in defaults. The
//! `TORSIONLAB_BUDGET` variable sits between flags and the config file. Data
//! goes to `--out` or standard output; diagnostics go to standard error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{smith_normal_form_with, Limits, SnfReport, DEFAULT_MAX_ENTRIES};
use crate::experiment::{
    parse_rational, run_process, sweep, torsion_probability_curve, CellParam, CurveOptions,
    StepRecord, SweepCell, SweepOptions, CURVE_CSV_HEADER, SWEEP_CSV_HEADER,
};
use crate::matrix::{incidence_matrix, SignPattern, SparseIntMatrix};
use crate::model::{binomial, EdgeMode, Hypergraph, RandomSpec};
use crate::torsion::DEFAULT_ENUMERATION_BUDGET;
use crate::verify::{faulty_smith_normal_form, run_suites, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub const BUDGET_ENV: &str = "TORSIONLAB_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "torsionlab",
    version,
    about = "Cokernels of random hypergraph incidence matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a random k-uniform hypergraph.
    Sample(Common),
    /// Signed incidence matrix of a hypergraph, in SMS text format.
    Incidence(Common),
    /// Smith normal form of an SMS matrix.
    Snf(Common),
    /// Cokernel of an SMS matrix or of a hypergraph's incidence matrix.
    Coker(Common),
    /// 2-core of a hypergraph.
    Core(Common),
    /// Cokernel along the add-one-edge process, as JSON lines.
    Process(Common),
    /// Fraction of trials with torsion at each edge count, as CSV.
    Curve(Common),
    /// Monte Carlo sweep over (n, k, density) cells, as CSV.
    Sweep(Common),
    /// Run the property suites and report pass or fail.
    Verify(Common),
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Input file; standard input when absent.
    input: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Edge probability, as `num/den` or an exact decimal.
    #[arg(long)]
    p: Option<String>,
    /// Number of edges.
    #[arg(long)]
    m: Option<String>,
    /// Density constant for `p = c log n / n^(k-1)`.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trial_id: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    parallelism: Option<String>,
    #[arg(long)]
    record_every: Option<String>,
    #[arg(long)]
    max_entries: Option<String>,
    /// Enumeration budget for the verify suites.
    #[arg(long)]
    budget: Option<String>,
    /// Edge-count grid for `curve`: `start:end:step` or a comma list.
    #[arg(long)]
    grid: Option<String>,
    /// Suites for `verify`: a comma list or `all`.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

const SETTING_KEYS: &[&str] = &[
    "n",
    "k",
    "p",
    "m",
    "c",
    "pattern",
    "seed",
    "trial-id",
    "trials",
    "parallelism",
    "record-every",
    "max-entries",
    "budget",
    "grid",
    "suite",
    "out",
    "format",
];

/// Merged settings: flag values over config-file values.
struct Settings {
    values: BTreeMap<String, String>,
    input: Option<PathBuf>,
    inject_fault: Option<String>,
}

impl Settings {
    fn from_common(c: Common) -> Result<Self> {
        let mut values = match &c.config {
            Some(path) => parse_config(&fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        // the environment overrides the config file but not an explicit flag
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            values.insert("budget".to_string(), v);
        }
        let flags = [
            ("n", c.n),
            ("k", c.k),
            ("p", c.p),
            ("m", c.m),
            ("c", c.c),
            ("pattern", c.pattern),
            ("seed", c.seed),
            ("trial-id", c.trial_id),
            ("trials", c.trials),
            ("parallelism", c.parallelism),
            ("record-every", c.record_every),
            ("max-entries", c.max_entries),
            ("budget", c.budget),
            ("grid", c.grid),
            ("suite", c.suite),
            ("out", c.out.map(|p| p.to_string_lossy().into_owned())),
            ("format", c.format),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                values.insert(key.to_string(), v);
            }
        }
        Ok(Self {
            values,
            input: c.input,
            inject_fault: c.inject_fault,
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::param(format!("--{key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::param(format!("--{key} is required")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::param(format!("--{key}: cannot parse {x:?}")))
                })
                .collect(),
        }
    }

    fn pattern(&self) -> Result<SignPattern> {
        self.get_or("pattern", SignPattern::Alternating)
    }

    fn limits(&self) -> Result<Limits> {
        let max_entries = self.get_or("max-entries", DEFAULT_MAX_ENTRIES)?;
        if max_entries == 0 {
            return Err(Error::param("--max-entries must be positive"));
        }
        Ok(Limits { max_entries })
    }

    fn budget(&self) -> Result<u64> {
        self.get_or("budget", DEFAULT_ENUMERATION_BUDGET)
    }

    fn positive(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get_or(key, default)?;
        if v == 0 {
            return Err(Error::param(format!("--{key} must be at least 1")));
        }
        Ok(v)
    }

    fn parallelism(&self) -> Result<usize> {
        let default = std::thread::available_parallelism().map_or(1, |p| p.get());
        self.positive("parallelism", default)
    }

    /// Output format, restricted to what the command can write.
    fn format(&self, allowed: &[&str]) -> Result<Option<String>> {
        match self.raw("format") {
            None => Ok(None),
            Some(f) if allowed.contains(&f) => Ok(Some(f.to_string())),
            Some(f) => Err(Error::param(format!(
                "--format {f} is not available here; choose from {}",
                allowed.join(", ")
            ))),
        }
    }

    fn read_input(&self) -> Result<String> {
        match &self.input {
            Some(path) => Ok(fs::read_to_string(path)?),
            None => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                Ok(s)
            }
        }
    }

    fn write_output(&self, data: &str) -> Result<()> {
        match self.raw("out") {
            Some(path) => fs::write(path, data)?,
            None => {
                let mut out = io::stdout().lock();
                out.write_all(data.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }

    /// The single density parameter of a run; exactly one must be set.
    fn density(&self) -> Result<CellParam> {
        let set: Vec<&str> = ["p", "m", "c"]
            .into_iter()
            .filter(|k| self.raw(k).is_some())
            .collect();
        match set[..] {
            ["p"] => Ok(CellParam::P(checked_probability(
                self.raw("p").expect("set"),
            )?)),
            ["m"] => Ok(CellParam::M(self.require("m")?)),
            ["c"] => Ok(CellParam::C(parse_rational(self.raw("c").expect("set"))?)),
            [] => Err(Error::param("one of --p, --m, --c is required")),
            _ => Err(Error::param("give exactly one of --p, --m, --c")),
        }
    }

    fn n_k(&self) -> Result<(usize, usize)> {
        let n: usize = self.require("n")?;
        let k: usize = self.require("k")?;
        check_n_k(n, k)?;
        Ok((n, k))
    }
}

fn check_n_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::param("--k must be at least 2"));
    }
    if n < k {
        return Err(Error::param(format!("--n must be at least k = {k}")));
    }
    Ok(())
}

fn checked_probability(s: &str) -> Result<BigRational> {
    let p = parse_rational(s)?;
    if p < BigRational::zero() || p > BigRational::one() {
        return Err(Error::param(format!("--p {s} is outside [0, 1]")));
    }
    Ok(p)
}

fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: "expected key = value".into(),
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !SETTING_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("unknown setting {key:?}"),
            });
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_budget() || matches!(e, Error::Io(_)) {
                EXIT_BUDGET
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    let (name, common) = match cmd {
        Command::Sample(c) => ("sample", c),
        Command::Incidence(c) => ("incidence", c),
        Command::Snf(c) => ("snf", c),
        Command::Coker(c) => ("coker", c),
        Command::Core(c) => ("core", c),
        Command::Process(c) => ("process", c),
        Command::Curve(c) => ("curve", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Verify(c) => ("verify", c),
    };
    let s = Settings::from_common(common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.parallelism()?)
        .build()
        .map_err(|e| Error::param(format!("cannot build thread pool: {e}")))?;
    pool.install(|| match name {
        "sample" => cmd_sample(&s),
        "incidence" => cmd_incidence(&s),
        "snf" | "coker" => cmd_snf(&s),
        "core" => cmd_core(&s),
        "process" => cmd_process(&s),
        "curve" => cmd_curve(&s),
        "sweep" => cmd_sweep(&s),
        _ => cmd_verify(&s),
    })
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct HypergraphJson<'a> {
    n: usize,
    k: usize,
    m: usize,
    edges: &'a [Vec<u32>],
}

impl<'a> From<&'a Hypergraph> for HypergraphJson<'a> {
    fn from(h: &'a Hypergraph) -> Self {
        Self {
            n: h.n(),
            k: h.k(),
            m: h.m(),
            edges: h.edges(),
        }
    }
}

fn cmd_sample(s: &Settings) -> Result<i32> {
    let (n, k) = s.n_k()?;
    let format = s.format(&["json"])?;
    let mode = match s.density()? {
        CellParam::P(p) => EdgeMode::Probability(p),
        CellParam::M(m) => EdgeMode::Count(m),
        CellParam::C(c) => EdgeMode::Probability(crate::experiment::c_to_probability(&c, n, k)?),
    };
    let spec = RandomSpec {
        mode,
        seed: s.get_or("seed", 0)?,
        trial_id: s.get_or("trial-id", 0)?,
    };
    let h = spec.sample(n, k)?;
    let text = match format {
        Some(_) => json_line(&HypergraphJson::from(&h)),
        None => h.to_string(),
    };
    s.write_output(&text)?;
    Ok(EXIT_OK)
}

fn cmd_incidence(s: &Settings) -> Result<i32> {
    let pattern = s.pattern()?;
    s.format(&[])?;
    let h: Hypergraph = s.read_input()?.parse()?;
    s.write_output(&incidence_matrix(&h, pattern).to_string())?;
    Ok(EXIT_OK)
}

/// SMS matrices carry a literal `M` as the third header token; anything
/// else is read as a hypergraph and turned into its incidence matrix.
fn read_matrix(s: &Settings) -> Result<SparseIntMatrix> {
    let text = s.read_input()?;
    let third = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .and_then(|l| l.split_whitespace().nth(2));
    if third == Some("M") {
        text.parse()
    } else {
        let h: Hypergraph = text.parse()?;
        Ok(incidence_matrix(&h, s.pattern()?))
    }
}

fn cmd_snf(s: &Settings) -> Result<i32> {
    s.format(&["json"])?;
    let limits = s.limits()?;
    let m = read_matrix(s)?;
    let snf = smith_normal_form_with(&m, &limits)?;
    s.write_output(&json_line(&SnfReport::new(&snf, m.n_rows())))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CoreJson<'a> {
    core: HypergraphJson<'a>,
    isolated_removals: usize,
    kept_vertices: &'a [u32],
    kept_edges: &'a [usize],
}

fn cmd_core(s: &Settings) -> Result<i32> {
    let format = s.format(&["json"])?;
    let h: Hypergraph = s.read_input()?.parse()?;
    let tc = h.two_core();
    eprintln!(
        "2-core: {} of {} vertices, {} of {} edges, {} isolated removals",
        tc.core.n(),
        h.n(),
        tc.core.m(),
        h.m(),
        tc.isolated_removals
    );
    let text = match format {
        Some(_) => json_line(&CoreJson {
            core: HypergraphJson::from(&tc.core),
            isolated_removals: tc.isolated_removals,
            kept_vertices: &tc.kept_vertices,
            kept_edges: &tc.kept_edges,
        }),
        None => tc.core.to_string(),
    };
    s.write_output(&text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TraceLine {
    trial: u64,
    #[serde(flatten)]
    record: StepRecord,
}

fn cmd_process(s: &Settings) -> Result<i32> {
    let (n, k) = s.n_k()?;
    s.format(&["jsonl"])?;
    let pattern = s.pattern()?;
    let total = binomial(n as u64, k as u64).ok_or_else(|| Error::param("C(n, k) overflows"))?;
    let m_max = match s.raw("p").or(s.raw("c")) {
        Some(_) => return Err(Error::param("process runs to a fixed edge count; use --m")),
        None => s.get_or("m", total)?,
    };
    let seed = s.get_or("seed", 0)?;
    let trials = s.positive("trials", 1)? as u64;
    let first = s.get_or("trial-id", 0u64)?;
    let record_every = s.positive("record-every", 1)?;
    let limits = s.limits()?;
    let traces = (first..first + trials)
        .into_par_iter()
        .map(|t| run_process(n, k, m_max, pattern, seed, t, record_every, &limits))
        .collect::<Result<Vec<_>>>()?;
    let mut out = String::new();
    for tr in &traces {
        for step in &tr.steps {
            out.push_str(&json_line(&TraceLine {
                trial: tr.trial_id,
                record: step.into(),
            }));
        }
    }
    s.write_output(&out)?;
    Ok(EXIT_OK)
}

fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let bad = || {
        Error::param(format!(
            "--grid {spec:?}: expected start:end:step or a comma list"
        ))
    };
    if spec.contains(':') {
        let parts: Vec<usize> = spec
            .split(':')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, end, step] = parts[..] else {
            return Err(bad());
        };
        if step == 0 || start > end {
            return Err(bad());
        }
        Ok((start..=end).step_by(step).collect())
    } else {
        let mut v: Vec<usize> = spec
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }
}

fn cmd_curve(s: &Settings) -> Result<i32> {
    let (n, k) = s.n_k()?;
    let format = s.format(&["csv", "json"])?;
    let grid = match s.raw("grid") {
        Some(g) => parse_grid(g)?,
        None => (0..=3 * n).step_by((n / 20).max(1)).collect(),
    };
    let opts = CurveOptions {
        trials: s.positive("trials", 100)?,
        seed: s.get_or("seed", 0)?,
        pattern: s.pattern()?,
        parallelism: s.parallelism()?,
        limits: s.limits()?,
    };
    let points = torsion_probability_curve(n, k, &grid, &opts)?;
    let text = if format.as_deref() == Some("json") {
        json_line(&points)
    } else {
        let mut t = format!("{CURVE_CSV_HEADER}\n");
        for p in &points {
            t.push_str(&p.csv_row());
            t.push('\n');
        }
        t
    };
    s.write_output(&text)?;
    Ok(EXIT_OK)
}

/// Cells are the product of the `n`, `k` lists and the density lists.
fn sweep_cells(s: &Settings) -> Result<Vec<SweepCell>> {
    let ns: Vec<usize> = s.list("n")?;
    let ks: Vec<usize> = s.list("k")?;
    if ns.is_empty() || ks.is_empty() {
        return Err(Error::param("--n and --k are required"));
    }
    let mut params = Vec::new();
    for p in s.raw("p").into_iter().flat_map(|v| v.split(',')) {
        params.push(CellParam::P(checked_probability(p)?));
    }
    for m in s.list::<u64>("m")? {
        params.push(CellParam::M(m));
    }
    for c in s.raw("c").into_iter().flat_map(|v| v.split(',')) {
        params.push(CellParam::C(parse_rational(c)?));
    }
    if params.is_empty() {
        return Err(Error::param("one of --p, --m, --c is required"));
    }
    let pattern = s.pattern()?;
    let mut cells = Vec::new();
    for &n in &ns {
        for &k in &ks {
            check_n_k(n, k)?;
            for param in &params {
                cells.push(SweepCell {
                    n,
                    k,
                    param: param.clone(),
                    pattern,
                });
            }
        }
    }
    Ok(cells)
}

fn cmd_sweep(s: &Settings) -> Result<i32> {
    s.format(&["csv"])?;
    let cells = sweep_cells(s)?;
    let record_every = match s.get::<usize>("record-every")? {
        Some(0) => return Err(Error::param("--record-every must be at least 1")),
        r => r,
    };
    let opts = SweepOptions {
        trials: s.positive("trials", 100)?,
        seed: s.get_or("seed", 0)?,
        parallelism: s.parallelism()?,
        record_every,
        limits: s.limits()?,
    };
    eprintln!("sweep: {} cells x {} trials", cells.len(), opts.trials);
    let records = sweep(&cells, &opts)?;
    let mut text = format!("{SWEEP_CSV_HEADER}\n");
    for r in &records {
        for e in &r.errors {
            eprintln!("{} n={} k={}: {e}", r.cell.param, r.cell.n, r.cell.k);
        }
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    s.write_output(&text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(s: &Settings) -> Result<i32> {
    s.format(&["json"])?;
    let suites = Suite::parse_list(s.raw("suite").unwrap_or("all"))?;
    let defaults = VerifyConfig::default();
    let snf = match s.inject_fault.as_deref() {
        None => defaults.snf,
        Some("snf") => faulty_smith_normal_form,
        Some(other) => return Err(Error::param(format!("unknown fault {other:?}"))),
    };
    let cfg = VerifyConfig {
        n: s.get_or("n", defaults.n)?,
        k: s.get_or("k", defaults.k)?,
        seed: s.get_or("seed", defaults.seed)?,
        samples: s.positive("trials", defaults.samples)?,
        budget: s.budget()?,
        snf,
    };
    check_n_k(cfg.n, cfg.k)?;
    let report = run_suites(&suites, &cfg)?;
    for r in &report.suites {
        eprintln!("{}: {}", r.suite, if r.passed { "pass" } else { "FAIL" });
    }
    s.write_output(&json_line(&report))?;
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c =
            parse_config("# sweep\nn = 100\nrecord_every=5\n\n--seed = 7 # trailing\n").unwrap();
        assert_eq!(c["n"], "100");
        assert_eq!(c["record-every"], "5");
        assert_eq!(c["seed"], "7");
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("n 100").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:10:5").unwrap(), vec![0, 5, 10]);
        assert_eq!(parse_grid("30, 10,10").unwrap(), vec![10, 30]);
        assert!(parse_grid("5:0:1").is_err());
        assert!(parse_grid("0:10:0").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["torsionlab", "sample", "--n", "5"]), EXIT_USAGE);
        assert_eq!(
            run([
                "torsionlab",
                "sample",
                "--n",
                "5",
                "--k",
                "3",
                "--p",
                "1/2",
                "--m",
                "3"
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["torsionlab", "bogus"]), EXIT_USAGE);
        assert_eq!(
            run(["torsionlab", "sample", "--n", "x", "--k", "3", "--m", "1"]),
            EXIT_USAGE
        );
    }
}

//! Pilot runs that fix the statistical thresholds used by the acceptance
//! suite. Uses its own seed so the acceptance runs are fresh samples.
//!
//! cargo run --release --example pilot [trials]

use num_bigint::BigInt;
use num_rational::BigRational;
use torsionlab::exactla::Limits;
use torsionlab::experiment::{
    detect_burst, run_process, sweep, CellParam, SweepCell, SweepOptions,
};
use torsionlab::SignPattern;

const PILOT_SEED: u64 = 0x0070_696c_6f74;

/// Acceptance sample sizes the thresholds are computed for.
const TRACES: f64 = 100.0;
const CELL_TRIALS: f64 = 200.0;

fn upper(hits: usize, pilot: usize, n_acc: f64) -> f64 {
    let p = (hits as f64 / pilot as f64).max(3.0 / pilot as f64);
    (p + 3.0 * (p * (1.0 - p) / n_acc).sqrt()).min(1.0)
}

fn lower(hits: usize, pilot: usize, n_acc: f64) -> f64 {
    let p = (hits as f64 / pilot as f64).min(1.0 - 3.0 / pilot as f64);
    (p - 3.0 * (p * (1.0 - p) / n_acc).sqrt()).max(0.0)
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

fn main() -> torsionlab::Result<()> {
    let trials: usize = std::env::args()
        .nth(1)
        .map_or(300, |s| s.parse().expect("trial count"));
    let limits = Limits::default();

    let (n, k) = (100, 3);
    let mut firsts = Vec::new();
    let mut lasts = Vec::new();
    let mut torsion_at_3n = 0;
    for t in 0..trials as u64 {
        let tr = run_process(
            n,
            k,
            3 * n as u64,
            SignPattern::Alternating,
            PILOT_SEED,
            t,
            1,
            &limits,
        )?;
        let b = detect_burst(&tr);
        if let (Some(a), Some(z)) = (b.first, b.last) {
            firsts.push(a as f64);
            lasts.push(z as f64);
        }
        torsion_at_3n += tr.final_step().expect("steps").coker.has_torsion() as usize;
    }
    let (mf, sf) = mean_sd(&firsts);
    let (ml, sl) = mean_sd(&lasts);
    let lo = firsts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lasts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "process n={n} k={k}: {} of {trials} traces had torsion",
        firsts.len()
    );
    println!("  first torsion step: min {lo} mean {mf:.2} sd {sf:.2}");
    println!("  last torsion step: max {hi} mean {ml:.2} sd {sl:.2}");
    println!("  torsion at m=3n: {torsion_at_3n}");
    println!(
        "  BURST_WINDOW = ({}, {})",
        (lo - 3.0 * sf).floor().max(1.0),
        (hi + 3.0 * sl).ceil()
    );
    println!(
        "  TORSION_AT_3N_MAX = {:.4}",
        upper(torsion_at_3n, trials, TRACES)
    );

    let cells = [
        (150, 3, 3, "free rank >= 1"),
        (150, 3, 12, "trivial"),
        (100, 4, 48, "exactly Z"),
    ];
    for (i, (n, k, c, what)) in cells.into_iter().enumerate() {
        let cell = SweepCell {
            n,
            k,
            param: CellParam::C(BigRational::from_integer(BigInt::from(c))),
            pattern: SignPattern::Alternating,
        };
        let opts = SweepOptions {
            trials,
            seed: PILOT_SEED + 1 + i as u64,
            parallelism: 1,
            record_every: None,
            limits,
        };
        let r = &sweep(&[cell], &opts)?[0];
        let hits = match what {
            "trivial" => r.count_trivial_coker,
            "exactly Z" => r.count_coker_z,
            _ => r.count_free_rank_positive,
        };
        println!(
            "cell n={n} k={k} c={c}: {what} in {hits} of {trials}; threshold {:.4}",
            lower(hits, trials, CELL_TRIALS)
        );
    }
    Ok(())
}

//! Timing harness for the NdN scaling ladder.

use std::time::Instant;

use crate::error::Result;
use crate::rng::SeededSource;
use crate::Session;

/// `NdN` rolls of increasing size.
pub const NDN_LADDER: [&str; 5] = ["1d1", "10d10", "100d100", "1000d1000", "10000d10000"];

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub expression: String,
    pub trials: usize,
    pub mean_ns: f64,
    pub median_ns: u64,
    pub p99_ns: u64,
}

/// Parses and evaluates `source` `trials` times, timing each run.
pub fn time_expression(source: &str, trials: usize, seed: u64) -> Result<Timing> {
    assert!(trials > 0);
    let mut session = Session::empty();
    let mut rng = SeededSource::new(seed);
    // warm-up, and surfaces errors before timing
    session.roll(source, &mut rng)?;
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = Instant::now();
        let result = session.roll(source, &mut rng)?;
        samples.push(start.elapsed().as_nanos() as u64);
        std::hint::black_box(result);
    }
    samples.sort_unstable();
    let mean_ns = samples.iter().map(|&s| s as f64).sum::<f64>() / trials as f64;
    let p99 = ((trials as f64 * 0.99).ceil() as usize).clamp(1, trials) - 1;
    Ok(Timing {
        expression: source.to_string(),
        trials,
        mean_ns,
        median_ns: samples[trials / 2],
        p99_ns: samples[p99],
    })
}

pub fn time_ladder(trials: usize, seed: u64) -> Result<Vec<Timing>> {
    NDN_LADDER
        .iter()
        .map(|src| time_expression(src, trials, seed))
        .collect()
}

/// Total dice rolled by an `NdN` expression.
pub fn ndn_dice(expression: &str) -> Option<u64> {
    expression.split_once('d')?.0.parse().ok()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn to_csv(timings: &[Timing]) -> String {
    let mut out = String::from("expression,mean_ns,p99_ns\n");
    for t in timings {
        out.push_str(&format!("{},{:.0},{}\n", t.expression, t.mean_ns, t.p99_ns));
    }
    out
}

//! Pearson chi-square goodness of fit.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Bins whose expected count falls below this are pooled together.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Tests `observed` counts against category probabilities `expected`.
///
/// Categories expected fewer than [`MIN_EXPECTED`] times are merged into a
/// single bin (and that bin into the smallest other one if still too small).
pub fn goodness_of_fit(observed: &[u64], expected: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    if observed.iter().zip(expected).any(|(&o, &p)| o > 0 && p <= 0.0) {
        return ChiSquare {
            statistic: f64::INFINITY,
            degrees_of_freedom: observed.len().saturating_sub(1),
            p_value: 0.0,
        };
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * n;
        if e < MIN_EXPECTED {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 || pooled.0 > 0.0 {
        if pooled.1 >= MIN_EXPECTED || bins.is_empty() {
            bins.push(pooled);
        } else {
            let smallest = bins
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            smallest.0 += pooled.0;
            smallest.1 += pooled.1;
        }
    }
    if bins.len() < 2 {
        return ChiSquare {
            statistic: 0.0,
            degrees_of_freedom: 0,
            p_value: 1.0,
        };
    }
    let statistic: f64 = bins
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = bins.len() - 1;
    let p_value = if statistic.is_finite() {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    } else {
        0.0
    };
    ChiSquare {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    }
}

/// Tests counts against the uniform distribution over their categories.
pub fn uniformity(counts: &[u64]) -> ChiSquare {
    let p = 1.0 / counts.len() as f64;
    goodness_of_fit(counts, &vec![p; counts.len()])
}

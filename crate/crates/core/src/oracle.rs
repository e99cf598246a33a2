//! Exhaustive enumeration of a roll's outcomes, used to check the evaluator's
//! statistics.
//!
//! The oracle never computes a distribution itself. It walks every sequence
//! of face indices the evaluator can request, replays each one through the
//! real evaluator with a scripted source, and weighs the result by the
//! probability of that sequence. Chains are truncated by the same [`Limits`]
//! the evaluator uses, so unbounded rerolls have a finite support.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::eval::{evaluate, MacroTable, ValueVector};
use crate::grammar::{RollExpression, Statement};
use crate::rng::{RandomSource, ScriptedSource, SeededSource};
use crate::stats::{goodness_of_fit, ChiSquare};
use crate::Limits;

/// Significance level used by [`compare`].
pub const SIGNIFICANCE: f64 = 1e-3;

/// Final result of one complete evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Values(ValueVector),
    /// Evaluation failed with this error code.
    Error(&'static str),
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Values(v) => write!(f, "{v}"),
            Outcome::Error(code) => write!(f, "<{code}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probabilities: BTreeMap<Outcome, BigRational>,
    /// Number of evaluator runs the walk took.
    pub evaluations: u64,
}

impl OutcomeDistribution {
    pub fn support_size(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probability(&self, outcome: &Outcome) -> BigRational {
        self.probabilities
            .get(outcome)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Probability of the single numeric result `n`.
    pub fn probability_of(&self, n: i64) -> BigRational {
        self.probability(&Outcome::Values(ValueVector::scalar(n)))
    }

    /// Exact sum of all probabilities; one by construction.
    pub fn total(&self) -> BigRational {
        self.probabilities
            .values()
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &BigRational)> {
        self.probabilities.iter()
    }

    /// Smallest and largest single numeric outcome, if any.
    pub fn numeric_range(&self) -> Option<(i64, i64)> {
        let nums = self.probabilities.keys().filter_map(|o| match o {
            Outcome::Values(v) if v.len() == 1 => v.0[0].as_numeric(),
            _ => None,
        });
        nums.fold(None, |acc, n| match acc {
            None => Some((n, n)),
            Some((lo, hi)) => Some((lo.min(n), hi.max(n))),
        })
    }
}

/// Source that replays a scripted prefix, then answers index 0, recording
/// every index handed out and the bound it was drawn from.
struct PathSource {
    script: ScriptedSource,
    choices: Vec<u64>,
    bounds: Vec<u64>,
}

impl RandomSource for PathSource {
    fn next_index(&mut self, n: u64) -> Result<u64> {
        let index = match self.script.next_index(n) {
            Err(Error::SourceExhausted) => 0,
            other => other?,
        };
        self.choices.push(index);
        self.bounds.push(n);
        Ok(index)
    }
}

/// One evaluation from a fresh copy of `macros`. The copy is only refreshed
/// when the expression defines macros, since nothing else modifies it.
fn run(
    expr: &RollExpression,
    macros: &MacroTable,
    scratch: &mut MacroTable,
    rng: &mut dyn RandomSource,
    limits: &Limits,
) -> Outcome {
    if expr
        .statements
        .iter()
        .any(|s| matches!(s, Statement::MacroDefinition { .. }))
    {
        scratch.clone_from(macros);
    }
    match evaluate(expr, scratch, rng, limits) {
        Ok(r) => Outcome::Values(r.values),
        Err(e) => Outcome::Error(e.code()),
    }
}

/// Walks every draw sequence of `expr` in lexicographic order.
pub fn enumerate(
    expr: &RollExpression,
    macros: &MacroTable,
    limits: &Limits,
) -> Result<OutcomeDistribution> {
    // outcome -> path denominator -> number of paths
    let mut tally: HashMap<Outcome, HashMap<u128, u64>> = HashMap::new();
    let mut prefix: Vec<u64> = Vec::new();
    let mut evaluations = 0u64;
    let mut scratch = macros.clone();
    loop {
        if evaluations >= limits.max_outcomes {
            return Err(Error::StateSpaceTooLarge {
                max: limits.max_outcomes,
            });
        }
        evaluations += 1;
        let mut source = PathSource {
            script: ScriptedSource::new(prefix.iter().copied()),
            choices: Vec::with_capacity(prefix.len() + 1),
            bounds: Vec::with_capacity(prefix.len() + 1),
        };
        let outcome = run(expr, macros, &mut scratch, &mut source, limits);
        let denominator = source
            .bounds
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(u128::from(n)))
            .ok_or(Error::StateSpaceTooLarge {
                max: limits.max_outcomes,
            })?;
        *tally
            .entry(outcome)
            .or_default()
            .entry(denominator)
            .or_default() += 1;

        let Some(j) = (0..source.choices.len())
            .rev()
            .find(|&j| source.choices[j] + 1 < source.bounds[j])
        else {
            break;
        };
        prefix.clear();
        prefix.extend_from_slice(&source.choices[..j]);
        prefix.push(source.choices[j] + 1);
    }

    let probabilities = tally
        .into_iter()
        .map(|(outcome, paths)| {
            let p = paths
                .into_iter()
                .fold(BigRational::zero(), |acc, (den, count)| {
                    acc + BigRational::new(BigInt::from(count), BigInt::from(den))
                });
            (outcome, p)
        })
        .collect();
    Ok(OutcomeDistribution {
        probabilities,
        evaluations,
    })
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub samples: u64,
    pub support_size: usize,
    pub evaluations: u64,
    /// Sampled outcomes the enumeration says are impossible.
    pub impossible: u64,
    pub chi_square: ChiSquare,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.impossible == 0 && self.chi_square.passes(SIGNIFICANCE)
    }
}

/// Draws `samples` evaluations from a seeded source and tests them against
/// the enumerated distribution.
pub fn compare(
    expr: &RollExpression,
    macros: &MacroTable,
    limits: &Limits,
    samples: u64,
    seed: u64,
) -> Result<Comparison> {
    let dist = enumerate(expr, macros, limits)?;
    let index: HashMap<&Outcome, usize> = dist
        .probabilities
        .keys()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    let mut observed = vec![0u64; index.len()];
    let mut impossible = 0;
    let mut rng = SeededSource::new(seed);
    let mut scratch = macros.clone();
    for _ in 0..samples {
        let outcome = run(expr, macros, &mut scratch, &mut rng, limits);
        match index.get(&outcome) {
            Some(&i) => observed[i] += 1,
            None => impossible += 1,
        }
    }
    let expected: Vec<f64> = dist
        .probabilities
        .values()
        .map(|p| p.to_f64().unwrap_or(0.0))
        .collect();
    let chi_square = goodness_of_fit(&observed, &expected);
    Ok(Comparison {
        samples,
        support_size: dist.support_size(),
        evaluations: dist.evaluations,
        impossible,
        chi_square,
    })
}

/// Whether the exact total is one.
pub fn is_normalized(dist: &OutcomeDistribution) -> bool {
    dist.total().is_one()
}

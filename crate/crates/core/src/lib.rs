//! Parser and evaluator for an extended tabletop dice notation.
//!
//! ```
//! use dicenote::{rng::ScriptedSource, Session};
//!
//! // two d20, keep the highest, add two; the dice show 4 and 13
//! let mut rng = ScriptedSource::from_rolls([4, 13]);
//! let result = Session::new().roll("2d20kh+2", &mut rng).unwrap();
//! assert_eq!(result.values.to_string(), "15");
//! ```
//!
//! Supported notation, briefly:
//!
//! | form | meaning |
//! |------|---------|
//! | `xdy`, `d{1,3..5}`, `d{A,B}` | numeric, custom and symbolic dice |
//! | `d%`, `c`, `df` | d100, coin, fate die |
//! | `kh z`, `kl z`, `dh z`, `dl z` | keep / drop highest / lowest |
//! | `f<3`, `r<2`, `rr<2` | filter, reroll once, reroll repeatedly |
//! | `!`, `!o`, `!p` | explode, explode once, penetrating explosion |
//! | `c`, `u` | count kept dice, drop duplicates |
//! | `+ - * / \` | element-wise math, `/` floors and `\` ceils |
//! | `;`, `#NAME = e`, `@NAME` | separate results, define and use macros |

pub mod dice;
pub mod error;
pub mod eval;
pub mod grammar;
pub mod oracle;
pub mod perf;
pub mod report;
pub mod rng;
pub mod stats;

pub use dice::{DiceSpec, FaceSet, FaceValue, Pool, RollRecord, Status};
pub use error::{Error, Result, Span};
pub use eval::{evaluate, MacroTable, RollResult, Value, ValueVector, Warning};
pub use grammar::{parse, parse_str, tokenize, ParseOptions, RollExpression};
pub use rng::{seeded_source, RandomSource, ScriptedSource, SeededSource};

/// Resource limits applied during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum extra rolls (rerolls plus explosions) a single die may take.
    pub chain: u32,
    /// Maximum dice in one pool.
    pub max_pool: u64,
    /// Maximum random draws in one evaluation.
    pub max_draws: u64,
    /// Maximum nesting of macro accesses.
    pub macro_depth: u32,
    /// Maximum evaluations the enumeration oracle may perform.
    pub max_outcomes: u64,
}

impl Limits {
    pub const DEFAULT_CHAIN: u32 = 20;

    pub fn with_chain(self, chain: u32) -> Self {
        Limits { chain, ..self }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            chain: Self::DEFAULT_CHAIN,
            max_pool: 10_000_000,
            max_draws: 200_000,
            macro_depth: 16,
            max_outcomes: 10_000_000,
        }
    }
}

/// Parser options, limits and a macro table that persists across rolls.
#[derive(Debug, Clone)]
pub struct Session {
    pub macros: MacroTable,
    pub limits: Limits,
    pub parse_options: ParseOptions,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    /// A session preloaded with the built-in macros.
    pub fn new() -> Self {
        Session {
            macros: MacroTable::with_builtins(),
            limits: Limits::default(),
            parse_options: ParseOptions::default(),
        }
    }

    pub fn empty() -> Self {
        Session {
            macros: MacroTable::new(),
            ..Self::new()
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn parse(&self, source: &str) -> Result<RollExpression> {
        grammar::parse_str_with(source, self.parse_options)
    }

    pub fn roll(&mut self, source: &str, rng: &mut dyn RandomSource) -> Result<RollResult> {
        let expr = self.parse(source)?;
        evaluate(&expr, &mut self.macros, rng, &self.limits)
    }
}

/// Parses and rolls `source` once in a fresh session.
pub fn roll(source: &str, rng: &mut dyn RandomSource) -> Result<RollResult> {
    Session::new().roll(source, rng)
}

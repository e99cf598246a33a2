//! Dice pools and the operations applied to them before any arithmetic.
//!
//! A [`Pool`] keeps one [`RollRecord`] per die for its whole life. Operations
//! only append to a record's history or change its status; records are never
//! removed or reordered.

use std::collections::HashSet;
use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result, Span};
use crate::grammar::{
    expand_special, Comparator, Condition, End, ExplodeMode, FaceItem, Faces, Selection,
    Threshold, MAX_SYMBOL_LEN,
};
use crate::rng::RandomSource;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceValue {
    Numeric(i64),
    Symbolic(String),
}

impl fmt::Display for FaceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceValue::Numeric(n) => write!(f, "{n}"),
            FaceValue::Symbolic(s) => f.write_str(s),
        }
    }
}

/// Contiguous run of numeric faces `start, start+1, ..`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Run {
    start: i64,
    len: u64,
}

/// Numeric faces stored as runs so `d1000000000` costs nothing to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericFaces {
    runs: Vec<Run>,
    /// `offsets[i]` is the index of the first face of `runs[i]`.
    offsets: Vec<u64>,
    total: u64,
    max: i64,
}

/// Resolved, ordered faces of a die. Duplicated faces are distinct sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceSet {
    Numeric(NumericFaces),
    Symbolic(Vec<String>),
}

impl FaceSet {
    pub fn standard(sides: u64) -> Self {
        assert!(sides >= 1 && sides <= i64::MAX as u64);
        FaceSet::Numeric(NumericFaces {
            runs: vec![Run { start: 1, len: sides }],
            offsets: vec![0],
            total: sides,
            max: sides as i64,
        })
    }

    pub fn symbolic(symbols: Vec<String>) -> Self {
        assert!(!symbols.is_empty());
        FaceSet::Symbolic(symbols)
    }

    /// Resolves parsed faces, expanding shorthands and ranges. `span` is
    /// attached to any error.
    pub fn from_faces(faces: &Faces, span: Span) -> Result<Self> {
        match expand_special(faces) {
            Faces::Standard(n) if n < 0 => Err(Error::NegativeSides { span }),
            Faces::Standard(0) => Err(Error::ZeroSides { span }),
            Faces::Standard(n) => Ok(FaceSet::standard(n as u64)),
            Faces::Numeric(items) => {
                let mut runs = Vec::with_capacity(items.len());
                let mut offsets = Vec::with_capacity(items.len());
                let mut total: u64 = 0;
                let mut max = i64::MIN;
                for item in items {
                    let (start, end) = match item {
                        FaceItem::Single(n) => (n, n),
                        FaceItem::Range(lo, hi) if lo > hi => {
                            return Err(Error::EmptyRange {
                                span,
                                start: lo,
                                end: hi,
                            })
                        }
                        FaceItem::Range(lo, hi) => (lo, hi),
                    };
                    let len = u64::try_from(end as i128 - start as i128 + 1)
                        .map_err(|_| Error::TooManyFaces { span })?;
                    offsets.push(total);
                    total = total
                        .checked_add(len)
                        .ok_or(Error::TooManyFaces { span })?;
                    max = max.max(end);
                    runs.push(Run { start, len });
                }
                if runs.is_empty() {
                    return Err(Error::Parse {
                        span,
                        expected: "a face".into(),
                        found: "empty face list".into(),
                    });
                }
                Ok(FaceSet::Numeric(NumericFaces {
                    runs,
                    offsets,
                    total,
                    max,
                }))
            }
            Faces::Symbolic(symbols) => {
                if let Some(s) = symbols.iter().find(|s| s.chars().count() > MAX_SYMBOL_LEN) {
                    return Err(Error::SymbolTooLong {
                        span,
                        len: s.chars().count(),
                    });
                }
                if symbols.is_empty() || symbols.iter().any(|s| s.is_empty()) {
                    return Err(Error::Parse {
                        span,
                        expected: "a non-empty symbol".into(),
                        found: "empty face".into(),
                    });
                }
                Ok(FaceSet::Symbolic(symbols))
            }
            Faces::Percent | Faces::Coin | Faces::Fate => unreachable!("expanded above"),
        }
    }

    /// Number of sides.
    pub fn len(&self) -> u64 {
        match self {
            FaceSet::Numeric(f) => f.total,
            FaceSet::Symbolic(s) => s.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, FaceSet::Numeric(_))
    }

    /// Largest numeric face; `None` for symbolic dice.
    pub fn max(&self) -> Option<i64> {
        match self {
            FaceSet::Numeric(f) => Some(f.max),
            FaceSet::Symbolic(_) => None,
        }
    }

    pub fn numeric(&self, index: u64) -> Option<i64> {
        let FaceSet::Numeric(NumericFaces { runs, offsets, .. }) = self else {
            return None;
        };
        let run = offsets.partition_point(|&o| o <= index) - 1;
        let within = index - offsets[run];
        debug_assert!(within < runs[run].len);
        Some((runs[run].start as i128 + within as i128) as i64)
    }

    pub fn symbol(&self, index: u64) -> Option<&str> {
        match self {
            FaceSet::Symbolic(s) => s.get(index as usize).map(String::as_str),
            FaceSet::Numeric(_) => None,
        }
    }

    pub fn value(&self, index: u64) -> FaceValue {
        match self {
            FaceSet::Numeric(_) => FaceValue::Numeric(self.numeric(index).expect("index in range")),
            FaceSet::Symbolic(s) => FaceValue::Symbolic(s[index as usize].clone()),
        }
    }

    /// Every face in side order.
    pub fn values(&self) -> impl Iterator<Item = FaceValue> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiceSpec {
    pub count: u64,
    pub faces: FaceSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Kept,
    Dropped,
    FilteredOut,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Kept => "kept",
            Status::Dropped => "dropped",
            Status::FilteredOut => "filtered_out",
        }
    }
}

/// Audit trail for one die.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RollRecord {
    pub die_index: usize,
    /// Face indices: the initial roll, then every reroll or explosion.
    pub history: SmallVec<[u64; 2]>,
    pub status: Status,
    /// Current numeric value, including explosion accumulation. Zero for
    /// symbolic dice.
    pub contribution: i64,
    /// Set when a reroll or explosion chain was cut short by the chain limit.
    pub limit_hit: bool,
}

impl RollRecord {
    pub fn is_active(&self) -> bool {
        self.status == Status::Kept
    }

    fn steps(&self) -> u64 {
        self.history.len() as u64 - 1
    }

    fn last(&self) -> u64 {
        *self.history.last().expect("history is never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    pub records: Vec<RollRecord>,
    pub faces: FaceSet,
    /// A negative dice count negates the pool's total once collapsed.
    pub negated: bool,
}

impl Pool {
    /// Rolls `spec.count` dice, one draw each.
    pub fn roll(spec: DiceSpec, rng: &mut dyn RandomSource, limits: &Limits) -> Result<Pool> {
        if spec.count > limits.max_pool {
            return Err(Error::PoolTooLarge {
                requested: spec.count.min(i64::MAX as u64) as i64,
                max: limits.max_pool,
            });
        }
        let n = spec.faces.len();
        let mut records = Vec::with_capacity(spec.count.min(limits.max_draws) as usize);
        for die_index in 0..spec.count as usize {
            let index = rng.next_index(n)?;
            records.push(RollRecord {
                die_index,
                history: smallvec![index],
                status: Status::Kept,
                contribution: spec.faces.numeric(index).unwrap_or(0),
                limit_hit: false,
            });
        }
        Ok(Pool {
            records,
            faces: spec.faces,
            negated: false,
        })
    }

    pub fn active(&self) -> impl Iterator<Item = &RollRecord> {
        self.records.iter().filter(|r| r.is_active())
    }

    /// Values of the kept dice, in roll order.
    pub fn active_values(&self) -> Vec<FaceValue> {
        self.active().map(|r| self.current(r)).collect()
    }

    /// Value a record currently shows: the accumulated number for numeric
    /// dice, the last face for symbolic dice.
    pub fn current(&self, record: &RollRecord) -> FaceValue {
        match &self.faces {
            FaceSet::Numeric(_) => FaceValue::Numeric(record.contribution),
            FaceSet::Symbolic(_) => self.faces.value(record.last()),
        }
    }

    pub fn count_active(&self) -> usize {
        self.active().count()
    }

    /// Keeps or drops the `amount` highest or lowest kept dice. Ties go to
    /// the earlier roll. Keeping at least as many dice as remain has no
    /// effect; dropping at least as many drops all of them.
    pub fn keep_drop(&mut self, which: Selection, end: End, amount: u64) -> Result<()> {
        if !self.faces.is_numeric() {
            return Err(Error::SymbolicOrdering { op: "keep/drop" });
        }
        let mut active: Vec<usize> = (0..self.records.len())
            .filter(|&i| self.records[i].is_active())
            .collect();
        // stable: equal values stay in roll order
        match end {
            End::High => active.sort_by(|&a, &b| {
                self.records[b].contribution.cmp(&self.records[a].contribution)
            }),
            End::Low => active.sort_by_key(|&i| self.records[i].contribution),
        }
        let cut = amount.min(active.len() as u64) as usize;
        let (selected, rest) = active.split_at(cut);
        let dropped = match which {
            Selection::Keep => rest,
            Selection::Drop => selected,
        };
        for &i in dropped {
            self.records[i].status = Status::Dropped;
        }
        Ok(())
    }

    /// Marks kept dice that fail `condition` as filtered out.
    pub fn filter(&mut self, condition: &Condition) -> Result<()> {
        let test = self.matcher(condition)?;
        for i in 0..self.records.len() {
            if self.records[i].is_active() && !test.test(&self.faces, &self.records[i]) {
                self.records[i].status = Status::FilteredOut;
            }
        }
        Ok(())
    }

    /// Rerolls kept dice that satisfy `condition`. A single reroll keeps the
    /// new face unconditionally; a repeated reroll continues until the
    /// condition no longer holds or the chain limit is reached.
    pub fn reroll(
        &mut self,
        condition: &Condition,
        repeated: bool,
        rng: &mut dyn RandomSource,
        limit: u32,
    ) -> Result<()> {
        let test = self.matcher(condition)?;
        let n = self.faces.len();
        for i in 0..self.records.len() {
            if !self.records[i].is_active() {
                continue;
            }
            let mut first = true;
            while test.test(&self.faces, &self.records[i]) && (first || repeated) {
                first = false;
                if self.records[i].steps() >= u64::from(limit) {
                    self.records[i].limit_hit = true;
                    break;
                }
                let index = rng.next_index(n)?;
                let value = self.faces.numeric(index).unwrap_or(0);
                let record = &mut self.records[i];
                record.history.push(index);
                record.contribution = value;
            }
        }
        Ok(())
    }

    /// Adds further rolls to kept dice that show their highest face.
    pub fn explode(
        &mut self,
        mode: ExplodeMode,
        rng: &mut dyn RandomSource,
        limit: u32,
    ) -> Result<()> {
        let Some(max) = self.faces.max() else {
            return Err(Error::SymbolicOrdering { op: "explode" });
        };
        let n = self.faces.len();
        let limit = u64::from(limit);
        for i in 0..self.records.len() {
            let record = &self.records[i];
            if !record.is_active() || self.faces.numeric(record.last()) != Some(max) {
                continue;
            }
            // explosions so far in this chain
            let mut chained: i64 = 0;
            loop {
                let penalty = match mode {
                    ExplodeMode::Penetrating => chained,
                    _ => 0,
                };
                if mode == ExplodeMode::Once && chained == 1 {
                    break;
                }
                if mode == ExplodeMode::Penetrating && max.saturating_sub(penalty) <= 0 {
                    break;
                }
                if self.records[i].steps() >= limit {
                    self.records[i].limit_hit = true;
                    break;
                }
                let index = rng.next_index(n)?;
                let value = self.faces.numeric(index).expect("numeric faces");
                let hit_max = value == max;
                // a non-max roll ends the chain and is added as rolled
                let added = if hit_max { value - penalty } else { value };
                let record = &mut self.records[i];
                record.history.push(index);
                record.contribution = record
                    .contribution
                    .checked_add(added)
                    .ok_or(Error::ArithmeticOverflow)?;
                chained += 1;
                if !hit_max {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Filters out every kept die whose value already appeared earlier.
    pub fn unique(&mut self) {
        let mut seen = HashSet::new();
        for i in 0..self.records.len() {
            if !self.records[i].is_active() {
                continue;
            }
            if !seen.insert(self.current(&self.records[i])) {
                self.records[i].status = Status::FilteredOut;
            }
        }
    }

    /// Checks `condition` suits the faces.
    fn matcher<'c>(&self, condition: &'c Condition) -> Result<Matcher<'c>> {
        let cmp = condition.comparator;
        match (&self.faces, &condition.threshold) {
            (FaceSet::Numeric(_), Threshold::Int(t)) => Ok(Matcher::Numeric(cmp, *t)),
            (FaceSet::Numeric(_), Threshold::Symbol(s)) => Err(Error::Type(format!(
                "cannot compare numeric dice with symbol {s:?}"
            ))),
            (FaceSet::Symbolic(_), Threshold::Symbol(s)) if cmp.is_equality() => {
                Ok(Matcher::Symbol(cmp, s))
            }
            (FaceSet::Symbolic(_), Threshold::Symbol(_)) => {
                Err(Error::SymbolicOrdering { op: cmp.as_str() })
            }
            (FaceSet::Symbolic(_), Threshold::Int(n)) => Err(Error::Type(format!(
                "cannot compare symbolic dice with number {n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Matcher<'c> {
    Numeric(Comparator, i64),
    Symbol(Comparator, &'c str),
}

impl Matcher<'_> {
    fn test(&self, faces: &FaceSet, record: &RollRecord) -> bool {
        match *self {
            Matcher::Numeric(cmp, t) => cmp.holds(&record.contribution, &t),
            Matcher::Symbol(cmp, t) => {
                cmp.holds(faces.symbol(record.last()).unwrap_or_default(), t)
            }
        }
    }
}

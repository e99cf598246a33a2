//! Bottom-up resolution of a parsed roll.
//!
//! Dice are rolled first, then their dice operations run, then the pool is
//! collapsed to a single group and handed to arithmetic. Statements resolve
//! left to right; macro definitions update the table and produce no output.

mod macros;
mod value;

use std::fmt;

pub use macros::{MacroTable, BUILTIN_MACROS};
pub use value::{binary_math, div_ceil, div_floor, negate, Value, ValueVector};

use crate::dice::{DiceSpec, FaceSet, Pool};
use crate::error::{Error, Result, Span};
use crate::grammar::{DiceOp, Expr, RollExpression, Statement};
use crate::rng::RandomSource;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A reroll or explosion chain hit the chain limit.
    ChainLimit { pool: usize, die: usize, limit: u32 },
    MacroRedefined { name: String },
    /// Note carried over from lenient parsing.
    Parse(String),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ChainLimit { pool, die, limit } => {
                write!(f, "pool {pool} die {die}: chain stopped at the limit of {limit}")
            }
            Warning::MacroRedefined { name } => write!(f, "macro @{name} redefined"),
            Warning::Parse(note) => f.write_str(note),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RollResult {
    pub values: ValueVector,
    /// Every pool rolled, in the order it was collapsed.
    pub pools: Vec<Pool>,
    pub warnings: Vec<Warning>,
}

/// Resolves `expr` against `macros`, drawing from `rng`.
pub fn evaluate(
    expr: &RollExpression,
    macros: &mut MacroTable,
    rng: &mut dyn RandomSource,
    limits: &Limits,
) -> Result<RollResult> {
    let mut budget = Budget {
        inner: rng,
        left: limits.max_draws,
        max: limits.max_draws,
    };
    let mut ev = Evaluator {
        macros,
        rng: &mut budget,
        limits,
        pools: Vec::new(),
        warnings: expr.notes.iter().cloned().map(Warning::Parse).collect(),
        depth: 0,
    };
    let mut values = Vec::new();
    for statement in &expr.statements {
        match statement {
            Statement::MacroDefinition { name, body } => {
                if ev.macros.define(name.clone(), body.clone()) {
                    ev.warnings.push(Warning::MacroRedefined { name: name.clone() });
                }
            }
            Statement::Expr(e) => values.extend(ev.value(e)?.0),
        }
    }
    Ok(RollResult {
        values: ValueVector(values),
        pools: ev.pools,
        warnings: ev.warnings,
    })
}

/// Fails once an evaluation has drawn `max` times.
struct Budget<'a> {
    inner: &'a mut dyn RandomSource,
    left: u64,
    max: u64,
}

impl RandomSource for Budget<'_> {
    fn next_index(&mut self, n: u64) -> Result<u64> {
        if self.left == 0 {
            return Err(Error::DrawLimit { max: self.max });
        }
        self.left -= 1;
        self.inner.next_index(n)
    }
}

struct Evaluator<'a> {
    macros: &'a mut MacroTable,
    rng: &'a mut dyn RandomSource,
    limits: &'a Limits,
    pools: Vec<Pool>,
    warnings: Vec<Warning>,
    depth: u32,
}

impl Evaluator<'_> {
    fn value(&mut self, expr: &Expr) -> Result<ValueVector> {
        match expr {
            Expr::Int(n) => Ok(ValueVector::scalar(*n)),
            Expr::Dice { .. } | Expr::DiceOp { .. } => {
                if let Expr::DiceOp {
                    child,
                    op: DiceOp::Count,
                } = expr
                {
                    let pool = self.pool(child)?;
                    let mut n = pool.count_active() as i64;
                    if pool.negated {
                        n = -n;
                    }
                    self.finish(pool);
                    return Ok(ValueVector::scalar(n));
                }
                let pool = self.pool(expr)?;
                let value = collapse(&pool)?;
                self.finish(pool);
                Ok(ValueVector(vec![value]))
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.value(lhs)?;
                let r = self.value(rhs)?;
                binary_math(*op, &l, &r)
            }
            Expr::Negate(inner) => negate(&self.value(inner)?),
            Expr::MacroAccess(name) => {
                let body = self.macros.get(name).ok_or_else(|| Error::UndefinedMacro {
                    name: name.clone(),
                })?;
                if self.depth >= self.limits.macro_depth {
                    return Err(Error::MacroDepthExceeded {
                        name: name.clone(),
                        limit: self.limits.macro_depth,
                    });
                }
                self.depth += 1;
                let out = self.value(&body);
                self.depth -= 1;
                out
            }
            Expr::Group(items) => {
                let mut out = Vec::new();
                for item in items {
                    out.extend(self.value(item)?.0);
                }
                Ok(ValueVector(out))
            }
        }
    }

    /// Rolls a dice term and runs its dice operations, leaving it uncollapsed.
    fn pool(&mut self, expr: &Expr) -> Result<Pool> {
        match expr {
            Expr::Dice { count, faces } => {
                let count = match count {
                    None => 1,
                    Some(c) => self.scalar(c)?,
                };
                let faces = FaceSet::from_faces(faces, Span::default())?;
                let spec = DiceSpec {
                    count: count.unsigned_abs(),
                    faces,
                };
                let mut pool = Pool::roll(spec, self.rng, self.limits)?;
                pool.negated = count < 0;
                Ok(pool)
            }
            Expr::DiceOp { child, op } => {
                let mut pool = self.pool(child)?;
                let chain = self.limits.chain;
                match op {
                    DiceOp::KeepDrop { which, end, amount } => {
                        pool.keep_drop(*which, *end, *amount)?
                    }
                    DiceOp::Filter(c) => pool.filter(c)?,
                    DiceOp::Reroll {
                        condition,
                        repeated,
                    } => pool.reroll(condition, *repeated, self.rng, chain)?,
                    DiceOp::Explode(mode) => pool.explode(*mode, self.rng, chain)?,
                    DiceOp::Unique => pool.unique(),
                    DiceOp::Count => {
                        return Err(Error::Type("a count cannot be used as a dice pool".into()))
                    }
                }
                Ok(pool)
            }
            _ => Err(Error::Type("dice operations need a dice term".into())),
        }
    }

    /// A single number, e.g. a dice count.
    fn scalar(&mut self, expr: &Expr) -> Result<i64> {
        match self.value(expr)?.0.as_slice() {
            [Value::Numeric(n)] => Ok(*n),
            _ => Err(Error::Type("dice count must be a single number".into())),
        }
    }

    fn finish(&mut self, pool: Pool) {
        let index = self.pools.len();
        for r in pool.records.iter().filter(|r| r.limit_hit) {
            self.warnings.push(Warning::ChainLimit {
                pool: index,
                die: r.die_index,
                limit: self.limits.chain,
            });
        }
        self.pools.push(pool);
    }
}

/// Reduces a pool to one group: the sum of kept dice, or the kept symbols.
pub fn collapse(pool: &Pool) -> Result<Value> {
    match pool.faces {
        FaceSet::Numeric(_) => {
            let sum = pool
                .active()
                .try_fold(0i64, |acc, r| acc.checked_add(r.contribution))
                .ok_or(Error::ArithmeticOverflow)?;
            let sum = if pool.negated {
                sum.checked_neg().ok_or(Error::ArithmeticOverflow)?
            } else {
                sum
            };
            Ok(Value::Numeric(sum))
        }
        FaceSet::Symbolic(_) => {
            if pool.negated {
                return Err(Error::Type("symbolic dice cannot be negated".into()));
            }
            Ok(Value::Symbols(
                pool.active()
                    .map(|r| {
                        pool.faces
                            .symbol(*r.history.last().expect("non-empty"))
                            .expect("symbolic")
                            .to_string()
                    })
                    .collect(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dice::Status;
    use crate::rng::{ScriptedSource, SeededSource};
    use crate::Session;

    fn roll(src: &str, rolls: &[u64]) -> Result<RollResult> {
        Session::new().roll(src, &mut ScriptedSource::from_rolls(rolls.iter().copied()))
    }

    fn text(src: &str, rolls: &[u64]) -> String {
        roll(src, rolls).unwrap().values.to_string()
    }

    #[test]
    fn layering_is_visible_in_the_records() {
        let r = roll("2d20kh+2", &[4, 13]).unwrap();
        assert_eq!(r.values, ValueVector::scalar(15));
        let pool = &r.pools[0];
        assert_eq!(pool.records[0].status, Status::Dropped);
        assert_eq!(pool.records[0].contribution, 4);
        assert_eq!(pool.records[1].status, Status::Kept);
        assert_eq!(pool.records[1].contribution, 13);
    }

    #[test]
    fn dice_and_groups() {
        assert_eq!(text("d6", &[3]), "3");
        assert_eq!(text("-1d6", &[5]), "-5");
        assert_eq!(text("2d6", &[2, 6]), "8");
        assert_eq!(text("d6;d6", &[2, 6]), "2,6");
        assert_eq!(text("(d6;d6)-3", &[3, 6]), "0,6");
        assert_eq!(text("(d6;d6)*(d6;d6)", &[3, 6, 2, 4]), "6,24");
        assert_eq!(text("3/2", &[]), "1");
        assert_eq!(text("3\\2", &[]), "2");
        assert_eq!(text("0d6", &[]), "0");
    }

    #[test]
    fn runtime_negative_count_negates_the_pool() {
        assert_eq!(text("(0-2)d6", &[1, 4]), "-5");
        assert_eq!(text("(1+1)d6", &[1, 4]), "5");
    }

    #[test]
    fn dice_operation_examples() {
        assert_eq!(text("2d6kh", &[3, 6]), "6");
        assert_eq!(text("2d6kl", &[3, 6]), "3");
        assert_eq!(text("2d6dh", &[3, 6]), "3");
        assert_eq!(text("2d6dl", &[3, 6]), "6");
        assert_eq!(text("2d6kh3", &[2, 3]), "5");
        assert_eq!(text("3d6dldh", &[3, 6, 4]), "4");
        assert_eq!(text("4d6f<3", &[4, 1, 2, 5]), "3");
        assert_eq!(text("1d6rr<2", &[1, 1, 1, 4]), "4");
        assert_eq!(text("1d6r<2", &[1, 1]), "1");
        assert_eq!(text("1d6!", &[6, 6, 4]), "16");
        assert_eq!(text("1d6!o", &[6, 6]), "12");
        assert_eq!(text("1d6!p", &[6, 6, 6, 2]), "19");
        assert_eq!(text("4d6f!=2c", &[4, 1, 2, 5]), "3");
        assert_eq!(text("4d6f>2c", &[4, 1, 2, 5]), "2");
        assert_eq!(text("4d6uc", &[4, 1, 2, 5]), "4");
        assert_eq!(text("-4d6uc", &[4, 1, 2, 5]), "-4");
    }

    #[test]
    fn symbolic_results() {
        let mut s = Session::empty();
        let r = s
            .roll(
                "#SUITS = d{CLUBS,HEARTS,DIAMONDS,SPADES};@SUITS",
                &mut ScriptedSource::new(vec![0]),
            )
            .unwrap();
        assert_eq!(r.values.to_string(), "CLUBS");
        assert!(r.warnings.is_empty());

        let r = s.roll("2df", &mut ScriptedSource::new(vec![0, 5])).unwrap();
        assert_eq!(r.values.to_string(), "[- +]");
        assert!(matches!(
            s.roll("df+1", &mut ScriptedSource::new(vec![0])),
            Err(Error::Type(_))
        ));
        assert!(matches!(
            s.roll("-dc", &mut ScriptedSource::new(vec![0])),
            Err(Error::Type(_))
        ));
    }

    #[test]
    fn macros_reroll_on_each_access() {
        let mut s = Session::empty();
        s.roll("#SUITS = d{CLUBS,HEARTS,DIAMONDS,SPADES}", &mut ScriptedSource::new(vec![]))
            .unwrap();
        let r = s.roll("@SUITS;@SUITS", &mut ScriptedSource::new(vec![1, 3])).unwrap();
        assert_eq!(r.values.to_string(), "HEARTS,SPADES");
        assert_eq!(r.pools.len(), 2);
    }

    #[test]
    fn redefinition_warns_and_replaces() {
        let mut s = Session::empty();
        let r = s
            .roll("#X = 1;#X = 2;@X", &mut ScriptedSource::new(vec![]))
            .unwrap();
        assert_eq!(r.values.to_string(), "2");
        assert_eq!(r.warnings, [Warning::MacroRedefined { name: "X".into() }]);
    }

    #[test]
    fn builtin_d66() {
        assert_eq!(text("@D66", &[3, 1]), "31");
    }

    #[test]
    fn macro_errors() {
        let mut s = Session::empty();
        assert!(matches!(
            s.roll("@NOPE", &mut ScriptedSource::new(vec![])),
            Err(Error::UndefinedMacro { name }) if name == "NOPE"
        ));
        assert!(matches!(
            s.roll("#LOOP = @LOOP + 1;@LOOP", &mut ScriptedSource::new(vec![])),
            Err(Error::MacroDepthExceeded { limit: 16, .. })
        ));
        let r = s.roll("#A = 2;#B = @A*@A;@B+1", &mut ScriptedSource::new(vec![])).unwrap();
        assert_eq!(r.values.to_string(), "5");
    }

    #[test]
    fn arithmetic_errors() {
        assert_eq!(roll("1/0", &[]).unwrap_err(), Error::DivisionByZero);
        assert_eq!(
            roll("9223372036854775807+1", &[]).unwrap_err(),
            Error::ArithmeticOverflow
        );
    }

    #[test]
    fn chain_limit_is_reported() {
        let limits = crate::Limits::default().with_chain(3);
        let mut s = Session::empty().with_limits(limits);
        let r = s.roll("1d1!", &mut ScriptedSource::new(vec![0; 10])).unwrap();
        assert_eq!(r.values.to_string(), "4");
        assert_eq!(
            r.warnings,
            [Warning::ChainLimit {
                pool: 0,
                die: 0,
                limit: 3
            }]
        );
    }

    #[test]
    fn draw_budget_covers_the_whole_roll() {
        let limits = crate::Limits {
            max_draws: 5,
            ..Default::default()
        };
        let mut s = Session::empty().with_limits(limits);
        let mut rng = SeededSource::new(1);
        assert!(s.roll("5d6", &mut rng).is_ok());
        assert_eq!(s.roll("3d6;3d6", &mut rng).unwrap_err(), Error::DrawLimit { max: 5 });
        assert_eq!(s.roll("1d1!", &mut rng).unwrap_err(), Error::DrawLimit { max: 5 });
        assert!(Error::DrawLimit { max: 5 }.is_limit());
    }

    #[test]
    fn referentially_transparent_under_a_seed() {
        let src = "4d6dl;3d8!;d20rr<3;#A = 2d10kh;@A+@A";
        let a = Session::new().roll(src, &mut SeededSource::new(9)).unwrap();
        let b = Session::new().roll(src, &mut SeededSource::new(9)).unwrap();
        assert_eq!(a, b);
    }
}

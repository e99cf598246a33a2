use std::fmt;

/// A parsed roll: `;`-separated statements, resolved left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RollExpression {
    pub statements: Vec<Statement>,
    /// Notes produced by lenient parsing (e.g. sides that were defaulted).
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    MacroDefinition { name: String, body: Expr },
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Dice {
        /// `None` means a single die (`d6`).
        count: Option<Box<Expr>>,
        faces: Faces,
    },
    DiceOp {
        child: Box<Expr>,
        op: DiceOp,
    },
    Binary {
        op: MathOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Negate(Box<Expr>),
    MacroAccess(String),
    /// Parenthesised, possibly `;`-separated, list of expressions.
    Group(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Faces {
    Standard(i64),
    Numeric(Vec<FaceItem>),
    Symbolic(Vec<String>),
    Percent,
    Coin,
    Fate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceItem {
    Single(i64),
    /// Inclusive range, `lo <= hi`.
    Range(i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Keep,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplodeMode {
    Plain,
    Once,
    Penetrating,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiceOp {
    KeepDrop {
        which: Selection,
        end: End,
        amount: u64,
    },
    Filter(Condition),
    Reroll {
        condition: Condition,
        repeated: bool,
    },
    Explode(ExplodeMode),
    Count,
    Unique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Comparator {
    pub fn holds<T: Ord + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Comparator::Eq => lhs == rhs,
            Comparator::Ne => lhs != rhs,
            Comparator::Lt => lhs < rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Ge => lhs >= rhs,
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, Comparator::Eq | Comparator::Ne)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Threshold {
    Int(i64),
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub comparator: Comparator,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MathOp {
    Add,
    Sub,
    Mul,
    /// `/`, quotient rounded toward negative infinity.
    DivFloor,
    /// `\`, quotient rounded toward positive infinity.
    DivCeil,
}

impl MathOp {
    pub fn as_str(self) -> &'static str {
        match self {
            MathOp::Add => "+",
            MathOp::Sub => "-",
            MathOp::Mul => "*",
            MathOp::DivFloor => "/",
            MathOp::DivCeil => "\\",
        }
    }

    /// Value substituted for a missing element when operand lengths differ.
    pub fn identity(self) -> i64 {
        match self {
            MathOp::Add | MathOp::Sub => 0,
            MathOp::Mul | MathOp::DivFloor | MathOp::DivCeil => 1,
        }
    }
}

// Printing emits canonical notation that parses back to the same tree:
// parentheses only appear where the tree holds a `Group`, so binary
// operands never need extra grouping.

impl fmt::Display for RollExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.statements.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            match s {
                Statement::MacroDefinition { name, body } => write!(f, "#{name} = {body}")?,
                Statement::Expr(e) => write!(f, "{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Dice { count, faces } => {
                if let Some(count) = count {
                    write!(f, "{count}")?;
                }
                write!(f, "d{faces}")
            }
            Expr::DiceOp { child, op } => write!(f, "{child}{op}"),
            Expr::Binary { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.as_str()),
            Expr::Negate(e) => write!(f, "-{e}"),
            Expr::MacroAccess(name) => write!(f, "@{name}"),
            Expr::Group(items) => {
                f.write_str("(")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Faces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Faces::Standard(n) => write!(f, "{n}"),
            Faces::Percent => f.write_str("%"),
            Faces::Coin => f.write_str("c"),
            Faces::Fate => f.write_str("f"),
            Faces::Numeric(items) => {
                f.write_str("{")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match item {
                        FaceItem::Single(n) => write!(f, "{n}")?,
                        FaceItem::Range(lo, hi) => write!(f, "{lo}..{hi}")?,
                    }
                }
                f.write_str("}")
            }
            Faces::Symbolic(items) => {
                f.write_str("{")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_symbol(f, s)?;
                }
                f.write_str("}")
            }
        }
    }
}

fn write_symbol(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    let bare = !s.is_empty()
        && s.trim() == s
        && !s.starts_with(['\'', '"'])
        && !s.contains([',', '}'])
        && !s.contains("..")
        && s.parse::<i64>().is_err();
    if bare {
        f.write_str(s)
    } else if s.contains('\'') {
        write!(f, "\"{s}\"")
    } else {
        write!(f, "'{s}'")
    }
}

impl fmt::Display for DiceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiceOp::KeepDrop { which, end, amount } => {
                let w = match which {
                    Selection::Keep => "k",
                    Selection::Drop => "d",
                };
                let e = match end {
                    End::High => "h",
                    End::Low => "l",
                };
                write!(f, "{w}{e}{amount}")
            }
            DiceOp::Filter(c) => write!(f, "f{c}"),
            DiceOp::Reroll {
                condition,
                repeated,
            } => write!(f, "{}{condition}", if *repeated { "rr" } else { "r" }),
            DiceOp::Explode(ExplodeMode::Plain) => f.write_str("!"),
            DiceOp::Explode(ExplodeMode::Once) => f.write_str("!o"),
            DiceOp::Explode(ExplodeMode::Penetrating) => f.write_str("!p"),
            DiceOp::Count => f.write_str("c"),
            DiceOp::Unique => f.write_str("u"),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.comparator.as_str())?;
        match &self.threshold {
            Threshold::Int(n) => write!(f, "{n}"),
            Threshold::Symbol(s) if s.contains('\'') => write!(f, "\"{s}\""),
            Threshold::Symbol(s) => write!(f, "'{s}'"),
        }
    }
}

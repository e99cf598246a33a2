use std::fmt;

use crate::error::{Error, Result};
use crate::grammar::MathOp;

/// One group of a result: a number, or the faces shown by a symbolic pool.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Numeric(i64),
    Symbols(Vec<String>),
}

impl Value {
    pub fn as_numeric(&self) -> Option<i64> {
        match self {
            Value::Numeric(n) => Some(*n),
            Value::Symbols(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Numeric(n) => write!(f, "{n}"),
            Value::Symbols(s) if s.len() == 1 => f.write_str(&s[0]),
            Value::Symbols(s) => write!(f, "[{}]", s.join(" ")),
        }
    }
}

/// Ordered groups; `;` concatenates them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ValueVector(pub Vec<Value>);

impl ValueVector {
    pub fn scalar(n: i64) -> Self {
        ValueVector(vec![Value::Numeric(n)])
    }

    pub fn numbers(values: impl IntoIterator<Item = i64>) -> Self {
        ValueVector(values.into_iter().map(Value::Numeric).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.0.iter()
    }

    /// All groups as numbers, or `None` if any group is symbolic.
    pub fn as_numbers(&self) -> Option<Vec<i64>> {
        self.0.iter().map(Value::as_numeric).collect()
    }

    fn numeric(&self, context: &str) -> Result<Vec<i64>> {
        self.as_numbers()
            .ok_or_else(|| Error::Type(format!("{context} needs numeric values")))
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Applies `op` group by group. When lengths differ, the shorter side is
/// padded with the operator's identity (0 for `+ -`, 1 for `* / \`).
pub fn binary_math(op: MathOp, lhs: &ValueVector, rhs: &ValueVector) -> Result<ValueVector> {
    let context = format!("'{}'", op.as_str());
    let a = lhs.numeric(&context)?;
    let b = rhs.numeric(&context)?;
    let pad = op.identity();
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(pad);
        let y = b.get(i).copied().unwrap_or(pad);
        out.push(apply(op, x, y)?);
    }
    Ok(ValueVector::numbers(out))
}

fn apply(op: MathOp, x: i64, y: i64) -> Result<i64> {
    let r = match op {
        MathOp::Add => x.checked_add(y),
        MathOp::Sub => x.checked_sub(y),
        MathOp::Mul => x.checked_mul(y),
        MathOp::DivFloor => return div_floor(x, y),
        MathOp::DivCeil => return div_ceil(x, y),
    };
    r.ok_or(Error::ArithmeticOverflow)
}

/// Quotient rounded toward negative infinity.
pub fn div_floor(x: i64, y: i64) -> Result<i64> {
    if y == 0 {
        return Err(Error::DivisionByZero);
    }
    let q = x.checked_div(y).ok_or(Error::ArithmeticOverflow)?;
    let r = x % y;
    Ok(if r != 0 && ((r < 0) != (y < 0)) { q - 1 } else { q })
}

/// Quotient rounded toward positive infinity.
pub fn div_ceil(x: i64, y: i64) -> Result<i64> {
    if y == 0 {
        return Err(Error::DivisionByZero);
    }
    let q = x.checked_div(y).ok_or(Error::ArithmeticOverflow)?;
    let r = x % y;
    Ok(if r != 0 && ((r < 0) == (y < 0)) { q + 1 } else { q })
}

pub fn negate(v: &ValueVector) -> Result<ValueVector> {
    v.numeric("negation")?
        .into_iter()
        .map(|n| n.checked_neg().ok_or(Error::ArithmeticOverflow))
        .collect::<Result<Vec<_>>>()
        .map(ValueVector::numbers)
}

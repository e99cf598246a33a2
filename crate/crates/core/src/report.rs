//! Structured (JSON) rendering of results and errors, shared by the CLI and
//! the C interface so both emit identical documents.

use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::dice::FaceValue;
use crate::error::{Error, Span};
use crate::eval::{RollResult, Value};

/// JSON Schema for [`RollReport`] documents.
pub const SCHEMA: &str = include_str!("../schema/roll-result.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollReport {
    pub groups: Vec<Json>,
    pub records: Vec<RecordReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordReport {
    pub pool: usize,
    pub die: usize,
    pub history: Vec<Json>,
    pub status: &'static str,
    /// Final numeric value of the die (after rerolls and explosions);
    /// `null` for symbolic dice.
    pub value: Option<i64>,
    pub limit_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub code: &'static str,
    pub message: String,
    pub span: Option<Span>,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        ErrorReport {
            code: e.code(),
            message: e.to_string(),
            span: e.span(),
        }
    }
}

fn face_json(v: FaceValue) -> Json {
    match v {
        FaceValue::Numeric(n) => json!(n),
        FaceValue::Symbolic(s) => json!(s),
    }
}

pub fn group_json(v: &Value) -> Json {
    match v {
        Value::Numeric(n) => json!(n),
        Value::Symbols(s) => json!(s),
    }
}

impl From<&RollResult> for RollReport {
    fn from(result: &RollResult) -> Self {
        let mut records = Vec::new();
        for (pool_index, pool) in result.pools.iter().enumerate() {
            for r in &pool.records {
                records.push(RecordReport {
                    pool: pool_index,
                    die: r.die_index,
                    history: r
                        .history
                        .iter()
                        .map(|&i| face_json(pool.faces.value(i)))
                        .collect(),
                    status: r.status.as_str(),
                    value: pool.faces.is_numeric().then_some(r.contribution),
                    limit_hit: r.limit_hit,
                });
            }
        }
        RollReport {
            groups: result.values.iter().map(group_json).collect(),
            records,
            warnings: result.warnings.iter().map(|w| w.to_string()).collect(),
        }
    }
}

pub fn result_json(result: &RollResult) -> Json {
    serde_json::to_value(RollReport::from(result)).expect("report serializes")
}

/// `{"error": {"code": .., "message": .., "span": ..}}`
pub fn error_json(error: &Error) -> Json {
    json!({ "error": ErrorReport::from(error) })
}

/// Either document, as produced by a roll.
pub fn outcome_json(outcome: &Result<RollResult, Error>) -> Json {
    match outcome {
        Ok(r) => result_json(r),
        Err(e) => error_json(e),
    }
}
